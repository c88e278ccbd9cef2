//! Solver-free checking of schedules, deployments, and movement plans, plus
//! exhaustive enumeration oracles for small instances. Every constraint is
//! re-implemented here from its definition; nothing is shared with the
//! solver, so the two sides can check each other.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::rnm::{RangeSchedule, ShapeMismatch};
use crate::rtm::{manhattan, Deployment, MovementPlan};
use crate::scenario::{Point, Scenario};

/// Which constraint a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintName {
    Energy,
    Coverage,
    Unpredictability,
    AssignmentExactlyOne,
    AssignmentInRange,
    Capacity,
    DeploymentCoverage,
    DeploymentDelta,
    Connectivity,
    StepEndpoints,
    StepAdjacency,
    MovementEnergy,
    StepConnectivity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub name: ConstraintName,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub k: Option<usize>,
    pub detail: String,
}

impl Violation {
    fn new(
        name: ConstraintName,
        i: Option<usize>,
        j: Option<usize>,
        k: Option<usize>,
        detail: String,
    ) -> Self {
        Violation {
            name,
            i,
            j,
            k,
            detail,
        }
    }
}

fn sort_violations(mut v: Vec<Violation>) -> Vec<Violation> {
    v.sort_by(|a, b| (a.name, a.i, a.j, a.k).cmp(&(b.name, b.i, b.j, b.k)));
    v
}

/// Slack for summed floating-point energy comparisons.
const ENERGY_EPS: f64 = 1e-9;

/// Checks a range schedule against every range-mutation constraint.
/// Complete: reports every violated instance, not just the first.
pub fn check_range_schedule(
    scenario: &Scenario,
    schedule: &RangeSchedule,
) -> Result<Vec<Violation>, ShapeMismatch> {
    let n = scenario.aps.len();
    let z = scenario.users.len();
    let t = schedule.horizon as usize;
    if schedule.range_of.len() != n {
        return Err(ShapeMismatch(format!(
            "expected {n} AP rows, found {}",
            schedule.range_of.len()
        )));
    }
    for (i, row) in schedule.range_of.iter().enumerate() {
        if row.len() != t {
            return Err(ShapeMismatch(format!(
                "AP row {i} has {} intervals, expected {t}",
                row.len()
            )));
        }
        for &u in row {
            if u < 1 || u > scenario.aps[i].ranges.len() {
                return Err(ShapeMismatch(format!("AP row {i} has invalid level {u}")));
            }
        }
    }
    if schedule.assignment.len() != t {
        return Err(ShapeMismatch(format!(
            "assignment has {} intervals, expected {t}",
            schedule.assignment.len()
        )));
    }
    for (j, row) in schedule.assignment.iter().enumerate() {
        if row.len() != z {
            return Err(ShapeMismatch(format!(
                "assignment interval {j} has {} users, expected {z}",
                row.len()
            )));
        }
        for ap in row.iter().flatten() {
            if *ap >= n {
                return Err(ShapeMismatch(format!(
                    "assignment interval {j} references AP index {ap}"
                )));
            }
        }
    }

    let mut violations = Vec::new();
    let level = |i: usize, j: usize| schedule.range_of[i][j];

    // Energy budget per AP.
    for i in 0..n {
        let total: f64 = (0..t)
            .map(|j| scenario.aps[i].ranges[level(i, j) - 1].energy_rate)
            .sum();
        if total > scenario.aps[i].energy_budget + ENERGY_EPS {
            violations.push(Violation::new(
                ConstraintName::Energy,
                Some(i),
                None,
                None,
                format!(
                    "AP {} uses {total} of budget {}",
                    scenario.aps[i].id, scenario.aps[i].energy_budget
                ),
            ));
        }
    }

    // Coverage: every user inside some active disk every interval.
    for j in 0..t {
        for k in 0..z {
            let covered = (0..n).any(|i| scenario.coverage(i, level(i, j)).contains(&k));
            if !covered {
                violations.push(Violation::new(
                    ConstraintName::Coverage,
                    None,
                    Some(j),
                    Some(k),
                    format!("user {} uncovered in interval {j}", scenario.users[k].id),
                ));
            }
        }
    }

    // Unpredictability: consecutive intervals differ.
    for i in 0..n {
        for j in 0..t.saturating_sub(1) {
            if level(i, j) == level(i, j + 1) {
                violations.push(Violation::new(
                    ConstraintName::Unpredictability,
                    Some(i),
                    Some(j),
                    None,
                    format!(
                        "AP {} keeps level {} across intervals {j} and {}",
                        scenario.aps[i].id,
                        level(i, j),
                        j + 1
                    ),
                ));
            }
        }
    }

    // Assignment: exactly one AP per user, inside its active range, within
    // capacity.
    for j in 0..t {
        for k in 0..z {
            match schedule.assignment[j][k] {
                None => violations.push(Violation::new(
                    ConstraintName::AssignmentExactlyOne,
                    None,
                    Some(j),
                    Some(k),
                    format!("user {} unassigned in interval {j}", scenario.users[k].id),
                )),
                Some(i) => {
                    if !scenario.coverage(i, level(i, j)).contains(&k) {
                        violations.push(Violation::new(
                            ConstraintName::AssignmentInRange,
                            Some(i),
                            Some(j),
                            Some(k),
                            format!(
                                "user {} assigned to AP {} outside its active range",
                                scenario.users[k].id, scenario.aps[i].id
                            ),
                        ));
                    }
                }
            }
        }
        for i in 0..n {
            let load = (0..z)
                .filter(|&k| schedule.assignment[j][k] == Some(i))
                .count();
            if load > scenario.aps[i].capacity as usize {
                violations.push(Violation::new(
                    ConstraintName::Capacity,
                    Some(i),
                    Some(j),
                    None,
                    format!(
                        "AP {} serves {load} users over capacity {} in interval {j}",
                        scenario.aps[i].id, scenario.aps[i].capacity
                    ),
                ));
            }
        }
    }

    Ok(sort_violations(violations))
}

/// Connectivity of positions under the communication radius, by traversal
/// from the lowest-indexed AP. Returns the unreachable indices.
fn unreachable_aps(positions: &[Point], comm_radius: f64) -> Vec<usize> {
    let n = positions.len();
    if n == 0 {
        return Vec::new();
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for b in 0..n {
            if !seen[b] && positions[a].distance(&positions[b]) <= comm_radius {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    (0..n).filter(|&i| !seen[i]).collect()
}

/// Checks a phase-1 deployment transition.
pub fn check_deployment(
    scenario: &Scenario,
    old: &Deployment,
    new: &Deployment,
    delta: u32,
) -> Result<Vec<Violation>, ShapeMismatch> {
    let n = scenario.aps.len();
    let z = scenario.users.len();
    for d in [old, new] {
        if d.location_of.len() != n {
            return Err(ShapeMismatch(format!(
                "deployment has {} APs, expected {n}",
                d.location_of.len()
            )));
        }
        for (i, &c) in d.location_of.iter().enumerate() {
            if c >= scenario.aps[i].candidate_locations.len() {
                return Err(ShapeMismatch(format!(
                    "AP {} has no candidate index {c}",
                    scenario.aps[i].id
                )));
            }
        }
        if d.assignment.len() != z {
            return Err(ShapeMismatch(format!(
                "deployment assigns {} users, expected {z}",
                d.assignment.len()
            )));
        }
        for ap in d.assignment.iter().flatten() {
            if *ap >= n {
                return Err(ShapeMismatch(format!("assignment references AP index {ap}")));
            }
        }
    }

    let positions: Vec<Point> = (0..n).map(|i| new.position(scenario, i)).collect();
    let mut violations = Vec::new();

    for k in 0..z {
        let user = &scenario.users[k];
        let covered = (0..n).any(|i| {
            let r = scenario.aps[i].max_radius();
            r > 0.0 && positions[i].distance(&user.position) <= r
        });
        if !covered {
            violations.push(Violation::new(
                ConstraintName::DeploymentCoverage,
                None,
                None,
                Some(k),
                format!("user {} uncovered by the new deployment", user.id),
            ));
        }
        match new.assignment[k] {
            None => violations.push(Violation::new(
                ConstraintName::AssignmentExactlyOne,
                None,
                None,
                Some(k),
                format!("user {} unassigned", user.id),
            )),
            Some(i) => {
                let r = scenario.aps[i].max_radius();
                if !(r > 0.0 && positions[i].distance(&user.position) <= r) {
                    violations.push(Violation::new(
                        ConstraintName::AssignmentInRange,
                        Some(i),
                        None,
                        Some(k),
                        format!(
                            "user {} assigned to AP {} outside its range",
                            user.id, scenario.aps[i].id
                        ),
                    ));
                }
            }
        }
    }

    for i in 0..n {
        let load = (0..z).filter(|&k| new.assignment[k] == Some(i)).count();
        if load > scenario.aps[i].capacity as usize {
            violations.push(Violation::new(
                ConstraintName::Capacity,
                Some(i),
                None,
                None,
                format!(
                    "AP {} serves {load} users over capacity {}",
                    scenario.aps[i].id, scenario.aps[i].capacity
                ),
            ));
        }
    }

    let moved = (0..n)
        .filter(|&i| new.location_of[i] != old.location_of[i])
        .count();
    if moved < delta as usize {
        violations.push(Violation::new(
            ConstraintName::DeploymentDelta,
            None,
            None,
            None,
            format!("{moved} APs moved, threshold is {delta}"),
        ));
    }

    for i in unreachable_aps(&positions, scenario.comm_radius) {
        violations.push(Violation::new(
            ConstraintName::Connectivity,
            Some(i),
            None,
            None,
            format!("AP {} unreachable from the root AP", scenario.aps[i].id),
        ));
    }

    Ok(sort_violations(violations))
}

/// Checks a phase-2 movement plan between two deployments.
pub fn check_movement(
    scenario: &Scenario,
    plan: &MovementPlan,
    from: &Deployment,
    to: &Deployment,
) -> Result<Vec<Violation>, ShapeMismatch> {
    let grid = scenario
        .grid
        .as_ref()
        .ok_or_else(|| ShapeMismatch("scenario has no movement grid".into()))?;
    let n = scenario.aps.len();
    let b = plan.steps as usize;
    if b < 1 {
        return Err(ShapeMismatch("plan has zero steps".into()));
    }
    if plan.path_of.len() != n {
        return Err(ShapeMismatch(format!(
            "plan has {} AP paths, expected {n}",
            plan.path_of.len()
        )));
    }
    for (i, path) in plan.path_of.iter().enumerate() {
        if path.len() != b {
            return Err(ShapeMismatch(format!(
                "AP {} path has {} steps, expected {b}",
                scenario.aps[i].id,
                path.len()
            )));
        }
        for &cell in path {
            if !grid.contains(cell) {
                return Err(ShapeMismatch(format!(
                    "AP {} path leaves the grid at {cell:?}",
                    scenario.aps[i].id
                )));
            }
        }
    }

    let mut violations = Vec::new();

    for i in 0..n {
        let start = grid.cell_of(from.position(scenario, i));
        let goal = grid.cell_of(to.position(scenario, i));
        let path = &plan.path_of[i];
        if start != Some(path[0]) || goal != Some(path[b - 1]) {
            violations.push(Violation::new(
                ConstraintName::StepEndpoints,
                Some(i),
                None,
                None,
                format!(
                    "AP {} path runs {:?} -> {:?}, deployments say {start:?} -> {goal:?}",
                    scenario.aps[i].id,
                    path[0],
                    path[b - 1]
                ),
            ));
        }
        for j in 0..b - 1 {
            if manhattan(path[j], path[j + 1]) > 1 {
                violations.push(Violation::new(
                    ConstraintName::StepAdjacency,
                    Some(i),
                    Some(j),
                    None,
                    format!(
                        "AP {} jumps from {:?} to {:?} at step {j}",
                        scenario.aps[i].id,
                        path[j],
                        path[j + 1]
                    ),
                ));
            }
        }
        let moves = path.windows(2).filter(|w| w[0] != w[1]).count();
        if moves as f64 > scenario.aps[i].energy_budget {
            violations.push(Violation::new(
                ConstraintName::MovementEnergy,
                Some(i),
                None,
                None,
                format!(
                    "AP {} makes {moves} moves, budget {}",
                    scenario.aps[i].id, scenario.aps[i].energy_budget
                ),
            ));
        }
    }

    for j in 0..b {
        let positions: Vec<Point> = (0..n)
            .map(|i| grid.cell_position(plan.path_of[i][j]))
            .collect();
        for i in unreachable_aps(&positions, scenario.comm_radius) {
            violations.push(Violation::new(
                ConstraintName::StepConnectivity,
                Some(i),
                Some(j),
                None,
                format!(
                    "AP {} unreachable from the root AP at step {j}",
                    scenario.aps[i].id
                ),
            ));
        }
    }

    Ok(sort_violations(violations))
}

// ---------------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq)]
#[error("enumeration guard exceeded ({0} combinations explored)")]
pub struct GuardExceeded(pub u64);

const GUARD: u64 = 1_000_000;

#[derive(Debug)]
pub struct RnmEnumeration {
    pub count: u64,
    pub schedules: Vec<RangeSchedule>,
}

/// Enumerates every satisfying range schedule by exhaustion, judging each
/// candidate with [`check_range_schedule`] only.
pub fn brute_force_rnm(scenario: &Scenario, horizon: u32) -> Result<RnmEnumeration, GuardExceeded> {
    let n = scenario.aps.len();
    let z = scenario.users.len();
    let t = horizon as usize;
    let mut explored = 0u64;
    let mut schedules = Vec::new();

    // Odometer over range matrices.
    let sizes: Vec<usize> = (0..n)
        .flat_map(|i| std::iter::repeat(scenario.aps[i].ranges.len()).take(t))
        .collect();
    let mut matrix_odo = vec![0usize; sizes.len()];
    'matrices: loop {
        let range_of: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..t).map(|j| matrix_odo[i * t + j] + 1).collect())
            .collect();

        // Candidate serving APs per (interval, user) under this matrix; any
        // AP not covering the user would fail the in-range check anyway.
        let mut candidates: Vec<Vec<Vec<usize>>> = Vec::with_capacity(t);
        let mut feasible = true;
        for j in 0..t {
            let mut row = Vec::with_capacity(z);
            for k in 0..z {
                let c: Vec<usize> = (0..n)
                    .filter(|&i| scenario.coverage(i, range_of[i][j]).contains(&k))
                    .collect();
                if c.is_empty() {
                    feasible = false;
                }
                row.push(c);
            }
            candidates.push(row);
        }

        if feasible {
            let slots: Vec<&Vec<usize>> = candidates.iter().flatten().collect();
            let mut assign_odo = vec![0usize; slots.len()];
            loop {
                explored += 1;
                if explored > GUARD {
                    return Err(GuardExceeded(explored));
                }
                let assignment: Vec<Vec<Option<usize>>> = (0..t)
                    .map(|j| {
                        (0..z)
                            .map(|k| Some(slots[j * z + k][assign_odo[j * z + k]]))
                            .collect()
                    })
                    .collect();
                let schedule = RangeSchedule {
                    horizon,
                    range_of: range_of.clone(),
                    assignment,
                    energy_used: (0..n)
                        .map(|i| {
                            (0..t)
                                .map(|j| scenario.aps[i].ranges[range_of[i][j] - 1].energy_rate)
                                .sum()
                        })
                        .collect(),
                };
                if check_range_schedule(scenario, &schedule)
                    .expect("enumerated schedules are well-shaped")
                    .is_empty()
                {
                    schedules.push(schedule);
                }
                if !advance(&mut assign_odo, &slots.iter().map(|c| c.len()).collect::<Vec<_>>()) {
                    break;
                }
            }
        } else {
            explored += 1;
            if explored > GUARD {
                return Err(GuardExceeded(explored));
            }
        }

        if !advance(&mut matrix_odo, &sizes) {
            break 'matrices;
        }
    }
    Ok(RnmEnumeration {
        count: schedules.len() as u64,
        schedules,
    })
}

fn advance(odo: &mut [usize], sizes: &[usize]) -> bool {
    for pos in (0..odo.len()).rev() {
        odo[pos] += 1;
        if odo[pos] < sizes[pos] {
            return true;
        }
        odo[pos] = 0;
    }
    false
}

#[derive(Debug)]
pub struct DeploymentEnumeration {
    pub count: u64,
    pub deployments: Vec<Deployment>,
}

/// Enumerates every satisfying (placement, assignment) pair by exhaustion,
/// judging each with [`check_deployment`] only.
pub fn brute_force_deployment(
    scenario: &Scenario,
    current: &Deployment,
    delta: u32,
) -> Result<DeploymentEnumeration, GuardExceeded> {
    let n = scenario.aps.len();
    let z = scenario.users.len();
    let mut explored = 0u64;
    let mut deployments = Vec::new();

    let sizes: Vec<usize> = (0..n)
        .map(|i| scenario.aps[i].candidate_locations.len())
        .collect();
    if sizes.iter().any(|&s| s == 0) {
        return Ok(DeploymentEnumeration {
            count: 0,
            deployments,
        });
    }
    let mut placement_odo = vec![0usize; n];
    'placements: loop {
        let location_of = placement_odo.clone();
        let positions: Vec<Point> = (0..n)
            .map(|i| scenario.aps[i].candidate_locations[location_of[i]])
            .collect();
        let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(z);
        let mut feasible = true;
        for k in 0..z {
            let c: Vec<usize> = (0..n)
                .filter(|&i| {
                    let r = scenario.aps[i].max_radius();
                    r > 0.0 && positions[i].distance(&scenario.users[k].position) <= r
                })
                .collect();
            if c.is_empty() {
                feasible = false;
            }
            candidates.push(c);
        }

        if feasible {
            let sizes: Vec<usize> = candidates.iter().map(|c| c.len()).collect();
            let mut assign_odo = vec![0usize; z];
            loop {
                explored += 1;
                if explored > GUARD {
                    return Err(GuardExceeded(explored));
                }
                let deployment = Deployment {
                    location_of: location_of.clone(),
                    assignment: (0..z).map(|k| Some(candidates[k][assign_odo[k]])).collect(),
                };
                if check_deployment(scenario, current, &deployment, delta)
                    .expect("enumerated deployments are well-shaped")
                    .is_empty()
                {
                    deployments.push(deployment);
                }
                if !advance(&mut assign_odo, &sizes) {
                    break;
                }
            }
        } else {
            explored += 1;
            if explored > GUARD {
                return Err(GuardExceeded(explored));
            }
        }

        if !advance(&mut placement_odo, &sizes) {
            break 'placements;
        }
    }
    Ok(DeploymentEnumeration {
        count: deployments.len() as u64,
        deployments,
    })
}
