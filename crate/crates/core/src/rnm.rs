//! Range-mutation scheduling: encode the coverage / unpredictability /
//! capacity / energy constraint system into a solver model and decode the
//! resulting range schedule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::Scenario;
use crate::solver::{
    solve_with_budget, Constraint, Lit, Model, Solution, SolveOutcome, VarId,
};

/// Fixed-point scale for real-valued energy rates and budgets. Rates round
/// up and budgets round down, so the integer constraint never admits a
/// schedule the real-valued one rejects.
pub const ENERGY_SCALE: f64 = 1000.0;

pub fn scale_rate(rate: f64) -> i64 {
    (rate * ENERGY_SCALE).ceil() as i64
}

pub fn scale_budget(budget: f64) -> i64 {
    (budget * ENERGY_SCALE).floor() as i64
}

#[derive(Debug, Clone, Copy)]
pub struct RnmOptions {
    /// How many previous intervals each AP's range must differ from.
    pub lookback: u32,
    pub node_budget: u64,
}

impl Default for RnmOptions {
    fn default() -> Self {
        RnmOptions {
            lookback: 1,
            node_budget: crate::solver::DEFAULT_NODE_BUDGET,
        }
    }
}

/// A satisfying range-mutation schedule over `horizon` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSchedule {
    pub horizon: u32,
    /// `range_of[i][j]`: 1-based range level of AP `i` in interval `j`.
    pub range_of: Vec<Vec<usize>>,
    /// `assignment[j][k]`: AP index serving user `k` in interval `j`.
    /// `None` marks an unassigned user (never produced by the scheduler,
    /// but representable so the validator can flag tampered schedules).
    pub assignment: Vec<Vec<Option<usize>>>,
    /// Per-AP total energy over the horizon.
    pub energy_used: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum RnmError {
    #[error("horizon must be at least 1")]
    BadHorizon,
    #[error("user '{0}' is covered by no (AP, range) pair")]
    UncoveredUser(String),
    #[error("unsatisfiable")]
    Unsat,
    #[error("node budget exceeded before an answer was found")]
    BudgetExceeded,
}

/// Variable map for an encoded instance.
pub struct RnmVars {
    /// `omega[i][j]`: range level of AP `i` in interval `j` (values `1..=g_i`).
    pub omega: Vec<Vec<VarId>>,
    /// `assign[i][j][k]`: 0/1, user `k` served by AP `i` in interval `j`.
    pub assign: Vec<Vec<Vec<VarId>>>,
}

/// Builds the constraint model. The scenario must have derived coverage.
pub fn build_rnm_model(
    scenario: &Scenario,
    horizon: u32,
    options: &RnmOptions,
) -> Result<(Model, RnmVars), RnmError> {
    if horizon < 1 {
        return Err(RnmError::BadHorizon);
    }
    let n = scenario.aps.len();
    let z = scenario.users.len();
    let t = horizon as usize;

    // Structural feasibility: every user must appear in some coverage set.
    for (k, user) in scenario.users.iter().enumerate() {
        let covered = (0..n).any(|i| {
            (1..=scenario.aps[i].ranges.len()).any(|u| scenario.coverage(i, u).contains(&k))
        });
        if !covered {
            return Err(RnmError::UncoveredUser(user.id.clone()));
        }
    }

    let mut model = Model::new();

    let omega: Vec<Vec<VarId>> = (0..n)
        .map(|i| {
            let g = scenario.aps[i].ranges.len() as i64;
            (0..t)
                .map(|_| model.add_variable(1..=g).expect("nonempty range set"))
                .collect()
        })
        .collect();

    let assign: Vec<Vec<Vec<VarId>>> = (0..n)
        .map(|_| (0..t).map(|_| (0..z).map(|_| model.add_bool()).collect()).collect())
        .collect();

    // Coverage: every user reachable by some active (AP, range) pair in every
    // interval. Implied by the assignment constraints but kept for
    // propagation strength.
    for k in 0..z {
        for j in 0..t {
            let mut lits = Vec::new();
            for i in 0..n {
                for u in 1..=scenario.aps[i].ranges.len() {
                    if scenario.coverage(i, u).contains(&k) {
                        lits.push(Lit::Eq(omega[i][j], u as i64));
                    }
                }
            }
            model.add_constraint(Constraint::Clause(lits)).expect("valid vars");
        }
    }

    // Unpredictability: each AP's range differs from its previous `lookback`
    // intervals.
    let lookback = options.lookback.max(1) as usize;
    for i in 0..n {
        for j in 1..t {
            for back in 1..=lookback.min(j) {
                model
                    .add_constraint(Constraint::NeqVar(omega[i][j], omega[i][j - back]))
                    .expect("valid vars");
            }
        }
    }

    // Every user assigned to exactly one AP per interval.
    for j in 0..t {
        for k in 0..z {
            let vars: Vec<VarId> = (0..n).map(|i| assign[i][j][k]).collect();
            model.add_constraint(Constraint::ExactlyOne(vars)).expect("valid vars");
        }
    }

    // Assignment only to an AP whose active range covers the user.
    for i in 0..n {
        for j in 0..t {
            for k in 0..z {
                let clause: Vec<(VarId, i64)> = (1..=scenario.aps[i].ranges.len())
                    .filter(|&u| scenario.coverage(i, u).contains(&k))
                    .map(|u| (omega[i][j], u as i64))
                    .collect();
                model
                    .add_constraint(Constraint::Implies {
                        b: assign[i][j][k],
                        clause,
                    })
                    .expect("valid vars");
            }
        }
    }

    // Capacity per (AP, interval).
    for i in 0..n {
        for j in 0..t {
            let terms: Vec<(i64, VarId)> = (0..z).map(|k| (1, assign[i][j][k])).collect();
            model
                .add_constraint(Constraint::LinearLe {
                    terms,
                    bound: scenario.aps[i].capacity as i64,
                })
                .expect("valid vars");
        }
    }

    // Energy budget per AP, via range-indicator variables.
    for i in 0..n {
        let mut terms = Vec::new();
        for j in 0..t {
            for (u0, range) in scenario.aps[i].ranges.iter().enumerate() {
                let rate = scale_rate(range.energy_rate);
                if rate == 0 {
                    continue;
                }
                let b = model.add_bool();
                model
                    .add_constraint(Constraint::ReifiedEq {
                        b,
                        x: omega[i][j],
                        value: (u0 + 1) as i64,
                    })
                    .expect("valid vars");
                terms.push((rate, b));
            }
        }
        model
            .add_constraint(Constraint::LinearLe {
                terms,
                bound: scale_budget(scenario.aps[i].energy_budget),
            })
            .expect("valid vars");
    }

    Ok((model, RnmVars { omega, assign }))
}

/// Decodes a solver solution into a schedule.
pub fn decode_schedule(scenario: &Scenario, horizon: u32, vars: &RnmVars, sol: &Solution) -> RangeSchedule {
    let n = scenario.aps.len();
    let z = scenario.users.len();
    let t = horizon as usize;
    let range_of: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..t).map(|j| sol.value(vars.omega[i][j]) as usize).collect())
        .collect();
    let assignment: Vec<Vec<Option<usize>>> = (0..t)
        .map(|j| {
            (0..z)
                .map(|k| (0..n).find(|&i| sol.value(vars.assign[i][j][k]) == 1))
                .collect()
        })
        .collect();
    let energy_used = (0..n)
        .map(|i| {
            (0..t)
                .map(|j| scenario.aps[i].ranges[range_of[i][j] - 1].energy_rate)
                .sum()
        })
        .collect();
    RangeSchedule {
        horizon,
        range_of,
        assignment,
        energy_used,
    }
}

/// Finds a satisfying range schedule, randomized by `seed`.
pub fn schedule_rnm(scenario: &Scenario, horizon: u32, seed: u64) -> Result<RangeSchedule, RnmError> {
    schedule_rnm_with(scenario, horizon, seed, &RnmOptions::default())
}

pub fn schedule_rnm_with(
    scenario: &Scenario,
    horizon: u32,
    seed: u64,
    options: &RnmOptions,
) -> Result<RangeSchedule, RnmError> {
    let (model, vars) = build_rnm_model(scenario, horizon, options)?;
    match solve_with_budget(&model, seed, options.node_budget) {
        SolveOutcome::Sat(sol) => Ok(decode_schedule(scenario, horizon, &vars, &sol)),
        SolveOutcome::Unsat => Err(RnmError::Unsat),
        SolveOutcome::BudgetExceeded => Err(RnmError::BudgetExceeded),
    }
}

#[derive(Debug, Error)]
#[error("schedule shape does not match scenario: {0}")]
pub struct ShapeMismatch(pub String);

/// Per-AP energy of a schedule: one interval at level `u` costs that level's
/// energy rate.
pub fn energy_of(scenario: &Scenario, schedule: &RangeSchedule) -> Result<Vec<f64>, ShapeMismatch> {
    let n = scenario.aps.len();
    let t = schedule.horizon as usize;
    if schedule.range_of.len() != n {
        return Err(ShapeMismatch(format!(
            "expected {n} AP rows, found {}",
            schedule.range_of.len()
        )));
    }
    let mut energy = Vec::with_capacity(n);
    for (i, row) in schedule.range_of.iter().enumerate() {
        if row.len() != t {
            return Err(ShapeMismatch(format!(
                "AP {} has {} intervals, expected {t}",
                scenario.aps[i].id,
                row.len()
            )));
        }
        let mut total = 0.0;
        for &u in row {
            if u < 1 || u > scenario.aps[i].ranges.len() {
                return Err(ShapeMismatch(format!(
                    "AP {} has out-of-range level {u}",
                    scenario.aps[i].id
                )));
            }
            total += scenario.aps[i].ranges[u - 1].energy_rate;
        }
        energy.push(total);
    }
    Ok(energy)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub horizon: u32,
    /// N x T matrix of 1-based range indices, AP order as in the scenario.
    pub ranges: Vec<Vec<usize>>,
    /// Per interval: user id -> AP id.
    pub assignment: Vec<BTreeMap<String, String>>,
    /// Per-AP energy totals.
    pub energy: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum ScheduleCodecError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown {kind} id '{id}'")]
    UnknownId { kind: &'static str, id: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub fn schedule_to_json(scenario: &Scenario, schedule: &RangeSchedule) -> String {
    let file = ScheduleFile {
        horizon: schedule.horizon,
        ranges: schedule.range_of.clone(),
        assignment: schedule
            .assignment
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter_map(|(k, ap)| {
                        ap.map(|i| (scenario.users[k].id.clone(), scenario.aps[i].id.clone()))
                    })
                    .collect()
            })
            .collect(),
        energy: schedule.energy_used.clone(),
    };
    serde_json::to_string_pretty(&file).expect("schedule serialization cannot fail")
}

pub fn schedule_from_json(scenario: &Scenario, text: &str) -> Result<RangeSchedule, ScheduleCodecError> {
    let file: ScheduleFile = serde_json::from_str(text)?;
    let t = file.horizon as usize;
    if file.assignment.len() != t {
        return Err(ScheduleCodecError::Shape(format!(
            "assignment has {} intervals, expected {t}",
            file.assignment.len()
        )));
    }
    let z = scenario.users.len();
    let mut assignment = vec![vec![None; z]; t];
    for (j, row) in file.assignment.iter().enumerate() {
        for (user_id, ap_id) in row {
            let k = scenario
                .user_index(user_id)
                .ok_or_else(|| ScheduleCodecError::UnknownId {
                    kind: "user",
                    id: user_id.clone(),
                })?;
            let i = scenario
                .ap_index(ap_id)
                .ok_or_else(|| ScheduleCodecError::UnknownId {
                    kind: "AP",
                    id: ap_id.clone(),
                })?;
            assignment[j][k] = Some(i);
        }
    }
    Ok(RangeSchedule {
        horizon: file.horizon,
        range_of: file.ranges,
        assignment,
        energy_used: file.energy,
    })
}
