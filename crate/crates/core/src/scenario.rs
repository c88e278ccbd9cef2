//! Scenario data model: APs, users, range levels, coverage sets, and the
//! JSON file format they are loaded from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// One selectable range level of an AP.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeLevel {
    /// Coverage radius in meters. Radius 0 means the AP is off at this level.
    pub radius: f64,
    /// Energy units consumed per interval while at this level.
    pub energy_rate: f64,
    /// Users (by index into `Scenario::users`) inside the disk. `None` until
    /// given explicitly or filled in by [`derive_coverage`].
    pub coverage: Option<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApSpec {
    pub id: String,
    pub position: Point,
    /// Range levels, 1-based index `u` in constraints; radii strictly increasing.
    pub ranges: Vec<RangeLevel>,
    /// Maximum number of associated users.
    pub capacity: u32,
    pub energy_budget: f64,
    /// Positions this AP may occupy (topology mutation); empty when immobile.
    pub candidate_locations: Vec<Point>,
}

impl ApSpec {
    pub fn max_radius(&self) -> f64 {
        self.ranges.iter().map(|r| r.radius).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserSpec {
    pub id: String,
    pub position: Point,
}

/// Movement grid for topology mutation. Cells are indexed `(col, row)` with
/// `0 <= col < width`, `0 <= row < height`; cell `(c, r)` sits at world
/// position `(c * cell_size, r * cell_size)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub width: u32,
    pub height: u32,
    pub cell_size: f64,
}

impl GridSpec {
    pub fn contains(&self, cell: (u32, u32)) -> bool {
        cell.0 < self.width && cell.1 < self.height
    }

    pub fn cell_position(&self, cell: (u32, u32)) -> Point {
        Point::new(cell.0 as f64 * self.cell_size, cell.1 as f64 * self.cell_size)
    }

    /// Maps a world position onto its grid cell; `None` if the position is
    /// off-grid or not on a cell center.
    pub fn cell_of(&self, p: Point) -> Option<(u32, u32)> {
        let c = (p.x / self.cell_size).round();
        let r = (p.y / self.cell_size).round();
        if c < 0.0 || r < 0.0 {
            return None;
        }
        let cell = (c as u32, r as u32);
        if !self.contains(cell) {
            return None;
        }
        let back = self.cell_position(cell);
        if (back.x - p.x).abs() > 1e-9 || (back.y - p.y).abs() > 1e-9 {
            return None;
        }
        Some(cell)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub aps: Vec<ApSpec>,
    pub users: Vec<UserSpec>,
    pub horizon_default: u32,
    /// AP-to-AP communication radius, meters; defines the connectivity graph.
    pub comm_radius: f64,
    pub grid: Option<GridSpec>,
}

impl Scenario {
    pub fn ap_index(&self, id: &str) -> Option<usize> {
        self.aps.iter().position(|a| a.id == id)
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.users.iter().position(|u| u.id == id)
    }

    /// Coverage set of AP `i` at range level `u` (1-based). Panics if the
    /// coverage set has not been derived yet.
    pub fn coverage(&self, i: usize, u: usize) -> &BTreeSet<usize> {
        self.aps[i].ranges[u - 1]
            .coverage
            .as_ref()
            .expect("coverage set not derived; call derive_coverage first")
    }
}

/// A single validation finding: which entity broke which rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub entity: String,
    pub rule: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("semantic error: {0}")]
    Semantic(Issue),
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

fn default_horizon() -> u32 {
    10
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeFile {
    radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    covers: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApFile {
    id: String,
    pos: [f64; 2],
    ranges: Vec<RangeFile>,
    capacity: u32,
    energy_budget: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UserFile {
    id: String,
    pos: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    aps: Vec<ApFile>,
    users: Vec<UserFile>,
    comm_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridSpec>,
    #[serde(default = "default_horizon")]
    horizon: u32,
}

/// Parses and validates a scenario document. Explicit `covers` lists are kept
/// verbatim; ranges without one get their coverage filled by
/// [`derive_coverage`].
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text)?;

    let users: Vec<UserSpec> = file
        .users
        .iter()
        .map(|u| UserSpec {
            id: u.id.clone(),
            position: Point::new(u.pos[0], u.pos[1]),
        })
        .collect();

    let user_index: BTreeMap<&str, usize> = users
        .iter()
        .enumerate()
        .map(|(k, u)| (u.id.as_str(), k))
        .collect();

    let mut aps = Vec::with_capacity(file.aps.len());
    for ap in &file.aps {
        let mut ranges = Vec::with_capacity(ap.ranges.len());
        let max_radius = ap.ranges.iter().map(|r| r.radius).fold(0.0, f64::max);
        for r in &ap.ranges {
            let coverage = match &r.covers {
                None => None,
                Some(ids) => {
                    let mut set = BTreeSet::new();
                    for id in ids {
                        match user_index.get(id.as_str()) {
                            Some(&k) => {
                                set.insert(k);
                            }
                            None => {
                                return Err(ScenarioError::Semantic(Issue {
                                    entity: ap.id.clone(),
                                    rule: format!("coverage references unknown user '{id}'"),
                                }))
                            }
                        }
                    }
                    Some(set)
                }
            };
            let energy_rate = r
                .energy_rate
                .unwrap_or_else(|| default_energy_rate(r.radius, max_radius));
            ranges.push(RangeLevel {
                radius: r.radius,
                energy_rate,
                coverage,
            });
        }
        aps.push(ApSpec {
            id: ap.id.clone(),
            position: Point::new(ap.pos[0], ap.pos[1]),
            ranges,
            capacity: ap.capacity,
            energy_budget: ap.energy_budget,
            candidate_locations: ap
                .candidates
                .as_ref()
                .map(|cs| cs.iter().map(|c| Point::new(c[0], c[1])).collect())
                .unwrap_or_default(),
        });
    }

    let scenario = Scenario {
        aps,
        users,
        horizon_default: file.horizon,
        comm_radius: file.comm_radius,
        grid: file.grid,
    };

    let issues = validate_scenario(&scenario);
    if let Some(first) = issues.into_iter().next() {
        return Err(ScenarioError::Semantic(first));
    }
    Ok(scenario)
}

/// Serializes back to the scenario file format; `load_scenario` on the result
/// reproduces the same model.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        aps: scenario
            .aps
            .iter()
            .map(|ap| ApFile {
                id: ap.id.clone(),
                pos: [ap.position.x, ap.position.y],
                ranges: ap
                    .ranges
                    .iter()
                    .map(|r| RangeFile {
                        radius: r.radius,
                        energy_rate: Some(r.energy_rate),
                        covers: r.coverage.as_ref().map(|set| {
                            set.iter().map(|&k| scenario.users[k].id.clone()).collect()
                        }),
                    })
                    .collect(),
                capacity: ap.capacity,
                energy_budget: ap.energy_budget,
                candidates: if ap.candidate_locations.is_empty() {
                    None
                } else {
                    Some(
                        ap.candidate_locations
                            .iter()
                            .map(|p| [p.x, p.y])
                            .collect(),
                    )
                },
            })
            .collect(),
        users: scenario
            .users
            .iter()
            .map(|u| UserFile {
                id: u.id.clone(),
                pos: [u.position.x, u.position.y],
            })
            .collect(),
        comm_radius: scenario.comm_radius,
        grid: scenario.grid,
        horizon: scenario.horizon_default,
    };
    serde_json::to_string_pretty(&file).expect("scenario serialization cannot fail")
}

/// Transmit power grows with the square of the radius; normalize so the
/// largest level of the AP costs 1.0 per interval.
fn default_energy_rate(radius: f64, max_radius: f64) -> f64 {
    if max_radius <= 0.0 {
        0.0
    } else {
        (radius / max_radius).powi(2)
    }
}

/// Fills every missing coverage set from geometry: user `k` is in `Y_iu` iff
/// its Euclidean distance to AP `i` is at most the level-`u` radius (closed
/// disk, so radius 0 covers nothing). Explicit sets are left untouched.
pub fn derive_coverage(mut scenario: Scenario) -> Scenario {
    for ap in &mut scenario.aps {
        for range in &mut ap.ranges {
            if range.coverage.is_some() {
                continue;
            }
            let set = scenario
                .users
                .iter()
                .enumerate()
                .filter(|(_, u)| {
                    range.radius > 0.0 && ap.position.distance(&u.position) <= range.radius
                })
                .map(|(k, _)| k)
                .collect();
            range.coverage = Some(set);
        }
    }
    scenario
}

/// Checks every type invariant; returns an empty list iff the scenario is
/// well-formed. Issues are data, not failures.
pub fn validate_scenario(scenario: &Scenario) -> Vec<Issue> {
    let mut issues = Vec::new();
    let mut push = |entity: &str, rule: String| {
        issues.push(Issue {
            entity: entity.to_string(),
            rule,
        })
    };

    if scenario.aps.is_empty() {
        push("scenario", "at least one AP required".into());
    }
    if scenario.comm_radius < 0.0 {
        push("scenario", "comm_radius must be nonnegative".into());
    }
    if scenario.horizon_default < 1 {
        push("scenario", "horizon must be positive".into());
    }
    if let Some(grid) = &scenario.grid {
        if grid.width == 0 || grid.height == 0 {
            push("grid", "grid dimensions must be positive".into());
        }
        if grid.cell_size <= 0.0 {
            push("grid", "cell size must be positive".into());
        }
    }

    let mut seen = BTreeSet::new();
    for ap in &scenario.aps {
        if !seen.insert(ap.id.as_str()) {
            push(&ap.id, "duplicate AP id".into());
        }
    }
    let mut seen = BTreeSet::new();
    for u in &scenario.users {
        if !seen.insert(u.id.as_str()) {
            push(&u.id, "duplicate user id".into());
        }
    }

    for ap in &scenario.aps {
        if ap.ranges.is_empty() {
            push(&ap.id, "at least one range level required".into());
        }
        if ap.capacity == 0 {
            push(&ap.id, "capacity must be positive".into());
        }
        if ap.energy_budget < 0.0 {
            push(&ap.id, "energy budget must be nonnegative".into());
        }
        for w in ap.ranges.windows(2) {
            if w[1].radius <= w[0].radius {
                push(&ap.id, "ranges not strictly increasing".into());
            }
            if w[1].energy_rate < w[0].energy_rate {
                push(&ap.id, "energy rate must be nondecreasing in radius".into());
            }
        }
        for (u, range) in ap.ranges.iter().enumerate() {
            if range.radius < 0.0 {
                push(&ap.id, format!("range {} has negative radius", u + 1));
            }
            if range.energy_rate < 0.0 {
                push(&ap.id, format!("range {} has negative energy rate", u + 1));
            }
            if range.radius == 0.0 {
                if let Some(cov) = &range.coverage {
                    if !cov.is_empty() {
                        push(&ap.id, format!("range {} has radius 0 but nonempty coverage", u + 1));
                    }
                }
            }
            if let Some(cov) = &range.coverage {
                for &k in cov {
                    if k >= scenario.users.len() {
                        push(&ap.id, format!("range {} covers unknown user index {k}", u + 1));
                    }
                }
            }
        }
        if !ap.candidate_locations.is_empty() {
            let at_current = ap
                .candidate_locations
                .iter()
                .any(|c| c.distance(&ap.position) < 1e-9);
            if !at_current {
                push(&ap.id, "candidates must include current position".into());
            }
            if let Some(grid) = &scenario.grid {
                for c in &ap.candidate_locations {
                    if grid.cell_of(*c).is_none() {
                        push(&ap.id, format!("candidate {c} is off-grid"));
                    }
                }
            }
        }
    }

    issues
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
            "aps": [{"id": "a1", "pos": [0, 0], "capacity": 1, "energy_budget": 0,
                     "ranges": [{"radius": 0, "covers": []}]}],
            "users": [],
            "comm_radius": 0
        }"#
    }

    #[test]
    fn loads_degenerate_scenario() {
        let s = load_scenario(minimal()).unwrap();
        assert_eq!(s.aps.len(), 1);
        assert_eq!(s.users.len(), 0);
    }

    #[test]
    fn rejects_non_monotone_ranges() {
        let text = r#"{
            "aps": [{"id": "a1", "pos": [0, 0], "capacity": 1, "energy_budget": 1,
                     "ranges": [{"radius": 5}, {"radius": 3}]}],
            "users": [],
            "comm_radius": 0
        }"#;
        let err = load_scenario(text).unwrap_err();
        match err {
            ScenarioError::Semantic(issue) => {
                assert_eq!(issue.rule, "ranges not strictly increasing");
                assert_eq!(issue.entity, "a1");
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = r#"{"aps": [], "users": [], "comm_radius": 0, "extra": 1}"#;
        assert!(matches!(load_scenario(text), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn rejects_dangling_user_reference() {
        let text = r#"{
            "aps": [{"id": "a1", "pos": [0, 0], "capacity": 1, "energy_budget": 1,
                     "ranges": [{"radius": 2, "covers": ["ghost"]}]}],
            "users": [],
            "comm_radius": 0
        }"#;
        assert!(matches!(load_scenario(text), Err(ScenarioError::Semantic(_))));
    }

    #[test]
    fn derive_coverage_boundary_is_inclusive() {
        let text = r#"{
            "aps": [{"id": "a1", "pos": [0, 0], "capacity": 1, "energy_budget": 1,
                     "ranges": [{"radius": 5}]}],
            "users": [{"id": "u1", "pos": [3, 4]}],
            "comm_radius": 0
        }"#;
        let s = derive_coverage(load_scenario(text).unwrap());
        assert_eq!(s.coverage(0, 1), &BTreeSet::from([0]));
    }

    #[test]
    fn derive_coverage_radius_zero_is_empty() {
        let text = r#"{
            "aps": [{"id": "a1", "pos": [0, 0], "capacity": 1, "energy_budget": 1,
                     "ranges": [{"radius": 0}]}],
            "users": [{"id": "u1", "pos": [0, 0]}],
            "comm_radius": 0
        }"#;
        let s = derive_coverage(load_scenario(text).unwrap());
        assert!(s.coverage(0, 1).is_empty());
    }

    #[test]
    fn validate_flags_zero_capacity() {
        let mut s = derive_coverage(load_scenario(minimal()).unwrap());
        s.aps[0].capacity = 0;
        let issues = validate_scenario(&s);
        assert!(issues.iter().any(|i| i.rule == "capacity must be positive"));
    }

    #[test]
    fn validate_flags_candidates_missing_current() {
        let mut s = load_scenario(minimal()).unwrap();
        s.aps[0].candidate_locations = vec![Point::new(1.0, 0.0)];
        let issues = validate_scenario(&s);
        assert!(issues
            .iter()
            .any(|i| i.rule == "candidates must include current position"));
    }

    #[test]
    fn default_energy_rate_is_square_law() {
        let text = r#"{
            "aps": [{"id": "a1", "pos": [0, 0], "capacity": 1, "energy_budget": 1,
                     "ranges": [{"radius": 2}, {"radius": 4}]}],
            "users": [],
            "comm_radius": 0
        }"#;
        let s = load_scenario(text).unwrap();
        assert!((s.aps[0].ranges[0].energy_rate - 0.25).abs() < 1e-12);
        assert!((s.aps[0].ranges[1].energy_rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_identity() {
        let text = r#"{
            "aps": [{"id": "a1", "pos": [0.5, 1.5], "capacity": 3, "energy_budget": 7.25,
                     "ranges": [{"radius": 2, "energy_rate": 0.5, "covers": ["u1"]}, {"radius": 4}],
                     "candidates": [[0.5, 1.5], [1.5, 1.5]]}],
            "users": [{"id": "u1", "pos": [1, 1]}],
            "comm_radius": 3.5,
            "horizon": 4
        }"#;
        let s = load_scenario(text).unwrap();
        let s2 = load_scenario(&serialize_scenario(&s)).unwrap();
        assert_eq!(s, s2);
    }
}
