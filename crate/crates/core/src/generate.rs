//! Seeded random scenario generation for benchmarks and property tests.
//! Geometry is scaled so generated instances are very likely feasible: the
//! smallest range level of every AP already reaches each user's two nearest
//! APs' distance, capacities leave slack for reassignment, and the
//! communication radius spans a tree over the AP positions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scenario::{derive_coverage, ApSpec, GridSpec, Point, RangeLevel, Scenario, UserSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateParams {
    pub aps: usize,
    pub users: usize,
    pub grid_width: u32,
    pub grid_height: u32,
    pub ranges: usize,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("cannot place {0} users with no APs")]
    NoAps(usize),
    #[error("grid of {cells} cells cannot hold {aps} APs on distinct cells")]
    GridTooSmall { cells: usize, aps: usize },
    #[error("at least one range level is required")]
    NoRanges,
    #[error("grid must be non-empty")]
    EmptyGrid,
}

const DEFAULT_HORIZON: u32 = 10;
/// Movement budget and energy budget headroom relative to the horizon.
const ENERGY_FACTOR: f64 = 2.0;

pub fn generate_scenario(params: &GenerateParams) -> Result<Scenario, GenerateError> {
    if params.grid_width == 0 || params.grid_height == 0 {
        return Err(GenerateError::EmptyGrid);
    }
    if params.ranges == 0 {
        return Err(GenerateError::NoRanges);
    }
    if params.aps == 0 && params.users > 0 {
        return Err(GenerateError::NoAps(params.users));
    }
    let (w, h) = (params.grid_width, params.grid_height);
    let cells = (w as usize) * (h as usize);
    if params.aps > cells {
        return Err(GenerateError::GridTooSmall {
            cells,
            aps: params.aps,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let grid = GridSpec {
        width: w,
        height: h,
        cell_size: 1.0,
    };

    // APs on distinct cells, placed at cell centers.
    let mut all_cells: Vec<(u32, u32)> = (0..w).flat_map(|x| (0..h).map(move |y| (x, y))).collect();
    all_cells.shuffle(&mut rng);
    let ap_cells = &all_cells[..params.aps];
    let ap_positions: Vec<Point> = ap_cells.iter().map(|&c| grid.cell_position(c)).collect();

    // Users uniform over the grid area.
    let users: Vec<UserSpec> = (0..params.users)
        .map(|k| UserSpec {
            id: format!("u{}", k + 1),
            position: Point::new(
                rng.gen_range(0.0..w as f64),
                rng.gen_range(0.0..h as f64),
            ),
        })
        .collect();

    // Base radius: far enough that each user reaches its two nearest APs
    // (or its only AP when N = 1), with a little slack.
    let reach = |p: &Point| {
        let mut d: Vec<f64> = ap_positions.iter().map(|q| p.distance(q)).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d[1.min(d.len() - 1)]
    };
    let base_radius = if params.aps == 0 {
        0.0
    } else {
        let farthest = users
            .iter()
            .map(|u| reach(&u.position))
            .fold(1.0_f64, f64::max);
        farthest * 1.05
    };

    // Levels from R upward: even the lowest level keeps every user in reach
    // of two APs, so feasibility survives any level mix while the radius
    // (and its energy cost) still mutates interval to interval.
    let g = params.ranges;
    let top = 1.0 + 0.25 * (g as f64 - 1.0) / g as f64;
    let ranges: Vec<RangeLevel> = (1..=g)
        .map(|u| {
            let scale = 1.0 + 0.25 * (u as f64 - 1.0) / g as f64;
            RangeLevel {
                radius: base_radius * scale,
                energy_rate: (scale / top).powi(2),
                coverage: None,
            }
        })
        .collect();

    let capacity = if params.aps == 0 {
        1
    } else {
        ((3 * params.users + params.aps - 1) / params.aps).max(1) as u32
    };
    let energy_budget = ENERGY_FACTOR * DEFAULT_HORIZON as f64;

    let aps: Vec<ApSpec> = ap_cells
        .iter()
        .enumerate()
        .map(|(i, &cell)| ApSpec {
            id: format!("ap{}", i + 1),
            position: ap_positions[i],
            ranges: ranges.clone(),
            capacity,
            energy_budget,
            candidate_locations: nearby_cells(&grid, cell, 2),
        })
        .collect();

    // Headroom over the spanning distance: candidates sit within Manhattan 2
    // of home, and an AP traveling between two candidates on a near-shortest
    // route strays at most 5 cells from home, so 2 x 5 cells of slack keeps
    // the home topology connected throughout any relocation.
    let comm_radius = if params.aps < 2 {
        0.0
    } else {
        spanning_radius(&ap_positions) + 10.0 * grid.cell_size
    };
    let scenario = Scenario {
        aps,
        users,
        horizon_default: DEFAULT_HORIZON,
        comm_radius,
        grid: Some(grid),
    };
    Ok(derive_coverage(scenario))
}

/// Centers of grid cells within the given Manhattan distance of `cell`.
fn nearby_cells(grid: &GridSpec, cell: (u32, u32), dist: u32) -> Vec<Point> {
    let mut out = Vec::new();
    for x in cell.0.saturating_sub(dist)..=(cell.0 + dist).min(grid.width - 1) {
        for y in cell.1.saturating_sub(dist)..=(cell.1 + dist).min(grid.height - 1) {
            if x.abs_diff(cell.0) + y.abs_diff(cell.1) <= dist {
                out.push(grid.cell_position((x, y)));
            }
        }
    }
    out
}

/// Smallest radius connecting all positions: the longest edge of a minimum
/// spanning tree, with slack for floating-point comparisons downstream.
fn spanning_radius(positions: &[Point]) -> f64 {
    let n = positions.len();
    if n < 2 {
        return 0.0;
    }
    // Prim's algorithm; n is small.
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    in_tree[0] = true;
    for i in 1..n {
        best[i] = positions[0].distance(&positions[i]);
    }
    let mut longest = 0.0_f64;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&i| !in_tree[i])
            .min_by(|&a, &b| best[a].partial_cmp(&best[b]).unwrap())
            .expect("some node remains");
        longest = longest.max(best[next]);
        in_tree[next] = true;
        for i in 0..n {
            if !in_tree[i] {
                best[i] = best[i].min(positions[next].distance(&positions[i]));
            }
        }
    }
    longest * 1.01
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::validate_scenario;

    fn params(aps: usize, users: usize, seed: u64) -> GenerateParams {
        GenerateParams {
            aps,
            users,
            grid_width: 10,
            grid_height: 10,
            ranges: 3,
            seed,
        }
    }

    #[test]
    fn generated_scenarios_validate() {
        for seed in 0..20 {
            let s = generate_scenario(&params(5, 12, seed)).unwrap();
            assert_eq!(validate_scenario(&s), vec![], "seed {seed}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_scenario(&params(6, 15, 42)).unwrap();
        let b = generate_scenario(&params(6, 15, 42)).unwrap();
        assert_eq!(
            crate::scenario::serialize_scenario(&a),
            crate::scenario::serialize_scenario(&b)
        );
        let c = generate_scenario(&params(6, 15, 43)).unwrap();
        assert_ne!(
            crate::scenario::serialize_scenario(&a),
            crate::scenario::serialize_scenario(&c)
        );
    }

    #[test]
    fn every_user_reaches_two_aps() {
        let s = generate_scenario(&params(5, 30, 7)).unwrap();
        for (k, u) in s.users.iter().enumerate() {
            let within = s
                .aps
                .iter()
                .filter(|a| a.position.distance(&u.position) <= a.max_radius())
                .count();
            assert!(within >= 2, "user {k} reaches only {within} APs");
        }
    }

    #[test]
    fn comm_radius_connects_all_aps() {
        let s = generate_scenario(&params(8, 0, 3)).unwrap();
        let positions: Vec<Point> = s.aps.iter().map(|a| a.position).collect();
        // Union-find-free check: BFS over the comm graph.
        let n = positions.len();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for b in 0..n {
                if !seen[b] && positions[a].distance(&positions[b]) <= s.comm_radius {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn candidates_include_own_cell() {
        let s = generate_scenario(&params(4, 0, 11)).unwrap();
        for ap in &s.aps {
            assert!(ap.candidate_locations.contains(&ap.position));
            assert!(ap.candidate_locations.len() > 1);
        }
    }

    #[test]
    fn impossible_geometry_is_an_error() {
        assert_eq!(
            generate_scenario(&params(0, 1, 0)).unwrap_err(),
            GenerateError::NoAps(1)
        );
        let mut p = params(200, 0, 0);
        p.grid_width = 5;
        p.grid_height = 5;
        assert!(matches!(
            generate_scenario(&p).unwrap_err(),
            GenerateError::GridTooSmall { .. }
        ));
        let mut p = params(2, 2, 0);
        p.ranges = 0;
        assert_eq!(generate_scenario(&p).unwrap_err(), GenerateError::NoRanges);
    }

    #[test]
    fn generated_instances_schedule_cleanly() {
        use crate::rnm::schedule_rnm;
        use crate::validate::check_range_schedule;
        for seed in 0..5 {
            let s = generate_scenario(&params(4, 8, seed)).unwrap();
            let schedule = schedule_rnm(&s, 4, seed).unwrap();
            assert_eq!(check_range_schedule(&s, &schedule).unwrap(), vec![]);
        }
    }
}
