//! Discrete-interval adversary simulation. Each attacker eavesdrops on or
//! jams one AP per interval; the simulator replays a configuration source
//! (static, range schedule, or deployment sequence) against the attackers
//! and reports compromise, outage, and handoff metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rnm::RangeSchedule;
use crate::rtm::{greedy_assignment, Deployment};
use crate::scenario::{Point, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackMode {
    Eavesdrop,
    Jam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Lock onto the nearest initially-sensed AP and never retarget.
    StaticTarget,
    /// Pick a uniformly random sensed AP every interval.
    RandomRetarget,
    /// Keep the current target while it stays sensed, else re-pick randomly.
    StickyUntilLoss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attacker {
    pub pos: [f64; 2],
    pub sense_radius: f64,
    pub mode: AttackMode,
    pub strategy: Strategy,
}

impl Attacker {
    fn position(&self) -> Point {
        Point::new(self.pos[0], self.pos[1])
    }
}

/// One AP per attacker per interval; positions are fixed for the whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    pub attackers: Vec<Attacker>,
}

pub fn adversary_from_json(text: &str) -> Result<AdversaryConfig, SimError> {
    let config: AdversaryConfig = serde_json::from_str(text).map_err(SimError::Parse)?;
    for (a, atk) in config.attackers.iter().enumerate() {
        if !(atk.sense_radius >= 0.0) {
            return Err(SimError::BadAdversary(format!(
                "attacker {a} has negative sense radius"
            )));
        }
    }
    Ok(config)
}

pub fn adversary_to_json(config: &AdversaryConfig) -> String {
    serde_json::to_string_pretty(config).expect("adversary serialization cannot fail")
}

/// What configuration the defender runs during the simulated window.
#[derive(Debug, Clone, Copy)]
pub enum ConfigSource<'a> {
    /// Every AP at its widest range with a fixed greedy assignment.
    Static,
    /// Replay a range schedule interval by interval.
    Range(&'a RangeSchedule),
    /// Replay a sequence of deployments, one per interval.
    Topology(&'a [Deployment]),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("intervals must be positive")]
    BadIntervals,
    #[error("handoff cost {0} outside [0, 1]")]
    BadHandoffCost(f64),
    #[error("configuration covers {have} intervals, {need} requested (pass cyclic to repeat)")]
    ConfigTooShort { have: usize, need: usize },
    #[error("configuration does not fit the scenario: {0}")]
    ShapeMismatch(String),
    #[error("invalid adversary: {0}")]
    BadAdversary(String),
    #[error("parse error: {0}")]
    Parse(#[source] serde_json::Error),
    #[error("reports ran with different parameters: {0}")]
    Mismatched(String),
    #[error("empty seed list")]
    NoSeeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRecord {
    pub attacker: usize,
    /// `None` when nothing is in sense range this interval.
    pub target: Option<usize>,
    pub mode: AttackMode,
    /// Users compromised (eavesdrop) or disconnected (jam) by this attack.
    pub affected_users: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalTrace {
    pub attacks: Vec<AttackRecord>,
    pub compromised: Vec<usize>,
    pub outages: Vec<usize>,
    pub handoffs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub intervals: u32,
    pub users: usize,
    pub compromised_flow_fraction: f64,
    pub jam_outage_fraction: f64,
    pub handoff_count: u64,
    pub throughput_reduction: f64,
    pub per_interval_trace: Vec<IntervalTrace>,
}

/// Defender state for one interval: where the APs are, how far they reach,
/// and who they nominally serve.
struct IntervalConfig {
    positions: Vec<Point>,
    levels: Vec<usize>,
    nominal: Vec<Option<usize>>,
    /// Coverage by explicit per-level sets (range sources) or by the widest
    /// disk at the current position (topology sources).
    geometric: bool,
}

impl IntervalConfig {
    fn covers(&self, scenario: &Scenario, i: usize, k: usize) -> bool {
        if self.geometric {
            let r = scenario.aps[i].max_radius();
            r > 0.0 && self.positions[i].distance(&scenario.users[k].position) <= r
        } else {
            scenario.coverage(i, self.levels[i]).contains(&k)
        }
    }

    fn active_radius(&self, scenario: &Scenario, i: usize) -> f64 {
        scenario.aps[i].ranges[self.levels[i] - 1].radius
    }
}

fn config_at<'a>(
    scenario: &Scenario,
    source: &ConfigSource<'a>,
    static_assignment: &[Option<usize>],
    j: usize,
) -> IntervalConfig {
    let positions: Vec<Point> = match source {
        ConfigSource::Topology(seq) => {
            let d = &seq[j % seq.len()];
            (0..scenario.aps.len()).map(|i| d.position(scenario, i)).collect()
        }
        _ => scenario.aps.iter().map(|a| a.position).collect(),
    };
    let levels: Vec<usize> = match source {
        ConfigSource::Range(sch) => {
            let jj = j % sch.horizon as usize;
            (0..scenario.aps.len()).map(|i| sch.range_of[i][jj]).collect()
        }
        _ => scenario.aps.iter().map(|a| a.ranges.len()).collect(),
    };
    let nominal: Vec<Option<usize>> = match source {
        ConfigSource::Static => static_assignment.to_vec(),
        ConfigSource::Range(sch) => sch.assignment[j % sch.horizon as usize].clone(),
        ConfigSource::Topology(seq) => seq[j % seq.len()].assignment.clone(),
    };
    IntervalConfig {
        positions,
        levels,
        nominal,
        geometric: matches!(source, ConfigSource::Topology(_)),
    }
}

fn check_source(
    scenario: &Scenario,
    source: &ConfigSource<'_>,
    intervals: u32,
    cyclic: bool,
) -> Result<(), SimError> {
    let n = scenario.aps.len();
    let z = scenario.users.len();
    let have = match source {
        ConfigSource::Static => return Ok(()),
        ConfigSource::Range(sch) => {
            if sch.range_of.len() != n || sch.assignment.len() != sch.horizon as usize {
                return Err(SimError::ShapeMismatch("schedule dimensions".into()));
            }
            if sch.range_of.iter().any(|row| row.len() != sch.horizon as usize)
                || sch.assignment.iter().any(|row| row.len() != z)
            {
                return Err(SimError::ShapeMismatch("schedule dimensions".into()));
            }
            for (i, row) in sch.range_of.iter().enumerate() {
                if row.iter().any(|&u| u < 1 || u > scenario.aps[i].ranges.len()) {
                    return Err(SimError::ShapeMismatch(format!("AP {i} range level")));
                }
            }
            sch.horizon as usize
        }
        ConfigSource::Topology(seq) => {
            if seq.is_empty() {
                return Err(SimError::ConfigTooShort {
                    have: 0,
                    need: intervals as usize,
                });
            }
            for d in *seq {
                if d.location_of.len() != n || d.assignment.len() != z {
                    return Err(SimError::ShapeMismatch("deployment dimensions".into()));
                }
                for (i, &c) in d.location_of.iter().enumerate() {
                    if c >= scenario.aps[i].candidate_locations.len() {
                        return Err(SimError::ShapeMismatch(format!(
                            "AP {i} candidate index {c}"
                        )));
                    }
                }
            }
            seq.len()
        }
    };
    if have < intervals as usize && !cyclic {
        return Err(SimError::ConfigTooShort {
            have,
            need: intervals as usize,
        });
    }
    Ok(())
}

/// APs an attacker can currently reach: the active coverage disk intersects
/// the attacker's sense disk.
fn sensed(scenario: &Scenario, config: &IntervalConfig, attacker: &Attacker) -> Vec<usize> {
    (0..scenario.aps.len())
        .filter(|&i| {
            attacker.position().distance(&config.positions[i])
                <= attacker.sense_radius + config.active_radius(scenario, i)
        })
        .collect()
}

pub fn simulate(
    scenario: &Scenario,
    source: ConfigSource<'_>,
    adversary: &AdversaryConfig,
    intervals: u32,
    handoff_cost: f64,
    cyclic: bool,
    seed: u64,
) -> Result<MetricsReport, SimError> {
    if intervals == 0 {
        return Err(SimError::BadIntervals);
    }
    if !(0.0..=1.0).contains(&handoff_cost) {
        return Err(SimError::BadHandoffCost(handoff_cost));
    }
    for (a, atk) in adversary.attackers.iter().enumerate() {
        if !(atk.sense_radius >= 0.0) {
            return Err(SimError::BadAdversary(format!(
                "attacker {a} has negative sense radius"
            )));
        }
    }
    check_source(scenario, &source, intervals, cyclic)?;

    let z = scenario.users.len();
    let static_assignment = match source {
        ConfigSource::Static => {
            let positions: Vec<Point> = scenario.aps.iter().map(|a| a.position).collect();
            greedy_assignment(scenario, &positions)
        }
        _ => vec![None; z],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Current target per attacker; static-target also uses it as the lock.
    let mut targets: Vec<Option<usize>> = vec![None; adversary.attackers.len()];
    let mut prev_eff: Option<Vec<Option<usize>>> = None;
    let mut trace = Vec::with_capacity(intervals as usize);
    let mut compromised_pairs = 0u64;
    let mut outage_pairs = 0u64;
    let mut handoff_count = 0u64;

    for j in 0..intervals as usize {
        let config = config_at(scenario, &source, &static_assignment, j);

        // Target selection, attackers in index order for deterministic RNG use.
        let mut attacks: Vec<AttackRecord> = Vec::with_capacity(adversary.attackers.len());
        for (a, atk) in adversary.attackers.iter().enumerate() {
            let in_range = sensed(scenario, &config, atk);
            let target = match atk.strategy {
                Strategy::StaticTarget => {
                    if j == 0 {
                        targets[a] = in_range
                            .iter()
                            .copied()
                            .min_by(|&p, &q| {
                                let dp = atk.position().distance(&config.positions[p]);
                                let dq = atk.position().distance(&config.positions[q]);
                                dp.partial_cmp(&dq).unwrap().then(p.cmp(&q))
                            });
                    }
                    // The lock persists, but an attack only lands while the
                    // AP is still in sense range.
                    targets[a].filter(|t| in_range.contains(t))
                }
                Strategy::RandomRetarget => {
                    targets[a] = if in_range.is_empty() {
                        None
                    } else {
                        Some(in_range[rng.gen_range(0..in_range.len())])
                    };
                    targets[a]
                }
                Strategy::StickyUntilLoss => {
                    if !targets[a].is_some_and(|t| in_range.contains(&t)) {
                        targets[a] = if in_range.is_empty() {
                            None
                        } else {
                            Some(in_range[rng.gen_range(0..in_range.len())])
                        };
                    }
                    targets[a]
                }
            };
            attacks.push(AttackRecord {
                attacker: a,
                target,
                mode: atk.mode,
                affected_users: Vec::new(),
            });
        }

        let jammed: Vec<usize> = attacks
            .iter()
            .filter(|r| r.mode == AttackMode::Jam)
            .filter_map(|r| r.target)
            .collect();
        let tapped: Vec<usize> = attacks
            .iter()
            .filter(|r| r.mode == AttackMode::Eavesdrop)
            .filter_map(|r| r.target)
            .collect();

        // Jam resolution: displaced users reassociate greedily with the
        // nearest covering non-jammed AP that has spare capacity.
        let mut eff = config.nominal.clone();
        let mut load = vec![0usize; scenario.aps.len()];
        for k in 0..z {
            if let Some(i) = eff[k] {
                if jammed.contains(&i) {
                    eff[k] = None; // displaced; reassigned below
                } else {
                    load[i] += 1;
                }
            }
        }
        let mut interval_handoffs = 0u64;
        let mut outages = Vec::new();
        for k in 0..z {
            let Some(i) = config.nominal[k] else { continue };
            if !jammed.contains(&i) {
                continue;
            }
            let recovery = (0..scenario.aps.len())
                .filter(|&i2| {
                    !jammed.contains(&i2)
                        && config.covers(scenario, i2, k)
                        && load[i2] < scenario.aps[i2].capacity as usize
                })
                .min_by(|&p, &q| {
                    let dp = config.positions[p].distance(&scenario.users[k].position);
                    let dq = config.positions[q].distance(&scenario.users[k].position);
                    dp.partial_cmp(&dq).unwrap().then(p.cmp(&q))
                });
            match recovery {
                Some(i2) => {
                    eff[k] = Some(i2);
                    load[i2] += 1;
                    interval_handoffs += 1;
                }
                None => outages.push(k),
            }
        }

        // Handoffs between intervals: users whose serving AP changed.
        if let Some(prev) = &prev_eff {
            let switches = (0..z)
                .filter(|&k| matches!((prev[k], eff[k]), (Some(p), Some(c)) if p != c))
                .count() as u64;
            // The jam reassociations of this interval are already part of
            // the switch count relative to the previous interval.
            interval_handoffs = switches;
        }
        handoff_count += interval_handoffs;

        let mut compromised: Vec<usize> = (0..z)
            .filter(|&k| eff[k].is_some_and(|i| tapped.contains(&i)))
            .collect();
        compromised.sort_unstable();
        for record in &mut attacks {
            let Some(t) = record.target else { continue };
            record.affected_users = match record.mode {
                AttackMode::Eavesdrop => (0..z).filter(|&k| eff[k] == Some(t)).collect(),
                AttackMode::Jam => outages
                    .iter()
                    .copied()
                    .filter(|&k| config.nominal[k] == Some(t))
                    .collect(),
            };
        }

        compromised_pairs += compromised.len() as u64;
        outage_pairs += outages.len() as u64;
        trace.push(IntervalTrace {
            attacks,
            compromised,
            outages,
            handoffs: interval_handoffs,
        });
        prev_eff = Some(eff);
    }

    let pairs = (z as u64 * intervals as u64) as f64;
    let frac = |count: u64| if z == 0 { 0.0 } else { count as f64 / pairs };
    Ok(MetricsReport {
        intervals,
        users: z,
        compromised_flow_fraction: frac(compromised_pairs),
        jam_outage_fraction: frac(outage_pairs),
        handoff_count,
        throughput_reduction: if z == 0 {
            0.0
        } else {
            handoff_count as f64 * handoff_cost / pairs
        },
        per_interval_trace: trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub baseline_compromised: f64,
    pub mutated_compromised: f64,
    /// `None` (with `undefined` set) when the baseline saw no compromise.
    pub reduction: Option<f64>,
    pub undefined: bool,
}

pub fn compare(baseline: &MetricsReport, mutated: &MetricsReport) -> Result<ComparisonReport, SimError> {
    if baseline.intervals != mutated.intervals || baseline.users != mutated.users {
        return Err(SimError::Mismatched(format!(
            "baseline {}x{} vs mutated {}x{} (users x intervals)",
            baseline.users, baseline.intervals, mutated.users, mutated.intervals
        )));
    }
    let b = baseline.compromised_flow_fraction;
    let m = mutated.compromised_flow_fraction;
    let reduction = (b > 0.0).then(|| (b - m) / b);
    Ok(ComparisonReport {
        baseline_compromised: b,
        mutated_compromised: m,
        reduction,
        undefined: reduction.is_none(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub stderr: f64,
}

impl MetricStats {
    fn of(samples: &[f64]) -> MetricStats {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let stderr = if samples.len() < 2 {
            0.0
        } else {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        MetricStats {
            mean,
            min,
            max,
            stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub seeds: Vec<u64>,
    pub compromised_flow_fraction: MetricStats,
    pub jam_outage_fraction: MetricStats,
    pub handoff_count: MetricStats,
    pub throughput_reduction: MetricStats,
}

pub fn run_monte_carlo(
    scenario: &Scenario,
    source: ConfigSource<'_>,
    adversary: &AdversaryConfig,
    intervals: u32,
    handoff_cost: f64,
    cyclic: bool,
    seeds: &[u64],
) -> Result<MonteCarloStats, SimError> {
    if seeds.is_empty() {
        return Err(SimError::NoSeeds);
    }
    let mut reports = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        reports.push(simulate(
            scenario,
            source,
            adversary,
            intervals,
            handoff_cost,
            cyclic,
            seed,
        )?);
    }
    let col = |f: fn(&MetricsReport) -> f64| {
        MetricStats::of(&reports.iter().map(f).collect::<Vec<_>>())
    };
    Ok(MonteCarloStats {
        seeds: seeds.to_vec(),
        compromised_flow_fraction: col(|r| r.compromised_flow_fraction),
        jam_outage_fraction: col(|r| r.jam_outage_fraction),
        handoff_count: col(|r| r.handoff_count as f64),
        throughput_reduction: col(|r| r.throughput_reduction),
    })
}

/// Per-interval trace as CSV, one row per attacker per interval.
pub fn trace_to_csv(scenario: &Scenario, report: &MetricsReport) -> String {
    let mut out = String::from("interval,attacker,target_ap,mode,compromised_users\n");
    for (j, interval) in report.per_interval_trace.iter().enumerate() {
        for record in &interval.attacks {
            let target = record
                .target
                .map(|i| scenario.aps[i].id.clone())
                .unwrap_or_default();
            let mode = match record.mode {
                AttackMode::Eavesdrop => "eavesdrop",
                AttackMode::Jam => "jam",
            };
            let users = record
                .affected_users
                .iter()
                .map(|&k| scenario.users[k].id.as_str())
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!("{j},{},{target},{mode},{users}\n", record.attacker));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rnm::schedule_rnm;
    use crate::scenario::{derive_coverage, load_scenario};

    fn s0() -> Scenario {
        crate::rnm::tests::s0()
    }

    fn eavesdropper(pos: [f64; 2]) -> AdversaryConfig {
        AdversaryConfig {
            attackers: vec![Attacker {
                pos,
                sense_radius: 1.0,
                mode: AttackMode::Eavesdrop,
                strategy: Strategy::StaticTarget,
            }],
        }
    }

    #[test]
    fn no_attackers_no_compromise() {
        let s = s0();
        let r = simulate(
            &s,
            ConfigSource::Static,
            &AdversaryConfig::default(),
            10,
            0.01,
            false,
            1,
        )
        .unwrap();
        assert_eq!(r.compromised_flow_fraction, 0.0);
        assert_eq!(r.jam_outage_fraction, 0.0);
        assert_eq!(r.handoff_count, 0);
        assert_eq!(r.per_interval_trace.len(), 10);
    }

    #[test]
    fn locked_eavesdropper_on_sole_ap_compromises_everything() {
        let text = r#"{
            "aps": [{"id": "a", "pos": [0, 0], "capacity": 4, "energy_budget": 100,
                     "ranges": [{"radius": 5}]}],
            "users": [{"id": "p1", "pos": [1, 0]}, {"id": "p2", "pos": [2, 0]}],
            "comm_radius": 0
        }"#;
        let s = derive_coverage(load_scenario(text).unwrap());
        let r = simulate(&s, ConfigSource::Static, &eavesdropper([0.0, 0.0]), 5, 0.0, false, 3)
            .unwrap();
        assert_eq!(r.compromised_flow_fraction, 1.0);
    }

    #[test]
    fn s0_alternating_schedule_halves_exposure() {
        // Witness schedule: each user alternates between its near AP and the
        // other AP's wide range.
        let s = s0();
        let schedule = RangeSchedule {
            horizon: 2,
            range_of: vec![vec![2, 1], vec![1, 2]],
            assignment: vec![vec![Some(0), Some(1)], vec![Some(1), Some(0)]],
            energy_used: vec![3.0, 3.0],
        };
        // Attacker beside AP1 always senses it (radius >= 1 every interval).
        let r = simulate(
            &s,
            ConfigSource::Range(&schedule),
            &eavesdropper([0.0, 0.0]),
            10,
            0.01,
            true,
            7,
        )
        .unwrap();
        // Per 2-interval cycle AP1 serves p1 then p2: half the user-intervals.
        assert_eq!(r.compromised_flow_fraction, 0.5);
        // Both users switch APs every interval: 2 handoffs x 9 transitions.
        assert_eq!(r.handoff_count, 18);
        assert_eq!(
            r.throughput_reduction,
            r.handoff_count as f64 * 0.01 / (2.0 * 10.0)
        );
    }

    #[test]
    fn schedule_shorter_than_intervals_needs_cyclic() {
        let s = s0();
        let schedule = schedule_rnm(&s, 2, 1).unwrap();
        let err = simulate(
            &s,
            ConfigSource::Range(&schedule),
            &AdversaryConfig::default(),
            10,
            0.01,
            false,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, SimError::ConfigTooShort { have: 2, need: 10 }));
    }

    #[test]
    fn jam_without_alternative_is_outage() {
        let text = r#"{
            "aps": [{"id": "a", "pos": [0, 0], "capacity": 4, "energy_budget": 100,
                     "ranges": [{"radius": 5}]}],
            "users": [{"id": "p1", "pos": [1, 0]}],
            "comm_radius": 0
        }"#;
        let s = derive_coverage(load_scenario(text).unwrap());
        let adversary = AdversaryConfig {
            attackers: vec![Attacker {
                pos: [0.0, 0.0],
                sense_radius: 1.0,
                mode: AttackMode::Jam,
                strategy: Strategy::StaticTarget,
            }],
        };
        let r = simulate(&s, ConfigSource::Static, &adversary, 4, 0.0, false, 1).unwrap();
        assert_eq!(r.jam_outage_fraction, 1.0);
        assert_eq!(r.compromised_flow_fraction, 0.0);
    }

    #[test]
    fn jam_with_spare_ap_causes_handoffs_not_outage() {
        // Both APs cover both users at full range; jamming AP1 pushes its
        // user onto AP2 every interval (and back, counted across intervals).
        let s = s0();
        let adversary = AdversaryConfig {
            attackers: vec![Attacker {
                pos: [0.0, 0.0],
                sense_radius: 1.0,
                mode: AttackMode::Jam,
                strategy: Strategy::StaticTarget,
            }],
        };
        let r = simulate(&s, ConfigSource::Static, &adversary, 3, 0.5, false, 1).unwrap();
        assert_eq!(r.jam_outage_fraction, 0.0);
        // p1 moves to AP2 in interval 0 and stays: one reassociation total.
        assert_eq!(r.handoff_count, 1);
    }

    #[test]
    fn deterministic_per_seed_and_sensitive_to_seed() {
        let s = s0();
        let schedule = schedule_rnm(&s, 2, 1).unwrap();
        let adversary = AdversaryConfig {
            attackers: vec![Attacker {
                pos: [4.0, 0.0],
                sense_radius: 3.0,
                mode: AttackMode::Eavesdrop,
                strategy: Strategy::RandomRetarget,
            }],
        };
        let run = |seed| {
            simulate(
                &s,
                ConfigSource::Range(&schedule),
                &adversary,
                20,
                0.01,
                true,
                seed,
            )
            .unwrap()
        };
        assert_eq!(run(5), run(5));
        let traces: std::collections::BTreeSet<String> = (0..20)
            .map(|seed| format!("{:?}", run(seed).per_interval_trace))
            .collect();
        assert!(traces.len() > 1);
    }

    #[test]
    fn conservation_and_budget_invariants() {
        let s = s0();
        let schedule = schedule_rnm(&s, 2, 9).unwrap();
        let adversary = AdversaryConfig {
            attackers: vec![
                Attacker {
                    pos: [0.0, 0.0],
                    sense_radius: 2.0,
                    mode: AttackMode::Jam,
                    strategy: Strategy::StickyUntilLoss,
                },
                Attacker {
                    pos: [8.0, 0.0],
                    sense_radius: 2.0,
                    mode: AttackMode::Eavesdrop,
                    strategy: Strategy::RandomRetarget,
                },
            ],
        };
        let r = simulate(&s, ConfigSource::Range(&schedule), &adversary, 12, 0.01, true, 2)
            .unwrap();
        for interval in &r.per_interval_trace {
            assert_eq!(interval.attacks.len(), 2);
            assert!(interval.compromised.len() <= s.users.len());
        }
        let compromised: u64 = r.per_interval_trace.iter().map(|t| t.compromised.len() as u64).sum();
        assert_eq!(
            r.compromised_flow_fraction,
            compromised as f64 / (s.users.len() as u64 * 12) as f64
        );
    }

    #[test]
    fn compare_reduction_and_undefined_flag() {
        let s = s0();
        let empty = AdversaryConfig::default();
        let base = simulate(&s, ConfigSource::Static, &eavesdropper([0.0, 0.0]), 4, 0.0, false, 1)
            .unwrap();
        let quiet = simulate(&s, ConfigSource::Static, &empty, 4, 0.0, false, 1).unwrap();
        let c = compare(&base, &quiet).unwrap();
        assert_eq!(c.reduction, Some(1.0));
        assert!(!c.undefined);
        let c = compare(&quiet, &quiet).unwrap();
        assert!(c.undefined);
        assert_eq!(c.reduction, None);

        let longer = simulate(&s, ConfigSource::Static, &empty, 5, 0.0, false, 1).unwrap();
        assert!(compare(&base, &longer).is_err());
    }

    #[test]
    fn monte_carlo_aggregates() {
        let s = s0();
        let schedule = schedule_rnm(&s, 2, 1).unwrap();
        let adversary = AdversaryConfig {
            attackers: vec![Attacker {
                pos: [4.0, 0.0],
                sense_radius: 3.0,
                mode: AttackMode::Eavesdrop,
                strategy: Strategy::RandomRetarget,
            }],
        };
        let source = ConfigSource::Range(&schedule);
        let single = run_monte_carlo(&s, source, &adversary, 10, 0.01, true, &[4]).unwrap();
        let report = simulate(&s, source, &adversary, 10, 0.01, true, 4).unwrap();
        assert_eq!(single.compromised_flow_fraction.mean, report.compromised_flow_fraction);
        assert_eq!(single.compromised_flow_fraction.stderr, 0.0);

        let dup = run_monte_carlo(&s, source, &adversary, 10, 0.01, true, &[4, 4, 4]).unwrap();
        assert_eq!(dup.compromised_flow_fraction.stderr, 0.0);

        assert!(matches!(
            run_monte_carlo(&s, source, &adversary, 10, 0.01, true, &[]),
            Err(SimError::NoSeeds)
        ));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let s = s0();
        let empty = AdversaryConfig::default();
        assert!(matches!(
            simulate(&s, ConfigSource::Static, &empty, 0, 0.01, false, 1),
            Err(SimError::BadIntervals)
        ));
        assert!(matches!(
            simulate(&s, ConfigSource::Static, &empty, 1, 1.5, false, 1),
            Err(SimError::BadHandoffCost(_))
        ));
    }

    #[test]
    fn adversary_json_round_trip() {
        let config = eavesdropper([1.5, -2.0]);
        let text = adversary_to_json(&config);
        assert_eq!(adversary_from_json(&text).unwrap(), config);
        assert!(adversary_from_json("{\"attackers\": [], \"extra\": 1}").is_err());
        assert!(adversary_from_json(
            "{\"attackers\": [{\"pos\": [0,0], \"sense_radius\": -1, \"mode\": \"jam\", \"strategy\": \"static-target\"}]}"
        )
        .is_err());
    }

    #[test]
    fn csv_trace_shape() {
        let s = s0();
        let r = simulate(&s, ConfigSource::Static, &eavesdropper([0.0, 0.0]), 2, 0.0, false, 1)
            .unwrap();
        let csv = trace_to_csv(&s, &r);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "interval,attacker,target_ap,mode,compromised_users");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,0,ap1,eavesdrop,"));
    }
}
