//! Depth-first backtracking search with constraint propagation.
//!
//! Variable order is smallest-domain-first with ties broken by a seeded
//! shuffle; value order is a seeded shuffle. The same (model, seed) pair
//! always produces the same outcome.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Constraint, Lit, Model, Solution, VarId};

/// Default search-node budget for [`solve`].
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Sat(Solution),
    Unsat,
    /// The node budget ran out before the search finished. Distinct from
    /// Unsat: nothing is known about satisfiability.
    BudgetExceeded,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveAllError {
    #[error("solution limit {0} exceeded")]
    LimitExceeded(usize),
}

/// Finds one satisfying assignment, or proves there is none.
pub fn solve(model: &Model, seed: u64) -> SolveOutcome {
    solve_with_budget(model, seed, DEFAULT_NODE_BUDGET)
}

pub fn solve_with_budget(model: &Model, seed: u64, budget: u64) -> SolveOutcome {
    let mut engine = Engine::new(model, Some(seed), budget);
    match engine.run(None) {
        RunResult::Solutions(mut sols) => match sols.pop() {
            Some(s) => SolveOutcome::Sat(s),
            None => SolveOutcome::Unsat,
        },
        RunResult::Budget => SolveOutcome::BudgetExceeded,
        RunResult::Limit => unreachable!("no solution limit in solve"),
    }
}

/// Enumerates every satisfying total assignment, in a deterministic order.
/// Intended for small (test-sized) models; errors out if more than `limit`
/// solutions exist.
pub fn solve_all(model: &Model, limit: usize) -> Result<Vec<Solution>, SolveAllError> {
    let mut engine = Engine::new(model, None, u64::MAX);
    match engine.run(Some(limit)) {
        RunResult::Solutions(sols) => Ok(sols),
        RunResult::Limit => Err(SolveAllError::LimitExceeded(limit)),
        RunResult::Budget => unreachable!("no budget in solve_all"),
    }
}

enum RunResult {
    Solutions(Vec<Solution>),
    Budget,
    Limit,
}

struct Conflict;

struct Frame {
    var: usize,
    values: Vec<i64>,
    next: usize,
    trail_mark: usize,
    cursor: usize,
}

struct Engine<'m> {
    model: &'m Model,
    /// Per-variable value storage; the live domain is the prefix of length
    /// `len[v]`. Removal swaps the value to the end of the prefix, so
    /// restoring is just growing the prefix back.
    values: Vec<Vec<i64>>,
    len: Vec<usize>,
    trail: Vec<u32>,
    watchers: Vec<Vec<u32>>,
    queue: VecDeque<u32>,
    in_queue: Vec<bool>,
    order: Vec<u32>,
    rng: Option<ChaCha8Rng>,
    nodes: u64,
    budget: u64,
}

impl<'m> Engine<'m> {
    fn new(model: &'m Model, seed: Option<u64>, budget: u64) -> Self {
        let n = model.num_vars();
        let values: Vec<Vec<i64>> = (0..n).map(|v| model.domain(VarId(v)).to_vec()).collect();
        let len = values.iter().map(|d| d.len()).collect();
        let mut watchers = vec![Vec::new(); n];
        for (ci, c) in model.constraints().iter().enumerate() {
            let mut vs = c.vars();
            vs.sort_unstable();
            vs.dedup();
            for v in vs {
                watchers[v.0].push(ci as u32);
            }
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        Engine {
            model,
            values,
            len,
            trail: Vec::new(),
            watchers,
            queue: VecDeque::new(),
            in_queue: vec![false; model.constraints().len()],
            order,
            rng,
            nodes: 0,
            budget,
        }
    }

    fn dom(&self, v: usize) -> &[i64] {
        &self.values[v][..self.len[v]]
    }

    fn is_fixed(&self, v: usize) -> bool {
        self.len[v] == 1
    }

    fn fixed_val(&self, v: usize) -> i64 {
        debug_assert!(self.is_fixed(v));
        self.values[v][0]
    }

    fn dom_min(&self, v: usize) -> i64 {
        *self.dom(v).iter().min().expect("nonempty domain")
    }

    fn dom_max(&self, v: usize) -> i64 {
        *self.dom(v).iter().max().expect("nonempty domain")
    }

    fn contains(&self, v: usize, val: i64) -> bool {
        self.dom(v).contains(&val)
    }

    fn enqueue_watchers(&mut self, v: usize) {
        for i in 0..self.watchers[v].len() {
            let ci = self.watchers[v][i];
            if !self.in_queue[ci as usize] {
                self.in_queue[ci as usize] = true;
                self.queue.push_back(ci);
            }
        }
    }

    fn remove(&mut self, v: usize, val: i64) -> Result<bool, Conflict> {
        let live = self.len[v];
        let pos = match self.values[v][..live].iter().position(|&x| x == val) {
            Some(p) => p,
            None => return Ok(false),
        };
        self.values[v].swap(pos, live - 1);
        self.len[v] = live - 1;
        self.trail.push(v as u32);
        if self.len[v] == 0 {
            return Err(Conflict);
        }
        self.enqueue_watchers(v);
        Ok(true)
    }

    fn assign(&mut self, v: usize, val: i64) -> Result<(), Conflict> {
        debug_assert!(self.contains(v, val));
        let others: Vec<i64> = self.dom(v).iter().copied().filter(|&x| x != val).collect();
        for x in others {
            self.remove(v, x)?;
        }
        Ok(())
    }

    fn restore_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail entry") as usize;
            self.len[v] += 1;
        }
        self.queue.clear();
        self.in_queue.iter_mut().for_each(|b| *b = false);
    }

    fn propagate_all(&mut self) -> Result<(), Conflict> {
        for ci in 0..self.model.constraints().len() {
            if !self.in_queue[ci] {
                self.in_queue[ci] = true;
                self.queue.push_back(ci as u32);
            }
        }
        self.propagate()
    }

    fn propagate(&mut self) -> Result<(), Conflict> {
        while let Some(ci) = self.queue.pop_front() {
            self.in_queue[ci as usize] = false;
            if let Err(c) = self.propagate_one(ci as usize) {
                self.queue.clear();
                self.in_queue.iter_mut().for_each(|b| *b = false);
                return Err(c);
            }
        }
        Ok(())
    }

    fn propagate_one(&mut self, ci: usize) -> Result<(), Conflict> {
        let model = self.model;
        match &model.constraints()[ci] {
            Constraint::EqConst(x, c) => {
                if !self.contains(x.0, *c) {
                    return Err(Conflict);
                }
                self.assign(x.0, *c)
            }
            Constraint::EqVar(x, y) => {
                let (x, y) = (x.0, y.0);
                let gone_x: Vec<i64> = self
                    .dom(x)
                    .iter()
                    .copied()
                    .filter(|&v| !self.contains(y, v))
                    .collect();
                for v in gone_x {
                    self.remove(x, v)?;
                }
                let gone_y: Vec<i64> = self
                    .dom(y)
                    .iter()
                    .copied()
                    .filter(|&v| !self.contains(x, v))
                    .collect();
                for v in gone_y {
                    self.remove(y, v)?;
                }
                Ok(())
            }
            Constraint::NeqVar(x, y) => {
                let (x, y) = (x.0, y.0);
                if x == y {
                    return Err(Conflict);
                }
                if self.is_fixed(x) {
                    self.remove(y, self.fixed_val(x))?;
                }
                if self.is_fixed(y) {
                    self.remove(x, self.fixed_val(y))?;
                }
                Ok(())
            }
            Constraint::Member(x, set) => {
                let x = x.0;
                let gone: Vec<i64> = self
                    .dom(x)
                    .iter()
                    .copied()
                    .filter(|v| !set.contains(v))
                    .collect();
                for v in gone {
                    self.remove(x, v)?;
                }
                Ok(())
            }
            Constraint::LinearLe { terms, bound } => {
                let mut min_sum: i64 = 0;
                for &(w, v) in terms {
                    min_sum += if w >= 0 {
                        w * self.dom_min(v.0)
                    } else {
                        w * self.dom_max(v.0)
                    };
                }
                if min_sum > *bound {
                    return Err(Conflict);
                }
                for &(w, v) in terms {
                    if w == 0 {
                        continue;
                    }
                    let own_min = if w >= 0 {
                        w * self.dom_min(v.0)
                    } else {
                        w * self.dom_max(v.0)
                    };
                    let slack = *bound - (min_sum - own_min);
                    let gone: Vec<i64> = self
                        .dom(v.0)
                        .iter()
                        .copied()
                        .filter(|&x| w * x > slack)
                        .collect();
                    for x in gone {
                        self.remove(v.0, x)?;
                    }
                }
                Ok(())
            }
            Constraint::ExactlyOne(vars) => {
                let mut fixed_one = None;
                let mut count_one = 0usize;
                let mut candidates = 0usize;
                let mut last_candidate = 0usize;
                for var in vars {
                    let v = var.0;
                    if self.is_fixed(v) && self.fixed_val(v) == 1 {
                        count_one += 1;
                        fixed_one = Some(v);
                    }
                    if self.contains(v, 1) {
                        candidates += 1;
                        last_candidate = v;
                    }
                }
                if count_one > 1 {
                    return Err(Conflict);
                }
                if let Some(keep) = fixed_one {
                    for var in vars {
                        if var.0 != keep {
                            self.remove(var.0, 1)?;
                        }
                    }
                    return Ok(());
                }
                if candidates == 0 {
                    return Err(Conflict);
                }
                if candidates == 1 {
                    self.assign(last_candidate, 1)?;
                }
                Ok(())
            }
            Constraint::ReifiedEq { b, x, value } => {
                let (b, x, value) = (b.0, x.0, *value);
                if !self.contains(x, value) {
                    self.remove(b, 1)?;
                } else if self.is_fixed(x) {
                    self.remove(b, 0)?;
                }
                if self.is_fixed(b) {
                    if self.fixed_val(b) == 1 {
                        self.assign(x, value)?;
                    } else {
                        self.remove(x, value)?;
                    }
                }
                Ok(())
            }
            Constraint::Implies { b, clause } => {
                let b = b.0;
                let mut open = Vec::new();
                let mut satisfied = false;
                for &(v, c) in clause {
                    if self.is_fixed(v.0) {
                        if self.fixed_val(v.0) == c {
                            satisfied = true;
                            break;
                        }
                    } else if self.contains(v.0, c) {
                        open.push((v.0, c));
                    }
                }
                if satisfied {
                    return Ok(());
                }
                if open.is_empty() {
                    self.remove(b, 1)?;
                    return Ok(());
                }
                if self.is_fixed(b) && self.fixed_val(b) == 1 && open.len() == 1 {
                    self.assign(open[0].0, open[0].1)?;
                }
                Ok(())
            }
            Constraint::Clause(lits) => {
                let mut open = Vec::new();
                let mut satisfied = false;
                for lit in lits {
                    match *lit {
                        Lit::Eq(v, c) => {
                            if self.is_fixed(v.0) {
                                if self.fixed_val(v.0) == c {
                                    satisfied = true;
                                    break;
                                }
                            } else if self.contains(v.0, c) {
                                open.push(*lit);
                            }
                        }
                        Lit::Neq(v, c) => {
                            if !self.contains(v.0, c) {
                                satisfied = true;
                                break;
                            }
                            if !self.is_fixed(v.0) {
                                open.push(*lit);
                            }
                        }
                    }
                }
                if satisfied {
                    return Ok(());
                }
                match open.len() {
                    0 => Err(Conflict),
                    1 => match open[0] {
                        Lit::Eq(v, c) => self.assign(v.0, c),
                        Lit::Neq(v, c) => self.remove(v.0, c).map(|_| ()),
                    },
                    _ => Ok(()),
                }
            }
            Constraint::Connected { vars, adjacency } => {
                // Checked once every position variable is bound; partial
                // assignments are left to the search.
                if vars.iter().any(|v| !self.is_fixed(v.0)) {
                    return Ok(());
                }
                let n = vars.len();
                if n <= 1 {
                    return Ok(());
                }
                let vals: Vec<i64> = vars.iter().map(|v| self.fixed_val(v.0)).collect();
                let mut seen = vec![false; n];
                seen[0] = true;
                let mut stack = vec![0usize];
                let mut reached = 1usize;
                while let Some(i) = stack.pop() {
                    for j in 0..n {
                        if !seen[j] && adjacency(i, vals[i], j, vals[j]) {
                            seen[j] = true;
                            reached += 1;
                            stack.push(j);
                        }
                    }
                }
                if reached == n {
                    Ok(())
                } else {
                    Err(Conflict)
                }
            }
        }
    }

    /// Next decision variable: smallest live domain, ties broken by the
    /// (shuffled) scan order. Scanning starts at `cursor` because everything
    /// before it was already fixed when the parent frame was created and
    /// stays fixed along this path.
    fn pick_var(&self, cursor: usize) -> Option<(usize, usize)> {
        let mut i = cursor;
        let n = self.order.len();
        while i < n && self.is_fixed(self.order[i] as usize) {
            i += 1;
        }
        if i == n {
            return None;
        }
        let mut best = self.order[i] as usize;
        let mut best_size = self.len[best];
        if best_size > 2 {
            for &vid in &self.order[i + 1..] {
                let v = vid as usize;
                let size = self.len[v];
                if size > 1 && size < best_size {
                    best = v;
                    best_size = size;
                    if best_size == 2 {
                        break;
                    }
                }
            }
        }
        Some((best, i))
    }

    fn run(&mut self, limit: Option<usize>) -> RunResult {
        let mut solutions = Vec::new();
        if self.propagate_all().is_err() {
            return RunResult::Solutions(solutions);
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut cursor = 0usize;

        loop {
            match self.pick_var(cursor) {
                None => {
                    // Total assignment; propagation fixpoint means all
                    // constraints hold.
                    let values: Vec<i64> = (0..self.model.num_vars())
                        .map(|v| self.fixed_val(v))
                        .collect();
                    let sol = Solution { values };
                    debug_assert!(super::eval::solution_satisfies(self.model, &sol));
                    solutions.push(sol);
                    match limit {
                        None => return RunResult::Solutions(solutions),
                        Some(lim) => {
                            if solutions.len() > lim {
                                return RunResult::Limit;
                            }
                            // Keep searching: force a backtrack.
                        }
                    }
                }
                Some((var, advanced)) => {
                    let mut values: Vec<i64> = self.dom(var).to_vec();
                    match self.rng.as_mut() {
                        Some(rng) => values.shuffle(rng),
                        None => values.sort_unstable(),
                    }
                    stack.push(Frame {
                        var,
                        values,
                        next: 0,
                        trail_mark: self.trail.len(),
                        cursor: advanced,
                    });
                }
            }

            // Descend into the next untried value, backtracking as needed.
            loop {
                let frame = match stack.last_mut() {
                    Some(f) => f,
                    None => return RunResult::Solutions(solutions),
                };
                if frame.next >= frame.values.len() {
                    let mark = frame.trail_mark;
                    self.restore_to(mark);
                    stack.pop();
                    continue;
                }
                let val = frame.values[frame.next];
                frame.next += 1;
                let var = frame.var;
                let mark = frame.trail_mark;
                cursor = frame.cursor;
                self.nodes += 1;
                if self.nodes > self.budget {
                    return RunResult::Budget;
                }
                self.restore_to(mark);
                let ok = self.assign(var, val).is_ok() && {
                    self.enqueue_watchers(var);
                    self.propagate().is_ok()
                };
                if ok {
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    #[test]
    fn mixed_clause_linear_instance_is_sat() {
        // x,y in {0,1}; (x=0 \/ y=0); x <= 1
        let mut m = Model::new();
        let x = m.add_variable([0, 1]).unwrap();
        let y = m.add_variable([0, 1]).unwrap();
        m.add_constraint(Constraint::Clause(vec![Lit::Eq(x, 0), Lit::Eq(y, 0)]))
            .unwrap();
        m.add_constraint(Constraint::LinearLe {
            terms: vec![(1, x)],
            bound: 1,
        })
        .unwrap();
        match solve(&m, 42) {
            SolveOutcome::Sat(sol) => {
                assert!(solution_satisfies(&m, &sol));
                assert!(sol.value(x) == 0 || sol.value(y) == 0);
            }
            other => panic!("expected SAT, got {other:?}"),
        }
    }

    #[test]
    fn fixed_var_with_neq_is_unsat() {
        let mut m = Model::new();
        let x = m.add_variable([1]).unwrap();
        let y = m.add_variable([1]).unwrap();
        m.add_constraint(Constraint::NeqVar(x, y)).unwrap();
        assert_eq!(solve(&m, 0), SolveOutcome::Unsat);
    }

    #[test]
    fn linear_le_out_of_reach_is_unsat() {
        let mut m = Model::new();
        let x = m.add_variable([7]).unwrap();
        m.add_constraint(Constraint::LinearLe {
            terms: vec![(1, x)],
            bound: 5,
        })
        .unwrap();
        assert_eq!(solve(&m, 0), SolveOutcome::Unsat);
    }

    #[test]
    fn connected_single_node_is_satisfied() {
        let mut m = Model::new();
        let x = m.add_variable([0, 1]).unwrap();
        m.add_constraint(Constraint::Connected {
            vars: vec![x],
            adjacency: Arc::new(|_, _, _, _| false),
        })
        .unwrap();
        assert!(solve(&m, 0).is_sat());
    }

    #[test]
    fn connected_prunes_disconnected_assignments() {
        // Two nodes on a line; adjacent iff |a - b| <= 1.
        let mut m = Model::new();
        let x = m.add_variable([0]).unwrap();
        let y = m.add_variable([5]).unwrap();
        m.add_constraint(Constraint::Connected {
            vars: vec![x, y],
            adjacency: Arc::new(|_, a, _, b| (a - b).abs() <= 1),
        })
        .unwrap();
        assert_eq!(solve(&m, 0), SolveOutcome::Unsat);
    }

    #[test]
    fn solve_all_unconstrained_pair() {
        let mut m = Model::new();
        m.add_variable([0, 1]).unwrap();
        let sols = solve_all(&m, 10).unwrap();
        assert_eq!(sols.len(), 2);
    }

    #[test]
    fn solve_all_empty_on_unsat() {
        let mut m = Model::new();
        let x = m.add_variable([1]).unwrap();
        m.add_constraint(Constraint::NeqVar(x, x)).unwrap();
        assert_eq!(solve_all(&m, 10).unwrap(), vec![]);
    }

    #[test]
    fn solve_all_limit_exceeded() {
        let mut m = Model::new();
        m.add_variable([0, 1, 2]).unwrap();
        assert_eq!(solve_all(&m, 2), Err(SolveAllError::LimitExceeded(2)));
    }

    #[test]
    fn budget_exceeded_is_distinct_from_unsat() {
        // Pigeonhole 5 into 4: exponential for this solver; budget 10 nodes.
        let mut m = Model::new();
        let vars: Vec<_> = (0..5).map(|_| m.add_variable(0..4).unwrap()).collect();
        for i in 0..5 {
            for j in (i + 1)..5 {
                m.add_constraint(Constraint::NeqVar(vars[i], vars[j])).unwrap();
            }
        }
        assert_eq!(solve_with_budget(&m, 0, 3), SolveOutcome::BudgetExceeded);
        assert_eq!(solve(&m, 0), SolveOutcome::Unsat);
    }

    #[test]
    fn determinism_same_seed_same_solution() {
        let m = shuffle_model();
        let a = solve(&m, 7);
        let b = solve(&m, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn seed_sensitivity_yields_distinct_solutions() {
        let m = shuffle_model();
        assert!(solve_all(&m, 10_000).unwrap().len() >= 10);
        let mut seen = BTreeSet::new();
        for seed in 0..100 {
            match solve(&m, seed) {
                SolveOutcome::Sat(sol) => {
                    seen.insert(sol.values().to_vec());
                }
                other => panic!("expected SAT, got {other:?}"),
            }
        }
        assert!(seen.len() >= 2, "only {} distinct solutions", seen.len());
    }

    fn shuffle_model() -> Model {
        // 4 vars over {0..3}, all distinct: 24 solutions.
        let mut m = Model::new();
        let vars: Vec<_> = (0..4).map(|_| m.add_variable(0..4).unwrap()).collect();
        for i in 0..4 {
            for j in (i + 1)..4 {
                m.add_constraint(Constraint::NeqVar(vars[i], vars[j])).unwrap();
            }
        }
        m
    }

    proptest::proptest! {
        /// Random small models: solve agrees with solve_all on satisfiability,
        /// and every returned solution passes the independent evaluator.
        #[test]
        fn solve_matches_exhaustive(model in small_model_strategy(), seed in 0u64..1000) {
            let all = solve_all(&model, 100_000).unwrap();
            match solve(&model, seed) {
                SolveOutcome::Sat(sol) => {
                    proptest::prop_assert!(solution_satisfies(&model, &sol));
                    proptest::prop_assert!(!all.is_empty());
                    proptest::prop_assert!(all.contains(&sol));
                }
                SolveOutcome::Unsat => proptest::prop_assert!(all.is_empty()),
                SolveOutcome::BudgetExceeded => proptest::prop_assert!(false, "budget on tiny model"),
            }
            // And solve_all itself is sound and duplicate-free.
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            proptest::prop_assert_eq!(dedup.len(), all.len());
            for sol in &all {
                proptest::prop_assert!(solution_satisfies(&model, sol));
            }
        }
    }

    /// Models with <= 6 variables, domains <= 4, and a random mix of
    /// constraint kinds.
    fn small_model_strategy() -> impl proptest::strategy::Strategy<Value = Model> {
        use proptest::prelude::*;
        (2usize..=6, proptest::collection::vec(0u8..7, 1..8), any::<u64>()).prop_map(
            |(nvars, kinds, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                use rand::Rng;
                let mut m = Model::new();
                let vars: Vec<VarId> = (0..nvars)
                    .map(|_| {
                        let lo = rng.gen_range(0..2i64);
                        let hi = lo + rng.gen_range(1..4i64);
                        m.add_variable(lo..=hi).unwrap()
                    })
                    .collect();
                let bools: Vec<VarId> = (0..3).map(|_| m.add_bool()).collect();
                let pick = |rng: &mut ChaCha8Rng, vs: &[VarId]| vs[rng.gen_range(0..vs.len())];
                for kind in kinds {
                    let c = match kind {
                        0 => Constraint::EqVar(pick(&mut rng, &vars), pick(&mut rng, &vars)),
                        1 => Constraint::NeqVar(pick(&mut rng, &vars), pick(&mut rng, &vars)),
                        2 => Constraint::Member(
                            pick(&mut rng, &vars),
                            (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..5)).collect(),
                        ),
                        3 => Constraint::LinearLe {
                            terms: vars.iter().map(|&v| (rng.gen_range(-2..3), v)).collect(),
                            bound: rng.gen_range(0..8),
                        },
                        4 => Constraint::ExactlyOne(bools.clone()),
                        5 => Constraint::ReifiedEq {
                            b: pick(&mut rng, &bools),
                            x: pick(&mut rng, &vars),
                            value: rng.gen_range(0..4),
                        },
                        _ => Constraint::Clause(vec![
                            Lit::Eq(pick(&mut rng, &vars), rng.gen_range(0..4)),
                            Lit::Neq(pick(&mut rng, &vars), rng.gen_range(0..4)),
                        ]),
                    };
                    m.add_constraint(c).unwrap();
                }
                m
            },
        )
    }

    #[test]
    fn evaluator_checks_connected_with_own_traversal() {
        let mut m = Model::new();
        let x = m.add_variable([0]).unwrap();
        let y = m.add_variable([2]).unwrap();
        let c = Constraint::Connected {
            vars: vec![x, y],
            adjacency: Arc::new(|_, a, _, b| (a - b).abs() <= 1),
        };
        m.add_constraint(c.clone()).unwrap();
        assert!(!constraint_holds(&c, &[0, 2]));
        assert!(constraint_holds(&c, &[0, 1]));
    }
}
