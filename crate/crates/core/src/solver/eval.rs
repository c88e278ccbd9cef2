//! Independent evaluation of complete assignments. Deliberately shares no
//! code with the search engine: each constraint is evaluated from its
//! definition, and connectivity uses its own traversal.

use std::collections::VecDeque;

use super::{Constraint, Lit, Model, Solution};

/// True iff the complete assignment `values` satisfies `c`.
pub fn constraint_holds(c: &Constraint, values: &[i64]) -> bool {
    match c {
        Constraint::EqConst(x, cst) => values[x.0] == *cst,
        Constraint::EqVar(x, y) => values[x.0] == values[y.0],
        Constraint::NeqVar(x, y) => values[x.0] != values[y.0],
        Constraint::Member(x, set) => set.contains(&values[x.0]),
        Constraint::LinearLe { terms, bound } => {
            let sum: i64 = terms.iter().map(|&(w, v)| w * values[v.0]).sum();
            sum <= *bound
        }
        Constraint::ExactlyOne(vars) => vars.iter().filter(|v| values[v.0] == 1).count() == 1,
        Constraint::ReifiedEq { b, x, value } => (values[b.0] == 1) == (values[x.0] == *value),
        Constraint::Implies { b, clause } => {
            values[b.0] != 1 || clause.iter().any(|&(v, cst)| values[v.0] == cst)
        }
        Constraint::Clause(lits) => lits.iter().any(|lit| match *lit {
            Lit::Eq(v, cst) => values[v.0] == cst,
            Lit::Neq(v, cst) => values[v.0] != cst,
        }),
        Constraint::Connected { vars, adjacency } => {
            let n = vars.len();
            if n <= 1 {
                return true;
            }
            let vals: Vec<i64> = vars.iter().map(|v| values[v.0]).collect();
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            let mut reached = 1;
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    if !seen[j] && adjacency(i, vals[i], j, vals[j]) {
                        seen[j] = true;
                        reached += 1;
                        queue.push_back(j);
                    }
                }
            }
            reached == n
        }
    }
}

/// True iff `sol` satisfies every constraint of `model`.
pub fn solution_satisfies(model: &Model, sol: &Solution) -> bool {
    model
        .constraints()
        .iter()
        .all(|c| constraint_holds(c, &sol.values))
}
