//! Finite-domain constraint solver: model construction, a randomized
//! backtracking search with propagation, and an independent full-assignment
//! evaluator used as the soundness oracle.

mod eval;
mod search;

pub use eval::{constraint_holds, solution_satisfies};
pub use search::{
    solve, solve_all, solve_with_budget, SolveAllError, SolveOutcome, DEFAULT_NODE_BUDGET,
};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Handle to a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A literal over a variable and a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lit {
    /// `x = value`
    Eq(VarId, i64),
    /// `x != value`
    Neq(VarId, i64),
}

impl Lit {
    pub fn var(self) -> VarId {
        match self {
            Lit::Eq(v, _) | Lit::Neq(v, _) => v,
        }
    }
}

/// Adjacency oracle for the [`Constraint::Connected`] global: given two
/// positions in the constraint's variable list and their assigned values,
/// says whether the induced nodes are neighbors.
pub type Adjacency = Arc<dyn Fn(usize, i64, usize, i64) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Constraint {
    /// `x = c`
    EqConst(VarId, i64),
    /// `x = y`
    EqVar(VarId, VarId),
    /// `x != y`
    NeqVar(VarId, VarId),
    /// `x` takes a value from the set
    Member(VarId, Vec<i64>),
    /// `sum w_i * x_i <= bound`
    LinearLe { terms: Vec<(i64, VarId)>, bound: i64 },
    /// exactly one of the 0/1 variables is 1
    ExactlyOne(Vec<VarId>),
    /// `b = 1  <=>  x = value` (b is 0/1)
    ReifiedEq { b: VarId, x: VarId, value: i64 },
    /// `b = 1  =>  (x1 = c1 \/ x2 = c2 \/ ...)` (b is 0/1)
    Implies { b: VarId, clause: Vec<(VarId, i64)> },
    /// disjunction of literals
    Clause(Vec<Lit>),
    /// the complete assignment of `vars` induces a connected graph under the
    /// adjacency oracle (nodes are the variable positions)
    Connected { vars: Vec<VarId>, adjacency: Adjacency },
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::EqConst(x, c) => write!(f, "EqConst({x}, {c})"),
            Constraint::EqVar(x, y) => write!(f, "EqVar({x}, {y})"),
            Constraint::NeqVar(x, y) => write!(f, "NeqVar({x}, {y})"),
            Constraint::Member(x, set) => write!(f, "Member({x}, {set:?})"),
            Constraint::LinearLe { terms, bound } => {
                write!(f, "LinearLe({terms:?} <= {bound})")
            }
            Constraint::ExactlyOne(vars) => write!(f, "ExactlyOne({vars:?})"),
            Constraint::ReifiedEq { b, x, value } => {
                write!(f, "ReifiedEq({b} <=> {x}={value})")
            }
            Constraint::Implies { b, clause } => write!(f, "Implies({b} => {clause:?})"),
            Constraint::Clause(lits) => write!(f, "Clause({lits:?})"),
            Constraint::Connected { vars, .. } => write!(f, "Connected({vars:?})"),
        }
    }
}

impl Constraint {
    /// Variables the constraint mentions, in declaration order.
    pub fn vars(&self) -> Vec<VarId> {
        match self {
            Constraint::EqConst(x, _) | Constraint::Member(x, _) => vec![*x],
            Constraint::EqVar(x, y) | Constraint::NeqVar(x, y) => vec![*x, *y],
            Constraint::LinearLe { terms, .. } => terms.iter().map(|&(_, v)| v).collect(),
            Constraint::ExactlyOne(vars) => vars.clone(),
            Constraint::ReifiedEq { b, x, .. } => vec![*b, *x],
            Constraint::Implies { b, clause } => {
                let mut vs = vec![*b];
                vs.extend(clause.iter().map(|&(v, _)| v));
                vs
            }
            Constraint::Clause(lits) => lits.iter().map(|l| l.var()).collect(),
            Constraint::Connected { vars, .. } => vars.clone(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("empty domain")]
    EmptyDomain,
    #[error("unknown variable {0}")]
    UnknownVar(VarId),
    #[error("variable {0} used in a boolean slot but its domain is not within {{0,1}}")]
    NotBoolean(VarId),
}

/// A constraint model over finite integer domains.
#[derive(Debug, Clone, Default)]
pub struct Model {
    domains: Vec<Vec<i64>>,
    constraints: Vec<Constraint>,
}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    /// Declares a variable with the given domain (deduplicated, kept sorted).
    pub fn add_variable(&mut self, domain: impl IntoIterator<Item = i64>) -> Result<VarId, ModelError> {
        let mut dom: Vec<i64> = domain.into_iter().collect();
        dom.sort_unstable();
        dom.dedup();
        if dom.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        self.domains.push(dom);
        Ok(VarId(self.domains.len() - 1))
    }

    /// Convenience: a fresh 0/1 variable.
    pub fn add_bool(&mut self) -> VarId {
        self.add_variable([0, 1]).expect("nonempty domain")
    }

    pub fn add_constraint(&mut self, c: Constraint) -> Result<(), ModelError> {
        for v in c.vars() {
            if v.0 >= self.domains.len() {
                return Err(ModelError::UnknownVar(v));
            }
        }
        let bool_slots: Vec<VarId> = match &c {
            Constraint::ExactlyOne(vars) => vars.clone(),
            Constraint::ReifiedEq { b, .. } | Constraint::Implies { b, .. } => vec![*b],
            _ => vec![],
        };
        for v in bool_slots {
            if self.domains[v.0].iter().any(|&x| x != 0 && x != 1) {
                return Err(ModelError::NotBoolean(v));
            }
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn domain(&self, v: VarId) -> &[i64] {
        &self.domains[v.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
}

/// A total assignment satisfying every constraint of the model it was
/// produced from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    pub(crate) values: Vec<i64>,
}

impl Solution {
    pub fn value(&self, v: VarId) -> i64 {
        self.values[v.0]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}
