//! A small, self-contained LP/MILP engine.
//!
//! Continuous problems go through a dense bounded-variable primal simplex
//! ([`solve_lp`]); problems with binary variables go through best-first
//! branch-and-bound on top of it ([`solve_milp`]). Both are deterministic:
//! identical input gives bit-identical output.
use std::fmt;

use thiserror::Error;

mod branch;
mod lp_text;
mod simplex;

pub use branch::solve_milp;
pub use lp_text::write_lp_text;
pub use simplex::solve_lp;

/// Index of a variable inside a [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
    GreaterEq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::LessEq => "<=",
            Relation::Equal => "=",
            Relation::GreaterEq => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    /// Left-hand side evaluated at `values`.
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }
}

/// A minimization problem over bounded continuous and binary variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("row `{row}` references unknown variable index {var}")]
    UnknownVariable { row: String, var: usize },
    #[error("variable `{0}` has lower bound above upper bound")]
    EmptyDomain(String),
    #[error("binary variable `{0}` has bounds outside [0, 1]")]
    BinaryBounds(String),
    #[error("variable `{0}` has a non-finite cost or NaN bound")]
    BadVariable(String),
    #[error("row `{0}` has a non-finite coefficient or right-hand side")]
    BadRow(String),
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
        cost: f64,
    ) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            kind,
            cost,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        cost: f64,
    ) -> VarId {
        self.add_var(name, lower, upper, VarKind::Continuous, cost)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> VarId {
        self.add_var(name, 0.0, 1.0, VarKind::Binary, cost)
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }

    /// Overwrite the bounds of one variable.
    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) {
        let v = &mut self.vars[id.0];
        v.lower = lower;
        v.upper = upper;
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars.iter().zip(values).map(|(v, x)| v.cost * x).sum()
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        for v in &self.vars {
            if v.lower.is_nan() || v.upper.is_nan() || !v.cost.is_finite() {
                return Err(ProblemError::BadVariable(v.name.clone()));
            }
            if v.lower > v.upper || v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(ProblemError::EmptyDomain(v.name.clone()));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(ProblemError::BinaryBounds(v.name.clone()));
            }
        }
        for r in &self.rows {
            if !r.rhs.is_finite() {
                return Err(ProblemError::BadRow(r.name.clone()));
            }
            for &(id, a) in &r.terms {
                if id.0 >= self.vars.len() {
                    return Err(ProblemError::UnknownVariable {
                        row: r.name.clone(),
                        var: id.0,
                    });
                }
                if !a.is_finite() {
                    return Err(ProblemError::BadRow(r.name.clone()));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `values`, in absolute terms.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &x) in self.vars.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for r in &self.rows {
            let lhs = r.activity(values);
            let viol = match r.relation {
                Relation::LessEq => lhs - r.rhs,
                Relation::GreaterEq => r.rhs - lhs,
                Relation::Equal => (lhs - r.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NodeLimit,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterationLimit => "iteration_limit",
            SolveStatus::NodeLimit => "node_limit",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "optimal" => SolveStatus::Optimal,
            "infeasible" => SolveStatus::Infeasible,
            "unbounded" => SolveStatus::Unbounded,
            "iteration_limit" => SolveStatus::IterationLimit,
            "node_limit" => SolveStatus::NodeLimit,
            other => return Err(format!("unknown solve status `{other}`")),
        })
    }
}

/// Result of a solve.
///
/// `values` is empty and `objective` is NaN when no point is available
/// (infeasible, unbounded, or a limit hit before any incumbent was found).
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub nodes: usize,
}

impl Solution {
    pub(crate) fn without_point(status: SolveStatus) -> Self {
        Self {
            status,
            objective: f64::NAN,
            values: Vec::new(),
            iterations: 0,
            nodes: 0,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn has_point(&self) -> bool {
        !self.objective.is_nan()
    }

    pub fn value(&self, id: VarId) -> f64 {
        self.values[id.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchingRule {
    /// Branch on the binary whose value is furthest from an integer; ties go
    /// to the lowest variable index.
    MostFractional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    /// Relative optimality gap at which branch-and-bound stops.
    pub gap: f64,
    pub iteration_limit: usize,
    pub node_limit: usize,
    pub branching: BranchingRule,
    /// Iterations without objective progress before Bland's rule kicks in.
    pub stall_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            gap: 1e-6,
            iteration_limit: 200_000,
            node_limit: 10_000,
            branching: BranchingRule::MostFractional,
            stall_limit: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid solver configuration: {0}")]
pub struct ConfigError(pub String);

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let tols = [
            ("feasibility tolerance", self.feasibility_tol),
            ("integrality tolerance", self.integrality_tol),
            ("gap", self.gap),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        if self.iteration_limit == 0 || self.node_limit == 0 || self.stall_limit == 0 {
            return Err(ConfigError("limits must be positive".into()));
        }
        Ok(())
    }
}
