//! Best-first branch-and-bound over binary variables.
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::{solve_lp, solve_with_bounds};
use super::{
    BranchingRule, LinearProgram, ProblemError, Solution, SolveStatus, SolverConfig, VarKind,
};

struct Node {
    bound: f64,
    id: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    values: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the smallest bound (then the oldest node)
    // must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Incumbent {
    objective: f64,
    values: Vec<f64>,
}

/// Solve `problem` to within `config.gap` of the integer optimum.
///
/// Without binary variables this is exactly [`solve_lp`]. If the node limit
/// is reached the best incumbent found so far is returned with status
/// [`SolveStatus::NodeLimit`].
pub fn solve_milp(
    problem: &LinearProgram,
    config: &SolverConfig,
) -> Result<Solution, ProblemError> {
    problem.validate()?;
    let integers: Vec<usize> = problem
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    if integers.is_empty() {
        return solve_lp(problem, config);
    }

    let lower: Vec<f64> = problem.vars().iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = problem.vars().iter().map(|v| v.upper).collect();
    let root = solve_with_bounds(problem, &lower, &upper, config);
    let mut iterations = root.iterations;
    let mut nodes = 1;
    if root.status != SolveStatus::Optimal {
        return Ok(Solution { nodes, ..root });
    }

    let finish = |inc: Option<Incumbent>, status: SolveStatus, iterations: usize, nodes: usize| {
        let (objective, values) = match inc {
            Some(inc) => (inc.objective, inc.values),
            None => (f64::NAN, Vec::new()),
        };
        let status = match (status, objective.is_nan()) {
            (SolveStatus::Optimal, true) => SolveStatus::Infeasible,
            (s, _) => s,
        };
        Solution {
            status,
            objective,
            values,
            iterations,
            nodes,
        }
    };

    if is_integral(&root.values, &integers, config.integrality_tol) {
        let inc = Incumbent {
            objective: root.objective,
            values: root.values,
        };
        return Ok(finish(Some(inc), SolveStatus::Optimal, iterations, nodes));
    }

    let mut incumbent: Option<Incumbent> = None;
    for rounding in [Rounding::Up, Rounding::Nearest] {
        let (lo, up) = rounded_bounds(&lower, &upper, &root.values, &integers, rounding, config);
        let s = solve_with_bounds(problem, &lo, &up, config);
        iterations += s.iterations;
        if s.status == SolveStatus::Optimal
            && incumbent
                .as_ref()
                .is_none_or(|inc| s.objective < inc.objective)
        {
            incumbent = Some(Incumbent {
                objective: s.objective,
                values: s.values,
            });
        }
    }

    let prunes = |bound: f64, inc: &Option<Incumbent>| match inc {
        Some(inc) => bound >= inc.objective - config.gap * inc.objective.abs().max(1.0),
        None => false,
    };

    let mut heap = BinaryHeap::new();
    let mut next_id = 1;
    let mut limit_hit = false;
    heap.push(Node {
        bound: root.objective,
        id: 0,
        lower,
        upper,
        values: root.values,
    });

    while let Some(node) = heap.pop() {
        if prunes(node.bound, &incumbent) {
            // Best-first: every remaining node is at least as bad.
            break;
        }
        let j = match config.branching {
            BranchingRule::MostFractional => most_fractional(&node.values, &integers),
        };
        for target in [0.0, 1.0] {
            if nodes >= config.node_limit {
                return Ok(finish(incumbent, SolveStatus::NodeLimit, iterations, nodes));
            }
            let mut lo = node.lower.clone();
            let mut up = node.upper.clone();
            lo[j] = target;
            up[j] = target;
            let child = solve_with_bounds(problem, &lo, &up, config);
            iterations += child.iterations;
            nodes += 1;
            match child.status {
                SolveStatus::Optimal => {}
                SolveStatus::IterationLimit => {
                    limit_hit = true;
                    continue;
                }
                _ => continue,
            }
            if prunes(child.objective, &incumbent) {
                continue;
            }
            if is_integral(&child.values, &integers, config.integrality_tol) {
                incumbent = Some(Incumbent {
                    objective: child.objective,
                    values: child.values,
                });
            } else {
                heap.push(Node {
                    bound: child.objective,
                    id: next_id,
                    lower: lo,
                    upper: up,
                    values: child.values,
                });
                next_id += 1;
            }
        }
    }

    let status = if limit_hit {
        SolveStatus::IterationLimit
    } else {
        SolveStatus::Optimal
    };
    Ok(finish(incumbent, status, iterations, nodes))
}

#[derive(Clone, Copy)]
enum Rounding {
    Up,
    Nearest,
}

fn rounded_bounds(
    lower: &[f64],
    upper: &[f64],
    values: &[f64],
    integers: &[usize],
    rounding: Rounding,
    config: &SolverConfig,
) -> (Vec<f64>, Vec<f64>) {
    let mut lo = lower.to_vec();
    let mut up = upper.to_vec();
    for &j in integers {
        let v = match rounding {
            Rounding::Up => (values[j] - config.integrality_tol).ceil(),
            Rounding::Nearest => values[j].round(),
        };
        let v = v.clamp(lower[j], upper[j]);
        lo[j] = v;
        up[j] = v;
    }
    (lo, up)
}

fn fractionality(v: f64) -> f64 {
    (v - v.floor()).min(v.ceil() - v)
}

fn is_integral(values: &[f64], integers: &[usize], tol: f64) -> bool {
    integers.iter().all(|&j| fractionality(values[j]) <= tol)
}

fn most_fractional(values: &[f64], integers: &[usize]) -> usize {
    let mut best = integers[0];
    let mut best_score = -1.0;
    for &j in integers {
        let score = fractionality(values[j]);
        if score > best_score {
            best = j;
            best_score = score;
        }
    }
    best
}
