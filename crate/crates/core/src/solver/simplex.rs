//! Dense bounded-variable primal simplex.
//!
//! Every row `i` becomes an equality `a_i·x + s_i = b_i` where the slack `s_i`
//! is bounded by the row relation (`[0, ∞)` for `≤`, `(-∞, 0]` for `≥`, absent
//! for `=`). Rows whose starting residual cannot be carried by their slack get
//! an artificial column; phase one drives those to zero, phase two optimizes
//! the real objective with the artificials locked at zero.
//!
//! Pricing is Dantzig's rule, switching to Bland's rule after
//! `stall_limit` iterations without objective progress. The ratio test is a
//! two-pass Harris test outside Bland mode.
use super::{LinearProgram, ProblemError, Relation, Solution, SolveStatus, SolverConfig};

const NONBASIC: usize = usize::MAX;
const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;

/// Solve the continuous relaxation of `problem` (integrality is ignored).
pub fn solve_lp(problem: &LinearProgram, config: &SolverConfig) -> Result<Solution, ProblemError> {
    problem.validate()?;
    let lower: Vec<f64> = problem.vars().iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = problem.vars().iter().map(|v| v.upper).collect();
    Ok(solve_with_bounds(problem, &lower, &upper, config))
}

/// Solve the relaxation of `problem` with its variable bounds replaced by
/// `lower`/`upper`. `problem` must already be validated.
pub(crate) fn solve_with_bounds(
    problem: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    config: &SolverConfig,
) -> Solution {
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Solution::without_point(SolveStatus::Infeasible);
    }
    let mut tableau = Tableau::build(problem, lower, upper);
    let mut iterations = 0;

    if tableau.has_artificials() {
        tableau.load_phase_one_costs();
        match tableau.run(config, &mut iterations) {
            // Phase one is bounded below by zero; an unbounded report can only
            // come from skipped tiny pivots and is settled by the check below.
            Outcome::Optimal | Outcome::Unbounded => {}
            Outcome::IterationLimit => {
                let mut s = Solution::without_point(SolveStatus::IterationLimit);
                s.iterations = iterations;
                return s;
            }
        }
        let scale = problem
            .rows()
            .iter()
            .map(|r| r.rhs.abs())
            .fold(1.0_f64, f64::max);
        if tableau.artificial_infeasibility() > config.feasibility_tol * scale {
            let mut s = Solution::without_point(SolveStatus::Infeasible);
            s.iterations = iterations;
            return s;
        }
        tableau.lock_artificials();
    }

    tableau.load_costs(problem);
    let status = match tableau.run(config, &mut iterations) {
        Outcome::Optimal => SolveStatus::Optimal,
        Outcome::Unbounded => SolveStatus::Unbounded,
        Outcome::IterationLimit => SolveStatus::IterationLimit,
    };
    if status != SolveStatus::Optimal {
        let mut s = Solution::without_point(status);
        s.iterations = iterations;
        return s;
    }
    let values = tableau.x[..problem.num_vars()].to_vec();
    Solution {
        status,
        objective: problem.objective_value(&values),
        values,
        iterations,
        nodes: 0,
    }
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    m: usize,
    n: usize,
    /// `B⁻¹A`, row-major `m × n`.
    a: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    enterable: Vec<bool>,
    artificial_start: usize,
}

impl Tableau {
    fn build(problem: &LinearProgram, lower: &[f64], upper: &[f64]) -> Self {
        let m = problem.num_rows();
        let ns = problem.num_vars();

        let mut x: Vec<f64> = lower
            .iter()
            .zip(upper)
            .map(|(&l, &u)| {
                if l.is_finite() {
                    l
                } else if u.is_finite() {
                    u
                } else {
                    0.0
                }
            })
            .collect();

        // Decide per row: slack basic, or slack nonbasic plus an artificial.
        let rows = problem.rows();
        let mut residual = Vec::with_capacity(m);
        let mut slack_col = vec![NONBASIC; m];
        let mut n_slack = 0;
        for (i, r) in rows.iter().enumerate() {
            residual.push(r.rhs - r.activity(&x));
            if r.relation != Relation::Equal {
                slack_col[i] = ns + n_slack;
                n_slack += 1;
            }
        }
        let mut needs_art = vec![false; m];
        let mut n_art = 0;
        for (i, r) in rows.iter().enumerate() {
            let fits = match r.relation {
                Relation::LessEq => residual[i] >= 0.0,
                Relation::GreaterEq => residual[i] <= 0.0,
                Relation::Equal => false,
            };
            if !fits {
                needs_art[i] = true;
                n_art += 1;
            }
        }
        let artificial_start = ns + n_slack;
        let n = artificial_start + n_art;

        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        for r in rows {
            match r.relation {
                Relation::LessEq => {
                    lo.push(0.0);
                    up.push(f64::INFINITY);
                }
                Relation::GreaterEq => {
                    lo.push(f64::NEG_INFINITY);
                    up.push(0.0);
                }
                Relation::Equal => {}
            }
        }
        lo.resize(n, 0.0);
        up.resize(n, f64::INFINITY);
        x.resize(n, 0.0);

        let mut a = vec![0.0; m * n];
        let mut basis = vec![NONBASIC; m];
        let mut row_of = vec![NONBASIC; n];
        let mut next_art = artificial_start;
        for (i, r) in rows.iter().enumerate() {
            let row = &mut a[i * n..(i + 1) * n];
            for &(v, coef) in &r.terms {
                row[v.0] += coef;
            }
            if slack_col[i] != NONBASIC {
                row[slack_col[i]] = 1.0;
            }
            if needs_art[i] {
                // Scale the row so the artificial enters with +1 and a
                // nonnegative value.
                let sign = if residual[i] >= 0.0 { 1.0 } else { -1.0 };
                if sign < 0.0 {
                    row.iter_mut().for_each(|v| *v = -*v);
                }
                row[next_art] = 1.0;
                basis[i] = next_art;
                row_of[next_art] = i;
                x[next_art] = residual[i].abs();
                next_art += 1;
            } else {
                let s = slack_col[i];
                basis[i] = s;
                row_of[s] = i;
                x[s] = residual[i];
            }
        }

        let enterable = (0..n).map(|j| lo[j] < up[j]).collect();
        Self {
            m,
            n,
            a,
            lower: lo,
            upper: up,
            x,
            basis,
            row_of,
            cost: vec![0.0; n],
            reduced: vec![0.0; n],
            enterable,
            artificial_start,
        }
    }

    fn has_artificials(&self) -> bool {
        self.artificial_start < self.n
    }

    fn artificial_infeasibility(&self) -> f64 {
        self.x[self.artificial_start..]
            .iter()
            .map(|v| v.abs())
            .sum()
    }

    fn lock_artificials(&mut self) {
        for j in self.artificial_start..self.n {
            self.upper[j] = 0.0;
            self.enterable[j] = false;
            if self.row_of[j] == NONBASIC {
                self.x[j] = 0.0;
            }
        }
    }

    fn load_phase_one_costs(&mut self) {
        let mut cost = vec![0.0; self.n];
        cost[self.artificial_start..]
            .iter_mut()
            .for_each(|c| *c = 1.0);
        self.set_costs(cost);
    }

    fn load_costs(&mut self, problem: &LinearProgram) {
        let mut cost = vec![0.0; self.n];
        for (c, v) in cost.iter_mut().zip(problem.vars()) {
            *c = v.cost;
        }
        self.set_costs(cost);
    }

    /// Install a cost vector and recompute reduced costs `c_j - c_B·B⁻¹a_j`.
    fn set_costs(&mut self, cost: Vec<f64>) {
        let n = self.n;
        let mut reduced = cost.clone();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.a[i * n..(i + 1) * n];
            for (d, &aij) in reduced.iter_mut().zip(row) {
                if aij != 0.0 {
                    *d -= cb * aij;
                }
            }
        }
        for i in 0..self.m {
            reduced[self.basis[i]] = 0.0;
        }
        self.cost = cost;
        self.reduced = reduced;
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.n {
            if self.row_of[j] != NONBASIC || !self.enterable[j] {
                continue;
            }
            let d = self.reduced[j];
            let dir = if d < -DUAL_TOL && self.x[j] < self.upper[j] {
                1.0
            } else if d > DUAL_TOL && self.x[j] > self.lower[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    /// Returns `(step, leaving row)`; `None` for the row means the entering
    /// variable flips to its opposite bound. `None` overall means unbounded.
    fn ratio_test(
        &self,
        j: usize,
        dir: f64,
        bland: bool,
        tol: f64,
    ) -> Option<(f64, Option<usize>)> {
        let n = self.n;
        let limit = |i: usize, slack: f64| -> Option<f64> {
            let alpha = self.a[i * n + j];
            if alpha.abs() <= PIVOT_TOL {
                return None;
            }
            let rate = -dir * alpha;
            let b = self.basis[i];
            let lim = if rate > 0.0 {
                if !self.upper[b].is_finite() {
                    return None;
                }
                (self.upper[b] + slack - self.x[b]) / rate
            } else {
                if !self.lower[b].is_finite() {
                    return None;
                }
                (self.x[b] - self.lower[b] + slack) / -rate
            };
            Some(lim.max(0.0))
        };

        let flip = self.upper[j] - self.lower[j];
        let mut leave: Option<(usize, f64)> = None;
        if bland {
            for i in 0..self.m {
                if let Some(lim) = limit(i, 0.0) {
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            lim < best || (lim == best && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, lim));
                    }
                }
            }
        } else {
            // Harris: bound the step using relaxed bounds, then pick the
            // largest pivot among rows that block within that bound.
            let mut relaxed = f64::INFINITY;
            for i in 0..self.m {
                if let Some(lim) = limit(i, tol) {
                    relaxed = relaxed.min(lim);
                }
            }
            if relaxed.is_finite() {
                let mut best_alpha = 0.0;
                for i in 0..self.m {
                    if let Some(lim) = limit(i, 0.0) {
                        let alpha = self.a[i * n + j].abs();
                        if lim <= relaxed && alpha > best_alpha {
                            best_alpha = alpha;
                            leave = Some((i, lim));
                        }
                    }
                }
            }
        }

        match leave {
            Some((_, lim)) if flip <= lim => Some((flip, None)),
            Some((r, lim)) => Some((lim, Some(r))),
            None if flip.is_finite() => Some((flip, None)),
            None => None,
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let n = self.n;
        let piv = self.a[r * n + j];
        let inv = 1.0 / piv;
        let mut pivot_row: Vec<(usize, f64)> = Vec::new();
        {
            let row = &mut self.a[r * n..(r + 1) * n];
            for (k, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v *= inv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    } else {
                        pivot_row.push((k, *v));
                    }
                }
            }
            row[j] = 1.0;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * n + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[i * n..(i + 1) * n];
            for &(k, v) in &pivot_row {
                let updated = row[k] - f * v;
                row[k] = if updated.abs() < DROP_TOL {
                    0.0
                } else {
                    updated
                };
            }
            row[j] = 0.0;
        }
        let f = self.reduced[j];
        if f != 0.0 {
            for &(k, v) in &pivot_row {
                self.reduced[k] -= f * v;
            }
        }
        self.reduced[j] = 0.0;

        let leaving = self.basis[r];
        self.row_of[leaving] = NONBASIC;
        self.basis[r] = j;
        self.row_of[j] = r;
    }

    fn run(&mut self, config: &SolverConfig, iterations: &mut usize) -> Outcome {
        let mut stall = 0usize;
        let mut bland = false;
        let mut last_obj = self.objective();
        loop {
            if *iterations >= config.iteration_limit {
                return Outcome::IterationLimit;
            }
            let Some((j, dir)) = self.choose_entering(bland) else {
                return Outcome::Optimal;
            };
            let Some((step, leave)) = self.ratio_test(j, dir, bland, config.feasibility_tol) else {
                return Outcome::Unbounded;
            };
            *iterations += 1;

            let n = self.n;
            if step > 0.0 {
                self.x[j] += dir * step;
                for i in 0..self.m {
                    let alpha = self.a[i * n + j];
                    if alpha != 0.0 {
                        self.x[self.basis[i]] -= dir * alpha * step;
                    }
                }
            }
            match leave {
                None => {
                    // Land exactly on the opposite bound.
                    self.x[j] = if dir > 0.0 {
                        self.upper[j]
                    } else {
                        self.lower[j]
                    };
                }
                Some(r) => {
                    let b = self.basis[r];
                    let rate = -dir * self.a[r * n + j];
                    self.x[b] = if rate > 0.0 {
                        self.upper[b]
                    } else {
                        self.lower[b]
                    };
                    self.pivot(r, j);
                }
            }

            let obj = if step > 0.0 {
                self.objective()
            } else {
                last_obj
            };
            if obj < last_obj - 1e-12 * (1.0 + last_obj.abs()) {
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall >= config.stall_limit {
                    bland = true;
                }
            }
            last_obj = obj;
        }
    }
}
