//! Sweeps over (measure, confidence) grids and the relative cost index.
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::fuzzy::MeasureKind;
use crate::nexus::{compile, InstanceError, NexusInstance, UncertaintyPlan};
use crate::solver::{solve_milp, ConfigError, ProblemError, SolveStatus, SolverConfig};

mod report;

pub use report::{
    emit_plot_data, emit_report, parse_csv_report, ReportFormat, ReportParseError, CSV_HEADER,
};

/// Confidence grid used when none is given.
pub const DEFAULT_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("sweep needs at least one measure kind")]
    NoKinds,
    #[error("measure kind `{0}` is listed twice")]
    DuplicateKind(MeasureKind),
    #[error("sweep needs at least one confidence level")]
    NoAlphas,
    #[error("confidence level {0} is outside [0, 1]")]
    AlphaRange(f64),
    #[error("confidence levels must be strictly increasing ({0} follows {1})")]
    AlphaOrder(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("baseline cost must be positive and finite, got {0}")]
pub struct PiError(pub f64);

/// The grid of measure kinds and confidence levels to solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    kinds: Vec<MeasureKind>,
    alphas: Vec<f64>,
}

impl SweepSpec {
    pub fn new(kinds: Vec<MeasureKind>, alphas: Vec<f64>) -> Result<Self, SpecError> {
        if kinds.is_empty() {
            return Err(SpecError::NoKinds);
        }
        for (i, k) in kinds.iter().enumerate() {
            if kinds[..i].contains(k) {
                return Err(SpecError::DuplicateKind(*k));
            }
        }
        if alphas.is_empty() {
            return Err(SpecError::NoAlphas);
        }
        for &a in &alphas {
            if !(0.0..=1.0).contains(&a) {
                return Err(SpecError::AlphaRange(a));
            }
        }
        for w in alphas.windows(2) {
            if w[1] <= w[0] {
                return Err(SpecError::AlphaOrder(w[1], w[0]));
            }
        }
        Ok(Self { kinds, alphas })
    }

    /// A one-cell grid.
    pub fn single(kind: MeasureKind, alpha: f64) -> Result<Self, SpecError> {
        Self::new(vec![kind], vec![alpha])
    }

    pub fn kinds(&self) -> &[MeasureKind] {
        &self.kinds
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Cells in report order: kind-major, then ascending α.
    pub fn cells(&self) -> impl Iterator<Item = (MeasureKind, f64)> + '_ {
        self.kinds
            .iter()
            .flat_map(|&k| self.alphas.iter().map(move |&a| (k, a)))
    }

    pub fn len(&self) -> usize {
        self.kinds.len() * self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kinds: MeasureKind::ALL.to_vec(),
            alphas: DEFAULT_ALPHAS.to_vec(),
        }
    }
}

/// One solved grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub kind: MeasureKind,
    pub alpha: f64,
    /// Total system cost in $, absent when the solve produced no point.
    pub cost: Option<f64>,
    /// Gap to the baseline cost in units of 10⁻⁴.
    pub pi: Option<f64>,
    pub status: SolveStatus,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub cells: Vec<CellResult>,
    /// Cost of (Possibility, α = 0), present if that solve produced a point.
    pub baseline: Option<f64>,
}

impl ScenarioReport {
    pub fn cell(&self, kind: MeasureKind, alpha: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.kind == kind && c.alpha == alpha)
    }
}

/// Relative gap of `cost` over `baseline`, scaled by 10⁴.
pub fn compute_pi(cost: f64, baseline: f64) -> Result<f64, PiError> {
    if !(baseline.is_finite() && baseline > 0.0) {
        return Err(PiError(baseline));
    }
    Ok((cost / baseline - 1.0) * 1e4)
}

const BASELINE: (MeasureKind, f64) = (MeasureKind::Possibility, 0.0);

/// Compile and solve every cell of `spec`, plus the baseline if the grid
/// does not contain it. Cells are solved in parallel; the report order is
/// fixed by the spec.
pub fn run_sweep(
    instance: &NexusInstance,
    spec: &SweepSpec,
    config: &SolverConfig,
) -> Result<ScenarioReport, SweepError> {
    instance.validate()?;
    config.validate()?;

    let mut jobs: Vec<(MeasureKind, f64)> = spec.cells().collect();
    let has_baseline = jobs.contains(&BASELINE);
    if !has_baseline {
        jobs.push(BASELINE);
    }

    let mut solved = jobs
        .par_iter()
        .map(|&(kind, alpha)| solve_cell(instance, kind, alpha, config))
        .collect::<Result<Vec<_>, _>>()?;

    let baseline_cell = if has_baseline {
        solved
            .iter()
            .find(|c| (c.kind, c.alpha) == BASELINE)
            .cloned()
    } else {
        solved.pop()
    };
    let baseline = baseline_cell.and_then(|c| c.cost);

    for cell in &mut solved {
        cell.pi = match (cell.cost, baseline) {
            (Some(cost), Some(base)) => compute_pi(cost, base).ok(),
            _ => None,
        };
    }
    Ok(ScenarioReport {
        cells: solved,
        baseline,
    })
}

fn solve_cell(
    instance: &NexusInstance,
    kind: MeasureKind,
    alpha: f64,
    config: &SolverConfig,
) -> Result<CellResult, SweepError> {
    let start = Instant::now();
    let plan = UncertaintyPlan::new(kind, alpha).map_err(|_| SpecError::AlphaRange(alpha))?;
    let compiled = compile(instance, &plan)?;
    let solution = solve_milp(&compiled.lp, config)?;
    Ok(CellResult {
        kind,
        alpha,
        cost: solution.has_point().then_some(solution.objective),
        pi: None,
        status: solution.status,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}
