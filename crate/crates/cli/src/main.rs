use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use fuzzy_nexus::fuzzy::MeasureKind;
use fuzzy_nexus::instance::{parse_instance, DEMO_WEEK};
use fuzzy_nexus::nexus::{compile, NexusInstance, UncertaintyPlan};
use fuzzy_nexus::scenario::{emit_plot_data, emit_report, run_sweep, ReportFormat, SweepSpec};
use fuzzy_nexus::solver::{write_lp_text, SolveStatus, SolverConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Solve the energy-water nexus plan under fuzzy chance constraints, for one
/// (measure, alpha) cell or a whole grid.
#[derive(Debug, Parser)]
#[command(name = "fuzzy-nexus", version)]
struct Cli {
    /// Instance file (TOML), or `demo` for the bundled one-week instance.
    #[arg(long)]
    instance: PathBuf,

    #[arg(long, value_enum, default_value_t = Mode::Sweep)]
    mode: Mode,

    /// Measure kind for single mode: poss, cred or nece.
    #[arg(long)]
    kind: Option<MeasureKind>,

    /// Confidence level for single mode.
    #[arg(long)]
    alpha: Option<f64>,

    /// Comma-separated confidence levels for sweep mode.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,

    /// Comma-separated measure kinds for sweep mode.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<MeasureKind>>,

    /// Report destination; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: String,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Also write `alpha cost` series per kind for plotting.
    #[arg(long)]
    plot_data: Option<PathBuf>,

    #[arg(long)]
    feas_tol: Option<f64>,

    /// Relative optimality gap for branch-and-bound.
    #[arg(long)]
    gap: Option<f64>,

    /// Simplex iteration budget per LP solve.
    #[arg(long)]
    iteration_limit: Option<usize>,

    /// Branch-and-bound node budget per cell.
    #[arg(long)]
    node_limit: Option<usize>,

    /// Write the compiled problem of the first requested cell as LP text.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Single,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Text => ReportFormat::Text,
        }
    }
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        error: error.into(),
    }
}

fn other(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        error: error.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::UnknownArgument => EXIT_USAGE,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_instance(path: &Path) -> Result<NexusInstance, Failure> {
    let text = if path == Path::new("demo") {
        DEMO_WEEK.to_string()
    } else {
        fs::read_to_string(path)
            .with_context(|| format!("cannot read instance {}", path.display()))
            .map_err(input)?
    };
    parse_instance(&text)
        .with_context(|| format!("invalid instance {}", path.display()))
        .map_err(input)
}

fn sweep_spec(cli: &Cli) -> Result<SweepSpec, Failure> {
    let spec = match cli.mode {
        Mode::Single => {
            if cli.kinds.is_some() || cli.alphas.is_some() {
                return Err(input(anyhow::anyhow!(
                    "--kinds and --alphas apply to sweep mode; use --kind and --alpha"
                )));
            }
            let kind = cli
                .kind
                .ok_or_else(|| input(anyhow::anyhow!("single mode requires --kind")))?;
            let alpha = cli
                .alpha
                .ok_or_else(|| input(anyhow::anyhow!("single mode requires --alpha")))?;
            SweepSpec::single(kind, alpha)
        }
        Mode::Sweep => {
            if cli.kind.is_some() || cli.alpha.is_some() {
                return Err(input(anyhow::anyhow!(
                    "--kind and --alpha apply to single mode; use --kinds and --alphas"
                )));
            }
            let default = SweepSpec::default();
            SweepSpec::new(
                cli.kinds
                    .clone()
                    .unwrap_or_else(|| default.kinds().to_vec()),
                cli.alphas
                    .clone()
                    .unwrap_or_else(|| default.alphas().to_vec()),
            )
        }
    };
    spec.map_err(input)
}

fn solver_config(cli: &Cli) -> Result<SolverConfig, Failure> {
    let mut config = SolverConfig::default();
    if let Some(tol) = cli.feas_tol {
        config.feasibility_tol = tol;
    }
    if let Some(gap) = cli.gap {
        config.gap = gap;
    }
    if let Some(n) = cli.iteration_limit {
        config.iteration_limit = n;
    }
    if let Some(n) = cli.node_limit {
        config.node_limit = n;
    }
    config.validate().map_err(input)?;
    Ok(config)
}

fn write_output(dest: &str, text: &str) -> Result<(), Failure> {
    if dest == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .context("cannot write to stdout")
            .map_err(other)
    } else {
        fs::write(dest, text)
            .with_context(|| format!("cannot write {dest}"))
            .map_err(other)
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let instance = load_instance(&cli.instance)?;
    let spec = sweep_spec(cli)?;
    let config = solver_config(cli)?;

    if let Some(path) = &cli.dump_lp {
        let (kind, alpha) = spec.cells().next().expect("spec is non-empty");
        let plan = UncertaintyPlan::new(kind, alpha).map_err(input)?;
        let compiled = compile(&instance, &plan).map_err(input)?;
        fs::write(path, write_lp_text(&compiled.lp))
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(other)?;
    }

    let start = Instant::now();
    let report = run_sweep(&instance, &spec, &config).map_err(input)?;
    eprintln!(
        "solved {} cell(s) over {} periods in {:.1} s",
        report.cells.len(),
        instance.periods(),
        start.elapsed().as_secs_f64()
    );
    for cell in report
        .cells
        .iter()
        .filter(|c| c.status != SolveStatus::Optimal)
    {
        eprintln!(
            "warning: {} at alpha {} ended with status {}",
            cell.kind, cell.alpha, cell.status
        );
    }

    write_output(&cli.out, &emit_report(&report, cli.format.into()))?;
    if let Some(path) = &cli.plot_data {
        fs::write(path, emit_plot_data(&report))
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(other)?;
    }

    let limited = report
        .cells
        .iter()
        .any(|c| c.status != SolveStatus::Optimal);
    Ok(if cli.mode == Mode::Single && limited {
        EXIT_LIMIT
    } else {
        0
    })
}
