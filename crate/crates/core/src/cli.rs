//! The `qbafx` command line.
//!
//! Exit codes: 0 success, 1 I/O failure while writing output, 2 bad
//! arguments or invalid input, 3 solver non-convergence, 4 exact Shapley
//! requested for too many players. Outputs are assembled in memory and only
//! written once the command has succeeded.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::attribution::{
    explain_all, AttributionReport, Kind, Method, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::error::{AttributionError, SolveError};
use crate::qbaf::{ArgumentId, Qbaf};
use crate::render::{render_dot, RenderSpec};
use crate::semantics::{solve_qe, SolverConfig};
use crate::truth::{induce_qbaf, parse_reports, ClaimLabels};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;

/// Caps worker threads; 0 or unset means one per core.
pub const THREADS_ENV: &str = "QBAFX_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "qbafx",
    version,
    about = "QBAF strengths and attribution explanations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct SolverArgs {
    /// Sup-norm change at which iteration stops.
    #[arg(long = "tol", default_value_t = SolverConfig::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long = "max-iter", default_value_t = SolverConfig::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute QE strengths of every argument.
    Solve {
        #[arg(long)]
        qbaf: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induce a framework from truth-discovery reports.
    FromTdn {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the claim id -> (object, value) mapping.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Attribute a topic argument's strength to arguments or edges.
    Explain {
        #[arg(long)]
        qbaf: PathBuf,
        #[arg(long)]
        topic: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw an attribution table over its framework as Graphviz DOT.
    Render {
        #[arg(long)]
        qbaf: PathBuf,
        #[arg(long)]
        explanation: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = RenderSpec::DEFAULT_NEGLIGIBLE)]
        negligible: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Arguments,
    Relations,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Removal,
    ShapleyExact,
    ShapleySampled,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::NonConvergence { .. } => EXIT_NON_CONVERGENCE,
            SolveError::InvalidConfig(_) => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<AttributionError> for Failure {
    fn from(e: AttributionError) -> Self {
        let code = match e.root() {
            AttributionError::NonConvergence { .. } => EXIT_NON_CONVERGENCE,
            AttributionError::TooLargeForExact { .. } => EXIT_TOO_LARGE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    // Fails only if the global pool already exists, e.g. when `run` is
    // called twice in one process; the existing pool is then kept.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { qbaf, solver, out } => {
            let q = load_qbaf(&qbaf)?;
            let cfg = solver_config(&solver)?;
            let outcome = solve_qe(&q, &cfg)?;
            emit(out.as_deref(), &outcome.strengths.to_csv())
        }
        Command::FromTdn {
            reports,
            out,
            labels,
        } => {
            let text = read(&reports)?;
            let tdn = parse_reports(&text).map_err(Failure::input)?;
            let q = induce_qbaf(&tdn).map_err(Failure::input)?;
            let label_json = labels
                .as_ref()
                .map(|_| ClaimLabels::for_tdn(&tdn).to_json());
            write_atomic(&out, &q.to_json())?;
            if let (Some(path), Some(json)) = (labels, label_json) {
                write_atomic(&path, &json)?;
            }
            Ok(())
        }
        Command::Explain {
            qbaf,
            topic,
            kind,
            method,
            samples,
            seed,
            solver,
            out,
        } => {
            let q = load_qbaf(&qbaf)?;
            let cfg = solver_config(&solver)?;
            let topic = ArgumentId::new(topic).map_err(Failure::input)?;
            if !q.contains(&topic) {
                return Err(Failure::input(format!("unknown topic {topic}")));
            }
            let kind = match kind {
                KindArg::Arguments => Kind::Arguments,
                KindArg::Relations => Kind::Relations,
            };
            let method = match method {
                MethodArg::Removal => Method::Removal,
                MethodArg::ShapleyExact => Method::ShapleyExact,
                MethodArg::ShapleySampled => {
                    if samples == 0 {
                        return Err(Failure::input("--samples must be at least 1"));
                    }
                    Method::ShapleySampled { samples, seed }
                }
            };
            let report = explain_all(&q, &cfg, &topic, kind, method)?;
            emit(out.as_deref(), &report.to_csv())
        }
        Command::Render {
            qbaf,
            explanation,
            out,
            negligible,
        } => {
            let q = load_qbaf(&qbaf)?;
            let spec = RenderSpec::new(negligible).map_err(Failure::input)?;
            let report =
                AttributionReport::from_csv(&read(&explanation)?, &q).map_err(Failure::input)?;
            let dot = render_dot(&q, &report, &spec).map_err(Failure::input)?;
            write_atomic(&out, &dot)
        }
    }
}

fn solver_config(args: &SolverArgs) -> Result<SolverConfig, Failure> {
    Ok(SolverConfig::new(args.tolerance, args.max_iterations)?)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_qbaf(path: &Path) -> Result<Qbaf, Failure> {
    Qbaf::from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).map_err(|e| Failure::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Failure::io(path, e)
    })
}
