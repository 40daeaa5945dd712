//! `peribeta`: exact beta-expansion arithmetic in Pisot unit bases.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 self-check mismatch,
//! 3 budget exhausted.

mod cmd;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use peribeta_core::exec::ExecMode;
use peribeta_core::field::{BetaBase, MinimalPolynomial};
use peribeta_core::Error as CoreError;

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(CoreError::BudgetExhausted { .. })
            | CliError::Core(CoreError::CloudTooLarge { .. }) => ExitCode::from(3),
            _ => ExitCode::from(1),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "peribeta",
    version,
    about = "Beta-expansions, pure periodicity, and Thurston tiles for Pisot unit bases",
    after_help = "Coefficients are ascending from the constant term: \
                  \"-1,-1,0,1\" is x^3 - x - 1."
)]
struct Cli {
    /// Load defaults from a JSON run-config; explicit flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory for artifact files
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (1 forces sequential; falls back to PERIBETA_THREADS)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Emit a machine-readable JSON report on stdout
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BaseArg {
    /// Minimal polynomial coefficients, ascending: "-1,-1,0,1" is x^3 - x - 1
    #[arg(long, allow_hyphen_values = true, value_name = "COEFFS")]
    base: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a base: Pisot/unit gates, conjugates, finiteness property, family
    Classify {
        #[command(flatten)]
        base: BaseArg,
        /// State budget for the finiteness search
        #[arg(long)]
        search_bound: Option<u64>,
    },
    /// Expand a rational in [0,1) and report its exact orbit shape
    Expand {
        #[command(flatten)]
        base: BaseArg,
        /// The rational to expand, e.g. 3/5
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Step budget for the orbit walk
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Cross-check geometric membership against the exact orbit (exit 2 on mismatch)
    Check {
        #[command(flatten)]
        base: BaseArg,
        /// Largest denominator to test
        #[arg(long = "qmax")]
        q_max: Option<i64>,
        /// Raster cell size
        #[arg(long)]
        cell: Option<f64>,
        /// Cloud depth (default: derived from the cell size)
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Expansion of 1, quasi-greedy envelope, and successor gap classes
    Gaps {
        #[command(flatten)]
        base: BaseArg,
    },
    /// Materialize tile point clouds: CSV, raster image, JSON summary
    Tile {
        #[command(flatten)]
        base: BaseArg,
        /// Cloud generation depth
        #[arg(long)]
        depth: Option<usize>,
        /// Raster cell size for the image
        #[arg(long)]
        cell: Option<f64>,
        /// Split the central tile into its gap-class subtiles
        #[arg(long)]
        subtiles: bool,
        /// Also emit every translated tile reaching within this radius of the origin
        #[arg(long, value_name = "RADIUS")]
        tiles_around: Option<f64>,
    },
    /// Farey scan for pure-periodicity counterexamples and the verified frontier
    Gamma {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long = "qmax")]
        q_max: Option<i64>,
        /// Lower scan bound as a fraction, e.g. 1/3 (inclusive)
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<String>,
        /// Upper scan bound as a fraction (inclusive; default: sweep below 1)
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<String>,
        /// Stop at the first counterexample instead of sweeping the region
        #[arg(long)]
        stop_first: bool,
        /// Keep at most this many counterexamples in the report
        #[arg(long)]
        keep: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Covering audit: multiplicity of translated tiles over a centered window
    Audit {
        #[command(flatten)]
        base: BaseArg,
        /// Side length of the audited square window
        #[arg(long)]
        side: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        cell: Option<f64>,
        /// Number of resolution halvings
        #[arg(long)]
        halvings: Option<usize>,
    },
    /// Regenerate the figure-analogue artifacts and the frontier report
    Repro {
        /// Which figure: 1, 3, 4, 5, gamma, or all
        #[arg(long)]
        figure: String,
        #[arg(long = "qmax")]
        q_max: Option<i64>,
        #[arg(long)]
        cell: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit(); // prints and exits 0
            }
            // clap's own usage exit code is 2, which this tool reserves for
            // self-check mismatches; remap usage errors to 1.
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    let mode = setup_threads(cfg.threads)?;
    let json = cli.json;

    match cli.command {
        Command::Classify { base, search_bound } => {
            let base = resolve_base(&base, &cfg)?;
            let bound = search_bound.unwrap_or(cfg.search_bound);
            cmd::classify::run(&base, bound, mode, json)
        }
        Command::Expand { base, x, budget } => {
            let base = resolve_base(&base, &cfg)?;
            let (p, q) = parse_fraction(&x)?;
            cmd::expand::run(&base, p, q, budget.unwrap_or(cfg.budget), json)
        }
        Command::Check {
            base,
            q_max,
            cell,
            depth,
            budget,
        } => {
            let base = resolve_base(&base, &cfg)?;
            cmd::check::run(
                &base,
                q_max.unwrap_or(cfg.q_max),
                cell.unwrap_or(cfg.cell),
                depth.or(cfg.depth),
                budget.unwrap_or(cfg.budget),
                mode,
                json,
            )
        }
        Command::Gaps { base } => {
            let base = resolve_base(&base, &cfg)?;
            cmd::gaps::run(&base, json)
        }
        Command::Tile {
            base,
            depth,
            cell,
            subtiles,
            tiles_around,
        } => {
            let base = resolve_base(&base, &cfg)?;
            cmd::tile::run(
                &base,
                &cfg,
                depth.or(cfg.depth),
                cell.unwrap_or(cfg.cell),
                subtiles,
                tiles_around,
                json,
            )
        }
        Command::Gamma {
            base,
            q_max,
            lo,
            hi,
            stop_first,
            keep,
            budget,
        } => {
            let base = resolve_base(&base, &cfg)?;
            let lo = lo.or_else(|| cfg.lo.clone());
            let hi = hi.or_else(|| cfg.hi.clone());
            cmd::gamma::run(
                &base,
                &cfg,
                q_max.unwrap_or(cfg.q_max),
                lo.as_deref(),
                hi.as_deref(),
                stop_first,
                keep,
                budget,
                mode,
                json,
            )
        }
        Command::Audit {
            base,
            side,
            depth,
            cell,
            halvings,
        } => {
            let base = resolve_base(&base, &cfg)?;
            cmd::audit::run(
                &base,
                &cfg,
                side.unwrap_or(cfg.side),
                depth.or(cfg.depth),
                cell.unwrap_or(cfg.cell),
                halvings.unwrap_or(cfg.halvings),
                mode,
                json,
            )
        }
        Command::Repro {
            figure,
            q_max,
            cell,
            depth,
        } => cmd::repro::run(
            &figure,
            &cfg,
            q_max.unwrap_or(cfg.q_max),
            cell,
            depth,
            mode,
            json,
        ),
    }
}

/// Pick the execution mode and, for an explicit thread count above 1, size
/// the global worker pool. Precedence: flag/config, then PERIBETA_THREADS.
fn setup_threads(configured: Option<usize>) -> Result<ExecMode, CliError> {
    let n = match configured {
        Some(n) => Some(n),
        None => match std::env::var("PERIBETA_THREADS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                CliError::Usage(format!("PERIBETA_THREADS must be a positive integer, got {s:?}"))
            })?),
            Err(_) => None,
        },
    };
    match n {
        Some(0) => Err(CliError::Usage("threads must be at least 1".into())),
        Some(1) => Ok(ExecMode::Sequential),
        Some(n) => {
            // Ignore the error if a pool already exists (tests, repeat calls).
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(ExecMode::Parallel)
        }
        None => Ok(ExecMode::default()),
    }
}

fn resolve_base(arg: &BaseArg, cfg: &RunConfig) -> Result<BetaBase, CliError> {
    let coeffs = match (&arg.base, &cfg.base) {
        (Some(s), _) => parse_coeffs(s)?,
        (None, Some(v)) => v.clone(),
        (None, None) => {
            return Err(CliError::Usage(
                "--base is required (or set \"base\" in the config)".into(),
            ))
        }
    };
    Ok(BetaBase::new(MinimalPolynomial::new(coeffs)?)?)
}

fn parse_coeffs(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Usage(format!("bad coefficient {t:?} in --base")))
        })
        .collect()
}

pub fn parse_fraction(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("expected a fraction like 3/5, got {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (
            p.trim().parse::<i64>().map_err(|_| bad())?,
            q.trim().parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if q <= 0 {
        return Err(CliError::Usage(format!(
            "fraction denominator must be positive, got {s:?}"
        )));
    }
    Ok((p, q))
}
