use std::process::ExitCode;

use peribeta_core::exec::ExecMode;
use peribeta_core::field::BetaBase;
use peribeta_core::gamma::{
    counterexamples_csv, scan_region, GammaScanReport, RatBound, ScanMode, ScanOptions,
};

use crate::config::RunConfig;
use crate::output::{emit, OutDir};
use crate::{parse_fraction, CliError};

#[allow(clippy::too_many_arguments)]
pub fn run(
    base: &BetaBase,
    cfg: &RunConfig,
    q_max: i64,
    lo: Option<&str>,
    hi: Option<&str>,
    stop_first: bool,
    keep: Option<usize>,
    budget: Option<u64>,
    mode: ExecMode,
    json: bool,
) -> Result<ExitCode, CliError> {
    // Default region: the whole open interval (0, 1). Explicit bounds are
    // inclusive, so a counterexample sitting exactly on one is reported.
    let lo = match lo {
        Some(s) => {
            let (p, q) = parse_fraction(s)?;
            RatBound::new(p, q, true)?
        }
        None => RatBound::new(0, 1, false)?,
    };
    let hi = match hi {
        Some(s) => {
            let (p, q) = parse_fraction(s)?;
            RatBound::new(p, q, true)?
        }
        None => RatBound::new(1, 1, false)?,
    };
    let mut opts = ScanOptions {
        mode: if stop_first {
            ScanMode::StopFirst
        } else {
            ScanMode::FullSweep
        },
        exec: mode,
        budget,
        ..ScanOptions::default()
    };
    if let Some(k) = keep {
        opts.keep_counterexamples = k;
    }

    let report = scan_region(base, q_max, lo, hi, &opts)?;

    let mut out_dir = OutDir::new(&cfg.out_dir);
    // Artifacts must be reproducible byte for byte; wall-clock timing stays
    // on stdout only.
    let mut stored = report.clone();
    stored.elapsed_ms = 0;
    out_dir.write_json("gamma.json", &stored)?;
    if report.counterexample_count > 0 {
        out_dir.write_bytes(
            "gamma_counterexamples.csv",
            counterexamples_csv(&report).as_bytes(),
        )?;
    }

    emit(json, &report, || human(&report, out_dir.written()));
    Ok(ExitCode::SUCCESS)
}

fn human(r: &GammaScanReport, files: &[String]) {
    println!("base: {}", r.base);
    let b = |inc: bool| if inc { "inclusive" } else { "exclusive" };
    println!(
        "region: {} ({}) to {} ({}), q <= {}",
        r.lo,
        b(r.lo_inclusive),
        r.hi,
        b(r.hi_inclusive),
        r.q_max
    );
    println!("kernel: {}   mode: {:?}", r.kernel, r.mode);
    println!(
        "checked {}: {} purely periodic, {} counterexamples, {} undecided",
        r.fractions_checked, r.pure_count, r.counterexample_count, r.undecided_count
    );
    if let Some(m) = &r.min_counterexample {
        println!("smallest counterexample: {}/{}", m.p, m.q);
    }
    if let Some(f) = &r.verified_frontier {
        println!("verified frontier: {}/{}", f.p, f.q);
    }
    println!(
        "orbit walks {}  states {}  max period {}  max preperiod {}  ({} ms)",
        r.walks, r.orbit_states, r.max_period, r.max_preperiod, r.elapsed_ms
    );
    println!("{}", r.interpretation);
    for f in files {
        println!("wrote {f}");
    }
}
