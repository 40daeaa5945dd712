use std::process::ExitCode;

use serde::Serialize;

use peribeta_core::exec::ExecMode;
use peribeta_core::field::BetaBase;
use peribeta_core::tiling::{cross_check_fraction, Membership, MembershipContext};

use crate::output::{emit, SCHEMA};
use crate::CliError;

#[derive(Serialize)]
struct Mismatch {
    p: i64,
    q: i64,
    geometric: Membership,
    orbit_pure: bool,
}

#[derive(Serialize)]
struct CheckOut {
    schema: &'static str,
    command: &'static str,
    base: String,
    q_max: i64,
    cell: f64,
    depth: usize,
    accuracy: f64,
    checked: u64,
    inside: u64,
    outside: u64,
    uncertain: u64,
    uncertain_fraction: f64,
    mismatches: Vec<Mismatch>,
    passed: bool,
}

/// Classify every reduced p/q in (0,1) with q <= q_max both geometrically
/// and by the exact orbit; any non-uncertain disagreement is a mismatch.
pub fn run(
    base: &BetaBase,
    q_max: i64,
    cell: f64,
    depth: Option<usize>,
    budget: u64,
    mode: ExecMode,
    json: bool,
) -> Result<ExitCode, CliError> {
    let depth = match depth {
        Some(d) => d,
        None => MembershipContext::depth_for(base, cell)?,
    };
    let ctx = MembershipContext::build(base, depth, cell, mode)?;

    let mut checked = 0u64;
    let mut inside = 0u64;
    let mut outside = 0u64;
    let mut uncertain = 0u64;
    let mut mismatches = Vec::new();
    for q in 2..=q_max {
        for p in 1..q {
            if gcd(p, q) != 1 {
                continue;
            }
            let (geo, pure) = cross_check_fraction(&ctx, base, p, q, budget)?;
            checked += 1;
            match geo {
                Membership::Inside => inside += 1,
                Membership::Outside => outside += 1,
                Membership::Uncertain => uncertain += 1,
            }
            let disagrees = matches!(
                (geo, pure),
                (Membership::Inside, false) | (Membership::Outside, true)
            );
            if disagrees {
                mismatches.push(Mismatch {
                    p,
                    q,
                    geometric: geo,
                    orbit_pure: pure,
                });
            }
        }
    }

    let passed = mismatches.is_empty();
    let out = CheckOut {
        schema: SCHEMA,
        command: "check",
        base: base.minpoly().to_string(),
        q_max,
        cell,
        depth,
        accuracy: ctx.accuracy(),
        checked,
        inside,
        outside,
        uncertain,
        uncertain_fraction: if checked == 0 {
            0.0
        } else {
            uncertain as f64 / checked as f64
        },
        mismatches,
        passed,
    };
    emit(json, &out, || human(&out));
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn human(o: &CheckOut) {
    println!("base: {}", o.base);
    println!(
        "raster: cell {}  depth {}  accuracy {:.3e}",
        o.cell, o.depth, o.accuracy
    );
    println!(
        "checked {} fractions (q <= {}): {} inside, {} outside, {} uncertain ({:.1}%)",
        o.checked,
        o.q_max,
        o.inside,
        o.outside,
        o.uncertain,
        100.0 * o.uncertain_fraction
    );
    for m in &o.mismatches {
        println!(
            "MISMATCH {}/{}: geometric {:?}, orbit pure = {}",
            m.p, m.q, m.geometric, m.orbit_pure
        );
    }
    println!("{}", if o.passed { "PASS" } else { "FAIL" });
}
