use std::process::ExitCode;

use serde::Serialize;

use peribeta_core::field::BetaBase;
use peribeta_core::tiling::GapStructure;

use crate::output::{emit, SCHEMA};
use crate::CliError;

#[derive(Serialize)]
struct GapOut {
    /// Class index i; the gap value is T^i(1) under the quasi-greedy map.
    class: usize,
    /// Exact coordinates over the power basis, as rational strings.
    coords: Vec<String>,
    value: f64,
}

#[derive(Serialize)]
struct GapsOut {
    schema: &'static str,
    command: &'static str,
    base: String,
    /// Greedy expansion of 1.
    d1: String,
    /// Quasi-greedy envelope d*(1).
    envelope: String,
    preperiod_len: usize,
    period_len: usize,
    class_count: usize,
    gaps: Vec<GapOut>,
}

pub fn run(base: &BetaBase, json: bool) -> Result<ExitCode, CliError> {
    let s = GapStructure::new(base)?;
    let d1 = s
        .one
        .greedy
        .word()
        .map(|w| w.to_string())
        .unwrap_or_else(|| "<truncated>".to_string());
    let gaps = s
        .gaps
        .iter()
        .enumerate()
        .map(|(i, g)| GapOut {
            class: i,
            coords: g.coords().iter().map(|c| c.to_string()).collect(),
            value: base.value_f64(g).mid(),
        })
        .collect();
    let out = GapsOut {
        schema: SCHEMA,
        command: "gaps",
        base: base.minpoly().to_string(),
        d1,
        envelope: s.one.envelope.to_string(),
        preperiod_len: s.m,
        period_len: s.n,
        class_count: s.class_count(),
        gaps,
    };
    emit(json, &out, || human(&out));
    Ok(ExitCode::SUCCESS)
}

fn human(o: &GapsOut) {
    println!("base: {}", o.base);
    println!("d(1)  = {}", o.d1);
    println!("d*(1) = {}  (m = {}, n = {})", o.envelope, o.preperiod_len, o.period_len);
    println!("gap classes: {}", o.class_count);
    for g in &o.gaps {
        println!("  T^{}(1) = {:.12}  [{}]", g.class, g.value, g.coords.join(", "));
    }
}
