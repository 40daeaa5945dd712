use std::process::ExitCode;

use serde::Serialize;

use peribeta_core::expansion::{
    cycle_value_fraction, expand_fraction, expansion_of_one, is_admissible, Expansion,
};
use peribeta_core::field::BetaBase;
use peribeta_core::{Error as CoreError, Result as CoreResult};

use crate::output::{emit, SCHEMA};
use crate::CliError;

#[derive(Serialize)]
struct ExpandOut {
    schema: &'static str,
    command: &'static str,
    base: String,
    x: String,
    /// Canonical word: digits, with the cycle in parentheses.
    word: String,
    preperiod_len: usize,
    period_len: usize,
    purely_periodic: bool,
    /// Greedy words are admissible against the envelope by construction;
    /// reported as a self-check.
    admissible: bool,
    /// For a purely periodic expansion: the cycle, re-evaluated exactly,
    /// equals x. Absent otherwise.
    cycle_value_matches: Option<bool>,
}

pub fn run(base: &BetaBase, p: i64, q: i64, budget: u64, json: bool) -> Result<ExitCode, CliError> {
    let expansion = expand_fraction(base, p, q, budget)?;
    let word = match expansion.word() {
        Some(w) => w,
        None => return Err(CoreError::BudgetExhausted { budget }.into()),
    };
    let one = expansion_of_one(base, budget)?;
    let pure = expansion.is_purely_periodic();
    let cycle_value_matches = match (&expansion, pure) {
        (Expansion::Periodic(w), true) => Some(cycle_matches(base, w.cycle(), p, q)?),
        (Expansion::Finite(d), true) => {
            debug_assert!(d.is_empty());
            Some(p == 0)
        }
        _ => None,
    };
    let out = ExpandOut {
        schema: SCHEMA,
        command: "expand",
        base: base.minpoly().to_string(),
        x: format!("{p}/{q}"),
        word: word.to_string(),
        preperiod_len: word.preperiod_len(),
        period_len: word.period_len(),
        purely_periodic: pure,
        admissible: is_admissible(&one, &word),
        cycle_value_matches,
    };
    emit(json, &out, || human(&out));
    Ok(ExitCode::SUCCESS)
}

fn cycle_matches(base: &BetaBase, cycle: &[u32], p: i64, q: i64) -> CoreResult<bool> {
    let v = cycle_value_fraction(base, cycle)?;
    Ok(base.cmp_elements(&v, &base.from_ratio(p, q)).is_eq())
}

fn human(o: &ExpandOut) {
    println!("base: {}", o.base);
    println!("x = {}", o.x);
    println!("d(x) = {}", o.word);
    println!(
        "preperiod {}  period {}  purely_periodic = {}",
        o.preperiod_len, o.period_len, o.purely_periodic
    );
    if let Some(ok) = o.cycle_value_matches {
        println!("cycle re-evaluates to x: {ok}");
    }
}
