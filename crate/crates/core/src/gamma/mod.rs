//! Empirical scans for gamma(beta), the purely-periodic threshold.
//!
//! For a Pisot unit beta, gamma(beta) is the largest c such that every
//! rational in [0, c) has a purely periodic beta-expansion. A scan walks the
//! orbit of every reduced p/q with q <= Q in a range and reports which are
//! purely periodic. Two honest limits shape every report:
//!
//! * a found counterexample is an exact upper bound for gamma;
//! * a clean prefix certifies only the finite sublattice q <= Q, so it is
//!   never a lower bound for gamma. Reports say which fractions were checked
//!   and never claim a value for gamma itself.
//!
//! Full sweeps chunk the denominator range (orbits of different denominators
//! never interact), merge in denominator order, and are deterministic for a
//! fixed kernel. Stop-first scans walk fractions in ascending (Farey) order
//! and stop at the first counterexample.

pub mod farey;
pub mod kernel;

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::classify::{classify_with, ClassificationReport, PropertyF, DEFAULT_SEARCH_BOUND};
use crate::exec::{self, ExecMode};
use crate::field::BetaBase;
use crate::{Error, Result};

pub use farey::{numerators_in, predecessor, successor, FareyStream, Fraction, RatBound};
pub use kernel::{
    engine_walk, kernel_for, sweep_denominator, DenomCtx, FixedConstants, FracStatus, KernelKind,
    WalkOutcome,
};

/// Identifies the JSON layout of every report this crate emits.
pub const SCHEMA: &str = "peribeta/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    StopFirst,
    FullSweep,
}

/// Scan tuning; the defaults suit interactive use.
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub mode: ScanMode,
    pub exec: ExecMode,
    /// Cap on the stored counterexample list (the count is always exact).
    pub keep_counterexamples: usize,
    /// Cap on the stored undecided list.
    pub keep_undecided: usize,
    /// Per-walk step budget; `None` scales with the denominator.
    pub budget: Option<u64>,
    /// Skip the fixed-point lanes even where they apply.
    pub force_engine: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            mode: ScanMode::FullSweep,
            exec: ExecMode::default(),
            keep_counterexamples: 1000,
            keep_undecided: 100,
            budget: None,
            force_engine: false,
        }
    }
}

/// Default per-walk budget: generous next to the largest cycle a denominator
/// can carry (cycles live among the O(q^3) states of the absorbing region).
fn walk_budget(q: i64, override_budget: Option<u64>) -> u64 {
    override_budget.unwrap_or_else(|| {
        let q = q as u64;
        q.saturating_mul(q)
            .saturating_mul(q)
            .saturating_mul(4)
            .max(1_000_000)
    })
}

/// A rational whose expansion is not purely periodic, with its exact orbit
/// shape. `period == 0` means the expansion is finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub p: i64,
    pub q: i64,
    pub preperiod: u64,
    pub period: u64,
}

impl Counterexample {
    fn fraction(&self) -> Fraction {
        Fraction::new(self.p, self.q)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaScanReport {
    pub schema: String,
    /// Display form of the minimal polynomial.
    pub base: String,
    pub q_max: i64,
    /// Exact range bounds as "num/den" with their inclusivity.
    pub lo: String,
    pub lo_inclusive: bool,
    pub hi: String,
    pub hi_inclusive: bool,
    pub mode: ScanMode,
    pub kernel: String,
    pub fractions_checked: u64,
    pub pure_count: u64,
    pub counterexample_count: u64,
    /// Smallest counterexamples by value, capped at the configured length.
    pub counterexamples: Vec<Counterexample>,
    pub counterexamples_truncated: bool,
    pub min_counterexample: Option<Fraction>,
    /// Largest scanned fraction below which every checked p/q (q <= q_max)
    /// is purely periodic. Only a statement about the scanned sublattice:
    /// not a lower bound for gamma. Present only for scans starting at 0.
    pub verified_frontier: Option<Fraction>,
    pub undecided_count: u64,
    pub undecided: Vec<Fraction>,
    /// Distinct orbit states certified, summed over checked fractions.
    pub orbit_states: u64,
    /// Orbit walks actually performed (kernel-dependent).
    pub walks: u64,
    pub max_period: u64,
    pub max_preperiod: u64,
    pub elapsed_ms: u64,
    pub interpretation: String,
}

/// Running tallies of one scan (or one chunk of a sweep).
struct Accum {
    cap_cex: usize,
    cap_und: usize,
    checked: u64,
    pure: u64,
    cex_count: u64,
    counterexamples: Vec<Counterexample>,
    min_cex: Option<Counterexample>,
    undecided_count: u64,
    undecided: Vec<Fraction>,
    first_bad: Option<Fraction>,
    last_checked: Option<Fraction>,
    orbit_states: u64,
    walks: u64,
    max_period: u64,
    max_preperiod: u64,
}

impl Accum {
    fn new(cap_cex: usize, cap_und: usize) -> Accum {
        Accum {
            cap_cex,
            cap_und,
            checked: 0,
            pure: 0,
            cex_count: 0,
            counterexamples: Vec::new(),
            min_cex: None,
            undecided_count: 0,
            undecided: Vec::new(),
            first_bad: None,
            last_checked: None,
            orbit_states: 0,
            walks: 0,
            max_period: 0,
            max_preperiod: 0,
        }
    }

    fn record(&mut self, f: Fraction, status: FracStatus) {
        self.checked += 1;
        self.orbit_states += status.orbit_states();
        if self.last_checked.map_or(true, |l| f > l) {
            self.last_checked = Some(f);
        }
        match status {
            FracStatus::Pure { period } => {
                self.pure += 1;
                self.max_period = self.max_period.max(period);
            }
            FracStatus::Impure { preperiod, period } => {
                self.max_period = self.max_period.max(period);
                self.max_preperiod = self.max_preperiod.max(preperiod);
                self.push_cex(Counterexample {
                    p: f.p,
                    q: f.q,
                    preperiod,
                    period,
                });
            }
            FracStatus::Finite { digits } => {
                self.max_preperiod = self.max_preperiod.max(digits);
                self.push_cex(Counterexample {
                    p: f.p,
                    q: f.q,
                    preperiod: digits,
                    period: 0,
                });
            }
            FracStatus::Undecided => {
                self.undecided_count += 1;
                if self.undecided.len() < self.cap_und {
                    self.undecided.push(f);
                }
                self.note_bad(f);
            }
        }
    }

    fn push_cex(&mut self, c: Counterexample) {
        self.cex_count += 1;
        if self.min_cex.map_or(true, |m| c.fraction() < m.fraction()) {
            self.min_cex = Some(c);
        }
        self.note_bad(c.fraction());
        self.counterexamples.push(c);
        if self.counterexamples.len() >= 2 * self.cap_cex.max(1) {
            self.compact();
        }
    }

    fn note_bad(&mut self, f: Fraction) {
        if self.first_bad.map_or(true, |b| f < b) {
            self.first_bad = Some(f);
        }
    }

    /// Keep only the smallest `cap_cex` counterexamples by value.
    fn compact(&mut self) {
        self.counterexamples.sort_by_key(|c| c.fraction());
        self.counterexamples.truncate(self.cap_cex);
    }

    fn merge(mut self, mut other: Accum) -> Accum {
        self.checked += other.checked;
        self.pure += other.pure;
        self.cex_count += other.cex_count;
        self.undecided_count += other.undecided_count;
        self.orbit_states += other.orbit_states;
        self.walks += other.walks;
        self.max_period = self.max_period.max(other.max_period);
        self.max_preperiod = self.max_preperiod.max(other.max_preperiod);
        self.counterexamples.append(&mut other.counterexamples);
        self.compact();
        for f in other.undecided {
            if self.undecided.len() < self.cap_und {
                self.undecided.push(f);
            }
        }
        if let Some(c) = other.min_cex {
            if self.min_cex.map_or(true, |m| c.fraction() < m.fraction()) {
                self.min_cex = Some(c);
            }
        }
        if let Some(b) = other.first_bad {
            self.note_bad(b);
        }
        if let Some(l) = other.last_checked {
            if self.last_checked.map_or(true, |cur| l > cur) {
                self.last_checked = Some(l);
            }
        }
        self
    }
}

fn validate_range(lo: &RatBound, hi: &RatBound) -> Result<()> {
    // scans live in [0, 1]: expansions are defined there
    if lo.num < 0 || hi.num > hi.den {
        return Err(Error::BadScanRange);
    }
    if lo.num as i128 * hi.den as i128 >= hi.num as i128 * lo.den as i128 {
        return Err(Error::BadScanRange);
    }
    Ok(())
}

/// Scan every reduced fraction with denominator <= q_max between the bounds.
/// The primitive behind [`gamma_scan`] and [`interval_scan`].
pub fn scan_region(
    base: &BetaBase,
    q_max: i64,
    lo: RatBound,
    hi: RatBound,
    opts: &ScanOptions,
) -> Result<GammaScanReport> {
    validate_range(&lo, &hi)?;
    if q_max < 1 {
        return Err(Error::BadScanRange);
    }
    let started = Instant::now();
    let (kind, consts) = kernel_for(base, opts.force_engine);
    let acc = match opts.mode {
        ScanMode::StopFirst => scan_stop_first(base, q_max, lo, hi, kind, consts, opts)?,
        ScanMode::FullSweep => scan_full(base, q_max, lo, hi, kind, consts, opts)?,
    };
    Ok(build_report(
        base,
        q_max,
        lo,
        hi,
        kind,
        acc,
        opts,
        started.elapsed().as_millis() as u64,
    ))
}

/// Scan (0, c_max): the range whose clean prefix bounds gamma from... nothing.
/// A counterexample bounds gamma from above; see the report interpretation.
pub fn gamma_scan(
    base: &BetaBase,
    q_max: i64,
    c_max: RatBound,
    opts: &ScanOptions,
) -> Result<GammaScanReport> {
    let lo = RatBound::new(0, 1, false)?;
    scan_region(base, q_max, lo, c_max, opts)
}

/// All non-purely-periodic reduced fractions in [lo, hi], ascending.
pub fn interval_scan(
    base: &BetaBase,
    lo: RatBound,
    hi: RatBound,
    q_max: i64,
    opts: &ScanOptions,
) -> Result<GammaScanReport> {
    scan_region(base, q_max, lo, hi, opts)
}

fn scan_stop_first(
    base: &BetaBase,
    q_max: i64,
    lo: RatBound,
    hi: RatBound,
    kind: KernelKind,
    consts: Option<FixedConstants>,
    opts: &ScanOptions,
) -> Result<Accum> {
    let mut acc = Accum::new(opts.keep_counterexamples, opts.keep_undecided);
    let mut ctxs: HashMap<i64, DenomCtx> = HashMap::new();
    for f in FareyStream::new(q_max, lo, hi)? {
        if !ctxs.contains_key(&f.q) {
            ctxs.insert(f.q, DenomCtx::new(base, f.q)?);
        }
        let ctx = ctxs.get_mut(&f.q).expect("context just inserted");
        let status = match ctx.status(f.p) {
            Some(s) => s,
            None => {
                ctx.sweep(kind, consts.as_ref(), &[f.p], walk_budget(f.q, opts.budget))?[0].1
            }
        };
        acc.record(f, status);
        if !status.is_pure() && status != FracStatus::Undecided {
            break; // first counterexample in Farey order
        }
    }
    acc.walks = ctxs.values().map(|c| c.walks).sum();
    Ok(acc)
}

fn scan_full(
    base: &BetaBase,
    q_max: i64,
    lo: RatBound,
    hi: RatBound,
    kind: KernelKind,
    consts: Option<FixedConstants>,
    opts: &ScanOptions,
) -> Result<Accum> {
    let chunks: Vec<Vec<i64>> = (1..=q_max)
        .collect::<Vec<i64>>()
        .chunks(32)
        .map(<[i64]>::to_vec)
        .collect();
    let partials = exec::map_collect(opts.exec, chunks, |qs| -> Result<Accum> {
        let mut acc = Accum::new(opts.keep_counterexamples, opts.keep_undecided);
        for q in qs {
            let ps = numerators_in(q, &lo, &hi);
            if ps.is_empty() {
                continue;
            }
            let (statuses, walks) =
                sweep_denominator(base, q, &ps, walk_budget(q, opts.budget), kind, consts.as_ref())?;
            for (p, st) in statuses {
                acc.record(Fraction::new(p, q), st);
            }
            acc.walks += walks;
        }
        Ok(acc)
    });
    let mut merged = Accum::new(opts.keep_counterexamples, opts.keep_undecided);
    for part in partials {
        merged = merged.merge(part?);
    }
    Ok(merged)
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    base: &BetaBase,
    q_max: i64,
    lo: RatBound,
    hi: RatBound,
    kind: KernelKind,
    mut acc: Accum,
    opts: &ScanOptions,
    elapsed_ms: u64,
) -> GammaScanReport {
    acc.compact();
    acc.undecided.sort();
    let min_counterexample = acc.min_cex.map(|c| c.fraction());
    // the frontier claim quantifies over every fraction below it, so it only
    // exists when the scan started at zero
    let verified_frontier = if lo.num == 0 {
        match acc.first_bad {
            Some(bad) => Some(predecessor(bad, q_max)),
            None => acc.last_checked,
        }
    } else {
        None
    };
    let mut interpretation = match min_counterexample {
        Some(m) => format!(
            "{m} is not purely periodic, so gamma <= {m}; purity below it is \
             certified only for denominators <= {q_max} and gives no lower bound on gamma"
        ),
        None => format!(
            "no counterexample with denominator <= {q_max} in the scanned range; \
             this certifies a finite sublattice only and gives no lower bound on gamma"
        ),
    };
    if acc.undecided_count > 0 {
        interpretation.push_str(&format!(
            "; {} orbit walk(s) exceeded the step budget and are undecided",
            acc.undecided_count
        ));
    }
    GammaScanReport {
        schema: SCHEMA.to_string(),
        base: base.minpoly().to_string(),
        q_max,
        lo: format!("{}/{}", lo.num, lo.den),
        lo_inclusive: lo.inclusive,
        hi: format!("{}/{}", hi.num, hi.den),
        hi_inclusive: hi.inclusive,
        mode: opts.mode,
        kernel: kind.name().to_string(),
        fractions_checked: acc.checked,
        pure_count: acc.pure,
        counterexample_count: acc.cex_count,
        counterexamples_truncated: (acc.counterexamples.len() as u64) < acc.cex_count,
        counterexamples: acc.counterexamples,
        min_counterexample,
        verified_frontier,
        undecided_count: acc.undecided_count,
        undecided: acc.undecided,
        orbit_states: acc.orbit_states,
        walks: acc.walks,
        max_period: acc.max_period,
        max_preperiod: acc.max_preperiod,
        elapsed_ms,
        interpretation,
    }
}

/// The counterexample list as CSV (finite expansions have period 0).
pub fn counterexamples_csv(report: &GammaScanReport) -> String {
    let mut out = String::from("p,q,preperiod_len,period_len\n");
    for c in &report.counterexamples {
        out.push_str(&format!("{},{},{},{}\n", c.p, c.q, c.preperiod, c.period));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub name: String,
    /// `None` when the scan could not decide (budget exhaustion).
    pub passed: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremChecksReport {
    pub schema: String,
    pub base: String,
    /// Which expectation pattern the base falls under.
    pub case: String,
    pub partial: bool,
    pub checks: Vec<TheoremCheck>,
    pub classification: ClassificationReport,
}

/// The clean prefix a cubic base with property (F) is expected to show.
/// Bases without a recorded prefix get a conservative default.
fn clean_prefix(base: &BetaBase) -> (RatBound, &'static str) {
    if base.minpoly().coeffs() == [-1, -1, 0, 1].as_slice() {
        // the smallest Pisot unit: pure periodicity holds strictly below this
        (
            RatBound {
                num: 666_666_666,
                den: 1_000_000_000,
                inclusive: false,
            },
            "recorded clean prefix for this base",
        )
    } else {
        (
            RatBound {
                num: 1,
                den: 50,
                inclusive: false,
            },
            "conservative default prefix",
        )
    }
}

/// Check the base against the expectation its classification predicts:
/// quadratic with (F) scans clean everywhere; a failed gate or failed (F)
/// must produce a counterexample below 1/50; a cubic with (F) keeps a clean
/// prefix, and with complex conjugates also a counterexample above it.
pub fn theorem_checks(
    base: &BetaBase,
    q_max: i64,
    opts: &ScanOptions,
) -> Result<TheoremChecksReport> {
    let classification = classify_with(base, DEFAULT_SEARCH_BOUND, opts.exec)?;
    let gate = classification.is_pisot && classification.is_unit;
    let mut checks = Vec::new();
    let mut partial = false;

    let case = if gate && matches!(classification.property_f, PropertyF::Undetermined { .. }) {
        partial = true;
        checks.push(TheoremCheck {
            name: "property_f_decided".into(),
            passed: None,
            detail: "the bounded orbit search ended without deciding property (F)".into(),
        });
        "undetermined"
    } else if gate && classification.property_f == PropertyF::Holds && base.degree() == 2 {
        let full = ScanOptions {
            mode: ScanMode::FullSweep,
            ..opts.clone()
        };
        let report = gamma_scan(base, q_max, RatBound::new(1, 1, false)?, &full)?;
        partial |= report.undecided_count > 0;
        let clean = report.counterexample_count == 0;
        checks.push(TheoremCheck {
            name: "full_sweep_clean".into(),
            passed: Some(clean && report.undecided_count == 0),
            detail: format!(
                "{} fractions with q <= {q_max} checked, {} counterexamples",
                report.fractions_checked, report.counterexample_count
            ),
        });
        "quadratic_full_sweep"
    } else if gate && classification.property_f == PropertyF::Holds {
        let (prefix, prefix_kind) = clean_prefix(base);
        let full = ScanOptions {
            mode: ScanMode::FullSweep,
            ..opts.clone()
        };
        let report = gamma_scan(base, q_max, prefix, &full)?;
        partial |= report.undecided_count > 0;
        checks.push(TheoremCheck {
            name: "clean_prefix".into(),
            passed: Some(report.counterexample_count == 0 && report.undecided_count == 0),
            detail: format!(
                "below {}/{} ({prefix_kind}): {} fractions checked, {} counterexamples",
                prefix.num, prefix.den, report.fractions_checked, report.counterexample_count
            ),
        });
        if base.complex_conjugate().is_some() {
            let stop = ScanOptions {
                mode: ScanMode::StopFirst,
                ..opts.clone()
            };
            let above = interval_scan(
                base,
                RatBound::new(prefix.num, prefix.den, true)?,
                RatBound::new(1, 1, false)?,
                q_max,
                &stop,
            )?;
            partial |= above.undecided_count > 0;
            checks.push(TheoremCheck {
                name: "counterexample_above_prefix".into(),
                passed: Some(above.min_counterexample.is_some()),
                detail: match above.min_counterexample {
                    Some(m) => format!("smallest counterexample above the prefix: {m}"),
                    None => format!("no counterexample found with q <= {q_max}"),
                },
            });
        }
        "cubic_clean_prefix"
    } else {
        // gate failure or failed (F): gamma vanishes, so counterexamples
        // appear below any positive threshold once q is large enough
        let stop = ScanOptions {
            mode: ScanMode::StopFirst,
            ..opts.clone()
        };
        let report = gamma_scan(base, q_max, RatBound::new(1, 50, false)?, &stop)?;
        partial |= report.undecided_count > 0;
        checks.push(TheoremCheck {
            name: "counterexample_below_1_50".into(),
            passed: Some(report.min_counterexample.is_some()),
            detail: match report.min_counterexample {
                Some(m) => format!("counterexample {m} found below 1/50"),
                None => format!("no counterexample below 1/50 with q <= {q_max}"),
            },
        });
        "gamma_vanishes"
    };

    Ok(TheoremChecksReport {
        schema: SCHEMA.to_string(),
        base: base.minpoly().to_string(),
        case: case.to_string(),
        partial,
        checks,
        classification,
    })
}
