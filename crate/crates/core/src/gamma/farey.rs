//! Ascending enumeration of reduced fractions with bounded denominator.
//!
//! Consecutive terms a/b < c/d of the Farey sequence F_Q satisfy
//! bc - ad = 1, and the term after c/d is (kc - a)/(kd - b) with
//! k = floor((Q + b) / d). Seeding the recurrence at an arbitrary rational
//! bound takes one O(Q) pass (smallest admissible numerator per
//! denominator); neighbors of a known member come from a modular inverse.

use crate::{Error, Result};

/// A reduced fraction p/q with q >= 1. Ordering is by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Fraction {
    pub p: i64,
    pub q: i64,
}

impl Fraction {
    pub fn new(p: i64, q: i64) -> Fraction {
        debug_assert!(q >= 1);
        debug_assert_eq!(gcd(p.abs(), q), 1, "fraction must be reduced");
        Fraction { p, q }
    }

    pub fn value_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128))
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// One endpoint of a scan range: the rational num/den, either open or closed.
#[derive(Debug, Clone, Copy)]
pub struct RatBound {
    pub num: i64,
    pub den: i64,
    pub inclusive: bool,
}

impl RatBound {
    pub fn new(num: i64, den: i64, inclusive: bool) -> Result<RatBound> {
        if den <= 0 {
            return Err(Error::BadScanRange);
        }
        Ok(RatBound { num, den, inclusive })
    }

    pub fn value_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// p/q compared against the bound value.
    fn cmp_frac(&self, p: i64, q: i64) -> std::cmp::Ordering {
        (p as i128 * self.den as i128).cmp(&(self.num as i128 * q as i128))
    }

    /// Does p/q lie on the admissible side when this is the lower endpoint?
    pub fn admits_above(&self, p: i64, q: i64) -> bool {
        let c = self.cmp_frac(p, q);
        c == std::cmp::Ordering::Greater || (self.inclusive && c == std::cmp::Ordering::Equal)
    }

    /// Does p/q lie on the admissible side when this is the upper endpoint?
    pub fn admits_below(&self, p: i64, q: i64) -> bool {
        let c = self.cmp_frac(p, q);
        c == std::cmp::Ordering::Less || (self.inclusive && c == std::cmp::Ordering::Equal)
    }
}

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Extended gcd: returns (g, x) with a*x = g (mod m), for the inverse below.
fn mod_inverse(a: i64, m: i64) -> i64 {
    debug_assert!(m >= 1);
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let k = old_r / r;
        (old_r, r) = (r, old_r - k * r);
        (old_s, s) = (s, old_s - k * s);
    }
    debug_assert_eq!(old_r, 1, "inverse requires coprime arguments");
    old_s.rem_euclid(m)
}

/// The neighbor of f on its left in F_qmax. Total: the predecessor of 0/1 is
/// -1/qmax, so callers scanning positive ranges may see a negative numerator.
pub fn predecessor(f: Fraction, q_max: i64) -> Fraction {
    debug_assert!(f.q <= q_max);
    // b*p - a*q = 1 with b <= q_max maximal
    let b0 = mod_inverse(f.p, f.q);
    let b0 = if b0 == 0 { f.q } else { b0 }; // only when q = 1; keeps b positive
    let b = b0 + f.q * ((q_max - b0) / f.q);
    let a = (b as i128 * f.p as i128 - 1) / f.q as i128;
    Fraction { p: a as i64, q: b }
}

/// The neighbor of f on its right in F_qmax.
pub fn successor(f: Fraction, q_max: i64) -> Fraction {
    debug_assert!(f.q <= q_max);
    // p*d - c*q = -1 with d <= q_max maximal
    let d0 = (f.q - mod_inverse(f.p, f.q)).rem_euclid(f.q);
    let d0 = if d0 == 0 { f.q } else { d0 };
    let d = d0 + f.q * ((q_max - d0) / f.q);
    let c = (d as i128 * f.p as i128 + 1) / f.q as i128;
    Fraction { p: c as i64, q: d }
}

/// Smallest fraction in F_qmax admitted above `lo`.
fn first_above(lo: &RatBound, q_max: i64) -> Fraction {
    let mut best: Option<Fraction> = None;
    for q in 1..=q_max {
        // smallest p with p/q on the admissible side of lo
        let scaled = lo.num as i128 * q as i128;
        let fl = scaled.div_euclid(lo.den as i128);
        let exact = scaled.rem_euclid(lo.den as i128) == 0;
        let p = if exact && lo.inclusive { fl } else { fl + 1 };
        let p = i64::try_from(p).expect("numerator fits i64");
        if gcd(p.abs(), q) != 1 {
            continue;
        }
        let cand = Fraction { p, q };
        if best.map_or(true, |b| cand < b) {
            best = Some(cand);
        }
    }
    best.expect("q_max >= 1 always yields a candidate")
}

/// Ascending stream of reduced fractions with denominator <= q_max between
/// two rational bounds (0 <= lo < hi).
pub struct FareyStream {
    q_max: i64,
    hi: RatBound,
    prev: Fraction,
    cur: Option<Fraction>,
}

impl FareyStream {
    pub fn new(q_max: i64, lo: RatBound, hi: RatBound) -> Result<FareyStream> {
        // require 0 <= lo < hi (cmp_frac compares hi's value against lo)
        if q_max < 1 || lo.num < 0 || lo.cmp_frac(hi.num, hi.den) != std::cmp::Ordering::Greater {
            return Err(Error::BadScanRange);
        }
        let first = first_above(&lo, q_max);
        let prev = predecessor(first, q_max);
        Ok(FareyStream {
            q_max,
            hi,
            prev,
            cur: Some(first),
        })
    }
}

impl Iterator for FareyStream {
    type Item = Fraction;

    fn next(&mut self) -> Option<Fraction> {
        let out = self.cur?;
        if !self.hi.admits_below(out.p, out.q) {
            self.cur = None;
            return None;
        }
        let k = (self.q_max + self.prev.q) / out.q;
        let next = Fraction {
            p: k * out.p - self.prev.p,
            q: k * out.q - self.prev.q,
        };
        self.prev = out;
        self.cur = Some(next);
        Some(out)
    }
}

/// Reduced numerators p with p/q admitted by both bounds, ascending.
pub fn numerators_in(q: i64, lo: &RatBound, hi: &RatBound) -> Vec<i64> {
    let scaled_lo = lo.num as i128 * q as i128;
    let fl = scaled_lo.div_euclid(lo.den as i128);
    let lo_exact = scaled_lo.rem_euclid(lo.den as i128) == 0;
    let p_min = if lo_exact && lo.inclusive { fl } else { fl + 1 };

    let scaled_hi = hi.num as i128 * q as i128;
    let fh = scaled_hi.div_euclid(hi.den as i128);
    let hi_exact = scaled_hi.rem_euclid(hi.den as i128) == 0;
    let p_max = if hi_exact && !hi.inclusive { fh - 1 } else { fh };

    let p_min = p_min.max(0);
    if p_max < p_min {
        return Vec::new();
    }
    let (p_min, p_max) = (p_min as i64, p_max as i64);
    (p_min..=p_max).filter(|&p| gcd(p, q) == 1).collect()
}
