//! Real-root isolation for monic integer polynomials of degree at most 3.
//!
//! The derivative has degree at most 2, so its roots (the critical points)
//! have closed forms: rational for degree 2, quadratic surds for degree 3.
//! Enclosing the critical points splits the line into monotonic pieces, and
//! on each piece a sign change at the endpoints pins down exactly one root,
//! which bisection then narrows to any requested width. Inputs are assumed
//! squarefree (callers validate irreducibility first), so the polynomial is
//! nonzero at every critical point and every rational, making refinement
//! terminate and keeping every sign evaluation exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{sqrt_interval, RatInterval};
use crate::{Error, Result};

/// Exact Horner evaluation; `coeffs` ascending, leading coefficient last.
pub fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Interval Horner evaluation.
pub fn eval_poly_interval(coeffs: &[BigRational], x: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::point(BigRational::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add_scalar(c);
    }
    acc
}

fn sign(v: &BigRational) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Cauchy bound: all real roots lie in [-M, M].
fn cauchy_bound(coeffs: &[BigRational]) -> BigRational {
    let lead = coeffs.last().expect("nonempty");
    let mut m = BigRational::zero();
    for c in &coeffs[..coeffs.len() - 1] {
        let a = (c / lead).abs();
        if a > m {
            m = a;
        }
    }
    m + BigRational::one()
}

/// Enclosures of the real critical points, each narrowed until the polynomial
/// has constant nonzero sign on it. Enclosures are returned sorted and
/// pairwise disjoint.
fn critical_enclosures(coeffs: &[BigRational]) -> Result<Vec<RatInterval>> {
    let two = BigRational::from_integer(BigInt::from(2));
    let three = BigRational::from_integer(BigInt::from(3));
    match coeffs.len() - 1 {
        0 | 1 => Ok(vec![]),
        2 => {
            // p' = 2x + c1 (monic-normalized below), root is rational
            let crit = -(&coeffs[1] / (&two * &coeffs[2]));
            let iv = RatInterval::point(crit.clone());
            if eval_poly(coeffs, &crit).is_zero() {
                return Err(Error::Reducible(0));
            }
            Ok(vec![iv])
        }
        3 => {
            // p' = 3x^2 + 2 c2 x + c1 for monic p; critical points
            // (-c2 ± sqrt(c2^2 - 3 c1)) / 3
            let c1 = &coeffs[1] / &coeffs[3];
            let c2 = &coeffs[2] / &coeffs[3];
            let disc = &c2 * &c2 - &three * &c1;
            if !disc.is_positive() {
                return Ok(vec![]); // monotone (derivative nonnegative)
            }
            let mut tol = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
            for _ in 0..64 {
                let s = sqrt_interval(&RatInterval::point(disc.clone()), &tol);
                let lo_crit = RatInterval::point(-&c2).sub(&s).mul_scalar(
                    &(BigRational::one() / &three),
                );
                let hi_crit = RatInterval::point(-&c2).add(&s).mul_scalar(
                    &(BigRational::one() / &three),
                );
                let both = [lo_crit, hi_crit];
                let disjoint = both[0].hi < both[1].lo;
                let signed = both
                    .iter()
                    .all(|iv| !eval_poly_interval(coeffs, iv).contains_zero());
                if disjoint && signed {
                    return Ok(both.to_vec());
                }
                tol = tol * BigRational::new(BigInt::one(), BigInt::from(1u64 << 10));
            }
            Err(Error::Overflow("critical point refinement"))
        }
        d => Err(Error::UnsupportedDegree(d)),
    }
}

/// Isolating enclosures for every real root, sorted ascending, each narrowed
/// to width at most `tol`.
pub fn isolate_real_roots(
    coeffs: &[BigRational],
    tol: &BigRational,
) -> Result<Vec<RatInterval>> {
    debug_assert!(coeffs.len() >= 2 && !coeffs.last().unwrap().is_zero());
    let m = cauchy_bound(coeffs);
    let crits = critical_enclosures(coeffs)?;

    // Build monotonic pieces between -M, the critical enclosures, and M.
    let mut cuts: Vec<(BigRational, BigRational)> = Vec::new();
    let mut left = -m.clone();
    for c in &crits {
        if c.lo > left {
            cuts.push((left.clone(), c.lo.clone()));
        }
        left = c.hi.clone();
    }
    if m > left {
        cuts.push((left, m));
    }

    let mut roots = Vec::new();
    for (a, b) in cuts {
        let fa = sign(&eval_poly(coeffs, &a));
        let fb = sign(&eval_poly(coeffs, &b));
        if fa == 0 {
            roots.push(RatInterval::point(a.clone()));
            continue;
        }
        if fb == 0 {
            roots.push(RatInterval::point(b.clone()));
            continue;
        }
        if fa != fb {
            roots.push(refine_root(coeffs, RatInterval::new(a, b), tol));
        }
    }
    Ok(roots)
}

/// Bisect an isolating interval (sign change across it) down to width `tol`.
pub fn refine_root(
    coeffs: &[BigRational],
    iv: RatInterval,
    tol: &BigRational,
) -> RatInterval {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut lo = iv.lo;
    let mut hi = iv.hi;
    let flo = sign(&eval_poly(coeffs, &lo));
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi) / &two;
        let fm = sign(&eval_poly(coeffs, &mid));
        if fm == 0 {
            return RatInterval::point(mid);
        }
        if fm == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RatInterval::new(lo, hi)
}
