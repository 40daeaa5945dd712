//! Interval arithmetic on two levels: exact rational endpoints for root
//! isolation and sign decisions, and outward-rounded f64 endpoints for the
//! geometric bulk work. Every f64 operation widens its result by one ulp per
//! endpoint, which dominates the rounding error of round-to-nearest.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn add(&self, rhs: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }

    pub fn sub(&self, rhs: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, rhs: &RatInterval) -> RatInterval {
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c < &lo {
                lo = c.clone();
            }
            if c > &hi {
                hi = c.clone();
            }
        }
        RatInterval::new(lo, hi)
    }

    pub fn mul_scalar(&self, s: &BigRational) -> RatInterval {
        if s.is_negative() {
            RatInterval::new(&self.hi * s, &self.lo * s)
        } else {
            RatInterval::new(&self.lo * s, &self.hi * s)
        }
    }

    pub fn add_scalar(&self, s: &BigRational) -> RatInterval {
        RatInterval::new(&self.lo + s, &self.hi + s)
    }

    /// Outward conversion to f64 endpoints.
    pub fn to_f64(&self) -> Interval {
        Interval {
            lo: rat_to_f64_down(&self.lo),
            hi: rat_to_f64_up(&self.hi),
        }
    }

    /// Enclosure of the absolute value.
    pub fn abs(&self) -> RatInterval {
        if self.contains_zero() {
            let hi = self.hi.abs().max(self.lo.abs());
            RatInterval::new(BigRational::zero(), hi)
        } else if self.hi.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

/// Enclosure of sqrt(x) for a nonnegative rational interval, computed by
/// bisection to absolute tolerance `tol`.
pub fn sqrt_interval(x: &RatInterval, tol: &BigRational) -> RatInterval {
    debug_assert!(!x.lo.is_negative());
    let lo = sqrt_lower(&x.lo, tol);
    let hi = sqrt_upper(&x.hi, tol);
    RatInterval::new(lo, hi)
}

fn sqrt_lower(v: &BigRational, tol: &BigRational) -> BigRational {
    // largest a (up to tol) with a^2 <= v
    let mut a = BigRational::zero();
    let mut b = v.clone().max(BigRational::one());
    while &(&b - &a) > tol {
        let m = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        if &(&m * &m) <= v {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

fn sqrt_upper(v: &BigRational, tol: &BigRational) -> BigRational {
    let mut a = BigRational::zero();
    let mut b = v.clone().max(BigRational::one());
    while &(&b - &a) > tol {
        let m = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        if &(&m * &m) >= v {
            b = m;
        } else {
            a = m;
        }
    }
    b
}

fn rat_to_f64_down(v: &BigRational) -> f64 {
    let x = v.to_f64().unwrap_or(f64::NEG_INFINITY);
    // to_f64 divides two rounded f64s; three downward steps cover its error
    step_down(step_down(step_down(x)))
}

fn rat_to_f64_up(v: &BigRational) -> f64 {
    let x = v.to_f64().unwrap_or(f64::INFINITY);
    step_up(step_up(step_up(x)))
}

#[inline]
pub fn step_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    x.next_up()
}

#[inline]
pub fn step_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    x.next_down()
}

/// Closed f64 interval with outward rounding built into every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn widen(self) -> Self {
        Interval {
            lo: step_down(self.lo),
            hi: step_up(self.hi),
        }
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
        .widen()
    }

    pub fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
        .widen()
    }

    pub fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(self, rhs: Interval) -> Interval {
        let c = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let mut lo = c[0];
        let mut hi = c[0];
        for v in &c[1..] {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        Interval { lo, hi }.widen()
    }

    /// Scale by an f64 that is exact (small integers, digits).
    pub fn scale_exact(self, s: f64) -> Interval {
        let a = self.lo * s;
        let b = self.hi * s;
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
        .widen()
    }

    pub fn add_exact(self, s: f64) -> Interval {
        Interval {
            lo: self.lo + s,
            hi: self.hi + s,
        }
        .widen()
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn abs_hi(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn abs_lo(self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn sq(self) -> Interval {
        let c = [self.lo * self.lo, self.lo * self.hi, self.hi * self.hi];
        let mut lo = if self.contains_zero() { 0.0 } else { f64::INFINITY };
        let mut hi = f64::NEG_INFINITY;
        for v in c {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if self.contains_zero() {
            lo = 0.0;
        }
        Interval { lo: lo.max(0.0), hi }.widen()
    }
}

/// Rectangle in the complex plane, outward-rounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn point(re: f64, im: f64) -> Self {
        ComplexInterval {
            re: Interval::point(re),
            im: Interval::point(im),
        }
    }

    pub fn add(self, rhs: ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    pub fn mul(self, rhs: ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    pub fn add_exact(self, re: f64) -> ComplexInterval {
        ComplexInterval {
            re: self.re.add_exact(re),
            im: self.im,
        }
    }

    pub fn norm_sq(self) -> Interval {
        self.re.sq().add(self.im.sq())
    }

    pub fn max_width(self) -> f64 {
        self.re.width().max(self.im.width())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn sqrt_interval_brackets_sqrt2() {
        let x = RatInterval::point(rat(2, 1));
        let tol = rat(1, 1 << 30);
        let s = sqrt_interval(&x, &tol);
        assert!(&s.lo * &s.lo <= rat(2, 1));
        assert!(&s.hi * &s.hi >= rat(2, 1));
        assert!(s.width() <= rat(1, 1 << 28));
    }

    #[test]
    fn f64_interval_mul_is_outward() {
        let a = Interval::new(1.0, 1.0 + 1e-15);
        let b = Interval::new(3.0, 3.0);
        let p = a.mul(b);
        assert!(p.lo <= 3.0 && p.hi >= 3.0 * (1.0 + 1e-15));
    }

    #[test]
    fn rational_outward_conversion() {
        let v = rat(1, 3);
        let i = RatInterval::point(v.clone()).to_f64();
        let back_lo = BigRational::from_float(i.lo).unwrap();
        let back_hi = BigRational::from_float(i.hi).unwrap();
        assert!(back_lo <= v && v <= back_hi);
    }

    #[test]
    fn complex_square_norm() {
        let z = ComplexInterval::point(3.0, 4.0);
        let n = z.norm_sq();
        assert!(n.lo <= 25.0 && 25.0 <= n.hi);
        assert!(n.width() < 1e-12);
    }
}
