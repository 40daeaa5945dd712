//! Exact orbit arithmetic for the map x -> beta*x - floor(beta*x).
//!
//! Along an orbit the coordinates of x over {1, beta, beta^2} keep one fixed
//! denominator: multiplying by beta is an integer matrix on numerators (the
//! minimal polynomial is monic), and subtracting the digit only shifts the
//! constant numerator by a multiple of the denominator. States are therefore
//! bare integer vectors, compared exactly.
//!
//! Digits are floors of real values. A certified float filter decides almost
//! every floor: the value is evaluated with precomputed enclosures of beta
//! and beta^2, and if the result is farther from the nearest integer than the
//! accumulated error bound, the floor is proven. Ties fall back to exact sign
//! tests in the field, so every emitted digit is exact regardless.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::field::{BetaBase, FieldElement};
use crate::words::Digit;
use crate::{Error, Result};

/// Default step budget for orbit walks.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Numerators over {1, beta, beta^2}; the engine owns the denominator.
/// Quadratic bases leave the last entry at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitState(pub [i64; 3]);

impl OrbitState {
    pub const ZERO: OrbitState = OrbitState([0, 0, 0]);

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }
}

#[derive(Debug, Clone)]
pub struct OrbitEngine<'a> {
    base: &'a BetaBase,
    degree: usize,
    c: [i64; 3], // non-leading minimal polynomial coefficients
    denom: i64,
    denom_f64: f64,
    bmid: [f64; 2], // approximations of beta and beta^2
    berr: [f64; 2], // certified bounds on their errors
    digit_max: i64,
}

impl<'a> OrbitEngine<'a> {
    pub fn new(base: &'a BetaBase, denom: i64) -> Result<Self> {
        if denom <= 0 {
            return Err(Error::DenominatorTooLarge);
        }
        let cs = base.minpoly().coeffs();
        let mut c = [0i64; 3];
        c[..base.degree()].copy_from_slice(&cs[..base.degree()]);
        let b1 = base.beta_f64();
        let b2 = base.beta_sq_f64();
        Ok(OrbitEngine {
            base,
            degree: base.degree(),
            c,
            denom,
            denom_f64: denom as f64,
            bmid: [b1.mid(), b2.mid()],
            berr: [b1.width(), b2.width()],
            digit_max: base.digit_max(),
        })
    }

    pub fn base(&self) -> &BetaBase {
        self.base
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// State of p/denom.
    pub fn state_of_numerator(&self, p: i64) -> OrbitState {
        OrbitState([p, 0, 0])
    }

    /// State of a field element whose coordinate denominators divide the
    /// engine denominator.
    pub fn state_of(&self, x: &FieldElement) -> Result<OrbitState> {
        let d = BigInt::from(self.denom);
        let mut num = [0i64; 3];
        for (i, coord) in x.coords().iter().enumerate() {
            let scaled = coord * BigRational::from_integer(d.clone());
            if !scaled.is_integer() {
                return Err(Error::DenominatorTooLarge);
            }
            num[i] = scaled
                .to_integer()
                .to_i64()
                .ok_or(Error::Overflow("orbit state coordinates"))?;
        }
        Ok(OrbitState(num))
    }

    pub fn element_of(&self, s: OrbitState) -> FieldElement {
        let d = BigInt::from(self.denom);
        let coords = (0..self.degree)
            .map(|i| BigRational::new(BigInt::from(s.0[i]), d.clone()))
            .collect();
        self.base.from_coords(coords).expect("degree matches base")
    }

    fn mul_beta(&self, s: OrbitState) -> Result<[i64; 3]> {
        let [n0, n1, n2] = s.0;
        let ov = || Error::Overflow("orbit arithmetic");
        Ok(match self.degree {
            2 => {
                let m0 = self.c[0].checked_mul(n1).ok_or_else(ov)?.checked_neg().ok_or_else(ov)?;
                let m1 = n0.checked_sub(self.c[1].checked_mul(n1).ok_or_else(ov)?).ok_or_else(ov)?;
                [m0, m1, 0]
            }
            3 => {
                let m0 = self.c[0].checked_mul(n2).ok_or_else(ov)?.checked_neg().ok_or_else(ov)?;
                let m1 = n0.checked_sub(self.c[1].checked_mul(n2).ok_or_else(ov)?).ok_or_else(ov)?;
                let m2 = n1.checked_sub(self.c[2].checked_mul(n2).ok_or_else(ov)?).ok_or_else(ov)?;
                [m0, m1, m2]
            }
            _ => unreachable!("degree validated"),
        })
    }

    /// Floor of the value of `y` (numerators of beta*x), certified.
    fn digit_of(&self, y: [i64; 3]) -> Result<i64> {
        let y0 = y[0] as f64;
        let y1 = y[1] as f64;
        let y2 = y[2] as f64;
        let approx = (y0 + y1 * self.bmid[0] + y2 * self.bmid[1]) / self.denom_f64;
        let magsum = y0.abs() + (y1 * self.bmid[0]).abs() + (y2 * self.bmid[1]).abs();
        // model error from the beta enclosures, plus float rounding slack
        let margin = ((y1.abs() * self.berr[0] + y2.abs() * self.berr[1])
            + 2.3e-15 * magsum)
            / self.denom_f64
            + 2.3e-16 * (approx.abs() + 1.0);
        let cand = approx.floor();
        if approx - cand > margin && (cand + 1.0) - approx > margin {
            let a = cand as i64;
            if (0..=self.digit_max).contains(&a) {
                return Ok(a);
            }
        }
        self.digit_exact(y, cand as i64)
    }

    /// Exact fallback: locate the floor by sign tests in the field.
    fn digit_exact(&self, y: [i64; 3], hint: i64) -> Result<i64> {
        let v = self.element_of(OrbitState(y));
        let mut a = hint.clamp(0, self.digit_max);
        let val_minus = |k: i64| {
            let e = self
                .base
                .sub(&v, &self.base.from_rational(BigRational::from_integer(BigInt::from(k))));
            self.base.sign_of(&e)
        };
        while a > 0 && val_minus(a) < 0 {
            a -= 1;
        }
        while val_minus(a + 1) >= 0 {
            a += 1;
            if a > self.digit_max {
                return Err(Error::DigitOutOfRange {
                    digit: a,
                    max: self.digit_max,
                });
            }
        }
        if val_minus(a) < 0 {
            return Err(Error::OutOfUnitInterval {
                what: "orbit value is negative",
            });
        }
        Ok(a)
    }

    /// One step of the orbit map; returns the new state and the digit.
    pub fn step(&self, s: OrbitState) -> Result<(OrbitState, Digit)> {
        let mut y = self.mul_beta(s)?;
        let a = self.digit_of(y)?;
        y[0] = y[0]
            .checked_sub(a.checked_mul(self.denom).ok_or(Error::Overflow("orbit arithmetic"))?)
            .ok_or(Error::Overflow("orbit arithmetic"))?;
        Ok((OrbitState(y), a as Digit))
    }
}

/// Cycle structure of one orbit: preperiod and exact cycle length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitShape {
    pub preperiod: u64,
    pub period: u64,
    /// The orbit reached the fixed point 0 (period is then 1).
    pub terminates: bool,
}

/// Brent cycle detection on exact states: O(1) memory, ~3(mu+lambda) steps.
/// A walk that reaches the zero state short-circuits: zero is fixed.
pub fn orbit_shape(engine: &OrbitEngine, s0: OrbitState, budget: u64) -> Result<OrbitShape> {
    if s0.is_zero() {
        return Ok(OrbitShape {
            preperiod: 0,
            period: 1,
            terminates: true,
        });
    }
    let mut steps: u64 = 0;
    let bump = |steps: &mut u64| -> Result<()> {
        *steps += 1;
        if *steps > budget {
            return Err(Error::BudgetExhausted { budget });
        }
        Ok(())
    };

    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = s0;
    bump(&mut steps)?;
    let (mut hare, _) = engine.step(s0)?;
    while tortoise != hare {
        if hare.is_zero() {
            // count remaining steps to zero exactly
            let mut probe = s0;
            let mut pre: u64 = 0;
            while !probe.is_zero() {
                probe = engine.step(probe)?.0;
                pre += 1;
            }
            return Ok(OrbitShape {
                preperiod: pre,
                period: 1,
                terminates: true,
            });
        }
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        bump(&mut steps)?;
        hare = engine.step(hare)?.0;
        lam += 1;
    }
    // find the preperiod: advance a probe lambda steps ahead of the start
    let mut ahead = s0;
    for _ in 0..lam {
        bump(&mut steps)?;
        ahead = engine.step(ahead)?.0;
    }
    let mut start = s0;
    let mut mu: u64 = 0;
    while start != ahead {
        bump(&mut steps)?;
        start = engine.step(start)?.0;
        ahead = engine.step(ahead)?.0;
        mu += 1;
    }
    Ok(OrbitShape {
        preperiod: mu,
        period: lam,
        terminates: false,
    })
}

/// Pure periodicity of the state's orbit: the first repeated state is the
/// start itself. Terminating orbits are pure only for 0.
pub fn state_is_pure(engine: &OrbitEngine, s0: OrbitState, budget: u64) -> Result<bool> {
    if s0.is_zero() {
        return Ok(true);
    }
    let mut steps: u64 = 0;
    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = s0;
    let (mut hare, _) = engine.step(s0)?;
    steps += 1;
    while tortoise != hare {
        if hare.is_zero() {
            return Ok(false);
        }
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = engine.step(hare)?.0;
        lam += 1;
        steps += 1;
        if steps > budget {
            return Err(Error::BudgetExhausted { budget });
        }
    }
    // s0 is on the cycle iff lambda more steps lead back to it
    let mut probe = s0;
    for _ in 0..lam {
        probe = engine.step(probe)?.0;
        steps += 1;
        if steps > budget {
            return Err(Error::BudgetExhausted { budget });
        }
    }
    Ok(probe == s0)
}
