//! The number field Q(beta) for a monic integer polynomial of degree 2 or 3
//! with a real root beta > 1.
//!
//! Elements are stored by their coordinates over the power basis
//! {1, beta, beta^2}, so every operation is exact rational arithmetic. The
//! base object carries certified enclosures of beta and of its conjugates;
//! signs of elements and images under the conjugate embeddings are derived
//! from those enclosures and refined on demand, never guessed from floats.

pub mod interval;
pub mod roots;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};
use interval::{sqrt_interval, ComplexInterval, Interval, RatInterval};
use roots::{eval_poly_interval, isolate_real_roots, refine_root};

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow2_tol(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2u8).pow(bits))
}

/// Monic integer polynomial of degree 2 or 3, irreducible over the rationals.
/// For these degrees irreducibility is exactly "no integer root", which is
/// checked against the divisors of the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinimalPolynomial {
    coeffs: Vec<i64>, // ascending, leading 1 included
}

impl MinimalPolynomial {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        let degree = coeffs.len().saturating_sub(1);
        if !(2..=3).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let lead = *coeffs.last().unwrap();
        if lead != 1 {
            return Err(Error::NotMonic(lead));
        }
        let c0 = coeffs[0];
        if c0 == 0 {
            return Err(Error::Reducible(0));
        }
        let eval = |x: i64| -> i128 {
            let mut acc: i128 = 0;
            for &c in coeffs.iter().rev() {
                acc = acc * x as i128 + c as i128;
            }
            acc
        };
        let mut d = 1;
        while d * d <= c0.abs() {
            if c0 % d == 0 {
                for cand in [d, -d, c0.abs() / d, -(c0.abs() / d)] {
                    if eval(cand) == 0 {
                        return Err(Error::Reducible(cand));
                    }
                }
            }
            d += 1;
        }
        Ok(MinimalPolynomial { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn rational_coeffs(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|&c| big(c)).collect()
    }

    /// Constant term.
    pub fn c0(&self) -> i64 {
        self.coeffs[0]
    }
}

impl fmt::Display for MinimalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (k, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "x")?,
                (1, m) => write!(f, "{m}x")?,
                (_, 1) => write!(f, "x^{k}")?,
                (_, m) => write!(f, "{m}x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Element of Q(beta) as coordinates over {1, beta, ..., beta^(d-1)}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The rational part; the full value when `is_rational`.
    pub fn rational_part(&self) -> &BigRational {
        &self.coords[0]
    }
}

/// Enclosure of the non-real conjugate pair of a cubic with one real root;
/// `im` is the positive branch.
#[derive(Debug, Clone)]
pub struct ComplexConjugate {
    pub re: RatInterval,
    pub im: RatInterval,
    pub modsq: RatInterval,
}

/// Image of beta under the non-dominant embeddings, as certified floats.
#[derive(Debug, Clone, Copy)]
pub enum SigmaBeta {
    /// One real conjugate (quadratic base).
    Line(Interval),
    /// One complex-conjugate pair (cubic with one real root).
    Plane(ComplexInterval),
    /// Two real conjugates, ascending (totally real cubic).
    Pair([Interval; 2]),
}

/// A point in the conjugate space, matching the base's signature.
#[derive(Debug, Clone, Copy)]
pub enum EmbeddedPoint {
    Line(Interval),
    Plane(ComplexInterval),
    Pair([Interval; 2]),
}

impl EmbeddedPoint {
    /// Uniform planar view: one-dimensional images get y = 0.
    pub fn as_xy(&self) -> (Interval, Interval) {
        match *self {
            EmbeddedPoint::Line(x) => (x, Interval::point(0.0)),
            EmbeddedPoint::Plane(z) => (z.re, z.im),
            EmbeddedPoint::Pair([x, y]) => (x, y),
        }
    }

    pub fn max_width(&self) -> f64 {
        let (x, y) = self.as_xy();
        x.width().max(y.width())
    }
}

/// A base field: beta, its conjugates, and exact arithmetic in Q(beta).
#[derive(Debug, Clone)]
pub struct BetaBase {
    minpoly: MinimalPolynomial,
    rat_coeffs: Vec<BigRational>,
    beta: RatInterval,
    conj_real: Vec<RatInterval>,
    conj_complex: Option<ComplexConjugate>,
    beta_inv: FieldElement,
    floor_beta: i64,
    is_pisot: bool,
    is_unit: bool,
}

impl BetaBase {
    pub fn new(minpoly: MinimalPolynomial) -> Result<Self> {
        let rat_coeffs = minpoly.rational_coeffs();
        let tol = pow2_tol(64);
        let mut all_roots = isolate_real_roots(&rat_coeffs, &tol)?;
        // decide position of each root relative to 1 (never equal: no
        // rational roots), and pick the largest root exceeding 1
        let one = big(1);
        for r in &mut all_roots {
            while r.contains(&one) {
                *r = refine_root(&rat_coeffs, r.clone(), &(r.width() / big(1 << 16)));
            }
        }
        let beta = match all_roots.iter().rposition(|r| r.lo > one) {
            Some(i) => all_roots.remove(i),
            None => return Err(Error::NoDominantRoot),
        };
        let conj_real = all_roots;

        let degree = minpoly.degree();
        let conj_complex = if degree == 3 && conj_real.is_empty() {
            Some(complex_pair(&minpoly, &rat_coeffs, &beta)?)
        } else {
            None
        };

        let floor_beta = integer_floor(&rat_coeffs, &beta);

        let mut is_pisot = true;
        for r in &conj_real {
            match modulus_vs_one(&rat_coeffs, r)? {
                Ordering::Less => {}
                _ => is_pisot = false,
            }
        }
        if let Some(cc) = &conj_complex {
            // |alpha| < 1 iff |alpha|^2 < 1; equality is impossible here
            if cc.modsq.hi >= one {
                if cc.modsq.lo > one {
                    is_pisot = false;
                } else {
                    return Err(Error::Overflow("conjugate modulus enclosure"));
                }
            }
        }
        let is_unit = minpoly.c0().abs() == 1;

        let beta_inv = beta_inverse(&minpoly);

        Ok(BetaBase {
            minpoly,
            rat_coeffs,
            beta,
            conj_real,
            conj_complex,
            beta_inv,
            floor_beta,
            is_pisot,
            is_unit,
        })
    }

    pub fn minpoly(&self) -> &MinimalPolynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    /// (real embeddings, complex-conjugate pairs); degree = r + 2s.
    pub fn signature(&self) -> (usize, usize) {
        if self.conj_complex.is_some() {
            (1, 1)
        } else {
            (self.degree(), 0)
        }
    }

    pub fn is_pisot(&self) -> bool {
        self.is_pisot
    }

    pub fn is_unit(&self) -> bool {
        self.is_unit
    }

    pub fn is_pisot_unit(&self) -> bool {
        self.is_pisot && self.is_unit
    }

    pub fn floor_beta(&self) -> i64 {
        self.floor_beta
    }

    /// Largest digit of the canonical alphabet {0, ..., ceil(beta) - 1}.
    pub fn digit_max(&self) -> i64 {
        self.floor_beta
    }

    pub fn beta_enclosure(&self) -> &RatInterval {
        &self.beta
    }

    pub fn real_conjugate_enclosures(&self) -> &[RatInterval] {
        &self.conj_real
    }

    pub fn complex_conjugate(&self) -> Option<&ComplexConjugate> {
        self.conj_complex.as_ref()
    }

    /// Certified upper bound on the modulus of every non-dominant conjugate.
    pub fn rho_upper(&self) -> f64 {
        let mut rho: f64 = 0.0;
        for r in &self.conj_real {
            rho = rho.max(r.abs().to_f64().hi);
        }
        if let Some(cc) = &self.conj_complex {
            let m = sqrt_interval(&cc.modsq, &pow2_tol(60));
            rho = rho.max(m.to_f64().hi);
        }
        rho
    }

    pub fn beta_f64(&self) -> Interval {
        self.beta.to_f64()
    }

    pub fn beta_sq_f64(&self) -> Interval {
        self.beta.mul(&self.beta).to_f64()
    }

    pub fn sigma_beta(&self) -> SigmaBeta {
        match (self.degree(), &self.conj_complex) {
            (2, _) => SigmaBeta::Line(self.conj_real[0].to_f64()),
            (3, Some(cc)) => SigmaBeta::Plane(ComplexInterval {
                re: cc.re.to_f64(),
                im: cc.im.to_f64(),
            }),
            (3, None) => SigmaBeta::Pair([
                self.conj_real[0].to_f64(),
                self.conj_real[1].to_f64(),
            ]),
            _ => unreachable!("degree validated"),
        }
    }

    // ---- element construction ----

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coords: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn beta_element(&self) -> FieldElement {
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[1] = BigRational::one();
        FieldElement { coords }
    }

    pub fn beta_inv_element(&self) -> &FieldElement {
        &self.beta_inv
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElement {
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[0] = r;
        FieldElement { coords }
    }

    pub fn from_ratio(&self, p: i64, q: i64) -> FieldElement {
        self.from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_coords(&self, coords: Vec<BigRational>) -> Result<FieldElement> {
        if coords.len() != self.degree() {
            return Err(Error::CoordinateCount {
                got: coords.len(),
                want: self.degree(),
            });
        }
        Ok(FieldElement { coords })
    }

    pub fn from_int_coords(&self, coords: &[i64]) -> Result<FieldElement> {
        self.from_coords(coords.iter().map(|&c| big(c)).collect())
    }

    // ---- arithmetic ----

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement {
            coords: x.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, x: &FieldElement, s: &BigRational) -> FieldElement {
        FieldElement {
            coords: x.coords.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        FieldElement {
            coords: self.reduce(prod),
        }
    }

    /// Multiply by beta: shift coordinates up and reduce once.
    pub fn mul_beta(&self, x: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut v = vec![BigRational::zero(); d + 1];
        for (i, a) in x.coords.iter().enumerate() {
            v[i + 1] = a.clone();
        }
        FieldElement {
            coords: self.reduce(v),
        }
    }

    pub fn div_beta(&self, x: &FieldElement) -> FieldElement {
        self.mul(x, &self.beta_inv)
    }

    /// Reduce coordinates modulo the minimal polynomial (beta^d rewrites to
    /// minus the lower coefficients).
    fn reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        for k in (d..v.len()).rev() {
            let c = std::mem::replace(&mut v[k], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for i in 0..d {
                let t = &c * &self.rat_coeffs[i];
                v[k - d + i] -= t;
            }
        }
        v.truncate(d);
        v
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if x.is_rational() {
            return Ok(self.from_rational(x.coords[0].recip()));
        }
        // extended gcd of the minimal polynomial and the coordinate
        // polynomial: s*minpoly + t*x = g with g a nonzero constant
        let (g, t) = poly_half_gcd(&self.rat_coeffs, &x.coords);
        debug_assert!(g.len() == 1 && !g[0].is_zero());
        let ginv = g[0].recip();
        let mut coords: Vec<BigRational> =
            t.iter().map(|c| c * &ginv).collect();
        coords.resize(self.degree(), BigRational::zero());
        let coords = self.reduce(coords);
        let out = FieldElement { coords };
        debug_assert!({
            let p = self.mul(x, &out);
            p.is_rational() && p.coords[0].is_one()
        });
        Ok(out)
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// beta^k for k >= 0.
    pub fn beta_pow(&self, k: u32) -> FieldElement {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul_beta(&acc);
        }
        acc
    }

    // ---- order ----

    /// Exact sign of an element: -1, 0, or +1. Zero only for the zero
    /// coordinate vector (the power basis is linearly independent over Q);
    /// otherwise the beta enclosure is refined until it decides.
    pub fn sign_of(&self, x: &FieldElement) -> i8 {
        if x.is_zero() {
            return 0;
        }
        let mut enc = self.beta.clone();
        loop {
            let v = eval_poly_interval(&x.coords, &enc);
            if !v.contains_zero() {
                return if v.lo.is_positive() { 1 } else { -1 };
            }
            let tol = enc.width() / big(1i64 << 32);
            enc = refine_root(&self.rat_coeffs, enc, &tol);
        }
    }

    pub fn cmp_elements(&self, x: &FieldElement, y: &FieldElement) -> Ordering {
        match self.sign_of(&self.sub(x, y)) {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Enclosure of the value of x at the dominant root.
    pub fn value_interval(&self, x: &FieldElement) -> RatInterval {
        eval_poly_interval(&x.coords, &self.beta)
    }

    pub fn value_f64(&self, x: &FieldElement) -> Interval {
        self.value_interval(x).to_f64()
    }

    // ---- conjugate embeddings ----

    /// Image of x under the product of the non-dominant embeddings. The
    /// enclosures inherit the precision of the stored conjugate enclosures
    /// (far finer than f64 resolution), so widths here are a few ulps.
    pub fn embed(&self, x: &FieldElement) -> EmbeddedPoint {
        match (self.degree(), &self.conj_complex) {
            (2, _) => EmbeddedPoint::Line(
                eval_poly_interval(&x.coords, &self.conj_real[0]).to_f64(),
            ),
            (3, Some(cc)) => {
                let (re, im) = eval_poly_complex(&x.coords, &cc.re, &cc.im);
                EmbeddedPoint::Plane(ComplexInterval {
                    re: re.to_f64(),
                    im: im.to_f64(),
                })
            }
            (3, None) => EmbeddedPoint::Pair([
                eval_poly_interval(&x.coords, &self.conj_real[0]).to_f64(),
                eval_poly_interval(&x.coords, &self.conj_real[1]).to_f64(),
            ]),
            _ => unreachable!("degree validated"),
        }
    }

    /// Exact rational enclosures of the embedding, for lattice work that
    /// cannot afford float slack.
    pub fn embed_rat(&self, x: &FieldElement) -> Vec<RatInterval> {
        match (self.degree(), &self.conj_complex) {
            (2, _) => vec![eval_poly_interval(&x.coords, &self.conj_real[0])],
            (3, Some(cc)) => {
                let (re, im) = eval_poly_complex(&x.coords, &cc.re, &cc.im);
                vec![re, im]
            }
            (3, None) => vec![
                eval_poly_interval(&x.coords, &self.conj_real[0]),
                eval_poly_interval(&x.coords, &self.conj_real[1]),
            ],
            _ => unreachable!("degree validated"),
        }
    }
}

/// Complex Horner at the rectangle (re, im): returns (Re, Im) enclosures.
fn eval_poly_complex(
    coeffs: &[BigRational],
    re: &RatInterval,
    im: &RatInterval,
) -> (RatInterval, RatInterval) {
    let mut acc_re = RatInterval::point(BigRational::zero());
    let mut acc_im = RatInterval::point(BigRational::zero());
    for c in coeffs.iter().rev() {
        let nre = acc_re.mul(re).sub(&acc_im.mul(im)).add_scalar(c);
        let nim = acc_re.mul(im).add(&acc_im.mul(re));
        acc_re = nre;
        acc_im = nim;
    }
    (acc_re, acc_im)
}

/// Enclosure of the complex conjugate pair for a cubic with a single real
/// root r: the pair has 2 Re = -c2 - r and |.|^2 = -c0 / r.
fn complex_pair(
    minpoly: &MinimalPolynomial,
    rat_coeffs: &[BigRational],
    beta: &RatInterval,
) -> Result<ComplexConjugate> {
    let c0 = big(minpoly.coeffs()[0]);
    let c2 = big(minpoly.coeffs()[2]);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut enc = beta.clone();
    for _ in 0..64 {
        let re = RatInterval::point(-&c2)
            .sub(&enc)
            .mul_scalar(&half);
        let modsq = RatInterval::point(-&c0).mul(&enc.recip());
        let imsq = modsq.sub(&re.mul(&re));
        if modsq.lo.is_positive() && imsq.lo.is_positive() {
            let im = sqrt_interval(&imsq, &pow2_tol(64));
            return Ok(ComplexConjugate { re, im, modsq });
        }
        let tol = enc.width() / big(1i64 << 16);
        enc = refine_root(rat_coeffs, enc, &tol);
    }
    Err(Error::Overflow("complex conjugate enclosure"))
}

impl RatInterval {
    /// Reciprocal of an interval that excludes zero.
    pub fn recip(&self) -> RatInterval {
        debug_assert!(!self.contains_zero());
        RatInterval::new(self.hi.recip(), self.lo.recip())
    }
}

fn integer_floor(rat_coeffs: &[BigRational], root: &RatInterval) -> i64 {
    let mut enc = root.clone();
    loop {
        let flo = enc.lo.floor().to_integer();
        let fhi = enc.hi.floor().to_integer();
        if flo == fhi {
            return flo.to_i64().expect("floor fits i64");
        }
        let tol = enc.width() / big(1i64 << 8);
        enc = refine_root(rat_coeffs, enc, &tol);
    }
}

/// Decide |root| versus 1, refining as needed. Equality cannot occur for an
/// irreducible polynomial of degree 2 or 3 (it would force a rational root).
fn modulus_vs_one(rat_coeffs: &[BigRational], root: &RatInterval) -> Result<Ordering> {
    let one = big(1);
    let mut enc = root.clone();
    for _ in 0..256 {
        let a = enc.abs();
        if a.hi < one {
            return Ok(Ordering::Less);
        }
        if a.lo > one {
            return Ok(Ordering::Greater);
        }
        let tol = enc.width() / big(1i64 << 16);
        enc = refine_root(rat_coeffs, enc, &tol);
    }
    Err(Error::Overflow("conjugate modulus refinement"))
}

/// 1/beta in coordinates: beta * (beta^(d-1) + c_{d-1} beta^(d-2) + ... + c_1)
/// = -c_0, so the inverse is that cofactor divided by -c_0.
fn beta_inverse(minpoly: &MinimalPolynomial) -> FieldElement {
    let cs = minpoly.coeffs();
    let d = minpoly.degree();
    let scale = BigRational::new(BigInt::from(-1), BigInt::from(cs[0]));
    let mut coords = vec![BigRational::zero(); d];
    for i in 0..d {
        // coefficient of beta^i in the cofactor is c_{i+1} (with c_d = 1)
        coords[i] = big(cs[i + 1]) * &scale;
    }
    FieldElement { coords }
}

/// Extended gcd over Q[x], returning (g, t) with s*a + t*b = g and g the
/// final nonzero remainder normalized no further (callers divide by it).
fn poly_half_gcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    fn deg(p: &[BigRational]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }
    fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.len() > 1 && p.last().map_or(false, Zero::is_zero) {
            p.pop();
        }
        p
    }
    // remainder and quotient of p by q (q nonzero)
    fn divmod(p: &[BigRational], q: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let dq = deg(q).expect("nonzero divisor");
        let lead = q[dq].clone();
        let mut rem: Vec<BigRational> = p.to_vec();
        let mut quo = vec![BigRational::zero(); p.len().max(1)];
        while let Some(dr) = deg(&rem) {
            if dr < dq {
                break;
            }
            let f = &rem[dr] / &lead;
            quo[dr - dq] = f.clone();
            for i in 0..=dq {
                let t = &q[i] * &f;
                rem[dr - dq + i] -= t;
            }
            rem[dr] = BigRational::zero(); // cancel exactly
        }
        (trim(quo), trim(rem))
    }
    fn mul(p: &[BigRational], q: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); p.len() + q.len() - 1];
        for (i, a) in p.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in q.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        trim(out)
    }
    fn sub(p: &[BigRational], q: &[BigRational]) -> Vec<BigRational> {
        let n = p.len().max(q.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in p.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in q.iter().enumerate() {
            out[i] -= b;
        }
        trim(out)
    }

    let zero = vec![BigRational::zero()];
    let one = vec![BigRational::one()];
    // invariant: r0 = s0*a + t0*b (s never materialized), r1 = s1*a + t1*b
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    let mut t0 = zero;
    let mut t1 = one;
    while deg(&r1).is_some() {
        let (q, r) = divmod(&r0, &r1);
        let t = sub(&t0, &mul(&q, &t1));
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t;
    }
    (r0, t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(coeffs: &[i64]) -> BetaBase {
        BetaBase::new(MinimalPolynomial::new(coeffs.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn validation_rejects_bad_polynomials() {
        assert!(matches!(
            MinimalPolynomial::new(vec![1, 1]),
            Err(Error::UnsupportedDegree(1))
        ));
        assert!(matches!(
            MinimalPolynomial::new(vec![1, 0, 0, 0, 1]),
            Err(Error::UnsupportedDegree(4))
        ));
        assert!(matches!(
            MinimalPolynomial::new(vec![-1, 0, 2]),
            Err(Error::NotMonic(2))
        ));
        assert!(matches!(
            MinimalPolynomial::new(vec![0, -1, 1]),
            Err(Error::Reducible(0))
        ));
        assert!(matches!(
            MinimalPolynomial::new(vec![-4, 0, 1]),
            Err(Error::Reducible(_))
        ));
        assert!(matches!(
            MinimalPolynomial::new(vec![-1, 0, 1]),
            Err(Error::Reducible(_))
        ));
        // no real root above 1
        let p = MinimalPolynomial::new(vec![1, 0, 1]).unwrap();
        assert!(matches!(BetaBase::new(p), Err(Error::NoDominantRoot)));
        let p = MinimalPolynomial::new(vec![1, 3, 1]).unwrap();
        assert!(matches!(BetaBase::new(p), Err(Error::NoDominantRoot)));
    }

    #[test]
    fn golden_ratio_base() {
        let b = base(&[-1, -1, 1]);
        assert_eq!(b.degree(), 2);
        assert_eq!(b.signature(), (2, 0));
        assert_eq!(b.floor_beta(), 1);
        assert!(b.is_pisot() && b.is_unit());
        // conjugate is (1 - sqrt 5)/2 in (-1, 0)
        let c = &b.real_conjugate_enclosures()[0];
        let cf = c.to_f64();
        assert!(cf.hi < 0.0 && cf.lo > -1.0);
        assert!((cf.lo + 0.6180339887498949).abs() < 1e-9);
    }

    #[test]
    fn reciprocal_quadratic_base() {
        // x^2 - 3x + 1: dominant root (3 + sqrt 5)/2, conjugate its inverse
        let b = base(&[1, -3, 1]);
        assert_eq!(b.floor_beta(), 2);
        assert!(b.is_pisot() && b.is_unit());
        let c = b.real_conjugate_enclosures()[0].to_f64();
        assert!((c.lo - 0.3819660112501051).abs() < 1e-9);
        assert!(c.lo > 0.0, "conjugate of this base is positive");
    }

    #[test]
    fn sqrt2_base_not_pisot_not_unit() {
        let b = base(&[-2, 0, 1]);
        assert!(!b.is_pisot());
        assert!(!b.is_unit());
        assert_eq!(b.floor_beta(), 1);
    }

    #[test]
    fn smallest_pisot_base_constants() {
        let b = base(&[-1, -1, 0, 1]);
        assert_eq!(b.signature(), (1, 1));
        assert_eq!(b.floor_beta(), 1);
        assert!(b.is_pisot_unit());
        let cc = b.complex_conjugate().unwrap();
        // |alpha|^2 = 1/beta ~ 0.7548776662
        let m = cc.modsq.to_f64();
        assert!((m.lo - 0.7548776662466927).abs() < 1e-9);
        let rho = b.rho_upper();
        assert!((rho - 0.8688369126).abs() < 1e-6);
        // Re alpha = -beta/2 ~ -0.6623589786
        let re = cc.re.to_f64();
        assert!((re.lo + 0.662358978622373).abs() < 1e-9);
    }

    #[test]
    fn totally_real_cubic_signature() {
        let b = base(&[1, -1, -2, 1]);
        assert_eq!(b.signature(), (3, 0));
        assert!(b.is_pisot_unit());
        let rs = b.real_conjugate_enclosures();
        assert_eq!(rs.len(), 2);
        assert!(rs[0].to_f64().hi < rs[1].to_f64().lo);
        // one conjugate is positive
        assert!(rs[1].to_f64().lo > 0.0 && rs[0].to_f64().hi < 0.0);
    }

    #[test]
    fn arithmetic_in_cubic_field() {
        let b = base(&[-1, -1, 0, 1]); // beta^3 = beta + 1
        let beta = b.beta_element();
        let beta2 = b.mul(&beta, &beta);
        let beta3 = b.mul(&beta2, &beta);
        assert_eq!(beta3, b.from_int_coords(&[1, 1, 0]).unwrap());
        let beta4 = b.mul_beta(&beta3);
        assert_eq!(beta4, b.from_int_coords(&[0, 1, 1]).unwrap());
        // beta * beta^2 reduction agrees with repeated mul_beta
        assert_eq!(b.beta_pow(4), beta4);
        // 1/beta = beta^2 - 1
        let inv = b.inv(&beta).unwrap();
        assert_eq!(inv, b.from_int_coords(&[-1, 0, 1]).unwrap());
        assert_eq!(&inv, b.beta_inv_element());
        let prod = b.mul(&beta, &inv);
        assert_eq!(prod, b.one());
        // a messier inverse round-trips
        let x = b.from_int_coords(&[3, -2, 5]).unwrap();
        let xi = b.inv(&x).unwrap();
        assert_eq!(b.mul(&x, &xi), b.one());
        assert_eq!(b.div_beta(&b.mul_beta(&x)), x);
    }

    #[test]
    fn signs_resolve_near_ties() {
        let b = base(&[-1, -1, 0, 1]);
        // 3 beta - 4 < 0 since beta ~ 1.3247
        let x = b.from_int_coords(&[-4, 3, 0]).unwrap();
        assert_eq!(b.sign_of(&x), -1);
        // beta^2 - beta > 0
        let y = b.from_int_coords(&[0, -1, 1]).unwrap();
        assert_eq!(b.sign_of(&y), 1);
        assert_eq!(b.sign_of(&b.zero()), 0);
        // beta^3 - beta - 1 is literally zero in coordinates
        let z = b.sub(&b.beta_pow(3), &b.from_int_coords(&[1, 1, 0]).unwrap());
        assert_eq!(b.sign_of(&z), 0);
    }

    #[test]
    fn embeddings_fix_rationals() {
        let b = base(&[-1, -1, 0, 1]);
        let x = b.from_ratio(3, 7);
        match b.embed(&x) {
            EmbeddedPoint::Plane(z) => {
                let v = 3.0 / 7.0;
                assert!(z.re.lo <= v && v <= z.re.hi);
                assert!(z.im.lo <= 0.0 && 0.0 <= z.im.hi);
                assert!(z.max_width() < 1e-12);
            }
            _ => panic!("cubic with one real root embeds into the plane"),
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let b = base(&[-1, -1, 0, 1]);
        let x = b.from_int_coords(&[1, -2, 3]).unwrap();
        let y = b.from_int_coords(&[0, 1, 1]).unwrap();
        let lhs = b.embed(&b.mul(&x, &y));
        let (xr, xi) = b.embed(&x).as_xy();
        let (yr, yi) = b.embed(&y).as_xy();
        let zr = xr.mul(yr).sub(xi.mul(yi));
        let zi = xr.mul(yi).add(xi.mul(yr));
        let (lr, li) = lhs.as_xy();
        // the two enclosures overlap
        assert!(lr.lo <= zr.hi && zr.lo <= lr.hi);
        assert!(li.lo <= zi.hi && zi.lo <= li.hi);
    }

    #[test]
    fn minpoly_display() {
        let p = MinimalPolynomial::new(vec![-1, -1, 0, 1]).unwrap();
        assert_eq!(p.to_string(), "x^3 - x - 1");
        let q = MinimalPolynomial::new(vec![1, -3, 1]).unwrap();
        assert_eq!(q.to_string(), "x^2 - 3x + 1");
        let r = MinimalPolynomial::new(vec![-1, 2, -3, 1]).unwrap();
        assert_eq!(r.to_string(), "x^3 - 3x^2 + 2x - 1");
    }
}
