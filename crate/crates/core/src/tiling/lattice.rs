//! Integer lattice points of Z[beta] confined to a box in embedding space.
//!
//! A point x = n0 + n1 beta + n2 beta^2 with integer coordinates maps
//! linearly to (value, conjugate coordinates). Given rational bounds on that
//! image, Cramer's rule over certified enclosures of the embedding matrix
//! bounds each integer coordinate, leaving a finite box to walk. A candidate
//! is kept when its outward-rounded image intersects the requested box, so
//! the result is a guaranteed superset of the true lattice set; callers that
//! need sharp membership decide it exactly downstream.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::field::interval::{Interval, RatInterval};
use crate::field::{BetaBase, FieldElement};
use crate::{Error, Result};

/// Box in embedding space: a range for the value and one range per
/// conjugate coordinate, in the layout of [`BetaBase::embed_rat`].
#[derive(Debug, Clone)]
pub struct EmbeddingBox {
    pub value: RatInterval,
    pub conj: Vec<RatInterval>,
}

impl EmbeddingBox {
    pub fn new(value: RatInterval, conj: Vec<RatInterval>) -> Self {
        EmbeddingBox { value, conj }
    }

    /// The box with every conjugate coordinate in [-radius, radius].
    pub fn centered(base: &BetaBase, value: RatInterval, radius: BigRational) -> Self {
        let r = RatInterval::new(-radius.clone(), radius);
        EmbeddingBox {
            value,
            conj: vec![r; base.degree() - 1],
        }
    }
}

/// Rows of the embedding matrix: the value row (1, beta, beta^2) followed by
/// one row per conjugate coordinate of [`BetaBase::embed_rat`].
fn embedding_matrix(base: &BetaBase) -> Vec<Vec<RatInterval>> {
    let one = RatInterval::from_int(1);
    let zero = RatInterval::from_int(0);
    let beta = base.beta_enclosure().clone();
    match (base.degree(), base.complex_conjugate()) {
        (2, _) => {
            let g = base.real_conjugate_enclosures()[0].clone();
            vec![vec![one.clone(), beta], vec![one, g]]
        }
        (3, Some(cc)) => {
            let two = BigRational::from_integer(BigInt::from(2));
            // alpha^2 componentwise: (re^2 - im^2, 2 re im)
            let re2 = cc.re.mul(&cc.re).sub(&cc.im.mul(&cc.im));
            let im2 = cc.re.mul(&cc.im).mul_scalar(&two);
            vec![
                vec![one.clone(), beta.clone(), beta.mul(&beta)],
                vec![one, cc.re.clone(), re2],
                vec![zero, cc.im.clone(), im2],
            ]
        }
        (3, None) => {
            let g0 = &base.real_conjugate_enclosures()[0];
            let g1 = &base.real_conjugate_enclosures()[1];
            vec![
                vec![one.clone(), beta.clone(), beta.mul(&beta)],
                vec![one.clone(), g0.clone(), g0.mul(g0)],
                vec![one, g1.clone(), g1.mul(g1)],
            ]
        }
        _ => unreachable!("degree validated"),
    }
}

fn det(m: &[Vec<RatInterval>]) -> RatInterval {
    match m.len() {
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        3 => {
            let a = m[1][1].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][1]));
            let b = m[1][0].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][0]));
            let c = m[1][0].mul(&m[2][1]).sub(&m[1][1].mul(&m[2][0]));
            m[0][0].mul(&a).sub(&m[0][1].mul(&b)).add(&m[0][2].mul(&c))
        }
        _ => unreachable!("degree validated"),
    }
}

/// Per-point intersection filter, run in outward-rounded floats: the matrix
/// rows and box edges are certified enclosures, integer coordinates scale
/// exactly, so a pass is certain for every true member.
struct ImageFilter {
    rows: Vec<Vec<Interval>>,
    boxes: Vec<Interval>,
}

impl ImageFilter {
    fn new(m: &[Vec<RatInterval>], image: &[RatInterval]) -> Self {
        ImageFilter {
            rows: m
                .iter()
                .map(|row| row.iter().map(RatInterval::to_f64).collect())
                .collect(),
            boxes: image.iter().map(RatInterval::to_f64).collect(),
        }
    }

    fn keep(&self, idx: &[i64]) -> bool {
        for (row, bx) in self.rows.iter().zip(&self.boxes) {
            let mut acc = Interval::point(0.0);
            for (c, &n) in row.iter().zip(idx) {
                if n != 0 {
                    acc = acc.add(c.scale_exact(n as f64));
                }
            }
            if acc.lo > bx.hi || acc.hi < bx.lo {
                return false;
            }
        }
        true
    }
}

/// All integer-coordinate elements whose certified image intersects the box.
///
/// `cap` bounds the number of integer candidates walked; the walk fails with
/// [`Error::CloudTooLarge`] rather than silently truncating.
pub fn enumerate_box(
    base: &BetaBase,
    region: &EmbeddingBox,
    cap: u64,
) -> Result<Vec<FieldElement>> {
    let d = base.degree();
    assert_eq!(
        region.conj.len(),
        d - 1,
        "one conjugate box per embedding coordinate"
    );

    let m = embedding_matrix(base);
    let den = det(&m);
    if den.contains_zero() {
        return Err(Error::Overflow("embedding determinant enclosure"));
    }
    let den_inv = den.recip();

    let mut image: Vec<RatInterval> = Vec::with_capacity(d);
    image.push(region.value.clone());
    image.extend(region.conj.iter().cloned());

    // Cramer bound for each integer coordinate
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for j in 0..d {
        let mut mj = m.clone();
        for (i, y) in image.iter().enumerate() {
            mj[i][j] = y.clone();
        }
        let nj = det(&mj).mul(&den_inv);
        let l = nj.lo.ceil().to_integer();
        let h = nj.hi.floor().to_integer();
        if l > h {
            return Ok(Vec::new());
        }
        lo[j] = l.to_i64().ok_or(Error::Overflow("lattice box bound"))?;
        hi[j] = h.to_i64().ok_or(Error::Overflow("lattice box bound"))?;
    }

    let mut count: u128 = 1;
    for j in 0..d {
        count *= (hi[j] - lo[j] + 1) as u128;
    }
    if count > cap as u128 {
        return Err(Error::CloudTooLarge {
            estimate: count.min(u64::MAX as u128) as u64,
            budget: cap,
        });
    }

    let filter = ImageFilter::new(&m, &image);
    let mut out = Vec::new();
    let mut idx = lo.clone();
    'walk: loop {
        if filter.keep(&idx) {
            out.push(base.from_int_coords(&idx)?);
        }
        let mut j = 0;
        loop {
            idx[j] += 1;
            if idx[j] <= hi[j] {
                break;
            }
            idx[j] = lo[j];
            j += 1;
            if j == d {
                break 'walk;
            }
        }
    }
    Ok(out)
}
