//! Bi-infinite digit representations under the conjugate embedding.
//!
//! An element x splits as x = v + y: y in [0, 1) anchors a translated tile
//! whose closure contains the embedded image of x, and v is the renormalized
//! value of a left-infinite digit string `...(c)(c)b` glued onto the greedy
//! tail of y at the radix point. When the left string is eventually periodic
//! it evaluates exactly in the field,
//!
//! ```text
//! v = B + beta^Q * C / (1 - beta^P),
//! ```
//!
//! with B the preperiod value, C the cycle value, Q and P their lengths: the
//! real series diverges, but the expression is an ordinary field element and
//! every conjugate embedding sums the same geometric series convergently.
//!
//! The search walks remainders backward, r -> (r - a) / beta, pruning digits
//! whose glued word leaves the closed admissible shift or whose remainder
//! embeds outside the reachable ball. Remainders stay in a discrete lattice,
//! so a revisited (remainder, comparison-state) pair closes a cycle and
//! yields a representation, which is then certified by re-evaluating the
//! series from its digits alone and comparing with x - y exactly.
//!
//! Right parts are always the greedy tail of y. Boundary images that also
//! admit a quasi-greedy right part are found through a neighboring tile
//! instead, so an empty result bounds the search, not the element.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::FromPrimitive;

use crate::expansion::{expand, expansion_of_one, is_admissible, OneExpansion};
use crate::field::interval::RatInterval;
use crate::field::{BetaBase, FieldElement};
use crate::words::{Digit, PeriodicWord};
use crate::tiling::lattice::{enumerate_box, EmbeddingBox};
use crate::{Error, Result};

/// Search bounds. A representation is found only if its preperiod plus one
/// full period fits inside `depth_bound` digits.
#[derive(Debug, Clone)]
pub struct XiSearch {
    pub depth_bound: usize,
    pub node_budget: u64,
    pub y_cap: u64,
    pub tail_budget: u64,
}

impl Default for XiSearch {
    fn default() -> Self {
        XiSearch {
            depth_bound: 64,
            node_budget: 1 << 20,
            y_cap: 1 << 17,
            tail_budget: 1 << 20,
        }
    }
}

/// One representation x = value(left) + y, left digits glued onto the
/// greedy tail of y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiRepresentation {
    pub y: FieldElement,
    /// Greedy tail of y, the right part.
    pub tail: PeriodicWord,
    /// Left preperiod by ascending power: `pre[0]` is the ones place.
    pub pre: Vec<Digit>,
    /// Left cycle continuing the ascent; repeats forever leftward.
    pub cycle: Vec<Digit>,
}

impl XiRepresentation {
    /// Exact renormalized value of the left string, evaluated from the
    /// digits alone.
    pub fn left_value(&self, base: &BetaBase) -> Result<FieldElement> {
        let horner = |digits: &[Digit]| {
            let mut acc = base.zero();
            for &d in digits.iter().rev() {
                acc = base.mul_beta(&acc);
                acc = base.add(&acc, &base.from_ratio(d as i64, 1));
            }
            acc
        };
        let b = horner(&self.pre);
        let c = horner(&self.cycle);
        let denom = base.sub(&base.one(), &base.beta_pow(self.cycle.len() as u32));
        let series = base.div(&c, &denom)?;
        Ok(base.add(&b, &base.mul(&base.beta_pow(self.pre.len() as u32), &series)))
    }

    /// The representation re-evaluates exactly to x.
    pub fn certifies(&self, base: &BetaBase, x: &FieldElement) -> Result<bool> {
        let v = self.left_value(base)?;
        Ok(base.cmp_elements(&base.add(&v, &self.y), x) == Ordering::Equal)
    }
}

impl fmt::Display for XiRepresentation {
    /// `(cycle)pre.tail` with the left digits written highest power first,
    /// so the cycle reads as it repeats leftward.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rev = |ds: &[Digit]| ds.iter().rev().map(|d| d.to_string()).collect::<String>();
        write!(f, "({}){}.{}", rev(&self.cycle), rev(&self.pre), self.tail)
    }
}

/// Comparison of the current right-looking suffix against every distinct
/// shift of the envelope; index p+1 wraps back onto the periodic part.
type CmpState = Vec<Ordering>;

struct Walker<'a> {
    base: &'a BetaBase,
    /// envelope digit at each shift index
    env: Vec<Digit>,
    /// wrapped successor of each shift index
    next: Vec<usize>,
    /// per-coordinate bound on reachable remainders under the embedding
    ball: f64,
    depth_bound: usize,
    node_budget: u64,
    nodes: u64,
    path: Vec<Digit>,
    seen: HashMap<(FieldElement, CmpState), usize>,
    found: Vec<(Vec<Digit>, Vec<Digit>)>,
}

impl Walker<'_> {
    fn digit_admits(&self, cmp: &CmpState, a: Digit, p: usize) -> Ordering {
        match a.cmp(&self.env[p]) {
            Ordering::Equal => cmp[self.next[p]],
            other => other,
        }
    }

    fn remainder_reachable(&self, r: &FieldElement) -> bool {
        let (x, y) = self.base.embed(r).as_xy();
        x.lo <= self.ball && x.hi >= -self.ball && y.lo <= self.ball && y.hi >= -self.ball
    }

    fn walk(&mut self, r: FieldElement, cmp: CmpState) -> Result<()> {
        let key = (r, cmp);
        if let Some(&start) = self.seen.get(&key) {
            // first revisit on this path: minimal lasso
            self.found
                .push((self.path[..start].to_vec(), self.path[start..].to_vec()));
            return Ok(());
        }
        if self.path.len() >= self.depth_bound {
            return Ok(());
        }
        if self.nodes >= self.node_budget {
            return Err(Error::BudgetExhausted { budget: self.node_budget });
        }
        self.nodes += 1;
        let depth = self.path.len();
        self.seen.insert(key.clone(), depth);
        let (r, cmp) = &key;
        for a in 0..=self.base.digit_max() as Digit {
            if self.digit_admits(cmp, a, 0) == Ordering::Greater {
                continue;
            }
            let next_r = self.base.div_beta(&self.base.sub(r, &self.base.from_ratio(a as i64, 1)));
            if !self.remainder_reachable(&next_r) {
                continue;
            }
            let next_cmp: CmpState =
                (0..cmp.len()).map(|p| self.digit_admits(cmp, a, p)).collect();
            self.path.push(a);
            self.walk(next_r, next_cmp)?;
            self.path.pop();
        }
        self.seen.remove(&key);
        Ok(())
    }
}

/// Shrink to the primitive cycle and the shortest preperiod.
fn normalize(mut pre: Vec<Digit>, mut cycle: Vec<Digit>) -> (Vec<Digit>, Vec<Digit>) {
    let p = (1..=cycle.len())
        .find(|&d| cycle.len() % d == 0 && cycle.iter().enumerate().all(|(i, &c)| c == cycle[i % d]))
        .unwrap();
    cycle.truncate(p);
    while pre.last() == cycle.last() && !pre.is_empty() {
        pre.pop();
        cycle.rotate_right(1);
    }
    (pre, cycle)
}

/// Anchors y in [0, 1) whose tile can contain the embedded image of x.
fn anchor_candidates(
    base: &BetaBase,
    x: &FieldElement,
    ball: f64,
    cap: u64,
) -> Result<Vec<FieldElement>> {
    let pad = BigRational::from_f64(ball + 0.5).expect("finite ball");
    let conj = base
        .embed_rat(x)
        .into_iter()
        .map(|c| RatInterval::new(c.lo - pad.clone(), c.hi + pad.clone()))
        .collect();
    let unit = RatInterval::new(
        BigRational::from_integer(0.into()),
        BigRational::from_integer(1.into()),
    );
    let region = EmbeddingBox::new(unit, conj);
    let mut ys: Vec<_> = enumerate_box(base, &region, cap)?
        .into_iter()
        .filter(|y| base.sign_of(y) >= 0 && base.cmp_elements(y, &base.one()).is_lt())
        .collect();
    ys.sort_by(|a, b| base.cmp_elements(a, b));
    Ok(ys)
}

/// All bounded-lasso representations of x, certified and in a deterministic
/// order. An empty result means the bounds were too small, not that no
/// representation exists.
pub fn find_xi_representation(
    base: &BetaBase,
    x: &FieldElement,
    search: &XiSearch,
) -> Result<Vec<XiRepresentation>> {
    if !base.is_pisot_unit() {
        return Err(Error::NotPisotUnit);
    }
    let one = expansion_of_one(base, search.tail_budget)?;
    let shifts = shift_table(&one);
    let ball = base.digit_max() as f64 / (1.0 - base.rho_upper()) + 0.5;

    let mut out = Vec::new();
    for y in anchor_candidates(base, x, ball, search.y_cap)? {
        let tail = expand(base, &y, search.tail_budget)?
            .word()
            .ok_or(Error::BudgetExhausted { budget: search.tail_budget })?;
        debug_assert!(is_admissible(&one, &tail));
        let cmp0: CmpState = shifts.iter().map(|s| tail.cmp(s)).collect();
        let mut walker = Walker {
            base,
            env: shifts.iter().map(|s| s.digit(0)).collect(),
            next: wrap_table(&one),
            ball,
            depth_bound: search.depth_bound,
            node_budget: search.node_budget,
            nodes: 0,
            path: Vec::new(),
            seen: HashMap::new(),
            found: Vec::new(),
        };
        walker.walk(base.sub(x, &y), cmp0)?;
        let mut reps: Vec<XiRepresentation> = walker
            .found
            .into_iter()
            .map(|(pre, cycle)| {
                let (pre, cycle) = normalize(pre, cycle);
                XiRepresentation { y: y.clone(), tail: tail.clone(), pre, cycle }
            })
            .collect();
        reps.sort_by(|a, b| {
            (a.pre.len(), a.cycle.len(), &a.pre, &a.cycle)
                .cmp(&(b.pre.len(), b.cycle.len(), &b.pre, &b.cycle))
        });
        reps.dedup();
        for rep in reps {
            debug_assert!(rep.certifies(base, x)?);
            if rep.certifies(base, x)? {
                out.push(rep);
            }
        }
    }
    Ok(out)
}

/// The distinct envelope shifts, preperiod first then one full period.
fn shift_table(one: &OneExpansion) -> Vec<PeriodicWord> {
    let n = one.envelope.preperiod_len() + one.envelope.period_len();
    (0..n).map(|p| one.envelope.shift(p)).collect()
}

/// Successor of each shift index; the step past the last wraps back onto
/// the start of the periodic part.
fn wrap_table(one: &OneExpansion) -> Vec<usize> {
    let m = one.envelope.preperiod_len();
    let n = m + one.envelope.period_len();
    (0..n).map(|p| if p + 1 == n { m } else { p + 1 }).collect()
}
