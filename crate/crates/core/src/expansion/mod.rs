//! Greedy digit expansions in a real base beta > 1.
//!
//! The expansion of x in [0, 1) is the digit stream of the orbit of x under
//! x -> beta*x - floor(beta*x). Everything here is exact: states are field
//! elements, cycles are detected by state equality, and the resulting word is
//! canonical. The quasi-greedy envelope of 1 governs which digit words occur
//! as expansions; admissibility is decided either incrementally (follower
//! automaton) or by direct lexicographic comparison for infinite words.

mod admissible;
mod orbit;

pub use admissible::{FollowerAutomaton, LiveSet};
pub use orbit::{orbit_shape, state_is_pure, OrbitEngine, OrbitShape, OrbitState, DEFAULT_BUDGET};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::field::{BetaBase, FieldElement};
use crate::words::{Digit, PeriodicWord};
use crate::{Error, Result};

/// Result of expanding a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    /// The orbit reached 0: the word is the digit string followed by zeros.
    Finite(Vec<Digit>),
    /// The orbit cycled without reaching 0.
    Periodic(PeriodicWord),
    /// The step budget ran out; only a prefix of the word is known.
    Truncated(Vec<Digit>),
}

impl Expansion {
    /// The full word, if the expansion completed.
    pub fn word(&self) -> Option<PeriodicWord> {
        match self {
            Expansion::Finite(d) => Some(PeriodicWord::finite(d.clone())),
            Expansion::Periodic(w) => Some(w.clone()),
            Expansion::Truncated(_) => None,
        }
    }

    /// The expansion repeats from its start. Finite expansions qualify only
    /// for x = 0, whose expansion is empty.
    pub fn is_purely_periodic(&self) -> bool {
        match self {
            Expansion::Finite(d) => d.is_empty(),
            Expansion::Periodic(w) => w.preperiod_len() == 0,
            Expansion::Truncated(_) => false,
        }
    }

    pub fn digit_prefix(&self, k: usize) -> Vec<Digit> {
        match self {
            Expansion::Finite(d) | Expansion::Truncated(d) => {
                let mut out = d.clone();
                out.truncate(k);
                while out.len() < k && matches!(self, Expansion::Finite(_)) {
                    out.push(0);
                }
                out
            }
            Expansion::Periodic(w) => (0..k).map(|i| w.digit(i)).collect(),
        }
    }
}

/// Validate x in [0, 1).
fn check_unit_interval(base: &BetaBase, x: &FieldElement) -> Result<()> {
    if base.sign_of(x) < 0 {
        return Err(Error::OutOfUnitInterval { what: "x < 0" });
    }
    let one = base.one();
    if base.sign_of(&base.sub(x, &one)) >= 0 {
        return Err(Error::OutOfUnitInterval { what: "x >= 1" });
    }
    Ok(())
}

/// Common denominator of the coordinates, if it fits an i64.
fn common_denominator(x: &FieldElement) -> Option<i64> {
    let mut d = BigInt::one();
    for c in x.coords() {
        d = d.lcm(c.denom());
    }
    d.to_i64()
}

/// Greedy expansion of x in [0, 1), exact digits, canonical word.
pub fn expand(base: &BetaBase, x: &FieldElement, budget: u64) -> Result<Expansion> {
    check_unit_interval(base, x)?;
    if let Some(denom) = common_denominator(x) {
        let engine = OrbitEngine::new(base, denom)?;
        if let Ok(s0) = engine.state_of(x) {
            match expand_states(&engine, s0, budget) {
                Ok(e) => return Ok(e),
                Err(Error::Overflow(_)) => {} // fall through to the slow path
                Err(e) => return Err(e),
            }
        }
    }
    expand_hashed(base, x, budget)
}

/// Expansion of p/q; the fraction must lie in [0, 1).
pub fn expand_fraction(base: &BetaBase, p: i64, q: i64, budget: u64) -> Result<Expansion> {
    if q <= 0 {
        return Err(Error::DenominatorTooLarge);
    }
    expand(base, &base.from_ratio(p, q), budget)
}

/// Fast path: cycle detection on integer orbit states, then one replay pass
/// to collect the digits.
fn expand_states(engine: &OrbitEngine, s0: OrbitState, budget: u64) -> Result<Expansion> {
    let shape = match orbit_shape(engine, s0, budget) {
        Ok(s) => s,
        Err(Error::BudgetExhausted { .. }) => {
            // keep the prefix we can afford
            let mut digits = Vec::new();
            let mut s = s0;
            for _ in 0..budget {
                let (next, a) = engine.step(s)?;
                digits.push(a);
                s = next;
            }
            return Ok(Expansion::Truncated(digits));
        }
        Err(e) => return Err(e),
    };
    let total = shape.preperiod + if shape.terminates { 0 } else { shape.period };
    let mut digits = Vec::with_capacity(total as usize);
    let mut s = s0;
    for _ in 0..total {
        let (next, a) = engine.step(s)?;
        digits.push(a);
        s = next;
    }
    if shape.terminates {
        debug_assert!(s.is_zero());
        return Ok(Expansion::Finite(digits));
    }
    let cycle = digits.split_off(shape.preperiod as usize);
    let word = PeriodicWord::new(digits, cycle)?;
    debug_assert_eq!(word.preperiod_len(), shape.preperiod as usize);
    debug_assert_eq!(word.period_len(), shape.period as usize);
    Ok(Expansion::Periodic(word))
}

/// Slow path: exact field states with a hash map for cycle detection. Used
/// when coordinates do not fit the integer engine.
fn expand_hashed(base: &BetaBase, x: &FieldElement, budget: u64) -> Result<Expansion> {
    let mut seen: HashMap<FieldElement, usize> = HashMap::new();
    let mut digits: Vec<Digit> = Vec::new();
    let mut cur = x.clone();
    loop {
        if cur.is_zero() {
            return Ok(Expansion::Finite(digits));
        }
        if let Some(&at) = seen.get(&cur) {
            let cycle = digits.split_off(at);
            return Ok(Expansion::Periodic(PeriodicWord::new(digits, cycle)?));
        }
        if digits.len() as u64 >= budget {
            return Ok(Expansion::Truncated(digits));
        }
        seen.insert(cur.clone(), digits.len());
        let (next, a) = step_element(base, &cur)?;
        digits.push(a);
        cur = next;
    }
}

/// One exact orbit step on a field element.
pub fn step_element(base: &BetaBase, x: &FieldElement) -> Result<(FieldElement, Digit)> {
    let bx = base.mul_beta(x);
    // floor by a certified float guess plus exact sign adjustment
    let approx = base.value_f64(&bx).mid();
    let mut a = (approx.floor() as i64).clamp(0, base.digit_max());
    let minus = |k: i64| base.sub(&bx, &base.from_rational(BigRational::from_integer(BigInt::from(k))));
    while a > 0 && base.sign_of(&minus(a)) < 0 {
        a -= 1;
    }
    while base.sign_of(&minus(a + 1)) >= 0 {
        a += 1;
        if a > base.digit_max() {
            return Err(Error::DigitOutOfRange {
                digit: a,
                max: base.digit_max(),
            });
        }
    }
    if base.sign_of(&minus(a)) < 0 {
        return Err(Error::OutOfUnitInterval {
            what: "orbit value is negative",
        });
    }
    Ok((minus(a), a as Digit))
}

/// Pure periodicity of the expansion of x in [0, 1).
pub fn is_purely_periodic(base: &BetaBase, x: &FieldElement, budget: u64) -> Result<bool> {
    check_unit_interval(base, x)?;
    if x.is_zero() {
        return Ok(true);
    }
    if let Some(denom) = common_denominator(x) {
        let engine = OrbitEngine::new(base, denom)?;
        if let Ok(s0) = engine.state_of(x) {
            match state_is_pure(&engine, s0, budget) {
                Ok(p) => return Ok(p),
                Err(Error::Overflow(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    match expand_hashed(base, x, budget)? {
        Expansion::Truncated(_) => Err(Error::BudgetExhausted { budget }),
        e => Ok(e.is_purely_periodic()),
    }
}

/// The greedy and quasi-greedy expansions of 1.
#[derive(Debug, Clone)]
pub struct OneExpansion {
    /// Greedy digits of 1 (finite or eventually periodic; never truncated).
    pub greedy: Expansion,
    /// Quasi-greedy envelope: the limit of the expansions of x as x -> 1.
    pub envelope: PeriodicWord,
}

impl OneExpansion {
    pub fn automaton(&self) -> FollowerAutomaton {
        FollowerAutomaton::new(&self.envelope)
    }
}

/// Compute the expansions of 1. The greedy expansion starts at the point 1
/// itself; if it terminates with digits t1..tn, the envelope is the purely
/// periodic word (t1 .. t_{n-1} (t_n - 1)); otherwise the two coincide.
pub fn expansion_of_one(base: &BetaBase, budget: u64) -> Result<OneExpansion> {
    let engine = OrbitEngine::new(base, 1)?;
    let s0 = engine.state_of_numerator(1);
    let greedy = match expand_states(&engine, s0, budget) {
        Ok(e) => e,
        Err(Error::Overflow(_)) => expand_hashed_from_one(base, budget)?,
        Err(e) => return Err(e),
    };
    let envelope = match &greedy {
        Expansion::Finite(digits) => {
            debug_assert!(!digits.is_empty());
            let mut cyc = digits.clone();
            let last = cyc.last_mut().expect("nonempty finite expansion of 1");
            debug_assert!(*last >= 1, "final digit of a finite expansion is nonzero");
            *last -= 1;
            PeriodicWord::new(vec![], cyc)?
        }
        Expansion::Periodic(w) => w.clone(),
        Expansion::Truncated(_) => return Err(Error::BudgetExhausted { budget }),
    };
    debug_assert_eq!(greedy.digit_prefix(1)[0] as i64, base.floor_beta());
    Ok(OneExpansion { greedy, envelope })
}

fn expand_hashed_from_one(base: &BetaBase, budget: u64) -> Result<Expansion> {
    // same as expand_hashed but seeded at 1 (outside the unit interval)
    let mut seen: HashMap<FieldElement, usize> = HashMap::new();
    let mut digits: Vec<Digit> = Vec::new();
    let mut cur = base.one();
    loop {
        if !digits.is_empty() && cur.is_zero() {
            return Ok(Expansion::Finite(digits));
        }
        if let Some(&at) = seen.get(&cur) {
            let cycle = digits.split_off(at);
            return Ok(Expansion::Periodic(PeriodicWord::new(digits, cycle)?));
        }
        if digits.len() as u64 >= budget {
            return Ok(Expansion::Truncated(digits));
        }
        seen.insert(cur.clone(), digits.len());
        let (next, a) = step_element(base, &cur)?;
        digits.push(a);
        cur = next;
    }
}

/// Is the infinite word a valid greedy expansion of a point of [0, 1)?
/// Exactly when every suffix is lexicographically below the envelope.
pub fn is_admissible(one: &OneExpansion, word: &PeriodicWord) -> bool {
    let distinct = word.preperiod_len() + word.period_len();
    (0..distinct.max(1)).all(|k| word.shift(k) < one.envelope)
}

/// Exact value of an eventually periodic word: pre + beta^{-m} * cyc / (1 -
/// beta^{-n}) with everything in the field.
pub fn value_of_word(base: &BetaBase, word: &PeriodicWord) -> FieldElement {
    let pre_val = value_of_digits(base, word.preperiod());
    if word.is_finite() {
        return pre_val;
    }
    let cyc_val = value_of_digits(base, word.cycle());
    let m = word.preperiod_len() as u32;
    let n = word.period_len() as u32;
    let beta_neg_n = base
        .inv(&base.beta_pow(n))
        .expect("beta power is nonzero");
    let denom = base.sub(&base.one(), &beta_neg_n);
    let tail = base
        .div(&cyc_val, &denom)
        .expect("1 - beta^-n is nonzero for beta > 1");
    let shifted = base
        .mul(&tail, &base.inv(&base.beta_pow(m)).expect("beta power is nonzero"));
    base.add(&pre_val, &shifted)
}

/// Value of a finite digit string: sum a_i beta^{-i}.
pub fn value_of_digits(base: &BetaBase, digits: &[Digit]) -> FieldElement {
    let mut acc = base.zero();
    for &a in digits.iter().rev() {
        let with_digit = base.add(
            &acc,
            &base.from_rational(BigRational::from_integer(BigInt::from(a))),
        );
        acc = base.div_beta(&with_digit);
    }
    acc
}

/// Value of a purely periodic word written as a single fraction:
/// (a_1 beta^{p-1} + ... + a_p) / (beta^p - 1).
pub fn cycle_value_fraction(base: &BetaBase, cycle: &[Digit]) -> Result<FieldElement> {
    if cycle.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let mut num = base.zero();
    for &a in cycle {
        num = base.mul_beta(&num);
        num = base.add(
            &num,
            &base.from_rational(BigRational::from_integer(BigInt::from(a))),
        );
    }
    let denom = base.sub(&base.beta_pow(cycle.len() as u32), &base.one());
    base.div(&num, &denom)
}

/// Successor gaps: the orbit of 1 under the quasi-greedy envelope,
/// v_0 = 1 and v_{i+1} = beta v_i - e_{i+1}. These are the widths of the
/// intervals on which the first envelope-constrained digit is constant; there
/// are exactly preperiod + period of them and the sequence then repeats from
/// position preperiod.
pub fn successor_gaps(base: &BetaBase, one: &OneExpansion) -> Vec<FieldElement> {
    let m = one.envelope.preperiod_len();
    let n = one.envelope.period_len();
    let mut gaps = Vec::with_capacity(m + n);
    let mut v = base.one();
    for i in 0..m + n {
        gaps.push(v.clone());
        let e = one.envelope.digit(i);
        v = base.sub(
            &base.mul_beta(&v),
            &base.from_rational(BigRational::from_integer(BigInt::from(e))),
        );
    }
    // the recurrence closes up: v_{m+n} = v_m
    debug_assert_eq!(v, gaps[m]);
    gaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::MinimalPolynomial;

    fn base(coeffs: &[i64]) -> BetaBase {
        BetaBase::new(MinimalPolynomial::new(coeffs.to_vec()).unwrap()).unwrap()
    }

    const B: u64 = 100_000;

    #[test]
    fn golden_expansions() {
        let b = base(&[-1, -1, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        // 1 = .11 exactly
        assert_eq!(one.greedy, Expansion::Finite(vec![1, 1]));
        assert_eq!(one.envelope, PeriodicWord::parse("(10)").unwrap());
        // 1/2 = .(010)
        let e = expand_fraction(&b, 1, 2, B).unwrap();
        assert_eq!(
            e,
            Expansion::Periodic(PeriodicWord::parse("(010)").unwrap())
        );
        assert!(e.is_purely_periodic());
    }

    #[test]
    fn reciprocal_base_expansions() {
        let b = base(&[1, -3, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        // 1 = .2(1): greedy expansion of 1 is eventually periodic
        assert_eq!(
            one.greedy,
            Expansion::Periodic(PeriodicWord::parse("2(1)").unwrap())
        );
        assert_eq!(one.envelope, PeriodicWord::parse("2(1)").unwrap());
        let e = expand_fraction(&b, 1, 2, B).unwrap();
        assert_eq!(
            e,
            Expansion::Periodic(PeriodicWord::parse("1(020)").unwrap())
        );
        assert!(!e.is_purely_periodic());
    }

    #[test]
    fn smallest_cubic_base_expansions() {
        let b = base(&[-1, -1, 0, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        assert_eq!(one.greedy, Expansion::Finite(vec![1, 0, 0, 0, 1]));
        assert_eq!(one.envelope, PeriodicWord::parse("(10000)").unwrap());
        // 0 expands to the empty word and is purely periodic
        let z = expand(&b, &b.zero(), B).unwrap();
        assert_eq!(z, Expansion::Finite(vec![]));
        assert!(z.is_purely_periodic());
        assert!(is_purely_periodic(&b, &b.zero(), B).unwrap());
        // beta^-1 + beta^-6? spot-check one impure rational
        let e = expand_fraction(&b, 3, 4, B).unwrap();
        match &e {
            Expansion::Periodic(w) => {
                assert!(is_admissible(&one, w));
            }
            other => panic!("expected a periodic expansion, got {other:?}"),
        }
        assert_eq!(
            is_purely_periodic(&b, &b.from_ratio(3, 4), B).unwrap(),
            e.is_purely_periodic()
        );
    }

    #[test]
    fn expansion_values_round_trip() {
        for coeffs in [&[-1, -1, 1][..], &[1, -3, 1], &[-1, -1, 0, 1]] {
            let b = base(coeffs);
            for (p, q) in [(0i64, 1i64), (1, 2), (1, 3), (2, 5), (7, 11), (12, 13)] {
                let x = b.from_ratio(p, q);
                let e = expand(&b, &x, B).unwrap();
                let w = e.word().expect("completed expansion");
                assert_eq!(value_of_word(&b, &w), x, "{coeffs:?} {p}/{q}");
            }
        }
    }

    #[test]
    fn pure_cycle_value_as_single_fraction() {
        let b = base(&[-1, -1, 1]);
        let e = expand_fraction(&b, 1, 2, B).unwrap();
        let w = e.word().unwrap();
        assert_eq!(w.preperiod_len(), 0);
        let v = cycle_value_fraction(&b, w.cycle()).unwrap();
        assert_eq!(v, b.from_ratio(1, 2));
    }

    #[test]
    fn admissibility_by_comparison() {
        let b = base(&[-1, -1, 0, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        let ok = |s: &str| is_admissible(&one, &PeriodicWord::parse(s).unwrap());
        // 10001 is the expansion of the point 1 itself: too large
        assert!(!ok("10001"));
        assert!(ok("10000")); // finite, zero tail drops strictly below
        assert!(ok("100001"));
        assert!(ok("(100000)"));
        assert!(!ok("(100001)")); // wraps to adjacent ones at the seam
        assert!(!ok("(10001)")); // some shift exceeds the envelope
        assert!(!ok("10010"));
        assert!(ok("(0)"));
        assert!(!ok("2"));
        // the envelope itself is not admissible (strictness at infinity)
        assert!(!ok("(10000)"));
        assert!(!is_admissible(&one, &one.envelope));
    }

    #[test]
    fn automaton_and_comparator_agree_on_short_words() {
        let b = base(&[1, -3, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        let fa = one.automaton();
        // every word over {0,1,2,3} of length 5: prefix-viability equals
        // "w extended by zeros is admissible" (proper prefixes never die)
        for code in 0..4u32.pow(5) {
            let mut w = Vec::new();
            let mut c = code;
            for _ in 0..5 {
                w.push(c % 4);
                c /= 4;
            }
            let by_automaton = fa.accepts_prefix(&w);
            let by_words = is_admissible(&one, &PeriodicWord::finite(w.clone()));
            assert_eq!(by_automaton, by_words, "word {w:?}");
        }
    }

    #[test]
    fn successor_gaps_of_the_known_bases() {
        let b = base(&[-1, -1, 0, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        let gaps = successor_gaps(&b, &one);
        let want: Vec<Vec<i64>> = vec![
            vec![1, 0, 0],
            vec![-1, 1, 0],
            vec![0, -1, 1],
            vec![1, 1, -1],
            vec![-1, 0, 1],
        ];
        assert_eq!(gaps.len(), 5);
        for (g, w) in gaps.iter().zip(&want) {
            assert_eq!(g, &b.from_int_coords(w).unwrap());
            // every gap lies in (0, 1]
            assert_eq!(b.sign_of(g), 1);
            let gm1 = b.sub(g, &b.one());
            assert!(b.sign_of(&gm1) <= 0);
        }

        let b = base(&[-1, -1, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        let gaps = successor_gaps(&b, &one);
        assert_eq!(gaps.len(), 2);
        assert_eq!(gaps[0], b.one());
        assert_eq!(gaps[1], b.from_int_coords(&[-1, 1]).unwrap()); // beta - 1

        let b = base(&[1, -3, 1]);
        let one = expansion_of_one(&b, B).unwrap();
        let gaps = successor_gaps(&b, &one);
        assert_eq!(gaps.len(), 2);
        assert_eq!(gaps[0], b.one());
        assert_eq!(gaps[1], b.from_int_coords(&[-2, 1]).unwrap()); // beta - 2
    }

    #[test]
    fn non_pisot_base_expansions() {
        // base sqrt 2: beta^2 = 2 exactly, so rational orbits interleave two
        // finite-state doubling maps and always terminate or cycle
        let b = base(&[-2, 0, 1]);
        let e = expand_fraction(&b, 1, 2, B).unwrap();
        match e {
            Expansion::Finite(d) => assert_eq!(d, vec![0, 1]), // 1/2 = beta^-2
            other => panic!("dyadic should terminate, got {other:?}"),
        }
        let t = expand_fraction(&b, 1, 3, B).unwrap();
        assert_eq!(
            t,
            Expansion::Periodic(PeriodicWord::parse("(0001)").unwrap())
        );
        assert!(t.is_purely_periodic());
    }

    #[test]
    fn tiny_budget_truncates_honestly() {
        // the orbit of 1/101 under the golden base is far longer than 4
        let b = base(&[-1, -1, 1]);
        let t = expand_fraction(&b, 1, 101, 4).unwrap();
        match t {
            Expansion::Truncated(d) => assert_eq!(d.len(), 4),
            other => panic!("expected truncation, got {other:?}"),
        }
        assert!(matches!(
            is_purely_periodic(&b, &b.from_ratio(1, 101), 4),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn rejects_points_outside_the_unit_interval() {
        let b = base(&[-1, -1, 1]);
        assert!(matches!(
            expand(&b, &b.one(), B),
            Err(Error::OutOfUnitInterval { .. })
        ));
        assert!(matches!(
            expand(&b, &b.from_ratio(-1, 2), B),
            Err(Error::OutOfUnitInterval { .. })
        ));
        assert!(matches!(
            expand(&b, &b.from_ratio(3, 2), B),
            Err(Error::OutOfUnitInterval { .. })
        ));
    }

    #[test]
    fn hashed_and_state_engines_agree() {
        let b = base(&[-1, -1, 0, 1]);
        for (p, q) in [(1i64, 7i64), (3, 8), (5, 9), (11, 13)] {
            let x = b.from_ratio(p, q);
            let fast = expand(&b, &x, B).unwrap();
            let slow = expand_hashed(&b, &x, B).unwrap();
            assert_eq!(fast, slow, "{p}/{q}");
        }
    }
}
