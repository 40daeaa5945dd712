//! Classification of expansion bases: the Pisot-unit gate, property (F) by
//! direct finite search, the quoted coefficient families, and what the
//! verdicts imply for the pure-periodicity threshold gamma.
//!
//! Property (F) — every point of Z[beta] in [0, 1) expands finitely — is
//! decided by walking the finite absorbing set
//! S = {x in Z[beta] ∩ [0, 1) : every conjugate coordinate in [-R, R]},
//! R = max(1, ceil(beta) / (1 - rho)). An orbit step multiplies each
//! conjugate coordinate by a conjugate of beta (modulus <= rho < 1) and
//! subtracts a digit, so S is forward invariant and absorbs every Z[beta]
//! orbit after finitely many steps; (F) holds iff no point of S expands
//! periodically. Coefficient families are consulted only as a cross-check,
//! and any disagreement is reported rather than resolved.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::exec::{self, ExecMode};
use crate::expansion::{expand, Expansion};
use crate::field::interval::RatInterval;
use crate::field::{BetaBase, FieldElement, MinimalPolynomial};
use crate::tiling::lattice::{enumerate_box, EmbeddingBox};
use crate::words::PeriodicWord;
use crate::{Error, Result};

/// Default state budget for the direct (F) search.
pub const DEFAULT_SEARCH_BOUND: u64 = 1_000_000;

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyF {
    Holds,
    Fails,
    /// The bounded search ended without a verdict; never a proof of anything.
    Undetermined { bound: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(rename = "quadratic_f_family")]
    QuadraticF { n: i64 },
    #[serde(rename = "cubic_f_family")]
    CubicF { a: i64, b: i64 },
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaKnown {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    /// Strictly between 0 and 1, or simply not settled by the theorems here.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateKind {
    TotallyReal,
    ComplexPair,
    PositiveRealConjugate,
    NegativeRealConjugate,
}

/// A point of Z[beta] ∩ [0, 1) whose expansion is periodic, disproving (F).
#[derive(Debug, Clone, Serialize)]
pub struct FailureWitness {
    /// Coordinates over the power basis.
    pub coords: Vec<String>,
    /// Its eventually periodic expansion.
    pub expansion: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    /// Display form of the minimal polynomial.
    pub base: String,
    pub degree: usize,
    pub is_pisot: bool,
    pub is_unit: bool,
    pub conjugates: ConjugateKind,
    pub property_f: PropertyF,
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_discrepancy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_known: Option<GammaKnown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FailureWitness>,
    /// States visited by the direct search (0 if it never ran).
    pub search_states: u64,
}

/// The gate of the threshold theorems: gamma is positive only past it.
pub fn pisot_unit_gate(base: &BetaBase) -> bool {
    base.is_pisot_unit()
}

pub fn conjugate_kind(base: &BetaBase) -> ConjugateKind {
    match (base.degree(), base.signature().1) {
        (3, 1) => ConjugateKind::ComplexPair,
        (3, 0) => ConjugateKind::TotallyReal,
        _ => {
            let c = &base.real_conjugate_enclosures()[0];
            if c.hi.is_negative() {
                ConjugateKind::NegativeRealConjugate
            } else {
                debug_assert!(c.lo.is_positive(), "conjugate of an irreducible base is nonzero");
                ConjugateKind::PositiveRealConjugate
            }
        }
    }
}

use num_traits::Signed;

/// True when the base has a positive real conjugate or a complex pair — the
/// conjugate geometry of the small-counterexample construction.
pub fn negative_branch_geometry(base: &BetaBase) -> bool {
    match conjugate_kind(base) {
        ConjugateKind::ComplexPair | ConjugateKind::PositiveRealConjugate => true,
        ConjugateKind::NegativeRealConjugate => false,
        ConjugateKind::TotallyReal => base
            .real_conjugate_enclosures()
            .iter()
            .any(|c| c.lo.is_positive()),
    }
}

/// Membership in the named (F) families, as a descriptor for reports.
pub fn family_of(p: &MinimalPolynomial) -> Family {
    let cs = p.coeffs();
    match p.degree() {
        2 if cs[0] == -1 && cs[1] <= -1 => Family::QuadraticF { n: -cs[1] },
        3 if cs[0] == -1 => {
            let (a, b) = (-cs[2], -cs[1]);
            if a >= 1 && (-1..=a + 1).contains(&b) {
                Family::CubicF { a, b }
            } else {
                Family::Other
            }
        }
        _ => Family::Other,
    }
}

/// What the quoted coefficient families assert about (F), when they speak:
/// Some(true) = holds, Some(false) = fails, None = the families are silent.
pub fn family_verdict(p: &MinimalPolynomial) -> Option<bool> {
    let cs = p.coeffs();
    match p.degree() {
        2 => {
            let n = -cs[1];
            if cs[0] == -1 && n >= 1 {
                Some(true)
            } else if cs[0] == 1 && n >= 3 {
                Some(false)
            } else {
                None
            }
        }
        3 => {
            let (a, b) = (-cs[2], -cs[1]);
            if cs[0] == 1 {
                Some(false)
            } else if cs[0] == -1 && a >= 1 && (-1..=a + 1).contains(&b) {
                Some(true)
            } else if cs[0] == -1 && (-a + 1..=-2).contains(&b) {
                Some(false)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// The quadratic (F) family test: x^2 - nx - 1 with n >= 1 (equivalently, a
/// quadratic Pisot unit with negative conjugate).
pub fn quadratic_f(base: &BetaBase) -> Result<bool> {
    if base.degree() != 2 {
        return Err(Error::DegreeMismatch {
            got: base.degree(),
            want: 2,
        });
    }
    Ok(matches!(family_of(base.minpoly()), Family::QuadraticF { .. }))
}

/// Outcome of the direct finite search for (F).
#[derive(Debug, Clone)]
pub struct DirectF {
    pub verdict: PropertyF,
    /// A periodically expanding point and its word, when the verdict is Fails.
    pub witness: Option<(FieldElement, PeriodicWord)>,
    /// Orbit states visited.
    pub states: u64,
    /// Lattice candidates enumerated for the absorbing set.
    pub candidates: usize,
}

enum Walk {
    Outside,
    Finite(u64),
    Cycles(u64, PeriodicWord),
    Truncated,
}

/// Direct (F) search over the absorbing set; see the module docs. Candidate
/// points, their walk order, and hence the reported witness are
/// deterministic and independent of the execution mode.
pub fn direct_f(base: &BetaBase, search_bound: u64, mode: ExecMode) -> Result<DirectF> {
    if !base.is_pisot_unit() {
        return Err(Error::NotPisotUnit);
    }
    let rho = BigRational::from_float(base.rho_upper()).expect("finite conjugate bound");
    debug_assert!(rho < big(1), "Pisot conjugates are contracting");
    let radius = (big(base.floor_beta() + 1) / (big(1) - rho)).max(big(1));
    let region = EmbeddingBox::centered(base, RatInterval::new(big(0), big(1)), radius);
    let candidates = match enumerate_box(base, &region, search_bound) {
        Ok(c) => c,
        Err(Error::CloudTooLarge { .. }) => {
            return Ok(DirectF {
                verdict: PropertyF::Undetermined {
                    bound: search_bound,
                },
                witness: None,
                states: 0,
                candidates: 0,
            })
        }
        Err(e) => return Err(e),
    };
    let n_candidates = candidates.len();

    let one = base.one();
    let walks = exec::map_collect(mode, candidates, |x| -> Result<(FieldElement, Walk)> {
        if base.sign_of(&x) < 0 || base.sign_of(&base.sub(&x, &one)) >= 0 {
            return Ok((x, Walk::Outside));
        }
        if x.is_zero() {
            return Ok((x, Walk::Finite(0)));
        }
        let walk = match expand(base, &x, search_bound)? {
            Expansion::Finite(d) => Walk::Finite(d.len() as u64),
            Expansion::Periodic(w) => {
                Walk::Cycles((w.preperiod_len() + w.period_len()) as u64, w)
            }
            Expansion::Truncated(_) => Walk::Truncated,
        };
        Ok((x, walk))
    });

    let mut states = 0u64;
    for item in walks {
        let (x, walk) = item?;
        match walk {
            Walk::Outside => {}
            Walk::Truncated => {
                return Ok(DirectF {
                    verdict: PropertyF::Undetermined {
                        bound: search_bound,
                    },
                    witness: None,
                    states,
                    candidates: n_candidates,
                })
            }
            Walk::Finite(steps) => {
                states += steps;
                if states > search_bound {
                    return Ok(DirectF {
                        verdict: PropertyF::Undetermined {
                            bound: search_bound,
                        },
                        witness: None,
                        states,
                        candidates: n_candidates,
                    });
                }
            }
            Walk::Cycles(steps, word) => {
                return Ok(DirectF {
                    verdict: PropertyF::Fails,
                    witness: Some((x, word)),
                    states: states + steps,
                    candidates: n_candidates,
                });
            }
        }
    }
    Ok(DirectF {
        verdict: PropertyF::Holds,
        witness: None,
        states,
        candidates: n_candidates,
    })
}

/// The cubic (F) decision by direct search.
pub fn cubic_f(base: &BetaBase, search_bound: u64) -> Result<PropertyF> {
    if base.degree() != 3 {
        return Err(Error::DegreeMismatch {
            got: base.degree(),
            want: 3,
        });
    }
    Ok(direct_f(base, search_bound, ExecMode::default())?.verdict)
}

pub fn classify(base: &BetaBase, search_bound: u64) -> Result<ClassificationReport> {
    classify_with(base, search_bound, ExecMode::default())
}

pub fn classify_with(
    base: &BetaBase,
    search_bound: u64,
    mode: ExecMode,
) -> Result<ClassificationReport> {
    let gate = pisot_unit_gate(base);
    let family = family_of(base.minpoly());
    let (property_f, witness, states) = if gate {
        let d = direct_f(base, search_bound, mode)?;
        (d.verdict, d.witness, d.states)
    } else {
        // the (F) machinery of the threshold theorems is not applied
        (PropertyF::Undetermined { bound: 0 }, None, 0)
    };

    let family_discrepancy = if gate {
        match (family_verdict(base.minpoly()), &property_f) {
            (Some(true), PropertyF::Fails) => Some(
                "coefficient family asserts (F) but the direct search found a periodic orbit"
                    .to_string(),
            ),
            (Some(false), PropertyF::Holds) => Some(
                "coefficient family denies (F) but every searched orbit reached 0".to_string(),
            ),
            _ => None,
        }
    } else {
        None
    };

    let gamma_known = if !gate {
        Some(GammaKnown::Zero)
    } else {
        match &property_f {
            PropertyF::Fails => Some(GammaKnown::Zero),
            PropertyF::Holds => Some(if base.degree() == 2 {
                GammaKnown::One
            } else {
                GammaKnown::Open
            }),
            PropertyF::Undetermined { .. } => None,
        }
    };

    Ok(ClassificationReport {
        base: base.minpoly().to_string(),
        degree: base.degree(),
        is_pisot: base.is_pisot(),
        is_unit: base.is_unit(),
        conjugates: conjugate_kind(base),
        property_f,
        family,
        family_discrepancy,
        gamma_known,
        witness: witness.map(|(x, w)| FailureWitness {
            coords: x.coords().iter().map(|c| c.to_string()).collect(),
            expansion: w.to_string(),
        }),
        search_states: states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::MinimalPolynomial;

    fn base(coeffs: &[i64]) -> BetaBase {
        BetaBase::new(MinimalPolynomial::new(coeffs.to_vec()).unwrap()).unwrap()
    }

    const B: u64 = DEFAULT_SEARCH_BOUND;

    #[test]
    fn gate_and_conjugate_kinds() {
        assert!(pisot_unit_gate(&base(&[-1, -1, 0, 1])));
        assert!(!pisot_unit_gate(&base(&[-2, -2, 1]))); // Pisot, not a unit
        assert!(!pisot_unit_gate(&base(&[-2, 0, 1]))); // unit-free sqrt(2), not Pisot either
        assert_eq!(
            conjugate_kind(&base(&[-1, -1, 1])),
            ConjugateKind::NegativeRealConjugate
        );
        assert_eq!(
            conjugate_kind(&base(&[1, -3, 1])),
            ConjugateKind::PositiveRealConjugate
        );
        assert_eq!(
            conjugate_kind(&base(&[-1, -1, 0, 1])),
            ConjugateKind::ComplexPair
        );
        assert_eq!(
            conjugate_kind(&base(&[1, -1, -2, 1])),
            ConjugateKind::TotallyReal
        );
        assert!(negative_branch_geometry(&base(&[1, -3, 1])));
        assert!(negative_branch_geometry(&base(&[-1, 2, -3, 1])));
        assert!(!negative_branch_geometry(&base(&[-1, -1, 1])));
    }

    #[test]
    fn quadratic_family_membership() {
        assert!(quadratic_f(&base(&[-1, -1, 1])).unwrap());
        assert!(quadratic_f(&base(&[-1, -2, 1])).unwrap());
        assert!(!quadratic_f(&base(&[1, -3, 1])).unwrap());
        assert!(matches!(
            quadratic_f(&base(&[-1, -1, 0, 1])),
            Err(Error::DegreeMismatch { got: 3, want: 2 })
        ));
        assert_eq!(
            family_of(&MinimalPolynomial::new(vec![-1, -1, 1]).unwrap()),
            Family::QuadraticF { n: 1 }
        );
        assert_eq!(
            family_of(&MinimalPolynomial::new(vec![-1, -1, -2, 1]).unwrap()),
            Family::CubicF { a: 2, b: 1 }
        );
        assert_eq!(
            family_of(&MinimalPolynomial::new(vec![-1, -1, 0, 1]).unwrap()),
            Family::Other
        );
    }

    #[test]
    fn family_verdicts_where_the_families_speak() {
        let v = |coeffs: &[i64]| family_verdict(&MinimalPolynomial::new(coeffs.to_vec()).unwrap());
        assert_eq!(v(&[-1, -1, 1]), Some(true)); // x^2 - x - 1
        assert_eq!(v(&[1, -3, 1]), Some(false)); // x^2 - 3x + 1
        assert_eq!(v(&[-1, -1, -2, 1]), Some(true)); // a=2, b=1
        assert_eq!(v(&[-1, 2, -3, 1]), Some(false)); // a=3, b=-2
        assert_eq!(v(&[1, -1, -2, 1]), Some(false)); // constant term +1
        assert_eq!(v(&[-1, -1, 0, 1]), None); // a=0 escapes both branches
    }

    #[test]
    fn direct_search_on_quadratics() {
        let d = direct_f(&base(&[-1, -1, 1]), B, ExecMode::Sequential).unwrap();
        assert_eq!(d.verdict, PropertyF::Holds);
        assert!(d.witness.is_none());
        assert!(d.candidates > 0);

        // beta - 2 is a fixed point of the orbit map for x^2 - 3x + 1
        let b = base(&[1, -3, 1]);
        let d = direct_f(&b, B, ExecMode::Sequential).unwrap();
        assert_eq!(d.verdict, PropertyF::Fails);
        let (x, w) = d.witness.expect("failing search carries a witness");
        assert!(w.preperiod_len() + w.period_len() > 0 && !w.is_finite());
        // the witness really expands to that word
        match expand(&b, &x, B).unwrap() {
            Expansion::Periodic(got) => assert_eq!(got, w),
            other => panic!("witness must expand periodically, got {other:?}"),
        }
        let fixed = b.from_int_coords(&[-2, 1]).unwrap();
        match expand(&b, &fixed, B).unwrap() {
            Expansion::Periodic(got) => {
                assert_eq!(got, PeriodicWord::parse("(1)").unwrap());
            }
            other => panic!("beta - 2 cycles, got {other:?}"),
        }
    }

    #[test]
    fn direct_search_on_cubics() {
        assert_eq!(
            cubic_f(&base(&[-1, -1, 0, 1]), B).unwrap(),
            PropertyF::Holds
        );
        assert_eq!(
            cubic_f(&base(&[-1, -1, -2, 1]), B).unwrap(),
            PropertyF::Holds
        );
        assert_eq!(
            cubic_f(&base(&[-1, 2, -3, 1]), B).unwrap(),
            PropertyF::Fails
        );
        // totally real with constant term +1
        assert_eq!(
            cubic_f(&base(&[1, -1, -2, 1]), B).unwrap(),
            PropertyF::Fails
        );
        assert!(matches!(
            cubic_f(&base(&[-1, -1, 1]), B),
            Err(Error::DegreeMismatch { got: 2, want: 3 })
        ));
    }

    #[test]
    fn tiny_bound_is_undetermined_not_a_verdict() {
        let b = base(&[-1, -1, 0, 1]);
        assert_eq!(
            cubic_f(&b, 3).unwrap(),
            PropertyF::Undetermined { bound: 3 }
        );
        let r = classify(&b, 3).unwrap();
        assert_eq!(r.gamma_known, None);
        assert_eq!(r.property_f, PropertyF::Undetermined { bound: 3 });
    }

    #[test]
    fn classification_reports() {
        let r = classify(&base(&[-1, -1, 1]), B).unwrap();
        assert!(r.is_pisot && r.is_unit);
        assert_eq!(r.property_f, PropertyF::Holds);
        assert_eq!(r.family, Family::QuadraticF { n: 1 });
        assert_eq!(r.gamma_known, Some(GammaKnown::One));
        assert!(r.family_discrepancy.is_none());

        let r = classify(&base(&[1, -3, 1]), B).unwrap();
        assert_eq!(r.property_f, PropertyF::Fails);
        assert_eq!(r.family, Family::Other);
        assert_eq!(r.gamma_known, Some(GammaKnown::Zero));
        assert!(r.witness.is_some());
        assert!(r.family_discrepancy.is_none());

        let r = classify(&base(&[-1, -1, 0, 1]), B).unwrap();
        assert_eq!(r.property_f, PropertyF::Holds);
        assert_eq!(r.family, Family::Other);
        assert_eq!(r.gamma_known, Some(GammaKnown::Open));
        assert_eq!(r.conjugates, ConjugateKind::ComplexPair);
        assert!(r.family_discrepancy.is_none());

        let r = classify(&base(&[-1, 2, -3, 1]), B).unwrap();
        assert_eq!(r.property_f, PropertyF::Fails);
        assert_eq!(r.gamma_known, Some(GammaKnown::Zero));
        assert_eq!(r.conjugates, ConjugateKind::ComplexPair);
        let w = r.witness.unwrap();
        assert_eq!(w.coords.len(), 3);
        assert!(!w.expansion.is_empty());

        // not a unit: gate fails, gamma = 0, (F) machinery not applied
        let r = classify(&base(&[-2, -2, 1]), B).unwrap();
        assert!(r.is_pisot && !r.is_unit);
        assert_eq!(r.property_f, PropertyF::Undetermined { bound: 0 });
        assert_eq!(r.gamma_known, Some(GammaKnown::Zero));
        assert_eq!(r.search_states, 0);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        for coeffs in [&[-1, -1, 0, 1][..], &[-1, 2, -3, 1], &[1, -3, 1]] {
            let b = base(coeffs);
            let s = direct_f(&b, B, ExecMode::Sequential).unwrap();
            let p = direct_f(&b, B, ExecMode::default()).unwrap();
            assert_eq!(s.verdict, p.verdict, "{coeffs:?}");
            assert_eq!(
                s.witness.map(|(x, w)| (x, w.to_string())),
                p.witness.map(|(x, w)| (x, w.to_string())),
                "{coeffs:?}"
            );
            assert_eq!(s.states, p.states);
        }
    }

    #[test]
    fn report_serializes_with_spec_fields() {
        let r = classify(&base(&[-1, -1, 0, 1]), B).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["is_pisot", "is_unit", "property_f", "family", "gamma_known"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["gamma_known"], "open");
        assert_eq!(v["property_f"], "holds");
    }
}
