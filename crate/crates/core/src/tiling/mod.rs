//! Geometry of beta-expansions under the conjugate embeddings: beta-integer
//! point clouds, central tiles and their subdivisions, tiles translated by a
//! fractional tail, rasterization, the geometric pure-periodicity membership
//! test, representation search, and ray probes.
//!
//! A tile is approximated from inside by the conjugate images of all
//! beta-integers expressible with `depth` digits; [`cloud::cloud_accuracy`]
//! bounds how far the true tile can extend beyond the finite cloud. Clouds
//! come in two forms: materialized [`PointCloud`]s carrying exact field
//! values and certified embeddings (small depths), and streamed rasters that
//! only touch `f64` images (large depths, see [`raster`]).

pub mod audit;
pub mod cloud;
pub mod lattice;
pub mod membership;
pub mod probe;
pub mod raster;
pub mod xirep;

use std::fmt;

use crate::expansion::{
    expand, expansion_of_one, is_admissible, successor_gaps, FollowerAutomaton, OneExpansion,
};
use crate::field::{BetaBase, EmbeddedPoint, FieldElement};
use crate::words::{Digit, PeriodicWord};
use crate::{Error, Result};

pub use audit::{covering_audit, tiles_reaching, CoveringAudit, ResolutionStats};
pub use cloud::{cloud_accuracy, depth_for_accuracy, TailConstraint, XiKernel, XI_SLOP};
pub use membership::{cross_check_fraction, Membership, MembershipContext, MembershipDetail};
pub use probe::{spiral_probe, PointVerdict, ProbeLadder, RayProbe, SpiralProbe};
pub use raster::{central_extent, rasterize, rasterize_streamed, BBox, Raster, StreamSpec};
pub use xirep::{find_xi_representation, XiRepresentation, XiSearch};

/// Hard ceiling on materialized cloud size (number of enumerated words).
pub const MATERIALIZE_CAP: u64 = 2_000_000;

/// Step budget for the expansions driving envelopes and tile tails.
const TAIL_BUDGET: u64 = 1 << 20;

// ---------------------------------------------------------------------------
// labels and gap structure
// ---------------------------------------------------------------------------

/// Identity of a point cloud: the central tile, one of its gap-class
/// subtiles, or the tile translated by a fractional part `y` (named by the
/// expansion of `y`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TileLabel {
    Central,
    Subtile(usize),
    Tile(String),
}

impl fmt::Display for TileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TileLabel::Central => write!(f, "T"),
            TileLabel::Subtile(i) => write!(f, "T{i}"),
            TileLabel::Tile(tail) => write!(f, "T.{tail}"),
        }
    }
}

/// The successor structure of the base: the expansions of 1, the gap values
/// `T^i(1)` (distances between consecutive beta-integers), and the envelope
/// shape `(m, n)`. There are exactly `m + n` gap classes.
#[derive(Debug, Clone)]
pub struct GapStructure {
    pub one: OneExpansion,
    /// `gaps[i]` is the orbit value `T^i(1)` under the quasi-greedy map.
    pub gaps: Vec<FieldElement>,
    /// Envelope preperiod length.
    pub m: usize,
    /// Envelope period length.
    pub n: usize,
}

impl GapStructure {
    pub fn new(base: &BetaBase) -> Result<Self> {
        let one = expansion_of_one(base, TAIL_BUDGET)?;
        let gaps = successor_gaps(base, &one);
        let m = one.envelope.preperiod_len();
        let n = one.envelope.period_len();
        debug_assert_eq!(gaps.len(), m + n);
        Ok(GapStructure { one, gaps, m, n })
    }

    pub fn class_count(&self) -> usize {
        self.m + self.n
    }

    pub fn automaton(&self) -> FollowerAutomaton {
        self.one.automaton()
    }
}

// ---------------------------------------------------------------------------
// materialized clouds
// ---------------------------------------------------------------------------

/// A finite inner approximation of a tile: every admissible word up to the
/// generation depth (leading zeros trimmed), its exact field value (anchor
/// included), and the certified embedding of that value.
///
/// Entries are in ascending order of value, which coincides with
/// lexicographic order of the zero-padded words.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub label: TileLabel,
    pub depth: usize,
    /// Radius by which the true tile may exceed this cloud.
    pub accuracy: f64,
    /// Translation applied to every value (zero except for `tile_cloud`).
    pub anchor: FieldElement,
    pub words: Vec<Vec<Digit>>,
    pub values: Vec<FieldElement>,
    pub points: Vec<EmbeddedPoint>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Exact value of the beta-integer written `w_1 .. w_k` (most significant
/// digit first).
pub fn word_value(base: &BetaBase, word: &[Digit]) -> FieldElement {
    let mut v = base.zero();
    for &a in word {
        v = base.mul_beta(&v);
        if a != 0 {
            v = base.add(&v, &base.from_ratio(a as i64, 1));
        }
    }
    v
}

fn trim_leading_zeros(word: &[Digit]) -> Vec<Digit> {
    let start = word.iter().position(|&d| d != 0).unwrap_or(word.len());
    word[start..].to_vec()
}

struct CloudSpec<'a> {
    label: TileLabel,
    anchor: FieldElement,
    constraint: TailConstraint,
    class_filter: Option<usize>,
    one: &'a OneExpansion,
}

fn materialize(
    base: &BetaBase,
    spec: CloudSpec<'_>,
    depth: usize,
    precision: f64,
) -> Result<PointCloud> {
    let auto = spec.one.automaton();
    let nodes = cloud::count_words(&auto, depth);
    if nodes > MATERIALIZE_CAP {
        return Err(Error::CloudTooLarge {
            estimate: nodes,
            budget: MATERIALIZE_CAP,
        });
    }
    let mut cloud = PointCloud {
        label: spec.label,
        depth,
        accuracy: cloud_accuracy(base, depth),
        anchor: spec.anchor.clone(),
        words: Vec::new(),
        values: Vec::new(),
        points: Vec::new(),
    };
    let anchored = !base.cmp_elements(&spec.anchor, &base.zero()).is_eq();
    cloud::stream_words(&auto, XiKernel::new(base), depth, &[], |w, live, _| {
        if !spec.constraint.admits(live) {
            return Ok(());
        }
        if let Some(class) = spec.class_filter {
            if auto.class(live) != class {
                return Ok(());
            }
        }
        let mut value = word_value(base, w);
        if anchored {
            value = base.add(&value, &spec.anchor);
        }
        let point = base.embed(&value);
        let width = point.max_width();
        if width > precision {
            return Err(Error::PrecisionTooFine(precision));
        }
        cloud.words.push(trim_leading_zeros(w));
        cloud.values.push(value);
        cloud.points.push(point);
        Ok(())
    })?;
    Ok(cloud)
}

/// All beta-integers in `[0, beta^depth)`: each admissible word of length at
/// most `depth` (exactly once, without leading zeros) with its exact value.
pub fn beta_integers(base: &BetaBase, depth: usize) -> Result<Vec<(Vec<Digit>, FieldElement)>> {
    let cloud = central_tile_cloud(base, depth, 1e-6)?;
    Ok(cloud.words.into_iter().zip(cloud.values).collect())
}

/// The depth-`depth` inner approximation of the central tile: conjugate
/// images of all beta-integers below `beta^depth`.
pub fn central_tile_cloud(base: &BetaBase, depth: usize, precision: f64) -> Result<PointCloud> {
    let one = expansion_of_one(base, TAIL_BUDGET)?;
    materialize(
        base,
        CloudSpec {
            label: TileLabel::Central,
            anchor: base.zero(),
            constraint: TailConstraint::none(),
            class_filter: None,
            one: &one,
        },
        depth,
        precision,
    )
}

/// The subtile of gap class `class`: beta-integers whose distance to their
/// successor is `T^class(1)`. The class of a word is the length of the
/// longest prefix of the envelope that is a suffix of the word, reduced into
/// the envelope's eventual period.
pub fn subtile_cloud(
    base: &BetaBase,
    class: usize,
    depth: usize,
    precision: f64,
) -> Result<PointCloud> {
    let structure = GapStructure::new(base)?;
    if class >= structure.class_count() {
        return Err(Error::SubtileIndex {
            index: class,
            count: structure.class_count(),
        });
    }
    materialize(
        base,
        CloudSpec {
            label: TileLabel::Subtile(class),
            anchor: base.zero(),
            constraint: TailConstraint::none(),
            class_filter: Some(class),
            one: &structure.one,
        },
        depth,
        precision,
    )
}

/// The tile of the fractional part `y`: images of beta-integers whose word
/// remains admissible when the expansion of `y` is glued after it, each
/// translated by the image of `y`.
///
/// `y` must lie in `[0, 1)` and have a computable (finite or eventually
/// periodic) expansion; `y = 0` reproduces the central tile.
pub fn tile_cloud(
    base: &BetaBase,
    y: &FieldElement,
    depth: usize,
    precision: f64,
) -> Result<PointCloud> {
    if base.sign_of(y) < 0 || base.cmp_elements(y, &base.one()).is_ge() {
        return Err(Error::OutOfUnitInterval { what: "tile offset" });
    }
    if base.sign_of(y) == 0 {
        return central_tile_cloud(base, depth, precision);
    }
    let one = expansion_of_one(base, TAIL_BUDGET)?;
    let tail = expand(base, y, TAIL_BUDGET)?
        .word()
        .ok_or(Error::BudgetExhausted { budget: TAIL_BUDGET })?;
    debug_assert!(is_admissible(&one, &tail));
    materialize(
        base,
        CloudSpec {
            label: TileLabel::Tile(tail.to_string()),
            anchor: y.clone(),
            constraint: TailConstraint::for_tail(&one.envelope, &tail),
            class_filter: None,
            one: &one,
        },
        depth,
        precision,
    )
}

/// Tail-constraint mask of an expansion word: which follower positions may
/// not precede it. Tiles with equal masks are translates of each other, and
/// there are exactly `m + n` distinct masks over all fractional parts.
pub fn tail_mask(one: &OneExpansion, tail: &PeriodicWord) -> u32 {
    TailConstraint::for_tail(&one.envelope, tail).mask()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::expand_fraction;
    use crate::field::MinimalPolynomial;

    fn base(coeffs: &[i64]) -> BetaBase {
        BetaBase::new(MinimalPolynomial::new(coeffs.to_vec()).unwrap()).unwrap()
    }

    fn phi() -> BetaBase {
        base(&[-1, -1, 1])
    }

    fn eta() -> BetaBase {
        base(&[-1, -1, 0, 1])
    }

    #[test]
    fn small_beta_integer_inventories() {
        let b = phi();
        let ints = beta_integers(&b, 2).unwrap();
        let words: Vec<&[Digit]> = ints.iter().map(|(w, _)| w.as_slice()).collect();
        assert_eq!(words, vec![&[] as &[Digit], &[1], &[1, 0]]);
        assert!(b.cmp_elements(&ints[0].1, &b.zero()).is_eq());
        assert!(b.cmp_elements(&ints[1].1, &b.one()).is_eq());
        assert!(b.cmp_elements(&ints[2].1, &b.beta_element()).is_eq());

        for coeffs in [&[-1i64, -1, 1] as &[i64], &[-1, -1, 0, 1], &[-1, 2, -3, 1]] {
            let b = base(coeffs);
            let ints = beta_integers(&b, 0).unwrap();
            assert_eq!(ints.len(), 1);
            assert!(ints[0].0.is_empty());
            assert!(b.cmp_elements(&ints[0].1, &b.zero()).is_eq());
        }
    }

    #[test]
    fn beta_integer_words_match_the_admissibility_oracle() {
        let b = eta();
        let one = expansion_of_one(&b, 1 << 16).unwrap();
        let ints = beta_integers(&b, 5).unwrap();
        // brute force: all digit words of length <= 5 without leading zeros
        let mut expected = vec![Vec::<Digit>::new()];
        for len in 1..=5usize {
            for code in 0..(2u32 << (len - 1)) {
                let word: Vec<Digit> = (0..len).map(|i| code >> (len - 1 - i) & 1).collect();
                if word[0] != 0 && is_admissible(&one, &PeriodicWord::finite(word.clone())) {
                    expected.push(word);
                }
            }
        }
        let got: Vec<Vec<Digit>> = ints.iter().map(|(w, _)| w.clone()).collect();
        let mut sorted = expected.clone();
        sorted.sort_by_key(|w| (w.len(), w.clone()));
        assert_eq!(got, sorted);
        // 1s separated by at least four 0s
        for (w, _) in &ints {
            for (i, &a) in w.iter().enumerate() {
                if a == 1 {
                    assert!(w[i + 1..].iter().take(4).all(|&d| d == 0), "{w:?}");
                }
            }
        }
    }

    #[test]
    fn gap_structure_of_the_smallest_pisot_base() {
        let b = eta();
        let g = GapStructure::new(&b).unwrap();
        assert_eq!((g.m, g.n), (0, 5));
        assert_eq!(g.class_count(), 5);
        assert_eq!(g.one.envelope.to_string(), "(10000)");
        match &g.one.greedy {
            crate::expansion::Expansion::Finite(d) => assert_eq!(d, &[1, 0, 0, 0, 1]),
            other => panic!("expected finite expansion of 1, got {other:?}"),
        }
        // gap values: T^0(1) = 1, then the envelope orbit, strictly positive
        assert!(b.cmp_elements(&g.gaps[0], &b.one()).is_eq());
        for v in &g.gaps {
            assert_eq!(b.sign_of(v), 1);
            assert!(b.cmp_elements(v, &b.one()).is_le());
        }
    }

    #[test]
    fn subtiles_partition_every_depth() {
        let b = eta();
        let g = GapStructure::new(&b).unwrap();
        for depth in [8usize, 20] {
            let central = central_tile_cloud(&b, depth, 1e-6).unwrap();
            let mut seen = 0usize;
            let mut union: Vec<Vec<Digit>> = Vec::new();
            for class in 0..g.class_count() {
                let sub = subtile_cloud(&b, class, depth, 1e-6).unwrap();
                if depth == 20 {
                    assert!(!sub.is_empty(), "class {class} empty at depth 20");
                }
                seen += sub.len();
                union.extend(sub.words.iter().cloned());
            }
            assert_eq!(seen, central.len(), "depth {depth}");
            union.sort_by_key(|w| (w.len(), w.clone()));
            let mut want = central.words.clone();
            want.sort_by_key(|w| (w.len(), w.clone()));
            assert_eq!(union, want, "depth {depth}");
        }
        assert!(matches!(
            subtile_cloud(&b, 5, 4, 1e-6),
            Err(Error::SubtileIndex { index: 5, count: 5 })
        ));
    }

    #[test]
    fn gap_classes_predict_successor_differences() {
        for coeffs in [&[-1i64, -1, 1] as &[i64], &[-1, -1, 0, 1]] {
            let b = base(coeffs);
            let g = GapStructure::new(&b).unwrap();
            let auto = g.automaton();
            let cloud = central_tile_cloud(&b, 9, 1e-6).unwrap();
            // already sorted by value; check the exact gap to each successor
            for i in 0..cloud.len() - 1 {
                let diff = b.sub(&cloud.values[i + 1], &cloud.values[i]);
                let mut live = auto.start();
                for &a in &cloud.words[i] {
                    live = auto.feed(&live, a).unwrap();
                }
                let class = auto.class(&live);
                assert!(
                    b.cmp_elements(&diff, &g.gaps[class]).is_eq(),
                    "word {:?} class {class}",
                    cloud.words[i]
                );
            }
        }
    }

    #[test]
    fn golden_words_ending_in_one_are_class_one() {
        let b = phi();
        let g = GapStructure::new(&b).unwrap();
        assert_eq!(g.class_count(), 2);
        let auto = g.automaton();
        let cloud = central_tile_cloud(&b, 7, 1e-6).unwrap();
        for w in &cloud.words {
            let mut live = auto.start();
            for &a in w {
                live = auto.feed(&live, a).unwrap();
            }
            let expect = if w.last() == Some(&1) { 1 } else { 0 };
            assert_eq!(auto.class(&live), expect, "{w:?}");
        }
        // class-1 gap is phi - 1
        let phi_minus_one = b.sub(&b.beta_element(), &b.one());
        assert!(b.cmp_elements(&g.gaps[1], &phi_minus_one).is_eq());
    }

    #[test]
    fn tile_of_zero_is_the_central_tile() {
        let b = eta();
        let central = central_tile_cloud(&b, 10, 1e-6).unwrap();
        let tile = tile_cloud(&b, &b.zero(), 10, 1e-6).unwrap();
        assert_eq!(tile.label, TileLabel::Central);
        assert_eq!(tile.words, central.words);
        for (a, c) in tile.values.iter().zip(&central.values) {
            assert!(b.cmp_elements(a, c).is_eq());
        }
    }

    #[test]
    fn translated_tile_commutes_and_respects_the_tail() {
        let b = eta();
        // y = eta - 1 expands to 0001
        let y = b.sub(&b.beta_element(), &b.one());
        let tail = expand(&b, &y, 1 << 16).unwrap().word().unwrap();
        assert_eq!(tail.to_string(), "0001");

        let depth = 12;
        let tile = tile_cloud(&b, &y, depth, 1e-6).unwrap();
        assert_eq!(tile.label, TileLabel::Tile("0001".into()));
        let central = central_tile_cloud(&b, depth, 1e-6).unwrap();

        // counts match the follower-state census
        let one = expansion_of_one(&b, 1 << 16).unwrap();
        let constraint = TailConstraint::for_tail(&one.envelope, &tail);
        let auto = one.automaton();
        assert_eq!(
            tile.len() as u64,
            cloud::count_words_with_tail(&auto, depth, &constraint)
        );
        assert!(tile.len() < central.len());

        let central_words: std::collections::HashSet<_> =
            central.words.iter().cloned().collect();
        for (w, v) in tile.words.iter().zip(&tile.values) {
            // subset of the central words; no word ends in 1 (the straddling
            // suffix 1 0001 would overflow the envelope 10000...)
            assert!(central_words.contains(w));
            assert_ne!(w.last(), Some(&1), "{w:?}");
            // value = anchor + word value, exactly
            let expect = b.add(&y, &word_value(&b, w));
            assert!(b.cmp_elements(v, &expect).is_eq());
        }
    }

    #[test]
    fn cloud_guards_reject_bad_requests() {
        let b = eta();
        assert!(matches!(
            central_tile_cloud(&b, 90, 1e-6),
            Err(Error::CloudTooLarge { .. })
        ));
        assert!(matches!(
            central_tile_cloud(&b, 6, 1e-18),
            Err(Error::PrecisionTooFine(_))
        ));
        let minus = b.from_ratio(-1, 2);
        assert!(matches!(
            tile_cloud(&b, &minus, 4, 1e-6),
            Err(Error::OutOfUnitInterval { .. })
        ));
        assert!(matches!(
            tile_cloud(&b, &b.one(), 4, 1e-6),
            Err(Error::OutOfUnitInterval { .. })
        ));
    }

    #[test]
    fn rational_tails_realize_every_tile_class() {
        // masks over a sample of fractional parts take exactly m + n values,
        // nested by the shift thresholds
        let b = eta();
        let one = expansion_of_one(&b, 1 << 16).unwrap();
        let mut masks = std::collections::HashSet::new();
        masks.insert(tail_mask(&one, &PeriodicWord::finite(vec![])));
        for q in 1..=30i64 {
            for p in 0..q {
                if let Some(w) = expand_fraction(&b, p, q, 1 << 16).unwrap().word() {
                    masks.insert(tail_mask(&one, &w));
                }
            }
        }
        let mut got: Vec<u32> = masks.into_iter().collect();
        got.sort();
        assert_eq!(got, vec![0b00000, 0b00010, 0b00110, 0b01110, 0b11110]);
    }

    #[test]
    fn conjugate_angles_are_nondegenerate() {
        for coeffs in [&[-1i64, -1, 0, 1] as &[i64], &[-1, 2, -3, 1]] {
            let b = base(coeffs);
            let cc = b.complex_conjugate().expect("complex cubic base");
            let mut re = cc.re.clone();
            let mut im = cc.im.clone();
            for k in 1..=64u32 {
                assert!(
                    !im.contains_zero(),
                    "alpha^{k} imaginary part not certified nonzero"
                );
                let nre = re.mul(&cc.re).sub(&im.mul(&cc.im));
                let nim = re.mul(&cc.im).add(&im.mul(&cc.re));
                re = nre;
                im = nim;
            }
        }
    }
}
