//! The geometric pure-periodicity test.
//!
//! A point `x` of `[0, 1)` in the field is purely periodic exactly when the
//! pair `(-Xi(x), x)` lies in the union of `T_i x [0, T^i(1))` over the gap
//! classes. The interval comparisons are exact; the tile memberships are
//! decided against a subtile raster at its fidelity. Verdicts are therefore
//! three-valued: `Inside` and `Outside` are raster-sound claims (a marked
//! interior cell, resp. no mark within the dilation margin), everything
//! near a boundary stays `Uncertain`.

use serde::Serialize;

use crate::exec::ExecMode;
use crate::expansion::expand_fraction;
use crate::field::{BetaBase, FieldElement};
use crate::tiling::cloud::{cloud_accuracy, depth_for_accuracy, XI_SLOP};
use crate::tiling::raster::{central_extent, rasterize_streamed, Raster, StreamSpec};
use crate::tiling::GapStructure;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    Uncertain,
}

/// Everything `classify` saw: the verdict, the probed cell, and which gap
/// classes were live (exact interval test passed) or witnessed (interior
/// cell hit).
#[derive(Debug, Clone, Serialize)]
pub struct MembershipDetail {
    pub verdict: Membership,
    /// Raster cell of `-Xi(x)`, if it falls inside the raster box.
    pub cell: Option<(usize, usize)>,
    /// Classes `i` with `x < T^i(1)` (exact).
    pub live_classes: Vec<usize>,
    /// Live classes whose subtile claims the cell as interior.
    pub interior_witnesses: Vec<usize>,
    /// Live classes with any mark within the dilation margin.
    pub near_marks: Vec<usize>,
}

/// A subtile raster plus the gap structure, ready to classify points.
#[derive(Debug, Clone)]
pub struct MembershipContext {
    raster: Raster,
    gaps: GapStructure,
    depth: usize,
    accuracy: f64,
    margin: usize,
}

impl MembershipContext {
    /// Depth at which every cell fully inside a subtile is guaranteed a
    /// mark: cloud accuracy at most half the cell size.
    pub fn depth_for(base: &BetaBase, cell: f64) -> Result<usize> {
        depth_for_accuracy(base, cell / 2.0)
    }

    /// Build the subtile raster for `base` at the given generation depth
    /// and cell size.
    pub fn build(base: &BetaBase, depth: usize, cell: f64, mode: ExecMode) -> Result<Self> {
        if !base.is_pisot_unit() {
            return Err(Error::NotPisotUnit);
        }
        let gaps = GapStructure::new(base)?;
        let extent_depth = depth.min(24);
        let bbox = central_extent(base, &gaps.one, extent_depth)?;
        let specs: Vec<StreamSpec> = (0..gaps.class_count())
            .map(|i| StreamSpec::subtile(format!("T{i}"), i))
            .collect();
        let raster = rasterize_streamed(base, &gaps.one, &specs, bbox, cell, depth, mode)?;
        let accuracy = cloud_accuracy(base, depth);
        let margin = 1 + ((accuracy + XI_SLOP) / cell).ceil() as usize;
        Ok(MembershipContext { raster, gaps, depth, accuracy, margin })
    }

    pub fn raster(&self) -> &Raster {
        &self.raster
    }

    pub fn gaps(&self) -> &GapStructure {
        &self.gaps
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// Dilation margin in cells: marks farther than this cannot belong to a
    /// tile containing the probed point.
    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Classify `(-Xi(x), x)` against the covering of the unit interval.
    pub fn classify(&self, base: &BetaBase, x: &FieldElement) -> Result<MembershipDetail> {
        if base.sign_of(x) < 0 || base.cmp_elements(x, &base.one()).is_ge() {
            return Err(Error::OutOfUnitInterval { what: "membership point" });
        }
        let live_classes: Vec<usize> = (0..self.gaps.class_count())
            .filter(|&i| base.cmp_elements(x, &self.gaps.gaps[i]).is_lt())
            .collect();
        debug_assert!(!live_classes.is_empty(), "T^0(1) = 1 keeps class 0 live");

        let (zx, zy) = base.embed(&base.neg(x)).as_xy();
        let z = (zx.mid(), zy.mid());
        let cell = self.raster.cell_of(z);

        let mut interior_witnesses = Vec::new();
        let mut near_marks = Vec::new();
        if let Some((ix, iy)) = cell {
            for &i in &live_classes {
                if self.raster.interior_for(i, ix, iy) {
                    interior_witnesses.push(i);
                }
                if self.raster.marked_within(i, ix, iy, self.margin) {
                    near_marks.push(i);
                }
            }
        }
        // Outside the raster box nothing is marked; the box already covers
        // the whole tile plus its accuracy pad, so that is a sound miss.
        let verdict = if !interior_witnesses.is_empty() {
            Membership::Inside
        } else if near_marks.is_empty() {
            Membership::Outside
        } else {
            Membership::Uncertain
        };
        Ok(MembershipDetail {
            verdict,
            cell,
            live_classes,
            interior_witnesses,
            near_marks,
        })
    }

    /// Convenience: classify the rational `p/q`.
    pub fn classify_fraction(&self, base: &BetaBase, p: i64, q: i64) -> Result<MembershipDetail> {
        self.classify(base, &base.from_ratio(p, q))
    }
}

/// Compare the geometric verdict with the exact orbit for one fraction.
/// Returns `(geometric, orbit_is_pure)`.
pub fn cross_check_fraction(
    ctx: &MembershipContext,
    base: &BetaBase,
    p: i64,
    q: i64,
    budget: u64,
) -> Result<(Membership, bool)> {
    let detail = ctx.classify_fraction(base, p, q)?;
    let pure = expand_fraction(base, p, q, budget)?.is_purely_periodic();
    Ok((detail.verdict, pure))
}
