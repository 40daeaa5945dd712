//! Numerical audit of the tile covering.
//!
//! The translated tiles `T(y)`, over fractional parts `y` of beta-integers,
//! cover the conjugate space. The audit enumerates every `y` whose tile can
//! reach a chosen window, streams all their depth-`k` clouds in one pass,
//! and reports two kinds of statistics:
//!
//! * dilated coverage at the base resolution: a cell counts as touched by a
//!   tile when one of its cloud points lies within the cloud accuracy (plus
//!   slop) of the cell — since every true tile point has a cloud point that
//!   close, a zero minimum here would falsify the covering or the
//!   enumeration;
//! * raw per-cell label counts at the base resolution and its halvings:
//!   occupied cells, cells claimed by two or more tiles, and the maximum
//!   claim count. Tile interiors are disjoint, so the multi-label fraction
//!   should shrink as cells halve while the maximum stays near the
//!   covering's overlap constant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::exec::ExecMode;
use crate::expansion::expand;
use crate::field::interval::RatInterval;
use crate::field::BetaBase;
use crate::tiling::cloud::{self, cloud_accuracy, TailConstraint, XiKernel, XI_SLOP};
use crate::tiling::lattice::{enumerate_box, EmbeddingBox};
use crate::tiling::raster::{BBox, Raster, StreamSpec};
use crate::tiling::GapStructure;
use crate::{Error, Result};

const Y_CAP: u64 = 200_000;
const TAIL_BUDGET: u64 = 1 << 20;

/// Raw occupancy statistics of one resolution, restricted to the window.
#[derive(Debug, Clone, Serialize)]
pub struct ResolutionStats {
    pub cell: f64,
    pub occupied: u64,
    pub multi_label: u64,
    pub multi_label_fraction: f64,
    pub max_multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringAudit {
    pub depth: usize,
    pub side: f64,
    /// Fractional parts whose tiles can reach the window.
    pub y_count: usize,
    /// Distinct tail-constraint classes among them (the tile inventory).
    pub tile_classes: usize,
    pub accuracy: f64,
    /// Dilation radius (cells at the base resolution) used for coverage.
    pub dilation_radius: usize,
    pub min_dilated_multiplicity: usize,
    pub max_dilated_multiplicity: usize,
    pub resolutions: Vec<ResolutionStats>,
}

/// Chebyshev dilation of one bitmap by `r` cells (separable sliding OR).
fn dilate(bits: &[u64], nx: usize, ny: usize, r: usize) -> Vec<u64> {
    let words = (nx * ny).div_ceil(64);
    let get = |b: &[u64], x: usize, y: usize| {
        let i = y * nx + x;
        b[i / 64] >> (i % 64) & 1 != 0
    };
    let mut horiz = vec![0u64; words];
    for y in 0..ny {
        let mut diff = vec![0i32; nx + 1];
        for x in 0..nx {
            if get(bits, x, y) {
                diff[x.saturating_sub(r)] += 1;
                diff[(x + r + 1).min(nx)] -= 1;
            }
        }
        let mut running = 0;
        for x in 0..nx {
            running += diff[x];
            if running > 0 {
                let i = y * nx + x;
                horiz[i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut out = vec![0u64; words];
    for x in 0..nx {
        let mut diff = vec![0i32; ny + 1];
        for y in 0..ny {
            if get(&horiz, x, y) {
                diff[y.saturating_sub(r)] += 1;
                diff[(y + r + 1).min(ny)] -= 1;
            }
        }
        let mut running = 0;
        for y in 0..ny {
            running += diff[y];
            if running > 0 {
                let i = y * nx + x;
                out[i / 64] |= 1 << (i % 64);
            }
        }
    }
    out
}

/// Fractional parts of beta-integers whose tile can intersect a disc of
/// radius `reach` around the origin of the conjugate space.
pub fn tiles_reaching(base: &BetaBase, reach: f64) -> Result<Vec<crate::field::FieldElement>> {
    let radius = BigRational::from_f64(reach).ok_or(Error::BadCellSize)?;
    let value = RatInterval::new(
        BigRational::from_integer(BigInt::from(0)),
        BigRational::from_integer(BigInt::from(1)),
    );
    let region = EmbeddingBox::centered(base, value, radius);
    let mut ys: Vec<_> = enumerate_box(base, &region, Y_CAP)?
        .into_iter()
        .filter(|y| base.sign_of(y) >= 0 && base.cmp_elements(y, &base.one()).is_lt())
        .collect();
    ys.sort_by(|a, b| base.cmp_elements(a, b));
    Ok(ys)
}

/// Audit the covering on the square window of side `side` centered at the
/// origin, generating tiles at `depth` and rastering at `cell` plus
/// `halvings` halved resolutions.
pub fn covering_audit(
    base: &BetaBase,
    side: f64,
    depth: usize,
    cell: f64,
    halvings: usize,
    mode: ExecMode,
) -> Result<CoveringAudit> {
    if !base.is_pisot_unit() {
        return Err(Error::NotPisotUnit);
    }
    if !(cell > 0.0) {
        return Err(Error::BadCellSize);
    }
    if !(side > 0.0) {
        return Err(Error::BadRegion(0));
    }
    let gaps = GapStructure::new(base)?;
    let acc = cloud_accuracy(base, depth);
    // every cloud point sits within this radius of its tile's anchor
    let tile_radius = base.digit_max() as f64 / (1.0 - base.rho_upper());
    let reach = side / 2.0 * std::f64::consts::SQRT_2 + tile_radius + acc + cell;
    let ys = tiles_reaching(base, reach)?;

    let mut specs: Vec<StreamSpec> = Vec::with_capacity(ys.len());
    let mut masks = std::collections::HashSet::new();
    for y in &ys {
        let tail = expand(base, y, TAIL_BUDGET)?
            .word()
            .ok_or(Error::BudgetExhausted { budget: TAIL_BUDGET })?;
        let constraint = TailConstraint::for_tail(&gaps.one.envelope, &tail);
        masks.insert(constraint.mask());
        let (ox, oy) = base.embed(y).as_xy();
        // distinct y have distinct expansions, so tails are unique labels
        specs.push(StreamSpec::tile(
            tail.to_string(),
            constraint,
            (ox.mid(), oy.mid()),
        ));
    }

    let window = BBox::centered_square(side);
    let dilation = ((acc + XI_SLOP) / cell).ceil() as usize + 2;
    let auto = gaps.one.automaton();
    let kernel = XiKernel::new(base);

    // one streaming pass marks every resolution
    let mut rasters: Vec<Raster> = Vec::new();
    let base_box = window.pad((dilation + 1) as f64 * cell);
    rasters.push(Raster::new(
        base_box,
        cell,
        specs.iter().map(|s| s.label.clone()).collect(),
    )?);
    for r in 1..=halvings {
        let c = cell / (1u32 << r) as f64;
        rasters.push(Raster::new(
            window.pad(2.0 * c),
            c,
            specs.iter().map(|s| s.label.clone()).collect(),
        )?);
    }
    let parts = cloud::stream_chunked(&auto, depth, mode, |chunk| {
        let mut local = rasters.clone();
        for prefix in chunk {
            cloud::stream_words(&auto, kernel, depth, prefix, |_, live, pt| {
                for (i, spec) in specs.iter().enumerate() {
                    if spec.constraint.admits(live) {
                        let p = (pt.0 + spec.offset.0, pt.1 + spec.offset.1);
                        for raster in local.iter_mut() {
                            raster.mark(i, p);
                        }
                    }
                }
                Ok(())
            })?;
        }
        Ok(local)
    })?;
    for part in &parts {
        for (merged, local) in rasters.iter_mut().zip(part) {
            merged.merge(local);
        }
    }

    // dilated coverage at the base resolution
    let base_raster = &rasters[0];
    let (nx, ny) = (base_raster.nx(), base_raster.ny());
    let mut dil_mult = vec![0u32; nx * ny];
    for label in 0..specs.len() {
        let mut bits = vec![0u64; (nx * ny).div_ceil(64)];
        for iy in 0..ny {
            for ix in 0..nx {
                if base_raster.is_marked(label, ix, iy) {
                    let i = iy * nx + ix;
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
        }
        let dilated = dilate(&bits, nx, ny, dilation);
        for (i, m) in dil_mult.iter_mut().enumerate() {
            if dilated[i / 64] >> (i % 64) & 1 != 0 {
                *m += 1;
            }
        }
    }
    let mut min_dil = u32::MAX;
    let mut max_dil = 0u32;
    for iy in 0..ny {
        for ix in 0..nx {
            let center = base_raster.cell_center(ix, iy);
            if !window.contains(center) {
                continue;
            }
            let m = dil_mult[iy * nx + ix];
            min_dil = min_dil.min(m);
            max_dil = max_dil.max(m);
        }
    }

    let resolutions = rasters
        .iter()
        .map(|raster| {
            let mut occupied = 0u64;
            let mut multi = 0u64;
            let mut max_mult = 0usize;
            for iy in 0..raster.ny() {
                for ix in 0..raster.nx() {
                    if !window.contains(raster.cell_center(ix, iy)) {
                        continue;
                    }
                    let m = raster.multiplicity(ix, iy);
                    if m > 0 {
                        occupied += 1;
                    }
                    if m > 1 {
                        multi += 1;
                    }
                    max_mult = max_mult.max(m);
                }
            }
            ResolutionStats {
                cell: raster.cell(),
                occupied,
                multi_label: multi,
                multi_label_fraction: if occupied == 0 {
                    0.0
                } else {
                    multi as f64 / occupied as f64
                },
                max_multiplicity: max_mult,
            }
        })
        .collect();

    Ok(CoveringAudit {
        depth,
        side,
        y_count: ys.len(),
        tile_classes: masks.len(),
        accuracy: acc,
        dilation_radius: dilation,
        min_dilated_multiplicity: min_dil as usize,
        max_dilated_multiplicity: max_dil as usize,
        resolutions,
    })
}
