//! Ray probing of a tile along geometric ladders.
//!
//! A probe walks rays out of a center point in the conjugate plane. Along
//! each ray it tests a geometric ladder of radii `epsilon * ratio^(j*stride)`
//! against a rastered tile: a rung is *interior* when its cell and the full
//! ring around it are painted by the tile alone, *complement* when no mark
//! exists within the sound dilation margin, and *uncertain* otherwise. The
//! ladder contracts by the conjugate modulus, mirroring how multiplication
//! by the base spirals points toward the tile's anchor, so a ladder that
//! starts outside and ends deep inside crosses the boundary on every ray.

use serde::Serialize;

use crate::field::BetaBase;
use crate::tiling::cloud::XI_SLOP;
use crate::tiling::raster::Raster;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointVerdict {
    Interior,
    Complement,
    Uncertain,
}

/// Radii `epsilon * ratio^(j * stride)` for `j = 0..rungs`, largest first.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeLadder {
    radii: Vec<f64>,
}

impl ProbeLadder {
    pub fn new(epsilon: f64, ratio: f64, stride: usize, rungs: usize) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::BadProbe("ladder needs a positive start radius"));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::BadProbe("ladder ratio must contract"));
        }
        if stride == 0 || rungs == 0 {
            return Err(Error::BadProbe("ladder needs a positive stride and length"));
        }
        let step = ratio.powi(stride as i32);
        let radii = (0..rungs)
            .scan(epsilon, |r, _| {
                let out = *r;
                *r *= step;
                Some(out)
            })
            .collect();
        Ok(ProbeLadder { radii })
    }

    /// Ladder contracted by the base's conjugate modulus.
    pub fn for_base(base: &BetaBase, epsilon: f64, rungs: usize) -> Result<Self> {
        ProbeLadder::new(epsilon, base.rho_upper(), 1, rungs)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RayProbe {
    pub angle: f64,
    /// One verdict per ladder rung, largest radius first.
    pub verdicts: Vec<PointVerdict>,
}

impl RayProbe {
    pub fn count(&self, v: PointVerdict) -> usize {
        self.verdicts.iter().filter(|&&w| w == v).count()
    }

    /// The ray sees both sides of the boundary.
    pub fn crosses(&self) -> bool {
        self.count(PointVerdict::Interior) >= 1 && self.count(PointVerdict::Complement) >= 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpiralProbe {
    pub center: (f64, f64),
    pub radii: Vec<f64>,
    /// Chebyshev cell radius a complement verdict was cleared out to.
    pub margin: usize,
    pub rays: Vec<RayProbe>,
}

impl SpiralProbe {
    pub fn all_rays_cross(&self) -> bool {
        self.rays.iter().all(RayProbe::crosses)
    }

    pub fn total(&self, v: PointVerdict) -> usize {
        self.rays.iter().map(|r| r.count(v)).sum()
    }
}

/// Probe the rastered tile `label` along `angles` equally spaced rays out
/// of `center`. `accuracy` is the cloud accuracy the raster was generated
/// at; it sets the margin that makes complement verdicts sound. Interior
/// verdicts use the painted-ring heuristic. Every rung of every ray must
/// sit at least the margin inside the raster.
pub fn spiral_probe(
    base: &BetaBase,
    raster: &Raster,
    label: &str,
    accuracy: f64,
    center: (f64, f64),
    angles: usize,
    ladder: &ProbeLadder,
) -> Result<SpiralProbe> {
    if base.complex_conjugate().is_none() {
        return Err(Error::NotComplex);
    }
    if angles == 0 {
        return Err(Error::BadProbe("need at least one ray"));
    }
    let li = raster
        .label_index(label)
        .ok_or(Error::BadProbe("label is not on the raster"))?;
    let margin = 1 + ((accuracy + XI_SLOP) / raster.cell()).ceil() as usize;

    let mut rays = Vec::with_capacity(angles);
    for i in 0..angles {
        let angle = 2.0 * std::f64::consts::PI * i as f64 / angles as f64;
        let (sin, cos) = angle.sin_cos();
        let mut verdicts = Vec::with_capacity(ladder.radii.len());
        for &r in &ladder.radii {
            let p = (center.0 + r * cos, center.1 + r * sin);
            let (ix, iy) = raster
                .cell_of(p)
                .ok_or(Error::ProbeOutsideRaster { x: p.0, y: p.1 })?;
            let clipped = ix < margin
                || iy < margin
                || ix + margin >= raster.nx()
                || iy + margin >= raster.ny();
            if clipped {
                return Err(Error::ProbeOutsideRaster { x: p.0, y: p.1 });
            }
            let verdict = if raster.interior_for(li, ix, iy) {
                PointVerdict::Interior
            } else if !raster.marked_within(li, ix, iy, margin) {
                PointVerdict::Complement
            } else {
                PointVerdict::Uncertain
            };
            verdicts.push(verdict);
        }
        rays.push(RayProbe { angle, verdicts });
    }
    Ok(SpiralProbe {
        center,
        radii: ladder.radii.clone(),
        margin,
        rays,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::ExecMode;
    use crate::expansion::expansion_of_one;
    use crate::field::MinimalPolynomial;
    use crate::tiling::cloud::{cloud_accuracy, depth_for_accuracy};
    use crate::tiling::raster::{central_extent, rasterize_streamed, StreamSpec};

    fn base(coeffs: &[i64]) -> BetaBase {
        BetaBase::new(MinimalPolynomial::new(coeffs.to_vec()).unwrap()).unwrap()
    }

    fn central_raster(b: &BetaBase, cell: f64, pad: f64) -> (Raster, f64) {
        let one = expansion_of_one(b, 1 << 16).unwrap();
        let depth = depth_for_accuracy(b, cell).unwrap();
        let bbox = central_extent(b, &one, depth.min(20)).unwrap().pad(pad);
        let raster = rasterize_streamed(
            b,
            &one,
            &[StreamSpec::central("T")],
            bbox,
            cell,
            depth,
            ExecMode::Sequential,
        )
        .unwrap();
        (raster, cloud_accuracy(b, depth))
    }

    #[test]
    fn ladder_is_geometric_and_validated() {
        let l = ProbeLadder::new(0.75, 0.5, 1, 4).unwrap();
        assert_eq!(l.radii(), &[0.75, 0.375, 0.1875, 0.09375]);
        let strided = ProbeLadder::new(1.0, 0.5, 2, 3).unwrap();
        assert_eq!(strided.radii(), &[1.0, 0.25, 0.0625]);
        assert!(matches!(
            ProbeLadder::new(0.0, 0.5, 1, 4),
            Err(Error::BadProbe(_))
        ));
        assert!(matches!(
            ProbeLadder::new(1.0, 1.0, 1, 4),
            Err(Error::BadProbe(_))
        ));
        assert!(matches!(
            ProbeLadder::new(1.0, 0.5, 0, 4),
            Err(Error::BadProbe(_))
        ));
        let b = base(&[-1, -1, 0, 1]);
        let auto = ProbeLadder::for_base(&b, 1.0, 3).unwrap();
        assert!((auto.radii()[1] - b.rho_upper()).abs() < 1e-12);
    }

    #[test]
    fn rays_out_of_the_spiral_center_hit_both_sides() {
        // x^3 - 3x^2 + 2x - 1: its central tile wraps around the origin in
        // interleaved arms, so each ray out of 0 alternates between tile
        // and complement. Narrow complement bands need fine cells to clear
        // the dilation margin; at this fidelity most but not yet all rays
        // resolve on both sides.
        let b = base(&[-1, 2, -3, 1]);
        let (raster, acc) = central_raster(&b, 0.005, 0.4);
        let ladder = ProbeLadder::for_base(&b, 0.75, 8).unwrap();
        let probe = spiral_probe(&b, &raster, "T", acc, (0.0, 0.0), 16, &ladder).unwrap();
        assert_eq!(probe.rays.len(), 16);
        assert_eq!(probe.radii.len(), 8);
        for ray in &probe.rays {
            assert!(
                ray.count(PointVerdict::Interior) >= 1,
                "ray at angle {} saw {:?}",
                ray.angle,
                ray.verdicts
            );
        }
        let crossing = probe.rays.iter().filter(|r| r.crosses()).count();
        assert!(
            crossing >= 12,
            "only {crossing} of 16 rays resolved on both sides"
        );
        assert!(probe.total(PointVerdict::Complement) >= crossing);
    }

    #[test]
    fn deep_interior_center_sees_no_complement() {
        let b = base(&[-1, -1, 0, 1]);
        let (raster, acc) = central_raster(&b, 0.02, 0.4);
        let ladder = ProbeLadder::new(0.05, 0.5, 1, 3).unwrap();
        let probe = spiral_probe(&b, &raster, "T", acc, (0.0, 0.0), 6, &ladder).unwrap();
        assert_eq!(probe.total(PointVerdict::Complement), 0);
        assert!(probe.total(PointVerdict::Interior) > 0);
    }

    #[test]
    fn probe_guards() {
        let golden = base(&[-1, -1, 1]);
        let b = base(&[-1, -1, 0, 1]);
        let (raster, acc) = central_raster(&b, 0.05, 0.2);
        let ladder = ProbeLadder::new(0.2, 0.5, 1, 2).unwrap();
        // quadratic bases have a real conjugate, not a pair
        assert!(matches!(
            spiral_probe(&golden, &raster, "T", acc, (0.0, 0.0), 4, &ladder),
            Err(Error::NotComplex)
        ));
        assert!(matches!(
            spiral_probe(&b, &raster, "T", acc, (0.0, 0.0), 0, &ladder),
            Err(Error::BadProbe(_))
        ));
        assert!(matches!(
            spiral_probe(&b, &raster, "nope", acc, (0.0, 0.0), 4, &ladder),
            Err(Error::BadProbe(_))
        ));
        // a ladder reaching past the raster margin is refused, not clipped
        let wide = ProbeLadder::new(50.0, 0.5, 1, 2).unwrap();
        assert!(matches!(
            spiral_probe(&b, &raster, "T", acc, (0.0, 0.0), 4, &wide),
            Err(Error::ProbeOutsideRaster { .. })
        ));
    }
}
