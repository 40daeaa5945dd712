//! Occupancy rasters: discretized pictures of tile clouds.
//!
//! A raster covers an axis-aligned box with square cells and keeps one
//! bitmap per label. A cell is marked for a label exactly when some
//! generated point of that label's cloud fell into it. Cell boundaries are
//! defined by the exact binary rationals behind the `f64` box corners, so
//! exact (rational) queries and the fast `f64` marking path agree except
//! within an ulp of a boundary; all downstream consumers tolerate a
//! one-cell slack on top of the cloud accuracy, which dwarfs that slop.
//!
//! Image export uses a fixed palette, documented on [`Raster::to_pgm`] and
//! [`Raster::to_ppm`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::exec::ExecMode;
use crate::expansion::OneExpansion;
use crate::field::BetaBase;
use crate::tiling::cloud::{self, TailConstraint, XiKernel, XI_SLOP};
use crate::tiling::PointCloud;
use crate::{Error, Result};

/// Upper bound on `cells * labels` across a raster's bitmaps.
const BIT_BUDGET: u64 = 1 << 30;

/// Axis-aligned bounding box in the conjugate plane (or line pair).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        BBox { x_min, x_max, y_min, y_max }
    }

    /// Square box centered at the origin with the given side length.
    pub fn centered_square(side: f64) -> Self {
        let h = side / 2.0;
        BBox { x_min: -h, x_max: h, y_min: -h, y_max: h }
    }

    pub fn pad(&self, r: f64) -> Self {
        BBox {
            x_min: self.x_min - r,
            x_max: self.x_max + r,
            y_min: self.y_min - r,
            y_max: self.y_max + r,
        }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        p.0 >= self.x_min && p.0 < self.x_max && p.1 >= self.y_min && p.1 < self.y_max
    }

    fn is_degenerate(&self) -> bool {
        !(self.x_max > self.x_min) || !(self.y_max > self.y_min)
    }
}

/// Smallest box containing every point of the depth-`depth` central cloud.
///
/// Tiles and subtiles are subsets of the central cloud (up to their anchor
/// translation), so padding this box by the cloud accuracy at the target
/// depth bounds every deeper cloud as well.
pub fn central_extent(base: &BetaBase, one: &OneExpansion, depth: usize) -> Result<BBox> {
    let auto = one.automaton();
    let mut bb = BBox::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    cloud::stream_words(&auto, XiKernel::new(base), depth, &[], |_, _, pt| {
        bb.x_min = bb.x_min.min(pt.0);
        bb.x_max = bb.x_max.max(pt.0);
        bb.y_min = bb.y_min.min(pt.1);
        bb.y_max = bb.y_max.max(pt.1);
        Ok(())
    })?;
    Ok(bb.pad(cloud::cloud_accuracy(base, depth) + XI_SLOP))
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("raster corners must be finite")
}

/// Occupancy grid over a bounding box with one bitmap per label.
#[derive(Debug, Clone)]
pub struct Raster {
    x0: BigRational,
    y0: BigRational,
    cell_exact: BigRational,
    x0_f: f64,
    y0_f: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    labels: Vec<String>,
    bits: Vec<Vec<u64>>,
}

impl Raster {
    pub fn new(bbox: BBox, cell: f64, labels: Vec<String>) -> Result<Raster> {
        if !(cell > 0.0) || !cell.is_finite() {
            return Err(Error::BadCellSize);
        }
        if bbox.is_degenerate() {
            return Err(Error::BadRegion(0));
        }
        let nx = ((bbox.x_max - bbox.x_min) / cell).ceil() as u64;
        let ny = ((bbox.y_max - bbox.y_min) / cell).ceil() as u64;
        let cells = nx.saturating_mul(ny);
        let budget = cells.saturating_mul(labels.len().max(1) as u64);
        if cells == 0 || budget > BIT_BUDGET {
            return Err(Error::BadRegion(cells));
        }
        let (nx, ny) = (nx as usize, ny as usize);
        let words = (nx * ny).div_ceil(64);
        assert!(!labels.is_empty(), "raster needs at least one label");
        let mut dedup = labels.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), labels.len(), "raster labels must be distinct");
        Ok(Raster {
            x0: exact(bbox.x_min),
            y0: exact(bbox.y_min),
            cell_exact: exact(cell),
            x0_f: bbox.x_min,
            y0_f: bbox.y_min,
            cell,
            nx,
            ny,
            bits: vec![vec![0u64; words]; labels.len()],
            labels,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn bbox(&self) -> BBox {
        BBox {
            x_min: self.x0_f,
            x_max: self.x0_f + self.cell * self.nx as f64,
            y_min: self.y0_f,
            y_max: self.y0_f + self.cell * self.ny as f64,
        }
    }

    /// Cell containing a point, by the fast `f64` path.
    pub fn cell_of(&self, p: (f64, f64)) -> Option<(usize, usize)> {
        let ix = ((p.0 - self.x0_f) / self.cell).floor();
        let iy = ((p.1 - self.y0_f) / self.cell).floor();
        if ix < 0.0 || iy < 0.0 || ix >= self.nx as f64 || iy >= self.ny as f64 {
            return None;
        }
        Some((ix as usize, iy as usize))
    }

    /// Cell containing an exact rational point. Boundary points belong to
    /// the cell above/right of the boundary (floor semantics), decided
    /// exactly.
    pub fn cell_of_exact(&self, x: &BigRational, y: &BigRational) -> Option<(usize, usize)> {
        let ix = ((x - &self.x0) / &self.cell_exact).floor();
        let iy = ((y - &self.y0) / &self.cell_exact).floor();
        if ix.is_negative() || iy.is_negative() {
            return None;
        }
        let (ix, iy) = (ix.to_integer(), iy.to_integer());
        if ix >= BigInt::from(self.nx) || iy >= BigInt::from(self.ny) {
            return None;
        }
        Some((ix.to_usize()?, iy.to_usize()?))
    }

    /// Exact center of a cell.
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.x0_f + (ix as f64 + 0.5) * self.cell,
            self.y0_f + (iy as f64 + 0.5) * self.cell,
        )
    }

    #[inline]
    fn bit(&self, ix: usize, iy: usize) -> (usize, u64) {
        let idx = iy * self.nx + ix;
        (idx / 64, 1u64 << (idx % 64))
    }

    /// Mark the cell containing `p` for `label`; points outside the box are
    /// dropped.
    pub fn mark(&mut self, label: usize, p: (f64, f64)) {
        if let Some((ix, iy)) = self.cell_of(p) {
            let (w, m) = self.bit(ix, iy);
            self.bits[label][w] |= m;
        }
    }

    pub fn is_marked(&self, label: usize, ix: usize, iy: usize) -> bool {
        let (w, m) = self.bit(ix, iy);
        self.bits[label][w] & m != 0
    }

    /// Number of distinct labels marking the cell.
    pub fn multiplicity(&self, ix: usize, iy: usize) -> usize {
        let (w, m) = self.bit(ix, iy);
        self.bits.iter().filter(|b| b[w] & m != 0).count()
    }

    pub fn occupied(&self, ix: usize, iy: usize) -> bool {
        self.multiplicity(ix, iy) > 0
    }

    /// Number of cells carrying at least one mark.
    pub fn occupied_count(&self) -> usize {
        let words = self.bits[0].len();
        (0..words)
            .map(|w| {
                let mut any = 0u64;
                for b in &self.bits {
                    any |= b[w];
                }
                any.count_ones() as usize
            })
            .sum()
    }

    /// Lowest label index marking the cell, if any.
    pub fn first_label(&self, ix: usize, iy: usize) -> Option<usize> {
        let (w, m) = self.bit(ix, iy);
        self.bits.iter().position(|b| b[w] & m != 0)
    }

    /// Is some cell within Chebyshev distance `radius` of `(ix, iy)` marked
    /// for `label`? The window is clipped at the raster edge.
    pub fn marked_within(&self, label: usize, ix: usize, iy: usize, radius: usize) -> bool {
        let x_lo = ix.saturating_sub(radius);
        let y_lo = iy.saturating_sub(radius);
        let x_hi = (ix + radius).min(self.nx - 1);
        let y_hi = (iy + radius).min(self.ny - 1);
        for y in y_lo..=y_hi {
            for x in x_lo..=x_hi {
                if self.is_marked(label, x, y) {
                    return true;
                }
            }
        }
        false
    }

    /// Interior-cell heuristic: the cell and its full neighbor ring are
    /// marked for `label` and for no other label. Edge cells (with a
    /// truncated ring) are never interior.
    pub fn interior_for(&self, label: usize, ix: usize, iy: usize) -> bool {
        if ix == 0 || iy == 0 || ix + 1 >= self.nx || iy + 1 >= self.ny {
            return false;
        }
        for y in iy - 1..=iy + 1 {
            for x in ix - 1..=ix + 1 {
                if !self.is_marked(label, x, y) || self.multiplicity(x, y) != 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Merge another raster's marks into this one (same geometry and labels
    /// required; used to combine per-chunk partial rasters).
    pub fn merge(&mut self, other: &Raster) {
        assert_eq!(self.nx, other.nx);
        assert_eq!(self.ny, other.ny);
        assert_eq!(self.labels, other.labels);
        for (mine, theirs) in self.bits.iter_mut().zip(&other.bits) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a |= *b;
            }
        }
    }

    fn gray(&self, label: usize) -> u8 {
        let l = self.labels.len();
        if l <= 1 {
            255
        } else {
            (32 + label * 223 / (l - 1)) as u8
        }
    }

    /// Binary PGM (P5). Palette: empty cells are 0; an occupied cell shows
    /// the gray level of its lowest label, `32 + l*223/(L-1)` for label `l`
    /// of `L` (255 when there is a single label). Row 0 is the top of the
    /// image (largest `y`).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        for iy in (0..self.ny).rev() {
            for ix in 0..self.nx {
                out.push(self.first_label(ix, iy).map_or(0, |l| self.gray(l)));
            }
        }
        out
    }

    /// Binary PPM (P6). Palette per cell: R is the PGM gray of the lowest
    /// label (0 if empty), G encodes multiplicity as `min(255, 64*mult)`,
    /// B is 255 for occupied cells and 0 otherwise. Row 0 is the top.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        for iy in (0..self.ny).rev() {
            for ix in 0..self.nx {
                let mult = self.multiplicity(ix, iy);
                out.push(self.first_label(ix, iy).map_or(0, |l| self.gray(l)));
                out.push(255u8.min((64 * mult) as u8));
                out.push(if mult > 0 { 255 } else { 0 });
            }
        }
        out
    }
}

/// Raster materialized point clouds: one label per distinct cloud label,
/// every point marked by its certified midpoint.
///
/// Requires every point's enclosure width to be at most `cell / 2`, so a
/// mark can be off by at most one cell.
pub fn rasterize(clouds: &[PointCloud], bbox: BBox, cell: f64) -> Result<Raster> {
    let mut labels: Vec<String> = Vec::new();
    for c in clouds {
        let name = c.label.to_string();
        if !labels.contains(&name) {
            labels.push(name);
        }
    }
    let mut raster = Raster::new(bbox, cell, labels)?;
    for c in clouds {
        let label = raster
            .label_index(&c.label.to_string())
            .expect("label registered above");
        for p in &c.points {
            let width = p.max_width();
            if width > cell / 2.0 {
                return Err(Error::PointsTooWide { width, cell });
            }
            let (x, y) = p.as_xy();
            raster.mark(label, (x.mid(), y.mid()));
        }
    }
    Ok(raster)
}

/// One streamed layer: a label plus the constraints selecting its words and
/// the translation applied to its images.
#[derive(Debug, Clone)]
pub struct StreamSpec {
    pub label: String,
    pub constraint: TailConstraint,
    pub class_filter: Option<usize>,
    pub offset: (f64, f64),
}

impl StreamSpec {
    pub fn central(label: impl Into<String>) -> Self {
        StreamSpec {
            label: label.into(),
            constraint: TailConstraint::none(),
            class_filter: None,
            offset: (0.0, 0.0),
        }
    }

    pub fn subtile(label: impl Into<String>, class: usize) -> Self {
        StreamSpec {
            class_filter: Some(class),
            ..StreamSpec::central(label)
        }
    }

    pub fn tile(label: impl Into<String>, constraint: TailConstraint, offset: (f64, f64)) -> Self {
        StreamSpec {
            label: label.into(),
            constraint,
            class_filter: None,
            offset,
        }
    }
}

/// Build a raster by streaming the depth-`depth` word tree once, marking
/// every spec whose filters accept the leaf.
///
/// The tree is split into fixed chunks (see [`cloud::prefix_chunks`]);
/// chunk rasters are merged with a bitwise OR, so the result is identical
/// across execution modes.
pub fn rasterize_streamed(
    base: &BetaBase,
    one: &OneExpansion,
    specs: &[StreamSpec],
    bbox: BBox,
    cell: f64,
    depth: usize,
    mode: ExecMode,
) -> Result<Raster> {
    let labels: Vec<String> = specs.iter().map(|s| s.label.clone()).collect();
    let template = Raster::new(bbox, cell, labels)?;
    let auto = one.automaton();
    let kernel = XiKernel::new(base);
    let parts = cloud::stream_chunked(&auto, depth, mode, |chunk| {
        let mut local = template.clone();
        for prefix in chunk {
            cloud::stream_words(&auto, kernel, depth, prefix, |_, live, pt| {
                for (i, spec) in specs.iter().enumerate() {
                    if !spec.constraint.admits(live) {
                        continue;
                    }
                    if let Some(class) = spec.class_filter {
                        if auto.class(live) != class {
                            continue;
                        }
                    }
                    local.mark(i, (pt.0 + spec.offset.0, pt.1 + spec.offset.1));
                }
                Ok(())
            })?;
        }
        Ok(local)
    })?;
    let mut merged = template;
    for part in &parts {
        merged.merge(part);
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::expansion_of_one;
    use crate::field::MinimalPolynomial;
    use crate::tiling::{central_tile_cloud, subtile_cloud, GapStructure};
    use num_traits::Zero;

    fn eta() -> BetaBase {
        BetaBase::new(MinimalPolynomial::new(vec![-1, -1, 0, 1]).unwrap()).unwrap()
    }

    #[test]
    fn one_point_marks_one_cell() {
        let mut r = Raster::new(BBox::centered_square(4.0), 1.0, vec!["T".into()]).unwrap();
        r.mark(0, (0.0, 0.0));
        let mut marked = 0;
        for iy in 0..r.ny() {
            for ix in 0..r.nx() {
                if r.occupied(ix, iy) {
                    marked += 1;
                    assert_eq!((ix, iy), (2, 2));
                    assert_eq!(r.multiplicity(ix, iy), 1);
                }
            }
        }
        assert_eq!(marked, 1);
    }

    #[test]
    fn geometry_checks_and_guards() {
        assert!(matches!(
            Raster::new(BBox::centered_square(1.0), 0.0, vec!["a".into()]),
            Err(Error::BadCellSize)
        ));
        assert!(matches!(
            Raster::new(BBox::new(1.0, 1.0, 0.0, 2.0), 0.5, vec!["a".into()]),
            Err(Error::BadRegion(_))
        ));
        assert!(matches!(
            Raster::new(BBox::centered_square(1e9), 1e-3, vec!["a".into()]),
            Err(Error::BadRegion(_))
        ));
        let r = Raster::new(BBox::new(-1.0, 1.0, -0.5, 0.5), 0.25, vec!["a".into()]).unwrap();
        assert_eq!((r.nx(), r.ny()), (8, 4));
        assert_eq!(r.cell_of((-1.0, -0.5)), Some((0, 0)));
        assert_eq!(r.cell_of((0.999, 0.499)), Some((7, 3)));
        assert_eq!(r.cell_of((1.0, 0.0)), None);
        let c = r.cell_center(2, 1);
        assert!((c.0 - -0.375).abs() < 1e-12 && (c.1 - -0.125).abs() < 1e-12);
    }

    #[test]
    fn exact_cell_queries_agree_and_settle_boundaries() {
        use num_traits::FromPrimitive;
        // dyadic geometry so boundaries are exactly representable
        let r = Raster::new(BBox::new(-2.0, 2.0, -2.0, 2.0), 0.25, vec!["a".into()]).unwrap();
        for (x, y) in [(-0.6, 0.3), (1.9, -1.9), (0.1, 0.1)] {
            let ex = BigRational::from_f64(x).unwrap();
            let ey = BigRational::from_f64(y).unwrap();
            assert_eq!(r.cell_of_exact(&ex, &ey), r.cell_of((x, y)));
        }
        // a point exactly on a cell boundary belongs to the upper cell
        let zero = BigRational::zero();
        assert_eq!(r.cell_of_exact(&zero, &zero), Some((8, 8)));
        let out = BigRational::from_f64(2.0).unwrap();
        assert_eq!(r.cell_of_exact(&out, &zero), None);
    }

    #[test]
    fn interior_requires_a_unanimous_ring() {
        let mut r =
            Raster::new(BBox::new(0.0, 8.0, 0.0, 8.0), 1.0, vec!["a".into(), "b".into()])
                .unwrap();
        for iy in 0..5 {
            for ix in 0..5 {
                r.mark(0, (ix as f64 + 0.5, iy as f64 + 0.5));
            }
        }
        assert!(r.interior_for(0, 2, 2));
        assert!(!r.interior_for(0, 4, 2), "ring not fully marked");
        assert!(!r.interior_for(1, 2, 2), "wrong label");
        // a second label in the ring destroys interiority
        r.mark(1, (1.5, 1.5));
        assert!(!r.interior_for(0, 2, 2));
        assert!(r.interior_for(0, 3, 3));
        // edge cells are never interior
        assert!(!r.interior_for(0, 0, 0));
        assert!(r.marked_within(1, 3, 3, 2));
        assert!(!r.marked_within(1, 3, 3, 1));
    }

    #[test]
    fn image_bytes_have_documented_shape() {
        let mut r =
            Raster::new(BBox::new(0.0, 3.0, 0.0, 2.0), 1.0, vec!["a".into(), "b".into()])
                .unwrap();
        r.mark(0, (0.5, 1.5));
        r.mark(1, (0.5, 1.5));
        r.mark(1, (2.5, 0.5));
        let pgm = r.to_pgm();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        assert_eq!(pgm.len(), header.len() + 6);
        // row 0 is the top row (iy = 1): double-marked cell shows label 0
        assert_eq!(pgm[header.len()], 32);
        assert_eq!(pgm[header.len() + 5], 255); // label 1 gray
        let ppm = r.to_ppm();
        let pheader = b"P6\n3 2\n255\n";
        assert_eq!(ppm.len(), pheader.len() + 18);
        let px = &ppm[pheader.len()..pheader.len() + 3];
        assert_eq!(px, &[32, 128, 255], "two labels: gray 32, mult 2, occupied");
        let empty = &ppm[pheader.len() + 3..pheader.len() + 6];
        assert_eq!(empty, &[0, 0, 0]);
    }

    #[test]
    fn rasterized_clouds_respect_width_preconditions() {
        let b = eta();
        let cloud = central_tile_cloud(&b, 8, 1e-9).unwrap();
        assert!(rasterize(&[cloud.clone()], BBox::centered_square(6.0), 0.05).is_ok());
        // certified widths are a few ulps; a cell far below that must refuse
        // (tiny box keeps the grid itself feasible)
        assert!(matches!(
            rasterize(&[cloud], BBox::centered_square(4e-13), 1e-16),
            Err(Error::PointsTooWide { .. })
        ));
    }

    #[test]
    fn streamed_and_materialized_rasters_agree_within_one_cell() {
        let b = eta();
        let one = expansion_of_one(&b, 1 << 16).unwrap();
        let g = GapStructure::new(&b).unwrap();
        let depth = 12;
        let cell = 0.05;
        let bbox = central_extent(&b, &one, depth).unwrap();

        let clouds: Vec<_> = (0..g.class_count())
            .map(|i| subtile_cloud(&b, i, depth, 1e-9).unwrap())
            .collect();
        let from_points = rasterize(&clouds, bbox, cell).unwrap();

        let specs: Vec<StreamSpec> = (0..g.class_count())
            .map(|i| StreamSpec::subtile(format!("T{i}"), i))
            .collect();
        let streamed =
            rasterize_streamed(&b, &one, &specs, bbox, cell, depth, ExecMode::Sequential)
                .unwrap();

        assert_eq!(from_points.labels(), streamed.labels());
        for label in 0..specs.len() {
            for iy in 0..streamed.ny() {
                for ix in 0..streamed.nx() {
                    if streamed.is_marked(label, ix, iy) {
                        assert!(
                            from_points.marked_within(label, ix, iy, 1),
                            "streamed mark ({ix},{iy}) missing from point raster"
                        );
                    }
                    if from_points.is_marked(label, ix, iy) {
                        assert!(
                            streamed.marked_within(label, ix, iy, 1),
                            "point mark ({ix},{iy}) missing from streamed raster"
                        );
                    }
                }
            }
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn execution_modes_produce_identical_rasters() {
        let b = eta();
        let one = expansion_of_one(&b, 1 << 16).unwrap();
        let bbox = central_extent(&b, &one, 16).unwrap();
        let specs = vec![StreamSpec::central("T")];
        let seq = rasterize_streamed(&b, &one, &specs, bbox, 0.05, 16, ExecMode::Sequential)
            .unwrap();
        let par =
            rasterize_streamed(&b, &one, &specs, bbox, 0.05, 16, ExecMode::Parallel).unwrap();
        assert_eq!(seq.bits, par.bits);
    }

    #[test]
    fn streamed_raster_covers_the_materialized_extent() {
        let b = eta();
        let one = expansion_of_one(&b, 1 << 16).unwrap();
        let bb = central_extent(&b, &one, 10).unwrap();
        let cloud = central_tile_cloud(&b, 10, 1e-9).unwrap();
        for p in &cloud.points {
            let (x, y) = p.as_xy();
            assert!(bb.contains((x.mid(), y.mid())));
        }
        // accuracy padding keeps deeper clouds inside too
        let deeper = central_tile_cloud(&b, 14, 1e-9).unwrap();
        for p in &deeper.points {
            let (x, y) = p.as_xy();
            assert!(bb.contains((x.mid(), y.mid())));
        }
    }
}
