use std::process::ExitCode;

use serde::Serialize;

use peribeta_core::field::BetaBase;
use peribeta_core::tiling::{
    central_tile_cloud, rasterize, subtile_cloud, tile_cloud, tiles_reaching, BBox, GapStructure,
    PointCloud,
};

use crate::config::RunConfig;
use crate::output::{cloud_csv, emit, BBoxOut, OutDir, SCHEMA};
use crate::CliError;

/// Materialized-cloud depth when neither flag nor config pins one. Kept
/// small: every admissible word up to this depth becomes a CSV row.
const DEFAULT_DEPTH: usize = 14;

#[derive(Serialize)]
struct LabelStat {
    label: String,
    points: usize,
}

#[derive(Serialize)]
struct TileOut {
    schema: &'static str,
    command: &'static str,
    base: String,
    depth: usize,
    cell: f64,
    precision: f64,
    /// Radius by which the true tiles may exceed the emitted clouds.
    accuracy: f64,
    labels: Vec<LabelStat>,
    total_points: usize,
    bbox: BBoxOut,
    files: Vec<String>,
}

pub fn run(
    base: &BetaBase,
    cfg: &RunConfig,
    depth: Option<usize>,
    cell: f64,
    subtiles: bool,
    tiles_around: Option<f64>,
    json: bool,
) -> Result<ExitCode, CliError> {
    let depth = depth.unwrap_or(DEFAULT_DEPTH);
    // The raster needs point enclosures tighter than half a cell.
    let precision = cfg.precision.min(cell / 4.0);

    let mut clouds: Vec<PointCloud> = Vec::new();
    if subtiles {
        let classes = GapStructure::new(base)?.class_count();
        for i in 0..classes {
            clouds.push(subtile_cloud(base, i, depth, precision)?);
        }
    } else if let Some(reach) = tiles_around {
        if !(reach.is_finite() && reach > 0.0) {
            return Err(CliError::Usage(format!(
                "--tiles-around must be positive, got {reach}"
            )));
        }
        for y in tiles_reaching(base, reach)? {
            clouds.push(tile_cloud(base, &y, depth, precision)?);
        }
    } else {
        clouds.push(central_tile_cloud(base, depth, precision)?);
    }

    let accuracy = clouds.iter().map(|c| c.accuracy).fold(0.0, f64::max);
    let bbox = extent(&clouds, accuracy + 2.0 * cell);

    let mut out_dir = OutDir::new(&cfg.out_dir);
    if cfg.emit_csv {
        out_dir.write_bytes("tile.csv", cloud_csv(base, &clouds).as_bytes())?;
    }
    if cfg.emit_images {
        let raster = rasterize(&clouds, bbox, cell)?;
        if raster.labels().len() == 1 {
            out_dir.write_bytes("tile.pgm", &raster.to_pgm())?;
        } else {
            out_dir.write_bytes("tile.ppm", &raster.to_ppm())?;
        }
    }

    let labels: Vec<LabelStat> = clouds
        .iter()
        .map(|c| LabelStat {
            label: c.label.to_string(),
            points: c.len(),
        })
        .collect();
    let total_points = labels.iter().map(|l| l.points).sum();
    let mut report = TileOut {
        schema: SCHEMA,
        command: "tile",
        base: base.minpoly().to_string(),
        depth,
        cell,
        precision,
        accuracy,
        labels,
        total_points,
        bbox: bbox.into(),
        files: out_dir.written().to_vec(),
    };
    out_dir.write_json("tile.json", &report)?;
    report.files = out_dir.written().to_vec();
    emit(json, &report, || human(&report));
    Ok(ExitCode::SUCCESS)
}

/// Bounding box of every cloud point, padded.
fn extent(clouds: &[PointCloud], pad: f64) -> BBox {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for cloud in clouds {
        for point in &cloud.points {
            let (px, py) = point.as_xy();
            x = (x.0.min(px.mid()), x.1.max(px.mid()));
            y = (y.0.min(py.mid()), y.1.max(py.mid()));
        }
    }
    if x.0 > x.1 {
        // No points at all (possible for a tiny depth): a unit box.
        x = (-0.5, 0.5);
        y = (-0.5, 0.5);
    }
    BBox::new(x.0 - pad, x.1 + pad, y.0 - pad, y.1 + pad)
}

fn human(o: &TileOut) {
    println!("base: {}", o.base);
    println!(
        "depth {}  cell {}  accuracy {:.3e}  points {}",
        o.depth, o.cell, o.accuracy, o.total_points
    );
    for l in &o.labels {
        println!("  {}: {} points", l.label, l.points);
    }
    for f in &o.files {
        println!("wrote {f}");
    }
}
