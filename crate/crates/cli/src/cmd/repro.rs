//! Regenerate the figure-analogue artifacts: the central tile and its
//! subtiles for x^3 - x - 1, natural-extension slices, the central tile of
//! x^3 - 3x^2 + 2x - 1, and the pure-periodicity frontier report.

use std::process::ExitCode;

use serde::Serialize;

use peribeta_core::exec::ExecMode;
use peribeta_core::field::{BetaBase, MinimalPolynomial};
use peribeta_core::gamma::{gamma_scan, RatBound, ScanMode, ScanOptions};
use peribeta_core::tiling::{
    central_extent, cloud_accuracy, depth_for_accuracy, rasterize_streamed, GapStructure, Raster,
    StreamSpec,
};

use crate::config::RunConfig;
use crate::output::{emit, BBoxOut, OutDir, SCHEMA};
use crate::CliError;

/// Raster cell size when the command line does not override it.
const DEFAULT_CELL: f64 = 0.01;

const ETA: [i64; 4] = [-1, -1, 0, 1]; // x^3 - x - 1
const SPIRAL: [i64; 4] = [-1, 2, -3, 1]; // x^3 - 3x^2 + 2x - 1

#[derive(Serialize)]
struct FigureOut {
    schema: &'static str,
    command: &'static str,
    figure: String,
    base: String,
    depth: usize,
    cell: f64,
    accuracy: f64,
    bbox: BBoxOut,
    labels: Vec<String>,
    occupied: usize,
    files: Vec<String>,
}

#[derive(Serialize)]
struct SliceOut {
    x: String,
    live_classes: Vec<usize>,
    occupied: usize,
    file: String,
}

#[derive(Serialize)]
struct ReproOut {
    schema: &'static str,
    command: &'static str,
    figure: String,
    files: Vec<String>,
}

pub fn run(
    figure: &str,
    cfg: &RunConfig,
    q_max: i64,
    cell: Option<f64>,
    depth: Option<usize>,
    mode: ExecMode,
    json: bool,
) -> Result<ExitCode, CliError> {
    let cell = cell.unwrap_or(DEFAULT_CELL);
    if !(cell.is_finite() && cell > 0.0) {
        return Err(CliError::Usage(format!("cell must be positive, got {cell}")));
    }
    let mut out_dir = OutDir::new(&cfg.out_dir);
    match figure {
        "1" => fig_central(&eta()?, "1", "fig1_central_tile", cell, depth, mode, &mut out_dir, json)?,
        "3" => fig_subtiles(cell, depth, mode, &mut out_dir, json)?,
        "4" => fig_slices(cell, depth, mode, &mut out_dir, json)?,
        "5" => fig_central(
            &spiral()?,
            "5",
            "fig5_central_tile",
            cell,
            depth,
            mode,
            &mut out_dir,
            json,
        )?,
        "gamma" => fig_gamma(q_max, mode, &mut out_dir, json)?,
        "all" => {
            fig_central(&eta()?, "1", "fig1_central_tile", cell, depth, mode, &mut out_dir, false)?;
            fig_subtiles(cell, depth, mode, &mut out_dir, false)?;
            fig_slices(cell, depth, mode, &mut out_dir, false)?;
            fig_central(
                &spiral()?,
                "5",
                "fig5_central_tile",
                cell,
                depth,
                mode,
                &mut out_dir,
                false,
            )?;
            fig_gamma(q_max, mode, &mut out_dir, false)?;
            let summary = ReproOut {
                schema: SCHEMA,
                command: "repro",
                figure: "all".into(),
                files: out_dir.written().to_vec(),
            };
            emit(json, &summary, || {
                for f in &summary.files {
                    println!("wrote {f}");
                }
            });
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown figure {other:?}; expected 1, 3, 4, 5, gamma, or all"
            )))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn eta() -> Result<BetaBase, CliError> {
    Ok(BetaBase::new(MinimalPolynomial::new(ETA.to_vec())?)?)
}

fn spiral() -> Result<BetaBase, CliError> {
    Ok(BetaBase::new(MinimalPolynomial::new(SPIRAL.to_vec())?)?)
}

/// Stream the requested specs over one raster of the central-tile extent.
fn render(
    base: &BetaBase,
    specs: Vec<StreamSpec>,
    cell: f64,
    depth: Option<usize>,
    mode: ExecMode,
) -> Result<(Raster, usize, f64), CliError> {
    let depth = match depth {
        Some(d) => d,
        None => depth_for_accuracy(base, cell)?,
    };
    let gaps = GapStructure::new(base)?;
    let bbox = central_extent(base, &gaps.one, depth.min(20))?;
    let raster = rasterize_streamed(base, &gaps.one, &specs, bbox, cell, depth, mode)?;
    Ok((raster, depth, cloud_accuracy(base, depth)))
}

#[allow(clippy::too_many_arguments)]
fn fig_central(
    base: &BetaBase,
    figure: &str,
    stem: &str,
    cell: f64,
    depth: Option<usize>,
    mode: ExecMode,
    out_dir: &mut OutDir,
    json: bool,
) -> Result<(), CliError> {
    let (raster, depth, accuracy) = render(base, vec![StreamSpec::central("T")], cell, depth, mode)?;
    let image = format!("{stem}.pgm");
    out_dir.write_bytes(&image, &raster.to_pgm())?;
    let out = FigureOut {
        schema: SCHEMA,
        command: "repro",
        figure: figure.into(),
        base: base.minpoly().to_string(),
        depth,
        cell,
        accuracy,
        bbox: raster.bbox().into(),
        labels: raster.labels().to_vec(),
        occupied: raster.occupied_count(),
        files: vec![image],
    };
    out_dir.write_json(&format!("fig{figure}.json"), &out)?;
    emit(json, &out, || human_figure(&out));
    Ok(())
}

fn fig_subtiles(
    cell: f64,
    depth: Option<usize>,
    mode: ExecMode,
    out_dir: &mut OutDir,
    json: bool,
) -> Result<(), CliError> {
    let base = eta()?;
    let classes = GapStructure::new(&base)?.class_count();
    let specs: Vec<StreamSpec> = (0..classes)
        .map(|i| StreamSpec::subtile(format!("T{i}"), i))
        .collect();
    let (raster, depth, accuracy) = render(&base, specs, cell, depth, mode)?;
    out_dir.write_bytes("fig3_subtiles.ppm", &raster.to_ppm())?;
    let out = FigureOut {
        schema: SCHEMA,
        command: "repro",
        figure: "3".into(),
        base: base.minpoly().to_string(),
        depth,
        cell,
        accuracy,
        bbox: raster.bbox().into(),
        labels: raster.labels().to_vec(),
        occupied: raster.occupied_count(),
        files: vec!["fig3_subtiles.ppm".into()],
    };
    out_dir.write_json("fig3.json", &out)?;
    emit(json, &out, || human_figure(&out));
    Ok(())
}

/// Slices of the natural-extension domain at three heights: at height x the
/// fiber is the union of the subtiles whose gap value exceeds x.
fn fig_slices(
    cell: f64,
    depth: Option<usize>,
    mode: ExecMode,
    out_dir: &mut OutDir,
    json: bool,
) -> Result<(), CliError> {
    let base = eta()?;
    let gaps = GapStructure::new(&base)?;
    let heights: [(i64, i64); 3] = [(1, 10), (1, 2), (4, 5)];
    let mut slices = Vec::new();
    for (p, q) in heights {
        let x = base.from_ratio(p, q);
        let live: Vec<usize> = (0..gaps.class_count())
            .filter(|&i| base.cmp_elements(&x, &gaps.gaps[i]).is_lt())
            .collect();
        let specs: Vec<StreamSpec> = live
            .iter()
            .map(|&i| StreamSpec::subtile(format!("T{i}"), i))
            .collect();
        let (raster, _, _) = render(&base, specs, cell, depth, mode)?;
        let file = format!("fig4_slice_{p}_{q}.ppm");
        out_dir.write_bytes(&file, &raster.to_ppm())?;
        slices.push(SliceOut {
            x: format!("{p}/{q}"),
            live_classes: live,
            occupied: raster.occupied_count(),
            file,
        });
    }
    #[derive(Serialize)]
    struct Fig4Out {
        schema: &'static str,
        command: &'static str,
        figure: &'static str,
        base: String,
        cell: f64,
        slices: Vec<SliceOut>,
    }
    let out = Fig4Out {
        schema: SCHEMA,
        command: "repro",
        figure: "4",
        base: base.minpoly().to_string(),
        cell,
        slices,
    };
    out_dir.write_json("fig4.json", &out)?;
    emit(json, &out, || {
        println!("base: {}", out.base);
        for s in &out.slices {
            println!(
                "slice x = {}: classes {:?}, {} cells -> {}",
                s.x, s.live_classes, s.occupied, s.file
            );
        }
    });
    Ok(())
}

fn fig_gamma(
    q_max: i64,
    mode: ExecMode,
    out_dir: &mut OutDir,
    json: bool,
) -> Result<(), CliError> {
    let base = eta()?;
    let opts = ScanOptions {
        mode: ScanMode::FullSweep,
        exec: mode,
        ..ScanOptions::default()
    };
    let report = gamma_scan(&base, q_max, RatBound::new(1, 1, false)?, &opts)?;
    let mut stored = report.clone();
    stored.elapsed_ms = 0;
    out_dir.write_json("gamma_frontier.json", &stored)?;
    emit(json, &report, || {
        println!("base: {}", report.base);
        println!(
            "q <= {}: {} checked, {} counterexamples",
            report.q_max, report.fractions_checked, report.counterexample_count
        );
        if let Some(m) = &report.min_counterexample {
            println!("smallest counterexample: {}/{}", m.p, m.q);
        }
        if let Some(f) = &report.verified_frontier {
            println!("verified frontier: {}/{}", f.p, f.q);
        }
        println!("{}", report.interpretation);
        println!("wrote gamma_frontier.json");
    });
    Ok(())
}

fn human_figure(o: &FigureOut) {
    println!("figure {}: base {}", o.figure, o.base);
    println!(
        "depth {}  cell {}  accuracy {:.3e}  occupied {}",
        o.depth, o.cell, o.accuracy, o.occupied
    );
    for f in &o.files {
        println!("wrote {f}");
    }
}
