use std::process::ExitCode;

use serde::Serialize;

use peribeta_core::exec::ExecMode;
use peribeta_core::field::BetaBase;
use peribeta_core::tiling::{covering_audit, depth_for_accuracy, CoveringAudit};

use crate::config::RunConfig;
use crate::output::{emit, OutDir, SCHEMA};
use crate::CliError;

#[derive(Serialize)]
struct AuditOut {
    schema: &'static str,
    command: &'static str,
    base: String,
    #[serde(flatten)]
    audit: CoveringAudit,
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    base: &BetaBase,
    cfg: &RunConfig,
    side: f64,
    depth: Option<usize>,
    cell: f64,
    halvings: usize,
    mode: ExecMode,
    json: bool,
) -> Result<ExitCode, CliError> {
    // Default depth ties the cloud accuracy to the cell size, which keeps
    // the dilation margin (and with it the multiplicity bound) meaningful.
    let depth = match depth {
        Some(d) => d,
        None => depth_for_accuracy(base, cell)?,
    };
    let audit = covering_audit(base, side, depth, cell, halvings, mode)?;
    let out = AuditOut {
        schema: SCHEMA,
        command: "audit",
        base: base.minpoly().to_string(),
        audit,
    };
    OutDir::new(&cfg.out_dir).write_json("audit.json", &out)?;
    emit(json, &out, || human(&out));
    Ok(ExitCode::SUCCESS)
}

fn human(o: &AuditOut) {
    let a = &o.audit;
    println!("base: {}", o.base);
    println!(
        "window side {}  depth {}  accuracy {:.3e}  tiles {} ({} classes)",
        a.side, a.depth, a.accuracy, a.y_count, a.tile_classes
    );
    println!(
        "dilated multiplicity over the window: min {}  max {}  (dilation {} cells)",
        a.min_dilated_multiplicity, a.max_dilated_multiplicity, a.dilation_radius
    );
    for r in &a.resolutions {
        println!(
            "  cell {:<8} occupied {:>8}  multi-label {:>8} ({:.4}%)  max multiplicity {}",
            r.cell,
            r.occupied,
            r.multi_label,
            100.0 * r.multi_label_fraction,
            r.max_multiplicity
        );
    }
    println!("wrote audit.json");
}
