//! Artifact plumbing: the output directory, JSON emission, and the CSV
//! shape shared by point-cloud dumps.
//!
//! Artifacts are written with stable field order and shortest-round-trip
//! float formatting, so identical configs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use peribeta_core::field::BetaBase;
use peribeta_core::tiling::PointCloud;

use crate::CliError;

pub const SCHEMA: &str = "peribeta/1";

/// The directory all artifact files land in. Created on first write.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn new(root: &Path) -> Self {
        OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        }
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::create_dir_all(&self.root)?;
        fs::write(self.root.join(name), bytes)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Usage(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Names written so far, in write order.
    pub fn written(&self) -> &[String] {
        &self.written
    }
}

/// Print a report on stdout: pretty JSON in `--json` mode, otherwise the
/// command's human rendering.
pub fn emit<T: Serialize>(json: bool, report: &T, human: impl FnOnce()) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        );
    } else {
        human();
    }
}

/// One CSV over all clouds: `label,re,im` for a complex conjugate pair,
/// `label,x1,x2` for real embeddings (quadratic bases put 0 in the second
/// column). Rows keep each cloud's order: ascending by represented value.
pub fn cloud_csv(base: &BetaBase, clouds: &[PointCloud]) -> String {
    let header = if base.complex_conjugate().is_some() {
        "label,re,im\n"
    } else {
        "label,x1,x2\n"
    };
    let mut out = String::from(header);
    for cloud in clouds {
        let label = cloud.label.to_string();
        for point in &cloud.points {
            let (x, y) = point.as_xy();
            out.push_str(&label);
            out.push(',');
            out.push_str(&format!("{},{}\n", x.mid(), y.mid()));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BBoxOut {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl From<peribeta_core::tiling::BBox> for BBoxOut {
    fn from(b: peribeta_core::tiling::BBox) -> Self {
        BBoxOut {
            x_min: b.x_min,
            x_max: b.x_max,
            y_min: b.y_min,
            y_max: b.y_max,
        }
    }
}
