//! The resolved run configuration.
//!
//! Every knob a subcommand consumes lives here, so a run is reproducible
//! from the config alone: load with `--config file.json`, override any
//! field with the matching command-line flag. Serialization round-trips
//! losslessly (that invariant is tested), which is what makes "same config,
//! same artifacts" a meaningful promise.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Base polynomial coefficients, ascending from the constant term.
    /// `None` means the command line must supply `--base`.
    pub base: Option<Vec<i64>>,
    /// Cloud generation depth. `None` lets each command pick its own rule
    /// (geometry commands derive it from `cell`, `tile` uses a small fixed
    /// depth so materialized clouds stay bounded).
    pub depth: Option<usize>,
    /// Raster cell size.
    pub cell: f64,
    /// Interval refinement target for materialized cloud points.
    pub precision: f64,
    /// Largest denominator for fraction scans.
    pub q_max: i64,
    /// Step budget for a single orbit walk.
    pub budget: u64,
    /// State budget for the property search in `classify`.
    pub search_bound: u64,
    /// Side length of the covering-audit window.
    pub side: f64,
    /// Number of resolution halvings in the covering audit.
    pub halvings: usize,
    /// Scan range bounds as fraction strings, e.g. "1/3".
    pub lo: Option<String>,
    pub hi: Option<String>,
    /// Directory receiving every artifact file.
    pub out_dir: PathBuf,
    /// Artifact toggles: point-cloud CSVs and raster images.
    pub emit_csv: bool,
    pub emit_images: bool,
    /// Worker threads; 1 forces the sequential path. `None` defers to the
    /// PERIBETA_THREADS environment variable, then to the default pool.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            base: None,
            depth: None,
            cell: 0.02,
            precision: 1e-6,
            q_max: 200,
            budget: 1_000_000,
            search_bound: 1 << 20,
            side: 1.0,
            halvings: 2,
            lo: None,
            hi: None,
            out_dir: PathBuf::from("."),
            emit_csv: true,
            emit_images: true,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        fn positive(name: &str, v: f64) -> Result<(), CliError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{name} must be positive, got {v}")))
            }
        }
        positive("cell", self.cell)?;
        positive("precision", self.precision)?;
        positive("side", self.side)?;
        if self.q_max < 1 {
            return Err(CliError::Usage(format!(
                "q_max must be at least 1, got {}",
                self.q_max
            )));
        }
        if self.budget == 0 {
            return Err(CliError::Usage("budget must be at least 1".into()));
        }
        if self.search_bound == 0 {
            return Err(CliError::Usage("search_bound must be at least 1".into()));
        }
        if self.depth == Some(0) {
            return Err(CliError::Usage("depth must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        Ok(())
    }
}
