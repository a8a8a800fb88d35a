//! Parameter sweeps over the effective model, the analytic phase theory and
//! the Fock-space backend, with CSV/JSON export, a plain-text configuration
//! format and named presets.

mod cell;
mod config;
mod export;
mod presets;
mod run;
mod spec;

use std::path::PathBuf;

use thiserror::Error;

pub use cell::Cell;
pub use config::{parse_config, parse_selection, read_config, SweepConfig};
pub use export::{export_table, read_json, ExportFormat, GridResult, Provenance};
pub use presets::{figure_preset, PRESETS};
pub use run::{
    point_model, point_modulation, point_system, resolved_parameters, run_sweep, run_sweep_with_jobs, DEFAULTS,
    DYNAMICS_CUTOFF,
};
pub use spec::{quantity_family, Axis, AxisValues, Engine, Family, SweepSpec, PARAMETERS, QUANTITIES};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("could not build worker pool: {0}")]
    Pool(String),
}
