//! Command-line orchestration and on-disk formats.
//!
//! Exit codes: 0 success, 1 I/O or invalid input, 2 blow-up, 3 failed check.

mod checkpoint;
mod commands;
mod config;
mod csv;
mod manifest;

use std::io::Write;
use std::path::Path;

pub use checkpoint::{decode, encode, read_checkpoint, write_checkpoint, CheckpointError, MAGIC, VERSION};
pub use commands::{
    cmd_convergence, cmd_report, cmd_run, cmd_verify_inequalities, convergence_study, ConvergenceResult,
    ConvergenceStatus, ORDER_RANGE, ROUNDOFF_FLOOR,
};
pub use config::{emit_config, parse_config, parse_config_str};
pub use csv::{
    diagnostics_csv, inequality_csv, parse_diagnostics_csv, read_diagnostics, DIAGNOSTICS_COLUMNS,
    DIAGNOSTICS_SCHEMA_VERSION, INEQUALITY_COLUMNS,
};
pub use manifest::{config_hash, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_BLOW_UP: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

/// File names inside a run's output directory.
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const INEQUALITY_FILE: &str = "inequalities.csv";
pub const CONVERGENCE_FILE: &str = "convergence.txt";

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
