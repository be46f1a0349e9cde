use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use super::{emit_config, write_atomic, DIAGNOSTICS_SCHEMA_VERSION};
use crate::solver::SolverConfig;

/// Content hash of the canonical config text, computed like a git blob id
/// (`sha256("blob <len>\0" + text)`).
pub fn config_hash(config: &SolverConfig) -> String {
    let text = emit_config(config);
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Record of one `run` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SolverConfig,
    pub config_hash: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<String>,
    pub exit_code: i32,
    /// Last valid time when the run stopped on blow-up.
    pub blow_up_last_valid_t: Option<f64>,
}

impl RunManifest {
    pub fn new(config: &SolverConfig, started_unix: f64) -> Self {
        Self {
            config: config.clone(),
            config_hash: config_hash(config),
            started_unix,
            finished_unix: started_unix,
            outputs: Vec::new(),
            exit_code: 0,
            blow_up_last_valid_t: None,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "config_hash = {}", self.config_hash);
        let _ = writeln!(s, "started_unix = {}", self.started_unix);
        let _ = writeln!(s, "finished_unix = {}", self.finished_unix);
        let _ = writeln!(s, "exit_code = {}", self.exit_code);
        let _ = writeln!(s, "csv_schema = {DIAGNOSTICS_SCHEMA_VERSION}");
        if let Some(t) = self.blow_up_last_valid_t {
            let _ = writeln!(s, "blow_up_last_valid_t = {t:?}");
        }
        for o in &self.outputs {
            let _ = writeln!(s, "output = {o}");
        }
        s.push_str("[config]\n");
        s.push_str(&emit_config(&self.config));
        s
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        write_atomic(path, self.render().as_bytes())
    }

    /// Reads back `(config, config_hash, blow_up_last_valid_t)`.
    pub fn parse(text: &str) -> Result<(SolverConfig, String, Option<f64>), String> {
        let (head, config) = text.split_once("[config]\n").ok_or("missing [config] section")?;
        let mut hash = None;
        let mut blow_up = None;
        for line in head.lines() {
            if let Some((k, v)) = line.split_once(" = ") {
                match k {
                    "config_hash" => hash = Some(v.to_string()),
                    "blow_up_last_valid_t" => blow_up = Some(v.parse::<f64>().map_err(|e| e.to_string())?),
                    _ => {}
                }
            }
        }
        let config = super::parse_config_str(config).map_err(|e| e.to_string())?;
        Ok((config, hash.ok_or("missing config_hash")?, blow_up))
    }
}
