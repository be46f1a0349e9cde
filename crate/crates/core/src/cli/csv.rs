//! Fixed-schema CSV sinks for diagnostics and inequality reports.

use std::fmt::Write as _;
use std::path::Path;

use crate::inequality::SweepRow;
use crate::monitor::DiagnosticsRecord;

/// Version of the diagnostics column set, echoed in the run manifest.
pub const DIAGNOSTICS_SCHEMA_VERSION: u32 = 1;

pub const DIAGNOSTICS_COLUMNS: [&str; 12] = [
    "t",
    "energy",
    "gradh_v",
    "gradh_w",
    "vz",
    "wz",
    "pz_l2q",
    "vtilde_r",
    "h1_v",
    "h1_w",
    "criterion_accum",
    "energy_residual",
];

pub const INEQUALITY_COLUMNS: [&str; 8] =
    ["inequality", "field", "lhs", "rhs_structure", "empirical_constant", "pass", "violations", "max_violation"];

fn row(r: &DiagnosticsRecord) -> [f64; 12] {
    [
        r.t,
        r.energy,
        r.gradh_v,
        r.gradh_w,
        r.vz,
        r.wz,
        r.pz_l2q,
        r.vtilde_r,
        r.h1_v,
        r.h1_w,
        r.criterion_accum,
        r.energy_residual,
    ]
}

/// Header plus one row per record; values in shortest round-trip form.
pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = DIAGNOSTICS_COLUMNS.join(",");
    s.push('\n');
    for r in records {
        let cells: Vec<String> = row(r).iter().map(|x| format!("{x:e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Parses [`diagnostics_csv`] output. Fields outside the schema are zero.
pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<DiagnosticsRecord>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    if header.split(',').collect::<Vec<_>>() != DIAGNOSTICS_COLUMNS {
        return Err(format!("unexpected header {header:?}"));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let v = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("row {}: {e}", i + 1))?;
            let [t, energy, gradh_v, gradh_w, vz, wz, pz_l2q, vtilde_r, h1_v, h1_w, criterion_accum, energy_residual] =
                v[..]
            else {
                return Err(format!("row {}: expected 12 columns, got {}", i + 1, v.len()));
            };
            Ok(DiagnosticsRecord {
                t,
                energy,
                gradh_v,
                gradh_w,
                vz,
                wz,
                pz_l2q,
                vtilde_r,
                h1_v,
                h1_w,
                criterion_accum,
                energy_residual,
                ..Default::default()
            })
        })
        .collect()
}

pub fn inequality_csv(rows: &[SweepRow]) -> String {
    let mut s = INEQUALITY_COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        let p = &r.report;
        let _ = writeln!(
            s,
            "{},{},{:e},{:e},{:e},{},{},{:e}",
            p.name, r.index, p.lhs, p.rhs_structure, p.empirical_constant, p.pass, p.violations, p.max_violation
        );
    }
    s
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_diagnostics_csv(&text)
}
