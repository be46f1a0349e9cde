use std::fmt::Write as _;

use super::{bounds, BoundConstants, DiagnosticsRecord, InitNorms, MonitorError};
use crate::solver::SolverConfig;

/// Relative slack for comparing a sampled quantity with its bound.
const BOUND_SLACK: f64 = 1e-12;

/// Summary of a run against the regularity criterion and the a priori bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub t_final: f64,
    pub samples: usize,
    /// `int_0^T ||p_z||_{2q}^alpha dt`.
    pub criterion_integral: f64,
    pub criterion_finite: bool,
    /// `int_0^T ||p_z||_{2q}^r dt`.
    pub pz_r_integral: f64,
    /// `energy(t) <= K11` at every sample.
    pub energy_bound_held: bool,
    pub max_energy_ratio: f64,
    /// `||vt||_r^r <= K_R(t)` at every sample (informational: generic `C`).
    pub vtilde_bound_held: bool,
    /// `gradient energy <= K2(t)` at every sample (informational: generic `C`).
    pub h1_bound_held: bool,
    pub bounds: BoundConstants,
    /// Last valid time if the run blew up.
    pub blow_up: Option<f64>,
}

pub fn verdict(
    records: &[DiagnosticsRecord],
    init: &InitNorms,
    config: &SolverConfig,
    blow_up: Option<f64>,
) -> Result<CriterionReport, MonitorError> {
    let last = records.last().copied().unwrap_or_default();
    let b = bounds(last.t, config, records, init)?;
    let mut max_ratio: f64 = 0.0;
    let mut vtilde_ok = true;
    let mut h1_ok = true;
    for rec in records {
        let ratio = if b.k11 > 0.0 {
            rec.energy / b.k11
        } else if rec.energy == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
        let at = bounds(rec.t, config, records, init)?;
        vtilde_ok &= rec.vtilde_r.powf(config.r) <= at.kr * (1.0 + BOUND_SLACK);
        h1_ok &= rec.dissipation() <= at.k2 * (1.0 + BOUND_SLACK);
    }
    Ok(CriterionReport {
        t_final: last.t,
        samples: records.len(),
        criterion_integral: last.criterion_accum,
        criterion_finite: last.criterion_accum.is_finite(),
        pz_r_integral: last.pz_r_accum,
        energy_bound_held: max_ratio <= 1.0 + BOUND_SLACK,
        max_energy_ratio: max_ratio,
        vtilde_bound_held: vtilde_ok,
        h1_bound_held: h1_ok,
        bounds: b,
        blow_up,
    })
}

impl CriterionReport {
    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "NO" };
        let mut s = String::new();
        let _ = writeln!(s, "Regularity criterion report");
        let _ = writeln!(s, "  final time            {}", self.t_final);
        let _ = writeln!(s, "  samples               {}", self.samples);
        match self.blow_up {
            Some(t) => {
                let _ = writeln!(s, "  BLOW-UP detected; last valid time {t}");
            }
            None => {
                let _ = writeln!(s, "  no blow-up detected");
            }
        }
        let _ = writeln!(
            s,
            "  int ||p_z||_2q^alpha  {:e} (finite: {})",
            self.criterion_integral,
            yes(self.criterion_finite)
        );
        let _ = writeln!(s, "  int ||p_z||_2q^r      {:e}", self.pz_r_integral);
        let _ = writeln!(
            s,
            "  energy <= K11         {} (max ratio {:.6})",
            yes(self.energy_bound_held),
            self.max_energy_ratio
        );
        let _ = writeln!(s, "  ||vt||_r^r <= K_R     {} (informational, C = {})", yes(self.vtilde_bound_held), self.bounds.c_generic);
        let _ = writeln!(s, "  gradients <= K2       {} (informational, C = {})", yes(self.h1_bound_held), self.bounds.c_generic);
        let _ = writeln!(
            s,
            "  K11 = {:e}  K12(T) = {:e}  K_R(T) = {:e}  K2(T) = {:e}",
            self.bounds.k11, self.bounds.k12, self.bounds.kr, self.bounds.k2
        );
        s
    }

    /// Machine-readable `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let b = |v: bool| if v { "true" } else { "false" };
        let pairs: Vec<(&str, String)> = vec![
            ("t_final", self.t_final.to_string()),
            ("samples", self.samples.to_string()),
            ("blow_up", b(self.blow_up.is_some()).to_string()),
            ("last_valid_t", self.blow_up.map_or("none".into(), |t| t.to_string())),
            ("criterion_integral", self.criterion_integral.to_string()),
            ("criterion_finite", b(self.criterion_finite).to_string()),
            ("pz_r_integral", self.pz_r_integral.to_string()),
            ("energy_bound_held", b(self.energy_bound_held).to_string()),
            ("max_energy_ratio", self.max_energy_ratio.to_string()),
            ("vtilde_bound_held", b(self.vtilde_bound_held).to_string()),
            ("h1_bound_held", b(self.h1_bound_held).to_string()),
            ("k11", self.bounds.k11.to_string()),
            ("k12", self.bounds.k12.to_string()),
            ("kr", self.bounds.kr.to_string()),
            ("k2", self.bounds.k2.to_string()),
            ("c_generic", self.bounds.c_generic.to_string()),
        ];
        pairs.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
