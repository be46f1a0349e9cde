use super::{DiagnosticsRecord, MonitorError};
use crate::norms::{h1_norm, l2_norm_sq, lq_norm_vec};
use crate::solver::{ForcingSpec, SolverConfig, VelocityState};

/// Norms of the initial data and forcing entering the bound constants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitNorms {
    /// `||v0||_2^2`.
    pub v0_l2_sq: f64,
    /// `||w0||_2^2`.
    pub w0_l2_sq: f64,
    /// `||v0||_{H^1}`.
    pub v0_h1: f64,
    /// `||w0||_{H^1}`.
    pub w0_h1: f64,
    /// `||f||_2^2`.
    pub f_l2_sq: f64,
    /// `||g||_2^2`.
    pub g_l2_sq: f64,
    /// `||f||_r`.
    pub f_r: f64,
}

impl InitNorms {
    pub fn new(init: &VelocityState, forcing: &ForcingSpec, r: f64) -> Result<Self, MonitorError> {
        Ok(Self {
            v0_l2_sq: l2_norm_sq(&init.v1)? + l2_norm_sq(&init.v2)?,
            w0_l2_sq: l2_norm_sq(&init.w)?,
            v0_h1: h1_norm(&init.v1)?.hypot(h1_norm(&init.v2)?),
            w0_h1: h1_norm(&init.w)?,
            f_l2_sq: forcing.f_l2_sq()?,
            g_l2_sq: forcing.g_l2_sq()?,
            f_r: lq_norm_vec(&[&forcing.f1, &forcing.f2], r)?,
        })
    }

    fn forcing_sq(&self) -> f64 {
        self.f_l2_sq + self.g_l2_sq
    }

    fn init_energy(&self) -> f64 {
        self.v0_l2_sq + self.w0_l2_sq
    }
}

/// `K11 = (||f||^2 + ||g||^2) / (nu^2 lambda1^2) + ||v0||^2 + ||w0||^2`.
pub fn k11(config: &SolverConfig, init: &InitNorms) -> f64 {
    init.forcing_sq() / (config.nu * config.nu * config.lambda1 * config.lambda1) + init.init_energy()
}

/// `K12(t) = (||f||^2 + ||g||^2) t / (nu lambda1) + ||v0||^2 + ||w0||^2`.
pub fn k12(t: f64, config: &SolverConfig, init: &InitNorms) -> f64 {
    init.forcing_sq() * t / (config.nu * config.lambda1) + init.init_energy()
}

/// Trapezoid integral of `||p_z||_{2q}^r` over `[0, t]`, linearly
/// interpolating the integrand inside the last partial interval.
fn pz_r_integral(t: f64, r: f64, records: &[DiagnosticsRecord]) -> Result<f64, MonitorError> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let covered = records.last().map_or(0.0, |rec| rec.t);
    let starts_at_zero = records.first().is_some_and(|rec| rec.t == 0.0);
    if !starts_at_zero || t > covered * (1.0 + 1e-12) {
        return Err(MonitorError::Coverage { requested: t, covered });
    }
    let mut sum = 0.0;
    for w in records.windows(2) {
        let (t0, t1) = (w[0].t, w[1].t);
        if t0 >= t {
            break;
        }
        let (a, b) = (w[0].pz_l2q.powf(r), w[1].pz_l2q.powf(r));
        if t1 <= t {
            sum += 0.5 * (t1 - t0) * (a + b);
        } else {
            let bt = a + (b - a) * (t - t0) / (t1 - t0);
            sum += 0.5 * (t - t0) * (a + bt);
        }
    }
    Ok(sum)
}

/// `K_R(T) = exp(C T + K11 K12(T) + K11^{2/(r-2)} K12(T))
///   * [1 + ||v0||_{H^1}^6 + int_0^T ||p_z||_{2q}^r ds + ||f||_r^r T]`.
pub fn kr(t: f64, config: &SolverConfig, records: &[DiagnosticsRecord], init: &InitNorms) -> Result<f64, MonitorError> {
    let a = k11(config, init);
    let b = k12(t, config, init);
    let r = config.r;
    let exponent = config.c_generic * t + a * b + a.powf(2.0 / (r - 2.0)) * b;
    let bracket = 1.0 + init.v0_h1.powi(6) + pz_r_integral(t, r, records)? + init.f_r.powf(r) * t;
    Ok(exponent.exp() * bracket)
}

/// `K2(T) = exp(C T + K11 (T + K12(T)) + K_R^{2/(r-3)} T)
///   * [||v0||_{H^1} + ||w0||_{H^1} + ||f||^2 + ||g||^2]`.
pub fn k2(t: f64, config: &SolverConfig, records: &[DiagnosticsRecord], init: &InitNorms) -> Result<f64, MonitorError> {
    let a = k11(config, init);
    let b = k12(t, config, init);
    // K_R can overflow; at T = 0 its term vanishes regardless
    let kr_term = if t == 0.0 { 0.0 } else { kr(t, config, records, init)?.powf(2.0 / (config.r - 3.0)) * t };
    let exponent = config.c_generic * t + a * (t + b) + kr_term;
    let bracket = init.v0_h1 + init.w0_h1 + init.forcing_sq();
    Ok(if bracket == 0.0 { 0.0 } else { exponent.exp() * bracket })
}

/// All four bound constants at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub t: f64,
    pub k11: f64,
    pub k12: f64,
    pub kr: f64,
    pub k2: f64,
    pub c_generic: f64,
}

pub fn bounds(
    t: f64,
    config: &SolverConfig,
    records: &[DiagnosticsRecord],
    init: &InitNorms,
) -> Result<BoundConstants, MonitorError> {
    Ok(BoundConstants {
        t,
        k11: k11(config, init),
        k12: k12(t, config, init),
        kr: kr(t, config, records, init)?,
        k2: k2(t, config, records, init)?,
        c_generic: config.c_generic,
    })
}
