//! Regularity-criterion diagnostics.
//!
//! A [`DiagnosticsRecord`] is one time sample of the monitored norms; the
//! time integral `int ||p_z||_{2q}^alpha dt` is accumulated across records by
//! the trapezoid rule. The bound constants, identity checks and the final
//! verdict live in the submodules.

mod bounds;
mod identities;
mod verdict;

use thiserror::Error;

use crate::calculus::{ddx, ddy, ddz, fluctuation};
use crate::field::FieldError;
use crate::norms::{h1_norm, l2_norm_sq, lq_norm, lq_norm_vec, NormError};
use crate::solver::{ForcingSpec, PressureField, SolverConfig, SolverError, VelocityState};

pub use bounds::{bounds, k11, k12, k2, kr, BoundConstants, InitNorms};
pub use identities::{check_baroclinic_residual, check_identity_avg_nonlinear};
pub use verdict::{verdict, CriterionReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonitorError {
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("{0}")]
    Norm(#[from] NormError),
    #[error("{0}")]
    Solver(#[from] SolverError),
    #[error("records cover [0, {covered}] but T = {requested} was requested")]
    Coverage { requested: f64, covered: f64 },
}

/// One diagnostic sample. Squared gradient norms, plain Lebesgue norms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `||v||_2^2 + ||w||_2^2`.
    pub energy: f64,
    /// `||grad_h v||_2^2`.
    pub gradh_v: f64,
    /// `||grad_h w||_2^2`.
    pub gradh_w: f64,
    /// `||v_z||_2^2`.
    pub vz: f64,
    /// `||w_z||_2^2`.
    pub wz: f64,
    /// `||p_z||_{2q}`.
    pub pz_l2q: f64,
    /// `||v - vbar||_r`.
    pub vtilde_r: f64,
    pub h1_v: f64,
    pub h1_w: f64,
    /// `int_0^t ||p_z||_{2q}^alpha ds`.
    pub criterion_accum: f64,
    pub energy_residual: f64,
    /// `int_0^t ||p_z||_{2q}^r ds`, the integral entering `K_R`.
    pub pz_r_accum: f64,
    /// `<(f, g), (v, w)>`.
    pub forcing_work: f64,
    pub divergence_max: f64,
    /// `||w - vertical_velocity(v)||_2`.
    pub reconstruction_error: f64,
}

impl DiagnosticsRecord {
    /// `||grad_h v||^2 + ||grad_h w||^2 + ||v_z||^2 + ||w_z||^2`.
    pub fn dissipation(&self) -> f64 {
        self.gradh_v + self.gradh_w + self.vz + self.wz
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.energy,
            self.gradh_v,
            self.gradh_w,
            self.vz,
            self.wz,
            self.pz_l2q,
            self.vtilde_r,
            self.h1_v,
            self.h1_w,
            self.criterion_accum,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// Running trapezoid sums carried from one record to the next.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CriterionAccumulator {
    /// `(t, ||p_z||_{2q})` of the previous record.
    pub last: Option<(f64, f64)>,
    pub criterion: f64,
    pub pz_r: f64,
}

/// Evaluates every monitored quantity of `state` and advances `accum`.
pub fn record(
    state: &VelocityState,
    p: &PressureField,
    forcing: &ForcingSpec,
    config: &SolverConfig,
    accum: &mut CriterionAccumulator,
) -> Result<DiagnosticsRecord, MonitorError> {
    let sq = |f: &crate::field::ScalarField| l2_norm_sq(f);
    let grad_sq = |f: &crate::field::ScalarField| -> Result<f64, MonitorError> {
        Ok(sq(&ddx(f)?)? + sq(&ddy(f)?)?)
    };
    let pz = lq_norm(&ddz(&p.p)?, 2.0 * config.q)?;
    let vt1 = fluctuation(&state.v1)?;
    let vt2 = fluctuation(&state.v2)?;

    if let Some((t0, pz0)) = accum.last {
        let h = 0.5 * (state.t - t0);
        accum.criterion += h * (pz0.powf(config.alpha) + pz.powf(config.alpha));
        accum.pz_r += h * (pz0.powf(config.r) + pz.powf(config.r));
    }
    accum.last = Some((state.t, pz));

    Ok(DiagnosticsRecord {
        t: state.t,
        energy: state.energy()?,
        gradh_v: grad_sq(&state.v1)? + grad_sq(&state.v2)?,
        gradh_w: grad_sq(&state.w)?,
        vz: sq(&ddz(&state.v1)?)? + sq(&ddz(&state.v2)?)?,
        wz: sq(&ddz(&state.w)?)?,
        pz_l2q: pz,
        vtilde_r: lq_norm_vec(&[&vt1, &vt2], config.r)?,
        h1_v: h1_norm(&state.v1)?.hypot(h1_norm(&state.v2)?),
        h1_w: h1_norm(&state.w)?,
        criterion_accum: accum.criterion,
        energy_residual: 0.0,
        pz_r_accum: accum.pz_r,
        forcing_work: forcing.work(state)?,
        divergence_max: state.divergence_max()?,
        reconstruction_error: state.reconstruction_error()?,
    })
}

/// Residual of the energy law at every record,
/// `dE/dt / 2 + nu * dissipation - <(f, g), (v, w)>`.
///
/// `dE/dt` is the derivative of the quadratic through three neighbouring
/// records (one-sided at the ends), so the residual is second order in the
/// record spacing. Two records give a first-order difference; a lone
/// record has no time derivative and reports 0.
pub fn energy_residual(records: &[DiagnosticsRecord], nu: f64) -> Vec<f64> {
    let n = records.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let de = if n == 2 {
                (records[1].energy - records[0].energy) / (records[1].t - records[0].t)
            } else {
                let j = i.clamp(1, n - 2);
                let (a, b, c) = (&records[j - 1], &records[j], &records[j + 1]);
                lagrange_derivative([a.t, b.t, c.t], [a.energy, b.energy, c.energy], records[i].t)
            };
            let r = &records[i];
            0.5 * de + nu * r.dissipation() - r.forcing_work
        })
        .collect()
}

/// Derivative at `t` of the quadratic interpolating `(ts, ys)`.
fn lagrange_derivative(ts: [f64; 3], ys: [f64; 3], t: f64) -> f64 {
    let [t0, t1, t2] = ts;
    let [y0, y1, y2] = ys;
    y0 * ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2))
        + y1 * ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2))
        + y2 * ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1))
}

/// Writes the energy residual into each record.
pub fn fill_energy_residual(records: &mut [DiagnosticsRecord], nu: f64) {
    let residual = energy_residual(records, nu);
    for (r, e) in records.iter_mut().zip(residual) {
        r.energy_residual = e;
    }
}
