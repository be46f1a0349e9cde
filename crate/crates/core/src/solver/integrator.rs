use std::f64::consts::PI;

use num_complex::Complex64;

use super::projection::project_in_place;
use super::{
    nonlinear_with, pressure_from_nonlinear, ForcingSpec, Nonlinear, PressureField, Scheme, SolverConfig, SolverError,
    VelocityState, BLOW_UP_ENERGY_FACTOR,
};
use crate::field::{Grid, Parity, ScalarField};
use crate::monitor::{fill_energy_residual, k11, record, CriterionAccumulator, DiagnosticsRecord, InitNorms};

/// Per-mode factors of the viscous update.
#[derive(Debug, Clone)]
enum Propagator {
    /// `E = exp(-nu |k|^2 dt)` and `E^2`.
    Exponential { e: Vec<f64>, e2: Vec<f64> },
    /// `(1 - a) / (1 + a)` and `1 / (1 + a)` with `a = nu |k|^2 dt / 2`.
    CrankNicolson { gain: Vec<f64>, inv: Vec<f64> },
}

fn laplacian_symbol(grid: Grid) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for ix in 0..grid.nx {
        let kx = 2.0 * PI * grid.kx(ix) as f64;
        for iy in 0..grid.ny {
            let ky = 2.0 * PI * grid.ky(iy) as f64;
            for m in 0..grid.nz {
                let kz = m as f64 * PI;
                out.push(kx * kx + ky * ky + kz * kz);
            }
        }
    }
    out
}

impl Propagator {
    fn new(scheme: Scheme, grid: Grid, nu: f64, dt: f64) -> Self {
        let k2 = laplacian_symbol(grid);
        match scheme {
            Scheme::IntegratingFactor => {
                let e: Vec<f64> = k2.iter().map(|k| (-nu * k * dt).exp()).collect();
                let e2 = e.iter().map(|x| x * x).collect();
                Propagator::Exponential { e, e2 }
            }
            Scheme::CrankNicolson => {
                let a: Vec<f64> = k2.iter().map(|k| 0.5 * nu * k * dt).collect();
                Propagator::CrankNicolson {
                    gain: a.iter().map(|a| (1.0 - a) / (1.0 + a)).collect(),
                    inv: a.iter().map(|a| 1.0 / (1.0 + a)).collect(),
                }
            }
        }
    }

    /// Heun corrector of the starting step: `r` at the old state, `rs` at the predictor.
    fn apply_heun(&self, u: &mut [Complex64], r: &[Complex64], rs: &[Complex64], dt: f64) {
        match self {
            Propagator::Exponential { e, .. } => {
                for j in 0..u.len() {
                    u[j] = e[j] * u[j] + 0.5 * dt * (e[j] * r[j] + rs[j]);
                }
            }
            Propagator::CrankNicolson { gain, inv } => {
                for j in 0..u.len() {
                    u[j] = gain[j] * u[j] + inv[j] * 0.5 * dt * (r[j] + rs[j]);
                }
            }
        }
    }

    /// Advances one component: `u` in place from `r` (current) and `rp` (previous).
    fn apply(&self, u: &mut [Complex64], r: &[Complex64], rp: Option<&[Complex64]>, dt: f64) {
        match (self, rp) {
            (Propagator::Exponential { e, .. }, None) => {
                for j in 0..u.len() {
                    u[j] = e[j] * (u[j] + r[j] * dt);
                }
            }
            (Propagator::Exponential { e, e2 }, Some(rp)) => {
                for j in 0..u.len() {
                    u[j] = e[j] * u[j] + (e[j] * 1.5 * r[j] - e2[j] * 0.5 * rp[j]) * dt;
                }
            }
            (Propagator::CrankNicolson { gain, inv }, rp) => {
                for j in 0..u.len() {
                    let explicit = match rp {
                        Some(rp) => 1.5 * r[j] - 0.5 * rp[j],
                        None => r[j],
                    };
                    u[j] = gain[j] * u[j] + inv[j] * explicit * dt;
                }
            }
        }
    }
}

/// Multistep integrator: AB2 for advection and forcing, exact or
/// Crank–Nicolson viscous decay, Leray projection after every step.
///
/// The first step is a Heun predictor-corrector with the same viscous
/// treatment, keeping the start second order. One nonlinear evaluation per
/// later step: the advection of the new state is
/// computed together with its pressure and reused by the next step.
#[derive(Debug, Clone)]
pub struct Integrator {
    grid: Grid,
    dt: f64,
    dealias: bool,
    propagator: Propagator,
    forcing: ForcingSpec,
    /// Explicit right-hand side `F - N` of the previous step.
    prev_rhs: Option<[ScalarField; 3]>,
    /// Advection of the current state.
    cached: Option<Nonlinear>,
}

impl Integrator {
    pub fn new(config: &SolverConfig, forcing: ForcingSpec) -> Self {
        Self {
            grid: config.grid,
            dt: config.dt,
            dealias: config.dealias,
            propagator: Propagator::new(config.scheme, config.grid, config.nu, config.dt),
            forcing,
            prev_rhs: None,
            cached: None,
        }
    }

    pub fn forcing(&self) -> &ForcingSpec {
        &self.forcing
    }

    pub fn prev_rhs(&self) -> Option<&[ScalarField; 3]> {
        self.prev_rhs.as_ref()
    }

    pub fn set_prev_rhs(&mut self, rhs: Option<[ScalarField; 3]>) {
        self.prev_rhs = rhs;
    }

    /// Advection and pressure of `state`, cached for the next step.
    pub fn pressure(&mut self, state: &VelocityState) -> Result<PressureField, SolverError> {
        let n = nonlinear_with(state, self.dealias)?;
        let p = pressure_from_nonlinear(&n, &self.forcing)?;
        self.cached = Some(n);
        Ok(p)
    }

    /// Applies the propagator to every component and projects. `heun` selects
    /// the corrector; otherwise AB2, or Euler without a previous right-hand side.
    fn advance(
        &self,
        next: &mut VelocityState,
        rhs: &[ScalarField; 3],
        heun: Option<&[ScalarField; 3]>,
    ) -> Result<(), SolverError> {
        let VelocityState { v1, v2, w, .. } = next;
        for (i, u) in [&mut *v1, &mut *v2, &mut *w].into_iter().enumerate() {
            match (heun, &self.prev_rhs) {
                (Some(rs), _) => self.propagator.apply_heun(u.coeffs_mut()?, rhs[i].coeffs()?, rs[i].coeffs()?, self.dt),
                (None, Some(prev)) => self.propagator.apply(u.coeffs_mut()?, rhs[i].coeffs()?, Some(prev[i].coeffs()?), self.dt),
                (None, None) => self.propagator.apply(u.coeffs_mut()?, rhs[i].coeffs()?, None, self.dt),
            }
        }
        project_in_place(self.grid, v1.coeffs_mut()?, v2.coeffs_mut()?, w.coeffs_mut()?);
        Ok(())
    }

    /// One step from `state` to time `t_next`; returns the new state and its pressure.
    pub fn step(&mut self, state: &VelocityState, t_next: f64) -> Result<(VelocityState, PressureField), SolverError> {
        if state.grid() != self.grid {
            return Err(crate::field::FieldError::GridMismatch(self.grid, state.grid()).into());
        }
        let n = match self.cached.take() {
            Some(n) => n,
            None => nonlinear_with(state, self.dealias)?,
        };
        let rhs = [
            self.forcing.f1.sub(&n.n1)?,
            self.forcing.f2.sub(&n.n2)?,
            self.forcing.g.sub(&n.nw)?,
        ];
        let mut next = state.clone();
        next.t = t_next;
        self.advance(&mut next, &rhs, None)?;
        if self.prev_rhs.is_none() {
            // second-order start: Heun predictor-corrector of the same scheme
            let ns = nonlinear_with(&next, self.dealias)?;
            let rhs_star = [
                self.forcing.f1.sub(&ns.n1)?,
                self.forcing.f2.sub(&ns.n2)?,
                self.forcing.g.sub(&ns.nw)?,
            ];
            next = state.clone();
            next.t = t_next;
            self.advance(&mut next, &rhs, Some(&rhs_star))?;
        }
        self.prev_rhs = Some(rhs);
        let p = self.pressure(&next)?;
        Ok((next, p))
    }
}

/// Everything needed to continue a run bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub step: u64,
    pub state: VelocityState,
    pub prev_rhs: Option<[ScalarField; 3]>,
    pub accum: CriterionAccumulator,
}

/// A configured run in progress.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SolverConfig,
    integrator: Integrator,
    state: VelocityState,
    pressure: PressureField,
    step: u64,
    accum: CriterionAccumulator,
    energy_cap: f64,
    max_divergence: f64,
    init_norms: InitNorms,
}

impl Simulation {
    pub fn new(config: &SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let state = config.initial_state()?;
        Self::build(config, state, 0, None, CriterionAccumulator::default())
    }

    /// Continues from a checkpoint written by [`Simulation::checkpoint`].
    pub fn resume(config: &SolverConfig, checkpoint: Checkpoint) -> Result<Self, SolverError> {
        config.validate()?;
        if checkpoint.state.grid() != config.grid {
            return Err(crate::field::FieldError::GridMismatch(config.grid, checkpoint.state.grid()).into());
        }
        Self::build(config, checkpoint.state, checkpoint.step, checkpoint.prev_rhs, checkpoint.accum)
    }

    fn build(
        config: &SolverConfig,
        state: VelocityState,
        step: u64,
        prev_rhs: Option<[ScalarField; 3]>,
        accum: CriterionAccumulator,
    ) -> Result<Self, SolverError> {
        let forcing = config.forcing_spec()?;
        let init = config.initial_state()?;
        let init_norms = InitNorms::new(&init, &forcing, config.r).map_err(monitor_to_solver)?;
        let e0 = init.energy()?;
        let base = if e0 > 0.0 { e0 } else { k11(config, &init_norms) };
        let energy_cap = if base > 0.0 { BLOW_UP_ENERGY_FACTOR * base } else { f64::INFINITY };
        let mut integrator = Integrator::new(config, forcing);
        integrator.set_prev_rhs(prev_rhs);
        let pressure = integrator.pressure(&state)?;
        let max_divergence = state.divergence_max()?;
        Ok(Self {
            config: config.clone(),
            integrator,
            state,
            pressure,
            step,
            accum,
            energy_cap,
            max_divergence,
            init_norms,
        })
    }

    pub fn state(&self) -> &VelocityState {
        &self.state
    }

    pub fn pressure(&self) -> &PressureField {
        &self.pressure
    }

    pub fn forcing(&self) -> &ForcingSpec {
        self.integrator.forcing()
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn init_norms(&self) -> &InitNorms {
        &self.init_norms
    }

    /// Largest spectral divergence seen over all states so far.
    pub fn max_divergence(&self) -> f64 {
        self.max_divergence
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            step: self.step,
            state: self.state.clone(),
            prev_rhs: self.integrator.prev_rhs().cloned(),
            accum: self.accum,
        }
    }

    /// Advances one step. On blow-up the simulation keeps its last valid state.
    pub fn step(&mut self) -> Result<(), SolverError> {
        let t_next = (self.step + 1) as f64 * self.config.dt;
        let saved = self.integrator.clone();
        let (next, p) = match self.integrator.step(&self.state, t_next) {
            Ok(out) => out,
            Err(e) => {
                self.integrator = saved;
                return Err(e);
            }
        };
        let reason = if !next.is_finite() {
            Some("non-finite coefficient".to_string())
        } else {
            let e = next.energy()?;
            (e > self.energy_cap).then(|| format!("energy {e:e} exceeds {:e}", self.energy_cap))
        };
        if let Some(reason) = reason {
            self.integrator = saved;
            return Err(SolverError::BlowUp { last_valid_t: self.state.t, reason });
        }
        self.max_divergence = self.max_divergence.max(next.divergence_max()?);
        self.state = next;
        self.pressure = p;
        self.step += 1;
        Ok(())
    }

    /// Diagnostic record of the current state.
    pub fn record(&mut self) -> Result<DiagnosticsRecord, SolverError> {
        record(&self.state, &self.pressure, self.integrator.forcing(), &self.config, &mut self.accum)
            .map_err(monitor_to_solver)
    }

    /// Runs to the configured end time, recording every `diag_every` steps,
    /// at the final step, and at the starting state of a fresh run.
    pub fn finish(mut self) -> Result<RunOutcome, SolverError> {
        let n_steps = self.config.n_steps() as u64;
        let every = self.config.diag_every as u64;
        let mut records = Vec::new();
        if self.accum.last.is_none() {
            records.push(self.record()?);
        }
        let mut blow_up = None;
        while self.step < n_steps {
            match self.step() {
                Ok(()) => {
                    if self.step.is_multiple_of(every) || self.step == n_steps {
                        records.push(self.record()?);
                    }
                }
                Err(SolverError::BlowUp { last_valid_t, reason }) => {
                    if records.last().map(|r| r.t) != Some(self.state.t) {
                        records.push(self.record()?);
                    }
                    blow_up = Some((last_valid_t, reason));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        fill_energy_residual(&mut records, self.config.nu);
        Ok(RunOutcome {
            final_state: self.state.clone(),
            final_pressure: self.pressure.clone(),
            max_divergence: self.max_divergence,
            init_norms: self.init_norms,
            checkpoint: self.checkpoint(),
            records,
            blow_up,
        })
    }
}

fn monitor_to_solver(e: crate::monitor::MonitorError) -> SolverError {
    match e {
        crate::monitor::MonitorError::Solver(s) => s,
        crate::monitor::MonitorError::Field(f) => SolverError::Field(f),
        crate::monitor::MonitorError::Norm(n) => SolverError::Norm(n),
        other => SolverError::Consistency(other.to_string()),
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Last valid state.
    pub final_state: VelocityState,
    pub final_pressure: PressureField,
    pub records: Vec<DiagnosticsRecord>,
    /// `(last valid time, reason)` if the run was stopped by blow-up.
    pub blow_up: Option<(f64, String)>,
    pub max_divergence: f64,
    pub init_norms: InitNorms,
    pub checkpoint: Checkpoint,
}

/// Integrates `config` from its initial state to `t_end`.
pub fn run(config: &SolverConfig) -> Result<RunOutcome, SolverError> {
    Simulation::new(config)?.finish()
}

/// Parities of the explicit right-hand side fields.
pub const RHS_PARITIES: [Parity; 3] = [Parity::EvenZ, Parity::EvenZ, Parity::OddZ];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{exact_shear, exact_taylor_green, InitKind};

    fn config(init: InitKind) -> SolverConfig {
        SolverConfig::new(1.0, 1e-3, 0.01, Grid::new(16, 16, 9).unwrap(), init)
    }

    #[test]
    fn zero_state_stays_zero() {
        let mut c = config(InitKind::Zero);
        c.nu = 50.0;
        let out = run(&c).unwrap();
        assert!(out.final_state.components().iter().all(|f| f.max_abs() == 0.0));
        assert!(out.blow_up.is_none());
    }

    #[test]
    fn shear_one_step_error_is_tiny() {
        let mut c = config(InitKind::Shear);
        c.t_end = c.dt;
        let out = run(&c).unwrap();
        let exact = exact_shear(c.grid, c.dt, c.nu).unwrap();
        let err = out.final_state.sub(&exact).unwrap().l2().unwrap();
        assert!(err < 1e-12, "{err:e}");
        assert_eq!(out.records.len(), 2);
    }

    #[test]
    fn crank_nicolson_shear_error_is_third_order_locally() {
        let mut errs = Vec::new();
        for dt in [4e-3, 2e-3] {
            let mut c = config(InitKind::Shear);
            c.scheme = Scheme::CrankNicolson;
            c.dt = dt;
            c.t_end = dt;
            let out = run(&c).unwrap();
            let exact = exact_shear(c.grid, dt, c.nu).unwrap();
            errs.push(out.final_state.sub(&exact).unwrap().l2().unwrap());
        }
        let ratio = errs[0] / errs[1];
        assert!((ratio - 8.0).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn taylor_green_tracks_closed_form() {
        let c = config(InitKind::TaylorGreen);
        let out = run(&c).unwrap();
        let exact = exact_taylor_green(c.grid, c.t_end, c.nu).unwrap();
        let err = out.final_state.sub(&exact).unwrap().l2().unwrap();
        assert!(err < 1e-12, "{err:e}");
    }

    #[test]
    fn random_state_stays_divergence_free() {
        let mut c = config(InitKind::Random);
        c.nu = 0.05;
        c.init_seed = 4;
        let out = run(&c).unwrap();
        assert!(out.max_divergence <= 1e-11, "{:e}", out.max_divergence);
        for r in &out.records {
            assert!(r.reconstruction_error <= 1e-10);
        }
        assert_eq!(out.records.len(), 2);
    }

    #[test]
    fn blow_up_keeps_last_valid_state() {
        let mut c = config(InitKind::Random);
        c.nu = 1e-4;
        c.dt = 0.2;
        c.t_end = 20.0;
        c.init_amplitude = 200.0;
        let out = run(&c).unwrap();
        let (t, _) = out.blow_up.expect("unstable configuration");
        assert_eq!(out.final_state.t, t);
        assert!(out.final_state.is_finite());
        assert_eq!(out.records.last().unwrap().t, t);
    }

    #[test]
    fn rhs_parities_match_forcing() {
        let f = ForcingSpec::zero(Grid::new(8, 8, 5).unwrap());
        assert_eq!([f.f1.parity(), f.f2.parity(), f.g.parity()], RHS_PARITIES);
    }
}
