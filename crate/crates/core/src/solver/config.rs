use std::f64::consts::PI;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{exact_shear, exact_taylor_green, leray_project, ForcingSpec, SolverError, VelocityState};
use crate::field::{Grid, Parity, ScalarField};
use crate::norms::l2_norm_sq;

/// A configuration value that violates its constraint.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

/// Treatment of the viscous term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Exact per-mode viscous decay, AB2 for advection and forcing.
    IntegratingFactor,
    /// Crank–Nicolson viscous term, AB2 for advection and forcing.
    CrankNicolson,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::IntegratingFactor => "ifab2",
            Scheme::CrankNicolson => "cnab2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ifab2" => Some(Scheme::IntegratingFactor),
            "cnab2" => Some(Scheme::CrankNicolson),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Zero,
    /// `v = (cos(pi z), 0)`, `w = 0`.
    Shear,
    /// z-independent Taylor–Green vortex.
    TaylorGreen,
    /// Seeded random band-limited divergence-free field.
    Random,
}

impl InitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InitKind::Zero => "zero",
            InitKind::Shear => "shear",
            InitKind::TaylorGreen => "taylor_green",
            InitKind::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero" => Some(InitKind::Zero),
            "shear" => Some(InitKind::Shear),
            "taylor_green" => Some(InitKind::TaylorGreen),
            "random" => Some(InitKind::Random),
            _ => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, InitKind::Shear | InitKind::TaylorGreen)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingKind {
    None,
    /// `f1 = amplitude * cos(pi z)`.
    Shear,
    /// Seeded random band-limited forcing with zero 3D mean.
    Random,
}

impl ForcingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ForcingKind::None => "none",
            ForcingKind::Shear => "shear",
            ForcingKind::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(ForcingKind::None),
            "shear" => Some(ForcingKind::Shear),
            "random" => Some(ForcingKind::Random),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub grid: Grid,
    pub dealias: bool,
    pub scheme: Scheme,
    pub init: InitKind,
    pub init_amplitude: f64,
    pub init_seed: u64,
    pub forcing: ForcingKind,
    pub forcing_amplitude: f64,
    pub forcing_seed: u64,
    /// Steps between diagnostic records.
    pub diag_every: usize,
    /// Poincaré constant entering `K11`.
    pub lambda1: f64,
    /// Baroclinic exponent, `3 < r < 4`.
    pub r: f64,
    /// Pressure exponent; `p_z` is measured in `L^{2q}`.
    pub q: f64,
    /// Time exponent of the criterion, `> 3`.
    pub alpha: f64,
    /// Stand-in for the unnamed constants in `K_R` and `K_2`.
    pub c_generic: f64,
}

impl SolverConfig {
    /// Configuration with every optional key at its default.
    pub fn new(nu: f64, dt: f64, t_end: f64, grid: Grid, init: InitKind) -> Self {
        Self {
            nu,
            dt,
            t_end,
            grid,
            dealias: true,
            scheme: Scheme::IntegratingFactor,
            init,
            init_amplitude: 1.0,
            init_seed: 0,
            forcing: ForcingKind::None,
            forcing_amplitude: 0.0,
            forcing_seed: 0,
            diag_every: 10,
            lambda1: PI * PI,
            r: 3.5,
            q: 2.0,
            alpha: 4.0,
            c_generic: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be a positive finite number, got {v}")))
            }
        };
        positive("nu", self.nu)?;
        positive("dt", self.dt)?;
        positive("lambda1", self.lambda1)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(ConfigError::new("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if !(self.r > 3.0 && self.r < 4.0) {
            return Err(ConfigError::new("r", format!("must satisfy 3 < r < 4, got {}", self.r)));
        }
        if !(self.q > 1.0 && self.q.is_finite()) {
            return Err(ConfigError::new("q", format!("must satisfy q > 1, got {}", self.q)));
        }
        if !(self.alpha > 3.0 && self.alpha.is_finite()) {
            return Err(ConfigError::new("alpha", format!("must satisfy alpha > 3, got {}", self.alpha)));
        }
        if self.diag_every == 0 {
            return Err(ConfigError::new("diag_every", "must be >= 1"));
        }
        if !(self.c_generic >= 0.0 && self.c_generic.is_finite()) {
            return Err(ConfigError::new("c_generic", "must be a finite number >= 0"));
        }
        for (key, v) in [("init_amplitude", self.init_amplitude), ("forcing_amplitude", self.forcing_amplitude)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConfigError::new(key, format!("must be a finite number >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Number of steps to reach `t_end`.
    pub fn n_steps(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    /// Largest mode used by the random generators.
    fn random_max_mode(&self) -> usize {
        (self.grid.nx.min(self.grid.ny) / 8).max(1)
    }

    pub fn initial_state(&self) -> Result<VelocityState, SolverError> {
        let grid = self.grid;
        let state = match self.init {
            InitKind::Zero => VelocityState::zeros(grid),
            InitKind::Shear => exact_shear(grid, 0.0, self.nu)?,
            InitKind::TaylorGreen => exact_taylor_green(grid, 0.0, self.nu)?,
            InitKind::Random => {
                random_solenoidal(grid, self.random_max_mode(), self.init_amplitude, self.init_seed)?
            }
        };
        Ok(if self.dealias { state.dealias()? } else { state })
    }

    pub fn forcing_spec(&self) -> Result<ForcingSpec, SolverError> {
        let grid = self.grid;
        let forcing = match self.forcing {
            ForcingKind::None => ForcingSpec::zero(grid),
            ForcingKind::Shear => {
                let f1 = ScalarField::single_mode(
                    grid,
                    Parity::EvenZ,
                    0,
                    0,
                    1,
                    num_complex::Complex64::new(self.forcing_amplitude, 0.0),
                )?;
                ForcingSpec::new(f1, ScalarField::zeros(grid, Parity::EvenZ), ScalarField::zeros(grid, Parity::OddZ))?
            }
            ForcingKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.forcing_seed);
                let modes = self.random_max_mode().min(2);
                let mut f1 = ScalarField::random_band_limited(grid, Parity::EvenZ, modes, &mut rng);
                let mut f2 = ScalarField::random_band_limited(grid, Parity::EvenZ, modes, &mut rng);
                let g = ScalarField::random_band_limited(grid, Parity::OddZ, modes, &mut rng);
                for f in [&mut f1, &mut f2] {
                    f.coeffs_mut()?[0] = num_complex::Complex64::new(0.0, 0.0);
                }
                let norm = (l2_norm_sq(&f1)? + l2_norm_sq(&f2)? + l2_norm_sq(&g)?).sqrt();
                let s = if norm > 0.0 { self.forcing_amplitude / norm } else { 0.0 };
                ForcingSpec::new(f1.scale(s), f2.scale(s), g.scale(s))?
            }
        };
        Ok(if self.dealias {
            ForcingSpec {
                f1: forcing.f1.dealias()?,
                f2: forcing.f2.dealias()?,
                g: forcing.g.dealias()?,
            }
        } else {
            forcing
        })
    }
}

/// Divergence-free, zero-mean random velocity with `||u||_2 = amplitude`.
pub(crate) fn random_solenoidal(
    grid: Grid,
    max_mode: usize,
    amplitude: f64,
    seed: u64,
) -> Result<VelocityState, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v1 = ScalarField::random_band_limited(grid, Parity::EvenZ, max_mode, &mut rng);
    let mut v2 = ScalarField::random_band_limited(grid, Parity::EvenZ, max_mode, &mut rng);
    let w = ScalarField::random_band_limited(grid, Parity::OddZ, max_mode, &mut rng);
    for f in [&mut v1, &mut v2] {
        f.coeffs_mut()?[0] = num_complex::Complex64::new(0.0, 0.0);
    }
    let state = leray_project(&VelocityState::new(v1, v2, w, 0.0)?)?;
    let norm = state.l2()?;
    Ok(if norm > 0.0 { state.scale(amplitude / norm) } else { state })
}

impl fmt::Display for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nu={} dt={} t_end={} grid={} init={} forcing={} scheme={}",
            self.nu,
            self.dt,
            self.t_end,
            self.grid,
            self.init.as_str(),
            self.forcing.as_str(),
            self.scheme.as_str()
        )
    }
}
