//! Time integration of the stress-free channel system.
//!
//! Velocity `(v1, v2, w)` is evolved on the evenly/oddly extended periodic
//! domain: `v1, v2` in cosine series, `w` in sine series. Diffusion is
//! integrated exactly per mode (or by Crank–Nicolson), the advective term
//! and forcing by second-order Adams–Bashforth, and every step ends with the
//! spectral Leray projection, which eliminates the pressure.

mod config;
mod exact;
mod integrator;
mod nonlinear;
mod projection;
mod state;

use thiserror::Error;

use crate::field::FieldError;
use crate::norms::NormError;

pub(crate) use config::random_solenoidal;
pub use config::{ConfigError, ForcingKind, InitKind, Scheme, SolverConfig};
pub use exact::{exact_shear, exact_taylor_green, taylor_green_pressure};
pub use integrator::{run, Checkpoint, Integrator, RunOutcome, Simulation};
pub use integrator::RHS_PARITIES;
pub use nonlinear::{nonlinear, nonlinear_with, Nonlinear};
pub use projection::{leray_project, pressure_from_nonlinear, pressure_solve};
pub use state::{ForcingSpec, PressureField, VelocityState};

/// Energy growth factor over the initial (or bound) energy treated as blow-up.
pub const BLOW_UP_ENERGY_FACTOR: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("{0}")]
    Norm(#[from] NormError),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("blow-up after t = {last_valid_t}: {reason}")]
    BlowUp { last_valid_t: f64, reason: String },
    #[error("internal consistency: {0}")]
    Consistency(String),
}
