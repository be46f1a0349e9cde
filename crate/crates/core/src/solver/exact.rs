//! Closed-form solutions used as verification oracles.

use std::f64::consts::PI;

use super::{PressureField, SolverError, VelocityState};
use crate::field::{Grid, Parity, ScalarField};

/// `v = (cos(pi z) e^{-nu pi^2 t}, 0)`, `w = 0`; the pressure is constant.
pub fn exact_shear(grid: Grid, t: f64, nu: f64) -> Result<VelocityState, SolverError> {
    let decay = (-nu * PI * PI * t).exp();
    let v1 = ScalarField::from_fn(grid, Parity::EvenZ, |_, _, z| (PI * z).cos() * decay);
    Ok(VelocityState::new(
        v1,
        ScalarField::zeros(grid, Parity::EvenZ),
        ScalarField::zeros(grid, Parity::OddZ),
        t,
    )?)
}

/// z-independent Taylor–Green vortex
/// `v = (sin 2pi x cos 2pi y, -cos 2pi x sin 2pi y) e^{-8 pi^2 nu t}`, `w = 0`.
pub fn exact_taylor_green(grid: Grid, t: f64, nu: f64) -> Result<VelocityState, SolverError> {
    let decay = (-8.0 * PI * PI * nu * t).exp();
    let k = 2.0 * PI;
    let v1 = ScalarField::from_fn(grid, Parity::EvenZ, |x, y, _| (k * x).sin() * (k * y).cos() * decay);
    let v2 = ScalarField::from_fn(grid, Parity::EvenZ, |x, y, _| -(k * x).cos() * (k * y).sin() * decay);
    Ok(VelocityState::new(v1, v2, ScalarField::zeros(grid, Parity::OddZ), t)?)
}

/// Zero-mean Taylor–Green pressure `(cos 4pi x + cos 4pi y) e^{-16 pi^2 nu t} / 4`.
pub fn taylor_green_pressure(grid: Grid, t: f64, nu: f64) -> Result<PressureField, SolverError> {
    let decay = (-16.0 * PI * PI * nu * t).exp();
    let p = ScalarField::from_fn(grid, Parity::EvenZ, |x, y, _| {
        0.25 * ((4.0 * PI * x).cos() + (4.0 * PI * y).cos()) * decay
    });
    Ok(PressureField { p: p.to_spectral()? })
}
