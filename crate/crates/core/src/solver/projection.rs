use std::f64::consts::PI;

use num_complex::Complex64;

use super::{nonlinear, ForcingSpec, Nonlinear, PressureField, SolverError, VelocityState};
use crate::calculus::{ddx, ddy, ddz};
use crate::field::{FieldError, Grid, Parity, ScalarField};

#[inline]
pub(crate) fn derivative_symbol(k: i64, n: usize) -> f64 {
    if 2 * k.unsigned_abs() as usize == n {
        0.0
    } else {
        2.0 * PI * k as f64
    }
}

/// Removes the gradient part of `(a1, a2, a3)` in place, mode by mode.
///
/// With `kh = (2 pi kx, 2 pi ky)` and `kz = m pi`, the divergence of mode
/// `(kx, ky, m)` is `D = i kh . a_h + kz a3` and the gradient of a cosine
/// potential `phi` is `(i kh phi, -kz phi)`; subtracting the gradient of
/// `phi = -D / |k|^2` leaves `D = 0`. The top cosine mode has no sine
/// partner on the grid, so it is projected horizontally.
pub(crate) fn project_in_place(
    grid: Grid,
    a1: &mut [Complex64],
    a2: &mut [Complex64],
    a3: &mut [Complex64],
) {
    let top = grid.top_mode();
    let i = Complex64::new(0.0, 1.0);
    for ix in 0..grid.nx {
        let kx = derivative_symbol(grid.kx(ix), grid.nx);
        for iy in 0..grid.ny {
            let ky = derivative_symbol(grid.ky(iy), grid.ny);
            let kh2 = kx * kx + ky * ky;
            let base = grid.idx(ix, iy, 0);
            for m in 0..grid.nz {
                let j = base + m;
                let vertical = m > 0 && m < top;
                let kz = if vertical { m as f64 * PI } else { 0.0 };
                let k2 = kh2 + kz * kz;
                if k2 == 0.0 {
                    continue;
                }
                let div = i * (a1[j] * kx + a2[j] * ky) + a3[j] * kz;
                let phi = -div / k2;
                a1[j] -= i * phi * kx;
                a2[j] -= i * phi * ky;
                if vertical {
                    a3[j] += phi * kz;
                }
            }
        }
    }
}

/// Spectral Leray projection onto divergence-free fields.
pub fn leray_project(state: &VelocityState) -> Result<VelocityState, SolverError> {
    let grid = state.grid();
    let mut v1 = state.v1.clone();
    let mut v2 = state.v2.clone();
    let mut w = state.w.clone();
    project_in_place(grid, v1.coeffs_mut()?, v2.coeffs_mut()?, w.coeffs_mut()?);
    Ok(VelocityState { v1, v2, w, t: state.t })
}

/// Pressure of the state: solves
/// `-Laplacian p = div(N) - div(f, g)` with a zero-mean gauge.
pub fn pressure_solve(state: &VelocityState, forcing: &ForcingSpec) -> Result<PressureField, SolverError> {
    pressure_from_nonlinear(&nonlinear(state)?, forcing)
}

pub fn pressure_from_nonlinear(nl: &Nonlinear, forcing: &ForcingSpec) -> Result<PressureField, SolverError> {
    let div_n = ddx(&nl.n1)?.add(&ddy(&nl.n2)?)?.add(&ddz(&nl.nw)?)?;
    let div_f = ddx(&forcing.f1)?.add(&ddy(&forcing.f2)?)?.add(&ddz(&forcing.g)?)?;
    let source = div_n.sub(&div_f)?;
    Ok(PressureField { p: inverse_laplacian(&source)? })
}

/// Solves `-Laplacian p = source` for an even field, zero mean mode.
fn inverse_laplacian(source: &ScalarField) -> Result<ScalarField, FieldError> {
    if source.parity() != Parity::EvenZ {
        return Err(FieldError::ParityMismatch(Parity::EvenZ, source.parity()));
    }
    let grid = source.grid();
    let mut p = source.clone();
    let c = p.coeffs_mut()?;
    for ix in 0..grid.nx {
        let kx = 2.0 * PI * grid.kx(ix) as f64;
        for iy in 0..grid.ny {
            let ky = 2.0 * PI * grid.ky(iy) as f64;
            let base = grid.idx(ix, iy, 0);
            for m in 0..grid.nz {
                let kz = m as f64 * PI;
                let k2 = kx * kx + ky * ky + kz * kz;
                c[base + m] = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { c[base + m] / k2 };
            }
        }
    }
    Ok(p)
}
