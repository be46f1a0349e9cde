//! Lebesgue, Sobolev and mixed time-space norms.
//!
//! Physical-space norms use trapezoid quadrature on the collocation nodes,
//! which is exact for `q = 2` on band-limited fields. Gradient norms are
//! evaluated from spectral multipliers.

use std::f64::consts::PI;

use thiserror::Error;

use crate::calculus::{ddx, ddy, ddz};
use crate::field::{FieldError, Grid, PlanarField, ScalarField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("exponent {name} = {value} is out of range ({constraint})")]
    Domain { name: &'static str, value: f64, constraint: &'static str },
    #[error("time series needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("time series is not strictly increasing at t = {t}")]
    NotIncreasing { t: f64 },
    #[error("non-finite sample at t = {t}; last finite sample at t = {last_finite:?}")]
    BlowUp { t: f64, last_finite: Option<f64> },
}

fn check_exponent(name: &'static str, q: f64) -> Result<(), NormError> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(NormError::Domain { name, value: q, constraint: "must be >= 1" })
    }
}

/// `(sum_i w_i |f_i|^q)^(1/q)` over the 3D collocation nodes.
pub fn lq_norm(f: &ScalarField, q: f64) -> Result<f64, NormError> {
    lq_norm_vec(&[f], q)
}

/// Lq norm of the pointwise Euclidean length of a vector field.
pub fn lq_norm_vec(components: &[&ScalarField], q: f64) -> Result<f64, NormError> {
    check_exponent("q", q)?;
    let Some(first) = components.first() else {
        return Ok(0.0);
    };
    let grid = first.grid();
    let physical = components
        .iter()
        .map(|c| {
            if c.grid() != grid {
                return Err(FieldError::GridMismatch(grid, c.grid()));
            }
            c.physical()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let values: Vec<&[f64]> = physical.iter().map(|p| p.values()).collect::<Result<_, _>>()?;
    let nz = grid.nz;
    let sum: f64 = (0..grid.len())
        .map(|i| {
            let sq: f64 = values.iter().map(|v| v[i] * v[i]).sum();
            grid.node_weight(i % nz) * sq.powf(0.5 * q)
        })
        .sum();
    Ok(sum.powf(1.0 / q))
}

/// `(int_M |f|^q)^(1/q)` by the periodic rectangle rule.
pub fn lq_norm_2d(f: &PlanarField, q: f64) -> Result<f64, NormError> {
    check_exponent("q", q)?;
    let p = f.physical()?;
    let v = p.values()?;
    let sum: f64 = v.iter().map(|x| x.abs().powf(q)).sum::<f64>() / v.len() as f64;
    Ok(sum.powf(1.0 / q))
}

/// Spectral L2 inner product `int f g` of two fields with equal parity.
pub fn inner(f: &ScalarField, g: &ScalarField) -> Result<f64, NormError> {
    if f.grid() != g.grid() {
        return Err(FieldError::GridMismatch(f.grid(), g.grid()).into());
    }
    if f.parity() != g.parity() {
        return Err(FieldError::ParityMismatch(f.parity(), g.parity()).into());
    }
    let grid = f.grid();
    let (a, b) = (f.coeffs()?, g.coeffs()?);
    let top = grid.top_mode();
    Ok(a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| f.parity().mode_weight(i % grid.nz, top) * (x * y.conj()).re)
        .sum())
}

/// Squared L2 norm from spectral coefficients.
pub fn l2_norm_sq(f: &ScalarField) -> Result<f64, NormError> {
    let grid = f.grid();
    let top = grid.top_mode();
    Ok(f.coeffs()?
        .iter()
        .enumerate()
        .map(|(i, c)| f.parity().mode_weight(i % grid.nz, top) * c.norm_sqr())
        .sum())
}

pub fn l2_norm(f: &ScalarField) -> Result<f64, NormError> {
    Ok(l2_norm_sq(f)?.sqrt())
}

/// Squared L2 norm of a planar spectral field.
pub fn l2_norm_2d_sq(f: &PlanarField) -> Result<f64, NormError> {
    Ok(f.spectral()?.coeffs()?.iter().map(|c| c.norm_sqr()).sum())
}

/// `||grad_h f||_2`.
pub fn grad_h_norm(f: &ScalarField) -> Result<f64, NormError> {
    Ok((l2_norm_sq(&ddx(f)?)? + l2_norm_sq(&ddy(f)?)?).sqrt())
}

/// `||f_z||_2`.
pub fn dz_norm(f: &ScalarField) -> Result<f64, NormError> {
    l2_norm(&ddz(f)?)
}

/// `(||f||^2 + ||grad_h f||^2 + ||f_z||^2)^(1/2)`.
pub fn h1_norm(f: &ScalarField) -> Result<f64, NormError> {
    let gh = grad_h_norm(f)?;
    let dz = dz_norm(f)?;
    Ok((l2_norm_sq(f)? + gh * gh + dz * dz).sqrt())
}

/// `||grad_h f||_{L2(M)}` for a planar field.
pub fn grad_h_norm_2d(f: &PlanarField) -> Result<f64, NormError> {
    let g: Grid = f.grid();
    let c = f.spectral()?;
    let c = c.coeffs()?;
    let mut sum = 0.0;
    for ix in 0..g.nx {
        for iy in 0..g.ny {
            let (kx, ky) = (g.kx(ix), g.ky(iy));
            let sx = if 2 * kx.unsigned_abs() as usize == g.nx { 0.0 } else { kx as f64 };
            let sy = if 2 * ky.unsigned_abs() as usize == g.ny { 0.0 } else { ky as f64 };
            sum += 4.0 * PI * PI * (sx * sx + sy * sy) * c[ix * g.ny + iy].norm_sqr();
        }
    }
    Ok(sum.sqrt())
}

/// `(||f||^2 + ||grad_h f||^2)^(1/2)` on `M`.
pub fn h1_norm_2d(f: &PlanarField) -> Result<f64, NormError> {
    let gh = grad_h_norm_2d(f)?;
    Ok((l2_norm_2d_sq(f)? + gh * gh).sqrt())
}

/// Nonnegative samples of a scalar quantity on an increasing time grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    samples: Vec<(f64, f64)>,
}

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: Vec<(f64, f64)>) -> Result<Self, NormError> {
        let mut series = Self::new();
        for (t, v) in samples {
            series.push(t, v)?;
        }
        Ok(series)
    }

    pub fn push(&mut self, t: f64, value: f64) -> Result<(), NormError> {
        if let Some(&(last, _)) = self.samples.last() {
            if t.is_nan() || t <= last {
                return Err(NormError::NotIncreasing { t });
            }
        }
        self.samples.push((t, value));
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// First non-finite sample, with the time of the last finite one before it.
    pub fn blow_up(&self) -> Option<(f64, Option<f64>)> {
        let i = self.samples.iter().position(|(_, v)| !v.is_finite())?;
        Some((self.samples[i].0, i.checked_sub(1).map(|j| self.samples[j].0)))
    }

    /// Trapezoid rule for `int value(t)^alpha dt`.
    pub fn integral_pow(&self, alpha: f64) -> Result<f64, NormError> {
        if let Some((t, last_finite)) = self.blow_up() {
            return Err(NormError::BlowUp { t, last_finite });
        }
        Ok(self
            .samples
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1.abs().powf(alpha) + w[1].1.abs().powf(alpha)))
            .sum())
    }
}

/// `(int value(t)^alpha dt)^(1/alpha)` over the sampled interval.
pub fn time_lalpha(series: &TimeSeries, alpha: f64) -> Result<f64, NormError> {
    check_exponent("alpha", alpha)?;
    if series.len() < 2 {
        return Err(NormError::TooFewSamples { needed: 2, got: series.len() });
    }
    Ok(series.integral_pow(alpha)?.powf(1.0 / alpha))
}
