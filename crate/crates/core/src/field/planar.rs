use num_complex::Complex64;
use rustfft::FftDirection;

use super::{transform, FieldError, Grid};

#[derive(Debug, Clone, PartialEq)]
enum PlanarData {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// A function on the horizontal section `M = (0,1)^2`, sampled on the
/// horizontal part of a [`Grid`] (the vertical count is carried but unused).
/// Spectral coefficients use the same Fourier convention as 3D fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarField {
    grid: Grid,
    data: PlanarData,
}

impl PlanarField {
    pub fn from_physical(grid: Grid, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.plane_len() {
            return Err(FieldError::InvalidField(format!(
                "expected {} planar samples, got {}",
                grid.plane_len(),
                values.len()
            )));
        }
        Ok(Self { grid, data: PlanarData::Physical(values) })
    }

    pub fn from_spectral(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self, FieldError> {
        if coeffs.len() != grid.plane_len() {
            return Err(FieldError::InvalidField(format!(
                "expected {} planar coefficients, got {}",
                grid.plane_len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, data: PlanarData::Spectral(coeffs) })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.plane_len());
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                values.push(f(grid.x(ix), grid.y(iy)));
            }
        }
        Self { grid, data: PlanarData::Physical(values) }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.data, PlanarData::Spectral(_))
    }

    pub fn values(&self) -> Result<&[f64], FieldError> {
        match &self.data {
            PlanarData::Physical(v) => Ok(v),
            PlanarData::Spectral(_) => Err(FieldError::Representation { expected: "physical" }),
        }
    }

    pub fn coeffs(&self) -> Result<&[Complex64], FieldError> {
        match &self.data {
            PlanarData::Spectral(c) => Ok(c),
            PlanarData::Physical(_) => Err(FieldError::Representation { expected: "spectral" }),
        }
    }

    /// Coefficient of `(kx, ky)`; zero outside the grid.
    pub fn coeff(&self, kx: i64, ky: i64) -> Result<Complex64, FieldError> {
        let c = self.coeffs()?;
        match (self.grid.kx_index(kx), self.grid.ky_index(ky)) {
            (Some(ix), Some(iy)) => Ok(c[ix * self.grid.ny + iy]),
            _ => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn to_spectral(&self) -> Result<Self, FieldError> {
        let mut data: Vec<Complex64> =
            self.values()?.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform::planar(&mut data, self.grid.nx, self.grid.ny, FftDirection::Forward);
        Ok(Self { grid: self.grid, data: PlanarData::Spectral(data) })
    }

    pub fn to_physical(&self) -> Result<Self, FieldError> {
        let c = self.coeffs()?;
        let g = self.grid;
        let scale = c.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        if scale > 0.0 {
            let mut defect = 0.0f64;
            for ix in 0..g.nx {
                let jx = (g.nx - ix) % g.nx;
                for iy in 0..g.ny {
                    let jy = (g.ny - iy) % g.ny;
                    defect = defect.max((c[ix * g.ny + iy] - c[jx * g.ny + jy].conj()).norm());
                }
            }
            if defect > 1e-10 * scale {
                return Err(FieldError::Hermitian { defect: defect / scale });
            }
        }
        let mut data = c.to_vec();
        transform::planar(&mut data, g.nx, g.ny, FftDirection::Inverse);
        Ok(Self { grid: g, data: PlanarData::Physical(data.into_iter().map(|c| c.re).collect()) })
    }

    pub fn spectral(&self) -> Result<Self, FieldError> {
        if self.is_spectral() {
            Ok(self.clone())
        } else {
            self.to_spectral()
        }
    }

    pub fn physical(&self) -> Result<Self, FieldError> {
        if self.is_spectral() {
            self.to_physical()
        } else {
            Ok(self.clone())
        }
    }

    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self, FieldError> {
        if self.grid.nx != other.grid.nx || self.grid.ny != other.grid.ny {
            return Err(FieldError::GridMismatch(self.grid, other.grid));
        }
        let data = match (&self.data, &other.data) {
            (PlanarData::Physical(x), PlanarData::Physical(y)) => {
                PlanarData::Physical(x.iter().zip(y).map(|(x, y)| a * x + b * y).collect())
            }
            (PlanarData::Spectral(x), PlanarData::Spectral(y)) => {
                PlanarData::Spectral(x.iter().zip(y).map(|(x, y)| x * a + y * b).collect())
            }
            _ => {
                return Err(FieldError::Representation {
                    expected: if self.is_spectral() { "spectral" } else { "physical" },
                })
            }
        };
        Ok(Self { grid: self.grid, data })
    }

    pub fn scale(&self, a: f64) -> Self {
        let data = match &self.data {
            PlanarData::Physical(x) => PlanarData::Physical(x.iter().map(|v| a * v).collect()),
            PlanarData::Spectral(x) => PlanarData::Spectral(x.iter().map(|v| v * a).collect()),
        };
        Self { grid: self.grid, data }
    }

    /// Pointwise map over physical samples.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, FieldError> {
        Ok(Self {
            grid: self.grid,
            data: PlanarData::Physical(self.values()?.iter().map(|&v| f(v)).collect()),
        })
    }

    /// Spectral derivative `d/dx` (`axis = 0`) or `d/dy` (`axis = 1`);
    /// the Nyquist multiplier is zero.
    pub fn derivative(&self, axis: usize) -> Result<Self, FieldError> {
        let c = self.coeffs()?;
        let g = self.grid;
        let mut out = c.to_vec();
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                let (k, n) = if axis == 0 { (g.kx(ix), g.nx) } else { (g.ky(iy), g.ny) };
                let mult = if 2 * k.unsigned_abs() as usize == n {
                    0.0
                } else {
                    2.0 * std::f64::consts::PI * k as f64
                };
                out[ix * g.ny + iy] *= Complex64::new(0.0, mult);
            }
        }
        Ok(Self { grid: g, data: PlanarData::Spectral(out) })
    }
}
