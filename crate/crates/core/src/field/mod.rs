//! Scalar fields on the channel `(0,1)^3`.
//!
//! A field is stored either as physical samples on the collocation grid or
//! as spectral coefficients `c[kx, ky, m]` of the expansion
//!
//! ```text
//! f(x, y, z) = sum_{kx, ky, m} c[kx, ky, m] exp(2 pi i (kx x + ky y)) phi_m(z)
//! ```
//!
//! where `phi_m(z) = cos(m pi z)` for [`Parity::EvenZ`] and `sin(m pi z)` for
//! [`Parity::OddZ`]. No normalization is folded into the basis: the constant
//! field `c` has the single coefficient `c[0, 0, 0] = c`. Both layouts store
//! the vertical index fastest, so vertical kernels are stride-1.
//!
//! Under trapezoid quadrature on the collocation nodes the discrete squared
//! L2 norm is `sum |c|^2 * w_m` with `w_m` from [`Parity::mode_weight`].

mod grid;
mod planar;
mod transform;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftDirection;
use thiserror::Error;

pub use grid::{Grid, Parity};
pub use planar::PlanarField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} representation")]
    Representation { expected: &'static str },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("spectral data breaks Hermitian symmetry (defect {defect:.3e})")]
    Hermitian { defect: f64 },
    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(Grid, Grid),
    #[error("parity mismatch: {0:?} vs {1:?}")]
    ParityMismatch(Parity, Parity),
    #[error("vertical integral of the horizontal divergence is {residual:.3e}, not zero")]
    IncompatibleDivergence { residual: f64 },
}

/// Relative defect tolerated in Hermitian symmetry and wall values.
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    parity: Parity,
    data: FieldData,
}

impl ScalarField {
    pub fn from_physical(grid: Grid, parity: Parity, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, parity, data: FieldData::Physical(values) })
    }

    pub fn from_spectral(
        grid: Grid,
        parity: Parity,
        coeffs: Vec<Complex64>,
    ) -> Result<Self, FieldError> {
        if coeffs.len() != grid.len() {
            return Err(FieldError::InvalidField(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let top = grid.top_mode();
        for column in coeffs.chunks(grid.nz) {
            for (m, c) in column.iter().enumerate() {
                if !parity.allows(m, top) && *c != Complex64::new(0.0, 0.0) {
                    return Err(FieldError::InvalidField(format!(
                        "vertical mode {m} is forbidden for {parity:?} fields"
                    )));
                }
            }
        }
        Ok(Self { grid, parity, data: FieldData::Spectral(coeffs) })
    }

    /// Samples `f(x, y, z)` at the collocation nodes.
    pub fn from_fn(grid: Grid, parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                for k in 0..grid.nz {
                    values[grid.idx(ix, iy, k)] = f(grid.x(ix), grid.y(iy), grid.z(k));
                }
            }
        }
        if parity == Parity::OddZ {
            // sin(pi) is not exactly zero in floating point
            for column in values.chunks_mut(grid.nz) {
                column[0] = 0.0;
                column[grid.nz - 1] = 0.0;
            }
        }
        Self { grid, parity, data: FieldData::Physical(values) }
    }

    pub fn zeros(grid: Grid, parity: Parity) -> Self {
        Self {
            grid,
            parity,
            data: FieldData::Spectral(vec![Complex64::new(0.0, 0.0); grid.len()]),
        }
    }

    /// Spectral field holding mode `(kx, ky, m)` with amplitude `amp` plus its
    /// Hermitian partner, so the physical field is real.
    pub fn single_mode(
        grid: Grid,
        parity: Parity,
        kx: i64,
        ky: i64,
        m: usize,
        amp: Complex64,
    ) -> Result<Self, FieldError> {
        let mut field = Self::zeros(grid, parity);
        field.set_mode(kx, ky, m, amp)?;
        Ok(field)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn data(&self) -> &FieldData {
        &self.data
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.data, FieldData::Spectral(_))
    }

    pub fn values(&self) -> Result<&[f64], FieldError> {
        match &self.data {
            FieldData::Physical(v) => Ok(v),
            FieldData::Spectral(_) => Err(FieldError::Representation { expected: "physical" }),
        }
    }

    pub fn coeffs(&self) -> Result<&[Complex64], FieldError> {
        match &self.data {
            FieldData::Spectral(c) => Ok(c),
            FieldData::Physical(_) => Err(FieldError::Representation { expected: "spectral" }),
        }
    }

    pub(crate) fn coeffs_mut(&mut self) -> Result<&mut [Complex64], FieldError> {
        match &mut self.data {
            FieldData::Spectral(c) => Ok(c),
            FieldData::Physical(_) => Err(FieldError::Representation { expected: "spectral" }),
        }
    }

    pub fn into_coeffs(self) -> Result<Vec<Complex64>, FieldError> {
        match self.data {
            FieldData::Spectral(c) => Ok(c),
            FieldData::Physical(_) => Err(FieldError::Representation { expected: "spectral" }),
        }
    }

    /// Coefficient of mode `(kx, ky, m)`; zero for modes outside the grid.
    pub fn coeff(&self, kx: i64, ky: i64, m: usize) -> Result<Complex64, FieldError> {
        let c = self.coeffs()?;
        match (self.grid.kx_index(kx), self.grid.ky_index(ky)) {
            (Some(ix), Some(iy)) if m < self.grid.nz => Ok(c[self.grid.idx(ix, iy, m)]),
            _ => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// Sets `c[kx,ky,m] = amp` and `c[-kx,-ky,m] = conj(amp)`.
    pub fn set_mode(&mut self, kx: i64, ky: i64, m: usize, amp: Complex64) -> Result<(), FieldError> {
        let grid = self.grid;
        if !self.parity.allows(m, grid.top_mode()) {
            return Err(FieldError::InvalidField(format!(
                "vertical mode {m} is forbidden for {:?} fields",
                self.parity
            )));
        }
        let (ix, iy, jx, jy) = match (
            grid.kx_index(kx),
            grid.ky_index(ky),
            grid.kx_index(-kx),
            grid.ky_index(-ky),
        ) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => {
                return Err(FieldError::InvalidField(format!(
                    "mode ({kx},{ky}) is outside the {grid} grid"
                )))
            }
        };
        let c = self.coeffs_mut()?;
        c[grid.idx(ix, iy, m)] = amp;
        if (ix, iy) == (jx, jy) {
            c[grid.idx(ix, iy, m)] = Complex64::new(amp.re, 0.0);
        } else {
            c[grid.idx(jx, jy, m)] = amp.conj();
        }
        Ok(())
    }

    /// Forward transform of physical samples.
    pub fn to_spectral(&self) -> Result<Self, FieldError> {
        let values = self.values()?;
        if self.parity == Parity::OddZ {
            let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let wall = values
                .chunks(self.grid.nz)
                .map(|c| c[0].abs().max(c[self.grid.nz - 1].abs()))
                .fold(0.0f64, f64::max);
            if wall > SYMMETRY_TOL * scale {
                return Err(FieldError::InvalidField(format!(
                    "odd field does not vanish at the walls (|f| = {wall:.3e})"
                )));
            }
        }
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform::horizontal(&mut data, self.grid, FftDirection::Forward);
        transform::vertical_forward(&mut data, self.grid, self.parity);
        Ok(Self { grid: self.grid, parity: self.parity, data: FieldData::Spectral(data) })
    }

    /// Inverse transform; fails on spectral data that is not Hermitian.
    pub fn to_physical(&self) -> Result<Self, FieldError> {
        let defect = self.hermitian_defect()?;
        if defect > SYMMETRY_TOL {
            return Err(FieldError::Hermitian { defect });
        }
        let mut data = self.coeffs()?.to_vec();
        transform::vertical_inverse(&mut data, self.grid, self.parity);
        transform::horizontal(&mut data, self.grid, FftDirection::Inverse);
        let values = data.into_iter().map(|c| c.re).collect();
        Ok(Self { grid: self.grid, parity: self.parity, data: FieldData::Physical(values) })
    }

    /// Spectral copy regardless of the current representation.
    pub fn spectral(&self) -> Result<Self, FieldError> {
        if self.is_spectral() {
            Ok(self.clone())
        } else {
            self.to_spectral()
        }
    }

    /// Physical copy regardless of the current representation.
    pub fn physical(&self) -> Result<Self, FieldError> {
        if self.is_spectral() {
            self.to_physical()
        } else {
            Ok(self.clone())
        }
    }

    /// Largest `|c(k) - conj(c(-k))|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> Result<f64, FieldError> {
        let c = self.coeffs()?;
        let g = self.grid;
        let scale = c.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        if scale == 0.0 {
            return Ok(0.0);
        }
        let mut defect = 0.0f64;
        for ix in 0..g.nx {
            let jx = (g.nx - ix) % g.nx;
            for iy in 0..g.ny {
                let jy = (g.ny - iy) % g.ny;
                for m in 0..g.nz {
                    let d = (c[g.idx(ix, iy, m)] - c[g.idx(jx, jy, m)].conj()).norm();
                    defect = defect.max(d);
                }
            }
        }
        Ok(defect / scale)
    }

    /// Zeroes `|kx| > nx/3`, `|ky| > ny/3` and `m > 2 (nz-1) / 3`.
    pub fn dealias(&self) -> Result<Self, FieldError> {
        let mut out = self.clone();
        let g = self.grid;
        let c = out.coeffs_mut()?;
        for ix in 0..g.nx {
            let kx_cut = 3 * g.kx(ix).unsigned_abs() as usize > g.nx;
            for iy in 0..g.ny {
                let ky_cut = 3 * g.ky(iy).unsigned_abs() as usize > g.ny;
                let base = g.idx(ix, iy, 0);
                for m in 0..g.nz {
                    if kx_cut || ky_cut || 3 * m > 2 * g.top_mode() {
                        c[base + m] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Spectral interpolation onto another grid: zero padding when refining,
    /// truncation when coarsening. Horizontal Nyquist content is split
    /// evenly between `+-n/2` on refinement and dropped on coarsening.
    pub fn resample(&self, target: Grid) -> Result<Self, FieldError> {
        let src = self.coeffs()?;
        let g = self.grid;
        let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
        let top = target.top_mode();
        for ix in 0..g.nx {
            let kx = g.kx(ix);
            for iy in 0..g.ny {
                let ky = g.ky(iy);
                for (tkx, wx) in spread(kx, g.nx, target.nx) {
                    for (tky, wy) in spread(ky, g.ny, target.ny) {
                        let (Some(tx), Some(ty)) = (target.kx_index(tkx), target.ky_index(tky)) else {
                            continue;
                        };
                        for m in 0..g.nz.min(target.nz) {
                            if self.parity.allows(m, top) {
                                out[target.idx(tx, ty, m)] += src[g.idx(ix, iy, m)] * (wx * wy);
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { grid: target, parity: self.parity, data: FieldData::Spectral(out) })
    }

    fn check_compatible(&self, other: &Self) -> Result<(), FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch(self.grid, other.grid));
        }
        if self.parity != other.parity {
            return Err(FieldError::ParityMismatch(self.parity, other.parity));
        }
        if self.is_spectral() != other.is_spectral() {
            return Err(FieldError::Representation {
                expected: if self.is_spectral() { "spectral" } else { "physical" },
            });
        }
        Ok(())
    }

    /// `a * self + b * other`, in whichever representation both share.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self, FieldError> {
        self.check_compatible(other)?;
        let data = match (&self.data, &other.data) {
            (FieldData::Physical(x), FieldData::Physical(y)) => {
                FieldData::Physical(x.iter().zip(y).map(|(x, y)| a * x + b * y).collect())
            }
            (FieldData::Spectral(x), FieldData::Spectral(y)) => {
                FieldData::Spectral(x.iter().zip(y).map(|(x, y)| x * a + y * b).collect())
            }
            _ => unreachable!("checked above"),
        };
        Ok(Self { grid: self.grid, parity: self.parity, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        let data = match &self.data {
            FieldData::Physical(x) => FieldData::Physical(x.iter().map(|v| a * v).collect()),
            FieldData::Spectral(x) => FieldData::Spectral(x.iter().map(|v| v * a).collect()),
        };
        Self { grid: self.grid, parity: self.parity, data }
    }

    /// Pointwise product of two physical fields; the parity follows the
    /// product rule (even*even = odd*odd = even).
    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch(self.grid, other.grid));
        }
        let (x, y) = (self.values()?, other.values()?);
        Ok(Self {
            grid: self.grid,
            parity: self.parity.product(other.parity),
            data: FieldData::Physical(x.iter().zip(y).map(|(a, b)| a * b).collect()),
        })
    }

    /// Largest absolute physical sample or coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        match &self.data {
            FieldData::Physical(v) => v.iter().fold(0.0, |a, x| a.max(x.abs())),
            FieldData::Spectral(c) => c.iter().fold(0.0, |a, x| a.max(x.norm())),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            FieldData::Physical(v) => v.iter().all(|x| x.is_finite()),
            FieldData::Spectral(c) => c.iter().all(|x| x.re.is_finite() && x.im.is_finite()),
        }
    }

    /// Random real band-limited spectral field: every allowed mode with
    /// `|kx|, |ky|, m <= max_mode` gets a uniform complex amplitude in the
    /// unit square, then the coefficients are symmetrized.
    pub fn random_band_limited<R: Rng + ?Sized>(
        grid: Grid,
        parity: Parity,
        max_mode: usize,
        rng: &mut R,
    ) -> Self {
        let kmax = max_mode as i64;
        let mut field = Self::zeros(grid, parity);
        let top = grid.top_mode();
        let c = field.coeffs_mut().expect("zeros is spectral");
        for ix in 0..grid.nx {
            let kx = grid.kx(ix);
            for iy in 0..grid.ny {
                let ky = grid.ky(iy);
                if kx.abs() > kmax || ky.abs() > kmax || 2 * kx.unsigned_abs() as usize >= grid.nx
                    || 2 * ky.unsigned_abs() as usize >= grid.ny
                {
                    continue;
                }
                for m in 0..=max_mode.min(top) {
                    if parity.allows(m, top) {
                        c[grid.idx(ix, iy, m)] =
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    }
                }
            }
        }
        field.symmetrize();
        field
    }

    /// Replaces coefficients by the Hermitian part `(c(k) + conj(c(-k))) / 2`.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        let Ok(c) = self.coeffs_mut() else { return };
        let src = c.to_vec();
        for ix in 0..g.nx {
            let jx = (g.nx - ix) % g.nx;
            for iy in 0..g.ny {
                let jy = (g.ny - iy) % g.ny;
                for m in 0..g.nz {
                    c[g.idx(ix, iy, m)] = (src[g.idx(ix, iy, m)] + src[g.idx(jx, jy, m)].conj()) * 0.5;
                }
            }
        }
    }
}

/// Target wavenumbers (and weights) a source wavenumber maps to on resampling.
fn spread(k: i64, n_src: usize, n_dst: usize) -> Vec<(i64, f64)> {
    let half_src = (n_src / 2) as i64;
    let half_dst = (n_dst / 2) as i64;
    if k == -half_src {
        if n_dst > n_src {
            return vec![(k, 0.5), (-k, 0.5)];
        }
        if n_dst == n_src {
            return vec![(k, 1.0)];
        }
        return Vec::new();
    }
    if k.abs() >= half_dst {
        return Vec::new();
    }
    vec![(k, 1.0)]
}
