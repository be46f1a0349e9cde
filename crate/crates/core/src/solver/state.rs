use crate::calculus::{divergence, vertical_velocity};
use crate::field::{FieldError, Grid, Parity, ScalarField};
use crate::norms::{inner, l2_norm, l2_norm_sq, NormError};

/// Velocity `(v1, v2, w)` at time `t`, in spectral representation.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityState {
    pub v1: ScalarField,
    pub v2: ScalarField,
    pub w: ScalarField,
    pub t: f64,
}

impl VelocityState {
    pub fn new(v1: ScalarField, v2: ScalarField, w: ScalarField, t: f64) -> Result<Self, FieldError> {
        let grid = v1.grid();
        for f in [&v2, &w] {
            if f.grid() != grid {
                return Err(FieldError::GridMismatch(grid, f.grid()));
            }
        }
        if v1.parity() != Parity::EvenZ || v2.parity() != Parity::EvenZ {
            return Err(FieldError::ParityMismatch(Parity::EvenZ, Parity::OddZ));
        }
        if w.parity() != Parity::OddZ {
            return Err(FieldError::ParityMismatch(Parity::OddZ, Parity::EvenZ));
        }
        Ok(Self { v1: v1.spectral()?, v2: v2.spectral()?, w: w.spectral()?, t })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            v1: ScalarField::zeros(grid, Parity::EvenZ),
            v2: ScalarField::zeros(grid, Parity::EvenZ),
            w: ScalarField::zeros(grid, Parity::OddZ),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.v1.grid()
    }

    pub fn components(&self) -> [&ScalarField; 3] {
        [&self.v1, &self.v2, &self.w]
    }

    /// `||v||_2^2 + ||w||_2^2`.
    pub fn energy(&self) -> Result<f64, NormError> {
        Ok(l2_norm_sq(&self.v1)? + l2_norm_sq(&self.v2)? + l2_norm_sq(&self.w)?)
    }

    /// Largest modulus of the spectral divergence `div_h v + w_z`.
    pub fn divergence_max(&self) -> Result<f64, FieldError> {
        Ok(divergence(&self.v1, &self.v2, &self.w)?.max_abs())
    }

    /// `||w - w_reconstructed(v)||_2`.
    pub fn reconstruction_error(&self) -> Result<f64, NormError> {
        let w = vertical_velocity(&self.v1, &self.v2)?;
        l2_norm(&self.w.sub(&w)?)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|f| f.is_finite())
    }

    pub fn dealias(&self) -> Result<Self, FieldError> {
        Ok(Self { v1: self.v1.dealias()?, v2: self.v2.dealias()?, w: self.w.dealias()?, t: self.t })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { v1: self.v1.scale(a), v2: self.v2.scale(a), w: self.w.scale(a), t: self.t }
    }

    /// Componentwise `self - other` (time taken from `self`).
    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(Self {
            v1: self.v1.sub(&other.v1)?,
            v2: self.v2.sub(&other.v2)?,
            w: self.w.sub(&other.w)?,
            t: self.t,
        })
    }

    /// L2 norm of the whole velocity vector.
    pub fn l2(&self) -> Result<f64, NormError> {
        Ok(self.energy()?.sqrt())
    }
}

/// Time-independent body force `(f1, f2, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    pub f1: ScalarField,
    pub f2: ScalarField,
    pub g: ScalarField,
}

impl ForcingSpec {
    pub fn zero(grid: Grid) -> Self {
        Self {
            f1: ScalarField::zeros(grid, Parity::EvenZ),
            f2: ScalarField::zeros(grid, Parity::EvenZ),
            g: ScalarField::zeros(grid, Parity::OddZ),
        }
    }

    pub fn new(f1: ScalarField, f2: ScalarField, g: ScalarField) -> Result<Self, FieldError> {
        let s = VelocityState::new(f1, f2, g, 0.0)?;
        Ok(Self { f1: s.v1, f2: s.v2, g: s.w })
    }

    pub fn is_zero(&self) -> bool {
        [&self.f1, &self.f2, &self.g].iter().all(|f| f.max_abs() == 0.0)
    }

    /// `||f||_2^2` of the horizontal part.
    pub fn f_l2_sq(&self) -> Result<f64, NormError> {
        Ok(l2_norm_sq(&self.f1)? + l2_norm_sq(&self.f2)?)
    }

    /// `||g||_2^2`.
    pub fn g_l2_sq(&self) -> Result<f64, NormError> {
        l2_norm_sq(&self.g)
    }

    /// `int (f, g) . (v, w)`.
    pub fn work(&self, state: &VelocityState) -> Result<f64, NormError> {
        Ok(inner(&self.f1, &state.v1)? + inner(&self.f2, &state.v2)? + inner(&self.g, &state.w)?)
    }

    /// Largest modulus of the `(0,0,0)` coefficients of `f1, f2`.
    pub fn mean_defect(&self) -> Result<f64, FieldError> {
        Ok(self.f1.coeffs()?[0].norm().max(self.f2.coeffs()?[0].norm()))
    }
}

/// Zero-mean even pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    pub p: ScalarField,
}

impl PressureField {
    pub fn zeros(grid: Grid) -> Self {
        Self { p: ScalarField::zeros(grid, Parity::EvenZ) }
    }
}
