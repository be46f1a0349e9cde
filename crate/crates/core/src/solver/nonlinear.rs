use rayon::prelude::*;

use super::{SolverError, VelocityState};
use crate::calculus::{ddx, ddy, ddz};
use crate::field::{Parity, ScalarField};

/// Advective terms `(v . grad_h) v + w v_z` and `v . grad_h w + w w_z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinear {
    pub n1: ScalarField,
    pub n2: ScalarField,
    pub nw: ScalarField,
}

impl Nonlinear {
    pub fn components(&self) -> [&ScalarField; 3] {
        [&self.n1, &self.n2, &self.nw]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|f| f.is_finite())
    }
}

/// Pseudospectral advection with 2/3 dealiasing of the products.
pub fn nonlinear(state: &VelocityState) -> Result<Nonlinear, SolverError> {
    nonlinear_with(state, true)
}

pub fn nonlinear_with(state: &VelocityState, dealias: bool) -> Result<Nonlinear, SolverError> {
    let spectral = [
        state.v1.clone(),
        state.v2.clone(),
        state.w.clone(),
        ddx(&state.v1)?,
        ddy(&state.v1)?,
        ddz(&state.v1)?,
        ddx(&state.v2)?,
        ddy(&state.v2)?,
        ddz(&state.v2)?,
        ddx(&state.w)?,
        ddy(&state.w)?,
        ddz(&state.w)?,
    ];
    let phys = spectral
        .par_iter()
        .map(|f| f.to_physical())
        .collect::<Result<Vec<_>, _>>()?;
    let [v1, v2, w, v1x, v1y, v1z, v2x, v2y, v2z, wx, wy, wz] = &phys[..] else {
        unreachable!("twelve fields")
    };

    let advect = |fx: &ScalarField, fy: &ScalarField, fz: &ScalarField| -> Result<ScalarField, SolverError> {
        let a = v1.mul(fx)?;
        let b = v2.mul(fy)?;
        let c = w.mul(fz)?;
        Ok(a.add(&b)?.add(&c)?)
    };
    let physical = [advect(v1x, v1y, v1z)?, advect(v2x, v2y, v2z)?, advect(wx, wy, wz)?];

    let expected = [Parity::EvenZ, Parity::EvenZ, Parity::OddZ];
    for (f, parity) in physical.iter().zip(expected) {
        if f.parity() != parity {
            return Err(SolverError::Consistency(format!(
                "advective product has parity {:?}, expected {parity:?}",
                f.parity()
            )));
        }
    }
    let spectral = physical
        .par_iter()
        .map(|f| {
            let s = f.to_spectral()?;
            if dealias {
                s.dealias()
            } else {
                Ok(s)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut it = spectral.into_iter();
    Ok(Nonlinear {
        n1: it.next().expect("three"),
        n2: it.next().expect("three"),
        nw: it.next().expect("three"),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::field::Grid;
    use crate::solver::{exact_shear, exact_taylor_green};

    fn grid() -> Grid {
        Grid::new(16, 16, 9).unwrap()
    }

    #[test]
    fn zero_state_has_zero_advection() {
        let n = nonlinear(&VelocityState::zeros(grid())).unwrap();
        assert!(n.components().iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn shear_has_no_advection() {
        let n = nonlinear(&exact_shear(grid(), 0.0, 1.0).unwrap()).unwrap();
        assert!(n.components().iter().all(|f| f.max_abs() < 1e-15));
    }

    #[test]
    fn taylor_green_advection_is_a_gradient() {
        // (v . grad) v = pi (sin 4 pi x, sin 4 pi y) = -grad((cos 4pi x + cos 4pi y) / 4)
        let n = nonlinear(&exact_taylor_green(grid(), 0.0, 1.0).unwrap()).unwrap();
        let g = grid();
        let e1 = ScalarField::from_fn(g, Parity::EvenZ, |x, _, _| PI * (4.0 * PI * x).sin());
        let e2 = ScalarField::from_fn(g, Parity::EvenZ, |_, y, _| PI * (4.0 * PI * y).sin());
        let d1 = n.n1.to_physical().unwrap().sub(&e1).unwrap().max_abs();
        let d2 = n.n2.to_physical().unwrap().sub(&e2).unwrap().max_abs();
        assert!(d1 < 1e-13 && d2 < 1e-13, "{d1:e} {d2:e}");
        assert_eq!(n.nw.max_abs(), 0.0);
    }
}
