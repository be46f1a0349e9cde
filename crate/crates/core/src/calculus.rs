//! Differential and vertical-integral operators on spectral fields.
//!
//! All operators act coefficient-wise. Horizontal derivatives zero the
//! Nyquist wavenumber. The vertical derivative of the top cosine mode
//! `cos((nz-1) pi z)` is a sine the collocation set cannot see, so it is
//! dropped; dealiased fields never carry that mode.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::field::{FieldError, Grid, Parity, ScalarField};

pub use crate::field::PlanarField;

/// Tolerance on `int_0^1 div_h v dz` accepted by [`vertical_velocity`].
pub const COMPATIBILITY_TOL: f64 = 1e-10;

fn horizontal_multiplier(f: &ScalarField, mult: impl Fn(i64, i64) -> Complex64) -> Result<ScalarField, FieldError> {
    let g = f.grid();
    let mut out = f.clone();
    let c = out.coeffs_mut()?;
    for ix in 0..g.nx {
        let kx = g.kx(ix);
        for iy in 0..g.ny {
            let factor = mult(kx, g.ky(iy));
            let base = g.idx(ix, iy, 0);
            for v in &mut c[base..base + g.nz] {
                *v *= factor;
            }
        }
    }
    Ok(out)
}

#[inline]
fn derivative_symbol(k: i64, n: usize) -> f64 {
    if 2 * k.unsigned_abs() as usize == n {
        0.0
    } else {
        2.0 * PI * k as f64
    }
}

pub fn ddx(f: &ScalarField) -> Result<ScalarField, FieldError> {
    let nx = f.grid().nx;
    horizontal_multiplier(f, |kx, _| Complex64::new(0.0, derivative_symbol(kx, nx)))
}

pub fn ddy(f: &ScalarField) -> Result<ScalarField, FieldError> {
    let ny = f.grid().ny;
    horizontal_multiplier(f, |_, ky| Complex64::new(0.0, derivative_symbol(ky, ny)))
}

/// Horizontal Laplacian, multiplier `-4 pi^2 (kx^2 + ky^2)`.
pub fn laplacian_h(f: &ScalarField) -> Result<ScalarField, FieldError> {
    horizontal_multiplier(f, |kx, ky| {
        Complex64::new(-4.0 * PI * PI * (kx * kx + ky * ky) as f64, 0.0)
    })
}

/// Vertical derivative; flips the parity.
///
/// `cos(m pi z) -> -m pi sin(m pi z)` and `sin(m pi z) -> m pi cos(m pi z)`.
pub fn ddz(f: &ScalarField) -> Result<ScalarField, FieldError> {
    let g = f.grid();
    let top = g.top_mode();
    let src = f.coeffs()?;
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    for (dst, column) in out.chunks_mut(g.nz).zip(src.chunks(g.nz)) {
        for m in 1..top {
            let km = m as f64 * PI;
            dst[m] = match f.parity() {
                Parity::EvenZ => column[m] * -km,
                Parity::OddZ => column[m] * km,
            };
        }
    }
    ScalarField::from_spectral(g, f.parity().flip(), out)
}

/// Full Laplacian `Delta_h + d_zz`.
pub fn laplacian(f: &ScalarField) -> Result<ScalarField, FieldError> {
    let g = f.grid();
    let mut out = f.clone();
    let c = out.coeffs_mut()?;
    for ix in 0..g.nx {
        let kx = g.kx(ix) as f64;
        for iy in 0..g.ny {
            let ky = g.ky(iy) as f64;
            let kh2 = 4.0 * PI * PI * (kx * kx + ky * ky);
            let base = g.idx(ix, iy, 0);
            for m in 0..g.nz {
                let kz = m as f64 * PI;
                c[base + m] *= -(kh2 + kz * kz);
            }
        }
    }
    Ok(out)
}

/// Exact `int_0^1 f dz` as a planar spectral field.
///
/// For even fields this is the `m = 0` slice. For odd fields it is
/// `sum_m b_m * 2 / (m pi)` over odd `m`.
pub fn vertical_average(f: &ScalarField) -> Result<PlanarField, FieldError> {
    let g = f.grid();
    let c = f.coeffs()?;
    let top = g.top_mode();
    let avg: Vec<Complex64> = c
        .chunks(g.nz)
        .map(|column| match f.parity() {
            Parity::EvenZ => column[0],
            Parity::OddZ => (1..top)
                .step_by(2)
                .map(|m| column[m] * (2.0 / (m as f64 * PI)))
                .sum(),
        })
        .collect();
    PlanarField::from_spectral(g, avg)
}

/// The z-constant even field equal to `planar` at every height.
pub fn extend(planar: &PlanarField, grid: Grid) -> Result<ScalarField, FieldError> {
    let pg = planar.grid();
    if pg.nx != grid.nx || pg.ny != grid.ny {
        return Err(FieldError::GridMismatch(pg, grid));
    }
    let src = planar.spectral()?;
    let src = src.coeffs()?;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (column, &c) in out.chunks_mut(grid.nz).zip(src) {
        column[0] = c;
    }
    ScalarField::from_spectral(grid, Parity::EvenZ, out)
}

/// `f - extend(vertical_average(f))`.
///
/// Only defined for even fields: subtracting a z-constant from an odd field
/// leaves the cosine/sine parity classes.
pub fn fluctuation(f: &ScalarField) -> Result<ScalarField, FieldError> {
    if f.parity() != Parity::EvenZ {
        return Err(FieldError::ParityMismatch(Parity::EvenZ, f.parity()));
    }
    let g = f.grid();
    let mut out = f.clone();
    for column in out.coeffs_mut()?.chunks_mut(g.nz) {
        column[0] = Complex64::new(0.0, 0.0);
    }
    Ok(out)
}

/// Horizontal divergence `dx v1 + dy v2`.
pub fn divergence_h(v1: &ScalarField, v2: &ScalarField) -> Result<ScalarField, FieldError> {
    ddx(v1)?.add(&ddy(v2)?)
}

/// Three-dimensional divergence `dx v1 + dy v2 + dz w`.
pub fn divergence(v1: &ScalarField, v2: &ScalarField, w: &ScalarField) -> Result<ScalarField, FieldError> {
    divergence_h(v1, v2)?.add(&ddz(w)?)
}

/// `w(z) = -int_0^z div_h v dxi`, computed as the term-by-term
/// antiderivative of the cosine series of `div_h v`.
///
/// The `m = 0` slice of `div_h v` is the vertical integral that the
/// divergence constraint forces to vanish; the top cosine would integrate
/// to a sine the grid cannot represent. Either being nonzero beyond
/// [`COMPATIBILITY_TOL`] is reported instead of projected away.
pub fn vertical_velocity(v1: &ScalarField, v2: &ScalarField) -> Result<ScalarField, FieldError> {
    if v1.parity() != Parity::EvenZ || v2.parity() != Parity::EvenZ {
        return Err(FieldError::ParityMismatch(Parity::EvenZ, Parity::OddZ));
    }
    let div = divergence_h(v1, v2)?;
    let g = div.grid();
    let top = g.top_mode();
    let c = div.coeffs()?;
    let scale = div.max_abs().max(1.0);
    let residual = c
        .chunks(g.nz)
        .map(|column| column[0].norm().max(column[top].norm()))
        .fold(0.0f64, f64::max);
    if residual > COMPATIBILITY_TOL * scale {
        return Err(FieldError::IncompatibleDivergence { residual });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    for (dst, column) in out.chunks_mut(g.nz).zip(c.chunks(g.nz)) {
        for m in 1..top {
            dst[m] = column[m] * (-1.0 / (m as f64 * PI));
        }
    }
    ScalarField::from_spectral(g, Parity::OddZ, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::inner;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::new(16, 16, 13).unwrap()
    }

    fn sample(parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> ScalarField {
        ScalarField::from_fn(grid(), parity, f).to_spectral().unwrap()
    }

    fn assert_close(a: &ScalarField, b: &ScalarField, tol: f64) {
        let (pa, pb) = (a.physical().unwrap(), b.physical().unwrap());
        assert_eq!(pa.parity(), pb.parity());
        let d = pa.values().unwrap().iter().zip(pb.values().unwrap())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(d <= tol, "max difference {d:e}");
    }

    #[test]
    fn ddx_of_cosine() {
        let f = sample(Parity::EvenZ, |x, _, _| (2.0 * PI * x).cos());
        let expect = sample(Parity::EvenZ, |x, _, _| -2.0 * PI * (2.0 * PI * x).sin());
        assert_close(&ddx(&f).unwrap(), &expect, 1e-12);
        let c = sample(Parity::EvenZ, |_, _, _| 3.0);
        assert!(ddx(&c).unwrap().max_abs() == 0.0);
        assert!(ddx(&c.to_physical().unwrap()).is_err());
    }

    #[test]
    fn ddz_maps_parities() {
        let f = sample(Parity::EvenZ, |_, _, z| (PI * z).cos());
        let d = ddz(&f).unwrap();
        assert_eq!(d.parity(), Parity::OddZ);
        assert_close(&d, &sample(Parity::OddZ, |_, _, z| -PI * (PI * z).sin()), 1e-12);
        let dd = ddz(&d).unwrap();
        assert_eq!(dd.parity(), Parity::EvenZ);
        assert_close(&dd, &sample(Parity::EvenZ, |_, _, z| -PI * PI * (PI * z).cos()), 1e-11);
        let flat = sample(Parity::EvenZ, |x, y, _| (2.0 * PI * x).sin() + (2.0 * PI * y).cos() + 0.3);
        let dflat = ddz(&flat).unwrap().max_abs();
        assert!(dflat == 0.0, "{dflat:e}");
    }

    #[test]
    fn horizontal_laplacian() {
        let f = sample(Parity::EvenZ, |x, _, _| (2.0 * PI * x).cos());
        let expect = sample(Parity::EvenZ, |x, _, _| -4.0 * PI * PI * (2.0 * PI * x).cos());
        assert_close(&laplacian_h(&f).unwrap(), &expect, 1e-11);
        let vertical = sample(Parity::OddZ, |_, _, z| (2.0 * PI * z).sin());
        assert!(laplacian_h(&vertical).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn averages_in_closed_form() {
        let c = vertical_average(&sample(Parity::EvenZ, |_, _, _| 1.5)).unwrap();
        assert!((c.coeff(0, 0).unwrap().re - 1.5).abs() < 1e-15);
        let cz = vertical_average(&sample(Parity::EvenZ, |_, _, z| (PI * z).cos())).unwrap();
        assert!(cz.coeffs().unwrap().iter().all(|v| v.norm() < 1e-15));
        let sz = vertical_average(&sample(Parity::OddZ, |_, _, z| (PI * z).sin())).unwrap();
        assert!((sz.coeff(0, 0).unwrap().re - 2.0 / PI).abs() < 1e-14);
        let s2 = vertical_average(&sample(Parity::OddZ, |_, _, z| (2.0 * PI * z).sin())).unwrap();
        assert!(s2.coeff(0, 0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn fluctuation_cases() {
        assert!(fluctuation(&sample(Parity::EvenZ, |_, _, _| 2.0)).unwrap().max_abs() < 1e-15);
        let f = sample(Parity::EvenZ, |_, _, z| (PI * z).cos());
        assert_close(&fluctuation(&f).unwrap(), &f, 1e-15);
        assert!(fluctuation(&sample(Parity::OddZ, |_, _, z| (PI * z).sin())).is_err());
    }

    #[test]
    fn reconstructs_w_symbolically() {
        let v1 = sample(Parity::EvenZ, |x, _, z| (2.0 * PI * x).sin() * (PI * z).cos());
        let v2 = ScalarField::zeros(grid(), Parity::EvenZ);
        let w = vertical_velocity(&v1, &v2).unwrap();
        let expect = sample(Parity::OddZ, |x, _, z| -2.0 * (2.0 * PI * x).cos() * (PI * z).sin());
        assert_close(&w, &expect, 1e-12);

        let uniform = sample(Parity::EvenZ, |_, _, z| (PI * z).cos() + 0.5);
        assert!(vertical_velocity(&uniform, &v2).unwrap().max_abs() == 0.0);

        let bad = sample(Parity::EvenZ, |x, _, _| (2.0 * PI * x).sin());
        assert!(matches!(
            vertical_velocity(&bad, &v2),
            Err(FieldError::IncompatibleDivergence { .. })
        ));
    }

    fn random_fields(seed: u64) -> (ScalarField, ScalarField) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (
            ScalarField::random_band_limited(grid(), Parity::EvenZ, 4, &mut rng),
            ScalarField::random_band_limited(grid(), Parity::OddZ, 4, &mut rng),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn horizontal_derivatives_commute(seed in any::<u64>()) {
            let (f, _) = random_fields(seed);
            let a = ddx(&ddy(&f).unwrap()).unwrap();
            let b = ddy(&ddx(&f).unwrap()).unwrap();
            prop_assert!(a.sub(&b).unwrap().max_abs() <= 1e-12 * a.max_abs().max(1.0));
        }

        #[test]
        fn decomposition_is_exact(seed in any::<u64>()) {
            let (f, _) = random_fields(seed);
            let avg = vertical_average(&f).unwrap();
            let fl = fluctuation(&f).unwrap();
            let rebuilt = extend(&avg, f.grid()).unwrap().add(&fl).unwrap();
            prop_assert!(rebuilt.sub(&f).unwrap().max_abs() == 0.0);
            let avg_fl = vertical_average(&fl).unwrap();
            prop_assert!(avg_fl.coeffs().unwrap().iter().all(|c| c.norm() <= 1e-14));
        }

        #[test]
        fn integration_by_parts(seed in any::<u64>()) {
            let (f, g) = random_fields(seed);
            let lhs = inner(&ddz(&f).unwrap(), &g).unwrap();
            let rhs = -inner(&f, &ddz(&g).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }

        #[test]
        fn reconstruction_satisfies_divergence(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grid();
            // v2 chosen so that div_h v has zero vertical mean: take
            // the mean-free part of a random potential flow plus a curl
            let psi = ScalarField::random_band_limited(g, Parity::EvenZ, 4, &mut rng);
            let phi = fluctuation(&ScalarField::random_band_limited(g, Parity::EvenZ, 4, &mut rng)).unwrap();
            let v1 = ddy(&psi).unwrap().add(&ddx(&phi).unwrap()).unwrap();
            let v2 = ddx(&psi).unwrap().scale(-1.0).add(&ddy(&phi).unwrap()).unwrap();
            let w = vertical_velocity(&v1, &v2).unwrap();
            let div = divergence(&v1, &v2, &w).unwrap();
            prop_assert!(div.max_abs() <= 1e-12);
        }
    }
}
