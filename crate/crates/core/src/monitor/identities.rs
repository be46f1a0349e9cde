use super::MonitorError;
use crate::calculus::{ddx, ddy, ddz, extend, fluctuation, laplacian, vertical_average};
use crate::field::{Grid, ScalarField};
use crate::norms::{l2_norm_2d_sq, l2_norm_sq};
use crate::solver::{ForcingSpec, PressureField, VelocityState};

/// Physical-space product on `grid`, returned spectral.
fn product(a: &ScalarField, b: &ScalarField, grid: Grid) -> Result<ScalarField, MonitorError> {
    let pa = a.resample(grid)?.to_physical()?;
    let pb = b.resample(grid)?.to_physical()?;
    Ok(pa.mul(&pb)?.to_spectral()?)
}

fn sum(terms: Vec<ScalarField>) -> Result<ScalarField, MonitorError> {
    let mut it = terms.into_iter();
    let first = it.next().expect("at least one term");
    it.try_fold(first, |acc, t| Ok(acc.add(&t)?))
}

/// `(a . grad_h) f` on `grid`.
fn advect_h(a1: &ScalarField, a2: &ScalarField, f: &ScalarField, grid: Grid) -> Result<ScalarField, MonitorError> {
    Ok(product(a1, &ddx(f)?, grid)?.add(&product(a2, &ddy(f)?, grid)?)?)
}

/// Grid on which products of two fields of `g` are alias-free.
fn padded(g: Grid) -> Result<Grid, MonitorError> {
    Ok(Grid::new(2 * g.nx, 2 * g.ny, 2 * g.top_mode() + 1)?)
}

/// Discrepancy `||LHS - RHS||_{L2(M)}` of the averaged-advection identity
///
/// `avg[(v . grad_h) v + w v_z] = (vbar . grad_h) vbar + avg[(vt . grad_h) vt + (div_h vt) vt]`
///
/// with `vt = v - vbar`, evaluated alias-free on a doubled grid.
pub fn check_identity_avg_nonlinear(state: &VelocityState) -> Result<f64, MonitorError> {
    let g = state.grid();
    let fine = padded(g)?;
    let (v1, v2, w) = (&state.v1, &state.v2, &state.w);
    let vb1 = extend(&vertical_average(v1)?, g)?;
    let vb2 = extend(&vertical_average(v2)?, g)?;
    let vt1 = fluctuation(v1)?;
    let vt2 = fluctuation(v2)?;
    let div_t = ddx(&vt1)?.add(&ddy(&vt2)?)?;

    let mut total = 0.0;
    for (v, vb, vt) in [(v1, &vb1, &vt1), (v2, &vb2, &vt2)] {
        let lhs = advect_h(v1, v2, v, fine)?.add(&product(w, &ddz(v)?, fine)?)?;
        let rhs = sum(vec![
            advect_h(&vb1, &vb2, vb, fine)?,
            advect_h(&vt1, &vt2, vt, fine)?,
            product(&div_t, vt, fine)?,
        ])?;
        let d = vertical_average(&lhs.sub(&rhs)?)?;
        total += l2_norm_2d_sq(&d)?;
    }
    Ok(total.sqrt())
}

/// Dealiased native-grid product.
fn native(a: &ScalarField, b: &ScalarField) -> Result<ScalarField, MonitorError> {
    Ok(product(a, b, a.grid())?.dealias()?)
}

/// L2 norm of the residual of the baroclinic equation
///
/// `vt_t - nu Laplacian vt + (vt . grad_h) vt + w vt_z + (vt . grad_h) vbar
///  + (vbar . grad_h) vt - avg[(vt . grad_h) vt + (div_h vt) vt] + grad_h pt = ft`
///
/// at `state`, with `vt_t` the centered difference of `prev` and `next`.
pub fn check_baroclinic_residual(
    prev: &VelocityState,
    state: &VelocityState,
    next: &VelocityState,
    p: &PressureField,
    forcing: &ForcingSpec,
    nu: f64,
) -> Result<f64, MonitorError> {
    let span = next.t - prev.t;
    let vb1 = extend(&vertical_average(&state.v1)?, state.grid())?;
    let vb2 = extend(&vertical_average(&state.v2)?, state.grid())?;
    let vt1 = fluctuation(&state.v1)?;
    let vt2 = fluctuation(&state.v2)?;
    let div_t = ddx(&vt1)?.add(&ddy(&vt2)?)?;
    let pt = fluctuation(&p.p)?;
    let dp = [ddx(&pt)?, ddy(&pt)?];

    let components = [
        (&prev.v1, &next.v1, &vt1, &vb1, &forcing.f1),
        (&prev.v2, &next.v2, &vt2, &vb2, &forcing.f2),
    ];
    let mut total = 0.0;
    for (i, (before, after, vt, vb, f)) in components.into_iter().enumerate() {
        let dvdt = fluctuation(after)?.sub(&fluctuation(before)?)?.scale(1.0 / span);
        let self_adv = native(&vt1, &ddx(vt)?)?.add(&native(&vt2, &ddy(vt)?)?)?;
        let averaged = self_adv.add(&native(&div_t, vt)?)?;
        let averaged = extend(&vertical_average(&averaged)?, state.grid())?;
        let residual = sum(vec![
            dvdt,
            laplacian(vt)?.scale(-nu),
            self_adv,
            native(&state.w, &ddz(vt)?)?,
            native(&vt1, &ddx(vb)?)?.add(&native(&vt2, &ddy(vb)?)?)?,
            native(&vb1, &ddx(vt)?)?.add(&native(&vb2, &ddy(vt)?)?)?,
            averaged.scale(-1.0),
            dp[i].clone(),
            fluctuation(f)?.scale(-1.0),
        ])?;
        total += l2_norm_sq(&residual)?;
    }
    Ok(total.sqrt())
}
