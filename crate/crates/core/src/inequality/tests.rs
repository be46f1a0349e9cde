use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::field::Parity;

fn planar(n: usize, f: impl Fn(f64, f64) -> f64) -> PlanarField {
    PlanarField::from_fn(Grid::new(n, n, 5).unwrap(), f)
}

fn sinsin(x: f64, y: f64) -> f64 {
    (2.0 * PI * x).sin() * (2.0 * PI * y).sin()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn gn_2d_degenerate_exponent_has_unit_constant() {
    let r = check_gn_2d(&planar(16, sinsin), 2.0).unwrap();
    assert_eq!(r.empirical_constant, 1.0);
}

#[test]
fn gn_2d_is_refinement_stable_and_scale_invariant() {
    let c32 = check_gn_2d(&planar(32, sinsin), 4.0).unwrap();
    let c64 = check_gn_2d(&planar(64, sinsin), 4.0).unwrap();
    assert!(c32.pass && rel(c32.empirical_constant, c64.empirical_constant) < 0.1);
    let scaled = check_gn_2d(&planar(32, |x, y| 10.0 * sinsin(x, y)), 4.0).unwrap();
    assert!(rel(scaled.empirical_constant, c32.empirical_constant) < 1e-12);
}

#[test]
fn gn_3d_checks() {
    let g = |n: usize| Grid::new(n, n, n / 2 + 1).unwrap();
    let f = |x: f64, y: f64, z: f64| sinsin(x, y) * (PI * z).sin();
    let psi = |n| ScalarField::from_fn(g(n), Parity::OddZ, f);
    assert_eq!(check_gn_3d(&psi(16), 2.0).unwrap().empirical_constant, 1.0);
    let a = check_gn_3d(&psi(16), 6.0).unwrap();
    let b = check_gn_3d(&psi(32), 6.0).unwrap();
    assert!(a.pass && rel(a.empirical_constant, b.empirical_constant) < 0.1);
    let s = check_gn_3d(&psi(16).scale(10.0), 6.0).unwrap();
    assert!(rel(s.empirical_constant, a.empirical_constant) < 1e-12);
    assert!(matches!(check_gn_3d(&psi(16), 7.0), Err(InequalityError::Domain { .. })));
}

#[test]
fn interp_2d_checks() {
    let c = check_interp_2d(&planar(16, |_, _| 3.0), 2.0, 4.0).unwrap();
    assert!(c.empirical_constant <= 1.0 + 1e-14);
    let f = |x: f64, _: f64| (2.0 * PI * x).sin();
    let a = check_interp_2d(&planar(32, f), 2.0, 4.0).unwrap();
    let b = check_interp_2d(&planar(64, f), 2.0, 4.0).unwrap();
    assert!(a.pass && rel(a.empirical_constant, b.empirical_constant) < 0.1);
    let s = check_interp_2d(&planar(32, |x, y| 10.0 * f(x, y)), 2.0, 4.0).unwrap();
    assert!(rel(s.empirical_constant, a.empirical_constant) < 1e-12);
    assert!(check_interp_2d(&planar(16, f), 3.0, 3.0).is_err());
}

#[test]
fn minkowski_equality_cases() {
    let w1 = [0.25; 4];
    let w2 = [0.2, 0.3, 0.5];
    let g = [1.0, -2.0, 0.5, 3.0];
    let h = [0.1, 2.0, 1.0];
    let sep: Vec<f64> = g.iter().flat_map(|a| h.iter().map(move |b| a * b)).collect();
    let r = check_minkowski(&sep, &w1, &w2, 2.5, false).unwrap();
    assert!(r.pass && (r.lhs - r.rhs_structure).abs() < 1e-14);
    let table: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64).collect();
    let r = check_minkowski(&table, &w1, &w2, 1.0, false).unwrap();
    assert!((r.lhs - r.rhs_structure).abs() < 1e-14);
    assert!(check_minkowski(&table, &w1, &w2, 0.5, false).is_err());
}

#[test]
fn reversed_minkowski_fails_on_nonseparable_table() {
    let table = [1.0, 0.0, 0.0, 1.0];
    let r = check_minkowski(&table, &[0.5, 0.5], &[0.5, 0.5], 2.0, true).unwrap();
    assert!(!r.pass);
}

proptest! {
    #[test]
    fn minkowski_always_holds(
        table in proptest::collection::vec(0.0f64..10.0, 20),
        beta in 1.0f64..6.0,
    ) {
        let r = check_minkowski(&table, &[0.25; 4], &[0.2; 5], beta, false).unwrap();
        prop_assert!(r.pass);
        prop_assert!(r.empirical_constant <= 1.0 + 1e-10);
    }
}

#[test]
fn poincare_checks() {
    let g = Grid::new(8, 8, 9).unwrap();
    let flat = ScalarField::from_fn(g, Parity::EvenZ, |x, _, _| (2.0 * PI * x).cos()).to_spectral().unwrap();
    let r = check_poincare_pz(&flat).unwrap();
    assert!(r.pass && r.lhs == 0.0 && r.rhs_structure == 0.0);

    let c = ScalarField::from_fn(g, Parity::EvenZ, |_, _, z| (PI * z).cos()).to_spectral().unwrap();
    let r = check_poincare_pz(&c).unwrap();
    assert!(r.pass);
    assert!((r.lhs - 1.0).abs() < 1e-14);
    assert!((r.rhs_structure - 2.0).abs() < 1e-3);
}

#[test]
fn lemma_ll_trivial_cases() {
    let g = Grid::new(8, 8, 5).unwrap();
    let m = FamilyMember::generate(g, 1, 0).unwrap();
    let r = check_lemma_ll(&m.phi, &m.psi, &VelocityState::zeros(g), 3.5, 0.1).unwrap();
    assert!(r.pass && r.lhs == 0.0 && r.empirical_constant == 0.0);
    let zero = ScalarField::zeros(g, Parity::EvenZ);
    let r = check_lemma_ll(&zero, &m.psi, &m.velocity, 3.5, 0.1).unwrap();
    assert!(r.pass && r.lhs == 0.0);
    assert!(check_lemma_ll(&m.phi, &m.psi, &m.velocity, 4.0, 0.1).is_err());
}

#[test]
fn lemma_ll_is_refinement_stable() {
    let g = Grid::new(16, 16, 9).unwrap();
    let fine = Grid::new(32, 32, 17).unwrap();
    for i in 0..3 {
        let m = FamilyMember::generate(g, 7, i).unwrap();
        let a = check_lemma_ll(&m.phi, &m.psi, &m.velocity, 3.5, 0.1).unwrap();
        let f = m.resample(fine).unwrap();
        let b = check_lemma_ll(&f.phi, &f.psi, &f.velocity, 3.5, 0.1).unwrap();
        assert!(a.empirical_constant.is_finite());
        if a.empirical_constant > 0.0 {
            assert!(rel(a.empirical_constant, b.empirical_constant) < 0.1);
        }
    }
}

#[test]
fn constant_member_passes_everything() {
    let m = FamilyMember::constant(Grid::new(8, 8, 5).unwrap(), 2.0);
    for r in m.check_all(false).unwrap() {
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn small_sweep_passes() {
    let rows = sweep(Grid::new(8, 8, 5).unwrap(), 3, 4, SweepOptions::default()).unwrap();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r.report.pass), "{rows:?}");
}
