use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    check_gn_2d, check_gn_3d, check_interp_2d, check_lemma_ll, check_minkowski_field, check_poincare_pz,
    planar_of, InequalityError, InequalityReport, DEFAULT_CAP,
};
use crate::field::{Grid, Parity, ScalarField};
use crate::norms::{l2_norm, l2_norm_2d_sq};
use crate::solver::{random_solenoidal, VelocityState};

/// Exponents used by the family sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyExponents {
    pub gn_2d_alpha: f64,
    pub gn_3d_alpha: f64,
    pub interp_alpha: f64,
    pub interp_beta: f64,
    pub minkowski_beta: f64,
    pub lemma_r: f64,
    pub lemma_eps: f64,
}

pub const FAMILY_EXPONENTS: FamilyExponents = FamilyExponents {
    gn_2d_alpha: 4.0,
    gn_3d_alpha: 6.0,
    interp_alpha: 2.0,
    interp_beta: 4.0,
    minkowski_beta: 2.0,
    lemma_r: 3.5,
    lemma_eps: 0.1,
};

/// Inputs of every check for one member of the seeded family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub index: usize,
    /// Even field whose vertical average is the planar test function.
    pub planar_source: ScalarField,
    /// Test function of the 3D Gagliardo–Nirenberg check; parity alternates.
    pub psi3d: ScalarField,
    pub phi: ScalarField,
    pub psi: ScalarField,
    pub velocity: VelocityState,
    pub pressure: ScalarField,
}

fn unit(f: ScalarField) -> Result<ScalarField, InequalityError> {
    let n = l2_norm(&f)?;
    Ok(if n > 0.0 { f.scale(1.0 / n) } else { f })
}

impl FamilyMember {
    /// Member `index` of the family seeded by `seed`: band-limited to
    /// `min(nx, ny) / 4`, every field of unit L2 norm.
    pub fn generate(grid: Grid, seed: u64, index: usize) -> Result<Self, InequalityError> {
        let member_seed = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(member_seed);
        let modes = (grid.nx.min(grid.ny) / 4).max(1);
        let mut field = |parity| ScalarField::random_band_limited(grid, parity, modes, &mut rng);
        let planar = field(Parity::EvenZ);
        let gn_parity = if index.is_multiple_of(2) { Parity::EvenZ } else { Parity::OddZ };
        let psi3d = field(gn_parity);
        let phi = field(Parity::EvenZ);
        let psi = field(Parity::OddZ);
        let pressure = field(Parity::EvenZ);
        let velocity = random_solenoidal(grid, modes, 1.0, member_seed.rotate_left(17))?;
        // unit planar norm after averaging
        let avg = l2_norm_2d_sq(&planar_of(&planar)?)?.sqrt();
        let planar = if avg > 0.0 { planar.scale(1.0 / avg) } else { planar };
        Ok(Self {
            index,
            planar_source: planar,
            psi3d: unit(psi3d)?,
            phi: unit(phi)?,
            psi: unit(psi)?,
            velocity,
            pressure: unit(pressure)?,
        })
    }

    /// Constant test functions and zero velocity.
    pub fn constant(grid: Grid, c: f64) -> Self {
        let one = ScalarField::from_fn(grid, Parity::EvenZ, |_, _, _| c).to_spectral().expect("even constant");
        Self {
            index: 0,
            planar_source: one.clone(),
            psi3d: one.clone(),
            phi: one.clone(),
            psi: ScalarField::zeros(grid, Parity::OddZ),
            velocity: VelocityState::zeros(grid),
            pressure: one,
        }
    }

    /// The same member sampled on a finer grid (spectral zero padding).
    pub fn resample(&self, grid: Grid) -> Result<Self, InequalityError> {
        let r = |f: &ScalarField| f.resample(grid);
        Ok(Self {
            index: self.index,
            planar_source: r(&self.planar_source)?,
            psi3d: r(&self.psi3d)?,
            phi: r(&self.phi)?,
            psi: r(&self.psi)?,
            velocity: VelocityState::new(r(&self.velocity.v1)?, r(&self.velocity.v2)?, r(&self.velocity.w)?, 0.0)?,
            pressure: r(&self.pressure)?,
        })
    }

    /// Every test function multiplied by `lambda`; the velocity is unchanged.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            index: self.index,
            planar_source: self.planar_source.scale(lambda),
            psi3d: self.psi3d.scale(lambda),
            phi: self.phi.scale(lambda),
            psi: self.psi.scale(lambda),
            velocity: self.velocity.clone(),
            pressure: self.pressure.scale(lambda),
        }
    }

    /// All six checks, in a fixed order.
    pub fn check_all(&self, reversed_minkowski: bool) -> Result<Vec<InequalityReport>, InequalityError> {
        let e = FAMILY_EXPONENTS;
        let planar = planar_of(&self.planar_source)?;
        Ok(vec![
            check_gn_2d(&planar, e.gn_2d_alpha)?,
            check_gn_3d(&self.psi3d, e.gn_3d_alpha)?,
            check_interp_2d(&planar, e.interp_alpha, e.interp_beta)?,
            check_minkowski_field(&self.psi3d, e.minkowski_beta, reversed_minkowski)?,
            check_poincare_pz(&self.pressure)?,
            check_lemma_ll(&self.phi, &self.psi, &self.velocity, e.lemma_r, e.lemma_eps)?,
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub cap: f64,
    /// Negative control: evaluate Minkowski with its sides swapped.
    pub reversed_minkowski: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, reversed_minkowski: false }
    }
}

/// One `(inequality, field)` evaluation of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub report: InequalityReport,
}

/// Evaluates every check on `count` family members.
pub fn sweep(grid: Grid, seed: u64, count: usize, options: SweepOptions) -> Result<Vec<SweepRow>, InequalityError> {
    let per_member = (0..count)
        .into_par_iter()
        .map(|i| {
            let member = FamilyMember::generate(grid, seed, i)?;
            let reports = member.check_all(options.reversed_minkowski)?;
            Ok(reports
                .into_iter()
                .map(|r| SweepRow { index: i, report: r.with_cap(options.cap) })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, InequalityError>>()?;
    Ok(per_member.into_iter().flatten().collect())
}
