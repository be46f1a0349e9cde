//! Acceptance driver: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines reach the terminal uncaptured. The
//! process fails if any criterion fails, except those listed in `KNOWN_RED`,
//! which are printed as FAIL with the reason and do not abort the run.

use std::collections::BTreeMap;
use std::time::Instant;

use channelflow::cli::{
    cmd_run, convergence_study, decode, encode, read_checkpoint, read_diagnostics, ConvergenceStatus, CHECKPOINT_FILE,
    DIAGNOSTICS_FILE, EXIT_OK,
};
use channelflow::field::Grid;
use channelflow::inequality::{FamilyMember, InequalityReport};
use channelflow::monitor::{
    check_baroclinic_residual, check_identity_avg_nonlinear, k11, k2, kr, DiagnosticsRecord, InitNorms,
};
use channelflow::norms::{time_lalpha, TimeSeries};
use channelflow::solver::{
    exact_shear, exact_taylor_green, pressure_solve, run, taylor_green_pressure, ForcingKind, InitKind, RunOutcome,
    Scheme, Simulation, SolverConfig,
};

type Outcome = Result<(bool, String), String>;

const EXACT_TOL: f64 = 1e-8;
const EXACT_BUDGET_S: f64 = 10.0;
const ORDER_RANGE: (f64, f64) = (1.8, 2.2);
const DIVERGENCE_TOL: f64 = 1e-11;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const ENERGY_MONOTONE_SLACK: f64 = 1e-14;
const IDENTITY_TOL: f64 = 1e-9;
const RATIO_WINDOW: (f64, f64) = (3.5, 4.5);
const MINKOWSKI_TOL: f64 = 1e-10;
const SCALE_TOL: f64 = 1e-10;
const REFINE_TOL: f64 = 0.10;
const SUITE_BUDGET_S: f64 = 60.0;
const ACCOUNTING_TOL: f64 = 1e-10;

/// Criteria expected to fail, with the reason printed next to them.
const KNOWN_RED: &[(usize, &str)] = &[(
    11,
    "K_R as defined carries exp(K11 K12(0) + K11^(2/(r-2)) K12(0)) at T = 0, \
     so K_R(0) = 1 + ||v0||_H1^6 only for zero data",
)];

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn grid(nx: usize, ny: usize, nz: usize) -> Grid {
    Grid::new(nx, ny, nz).expect("grid")
}

fn exact_config(init: InitKind) -> SolverConfig {
    SolverConfig::new(1.0, 1e-3, 0.1, grid(32, 32, 17), init)
}

fn relative_error(out: &RunOutcome, init: InitKind, nu: f64) -> Result<f64, String> {
    let s = &out.final_state;
    let exact = match init {
        InitKind::Shear => exact_shear(s.grid(), s.t, nu),
        _ => exact_taylor_green(s.grid(), s.t, nu),
    }
    .map_err(err)?;
    Ok(s.sub(&exact).map_err(err)?.l2().map_err(err)? / exact.l2().map_err(err)?)
}

fn criterion_1() -> Outcome {
    let c = exact_config(InitKind::Shear);
    let start = Instant::now();
    let out = run(&c).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let e = relative_error(&out, InitKind::Shear, c.nu)?;
    Ok((e <= EXACT_TOL && secs < EXACT_BUDGET_S, format!("shear relative L2 error {e:.3e}, runtime {secs:.2} s")))
}

fn criterion_2() -> Outcome {
    let c = exact_config(InitKind::TaylorGreen);
    let start = Instant::now();
    let out = run(&c).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let e = relative_error(&out, InitKind::TaylorGreen, c.nu)?;
    let s = &out.final_state;
    let p = pressure_solve(s, &c.forcing_spec().map_err(err)?).map_err(err)?;
    let p_exact = taylor_green_pressure(c.grid, s.t, c.nu).map_err(err)?;
    // both are zero-mean, which fixes the gauge
    let diff = p.p.sub(&p_exact.p).map_err(err)?;
    let pe = channelflow::norms::l2_norm(&diff).map_err(err)? / channelflow::norms::l2_norm(&p_exact.p).map_err(err)?;
    Ok((
        e <= EXACT_TOL && pe <= EXACT_TOL && secs < EXACT_BUDGET_S,
        format!("velocity error {e:.3e}, pressure error {pe:.3e}, runtime {secs:.2} s"),
    ))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for init in [InitKind::Shear, InitKind::TaylorGreen] {
        let mut c = SolverConfig::new(1.0, 4e-3, 0.1, grid(16, 16, 9), init);
        c.scheme = Scheme::CrankNicolson;
        let r = convergence_study(&c).map_err(err)?;
        ok &= r.status == ConvergenceStatus::Converged
            && (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&r.order());
        parts.push(format!("cnab2 {} order {:.3}", init.as_str(), r.order()));
        c.scheme = Scheme::IntegratingFactor;
        let r = convergence_study(&c).map_err(err)?;
        parts.push(format!("ifab2 {} {:?} (max error {:.1e})", init.as_str(), r.status, r.errors[0]));
    }
    Ok((ok, parts.join("; ")))
}

fn random_config(seed: u64, forced: bool) -> SolverConfig {
    let mut c = SolverConfig::new(0.05, 2e-3, 0.2, grid(16, 16, 9), InitKind::Random);
    c.init_seed = seed;
    c.diag_every = 5;
    if forced {
        c.forcing = ForcingKind::Random;
        c.forcing_amplitude = 1.0;
        c.forcing_seed = seed + 100;
    }
    c
}

fn criterion_4() -> Outcome {
    let mut div = 0.0_f64;
    let mut rec = 0.0_f64;
    for (seed, forced) in [(1, false), (2, true), (3, true)] {
        let out = run(&random_config(seed, forced)).map_err(err)?;
        div = div.max(out.max_divergence);
        for r in &out.records {
            div = div.max(r.divergence_max);
            rec = rec.max(r.reconstruction_error);
        }
    }
    Ok((
        div <= DIVERGENCE_TOL && rec <= RECONSTRUCTION_TOL,
        format!("max divergence {div:.2e} over all steps, max reconstruction error {rec:.2e}"),
    ))
}

fn nonincreasing(records: &[DiagnosticsRecord]) -> bool {
    records.windows(2).all(|w| w[1].energy <= w[0].energy * (1.0 + ENERGY_MONOTONE_SLACK))
}

fn criterion_5() -> Outcome {
    let mut monotone = true;
    for c in [exact_config(InitKind::Shear), exact_config(InitKind::TaylorGreen), random_config(4, false)] {
        monotone &= nonincreasing(&run(&c).map_err(err)?.records);
    }
    let mut res = Vec::new();
    for dt in [2e-3, 1e-3] {
        let mut c = random_config(5, false);
        c.dt = dt;
        c.t_end = 0.1;
        c.diag_every = 2;
        let out = run(&c).map_err(err)?;
        monotone &= nonincreasing(&out.records);
        res.push(out.records.iter().map(|r| r.energy_residual.abs()).fold(0.0, f64::max));
    }
    let order = (res[0] / res[1]).log2();
    Ok((
        monotone && (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&order),
        format!("energy nonincreasing: {monotone}; residual {:.2e} -> {:.2e}, order {order:.3}", res[0], res[1]),
    ))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0_f64;
    let mut held = true;
    for seed in 0..5 {
        let c = random_config(10 + seed, true);
        let out = run(&c).map_err(err)?;
        let bound = k11(&c, &out.init_norms);
        for r in &out.records {
            held &= r.energy <= bound;
            worst = worst.max(r.energy / bound);
        }
    }
    Ok((held, format!("5 forced runs, max energy / K11 = {worst:.4}")))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0_f64;
    for seed in 0..20 {
        let mut c = random_config(100 + seed, false);
        c.init_amplitude = 1.0 + seed as f64;
        worst = worst.max(check_identity_avg_nonlinear(&c.initial_state().map_err(err)?).map_err(err)?);
    }
    Ok((worst <= IDENTITY_TOL, format!("20 states, max discrepancy {worst:.2e}")))
}

/// Baroclinic residual at `t_mid` from three consecutive simulated states.
fn baroclinic_at(dt: f64, t_mid: f64) -> Result<f64, String> {
    let mut c = SolverConfig::new(1.0, dt, 1.0, grid(32, 32, 17), InitKind::Shear);
    c.diag_every = usize::MAX;
    let mut sim = Simulation::new(&c).map_err(err)?;
    let mid = (t_mid / dt).round() as u64;
    while sim.step_count() + 1 < mid {
        sim.step().map_err(err)?;
    }
    let prev = sim.state().clone();
    sim.step().map_err(err)?;
    let state = sim.state().clone();
    let p = sim.pressure().clone();
    sim.step().map_err(err)?;
    check_baroclinic_residual(&prev, &state, sim.state(), &p, sim.forcing(), c.nu).map_err(err)
}

fn criterion_8() -> Outcome {
    let a = baroclinic_at(2e-3, 0.05)?;
    let b = baroclinic_at(1e-3, 0.05)?;
    let ratio = a / b;
    Ok((
        (RATIO_WINDOW.0..=RATIO_WINDOW.1).contains(&ratio),
        format!("residual {a:.3e} -> {b:.3e}, ratio {ratio:.3}"),
    ))
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let coarse = grid(16, 16, 9);
    let fine = grid(32, 32, 17);
    let mut max_coarse: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_fine: BTreeMap<String, f64> = BTreeMap::new();
    let mut minkowski = 0.0_f64;
    let mut poincare_violations = 0usize;
    let mut all_finite = true;
    let mut scale_gap = 0.0_f64;
    let fold = |m: &mut BTreeMap<String, f64>, reps: &[InequalityReport]| {
        for r in reps {
            let e = m.entry(r.name.clone()).or_insert(0.0);
            *e = e.max(r.empirical_constant);
        }
    };
    for i in 0..100 {
        let member = FamilyMember::generate(coarse, 0, i).map_err(err)?;
        let reps = member.check_all(false).map_err(err)?;
        let scaled = member.scaled(10.0).check_all(false).map_err(err)?;
        for (r, s) in reps.iter().zip(&scaled) {
            all_finite &= r.empirical_constant.is_finite();
            match r.name.as_str() {
                "minkowski" => minkowski = minkowski.max(r.empirical_constant),
                "poincare_pz" => poincare_violations += r.violations,
                _ => scale_gap = scale_gap.max(relative_gap(r.empirical_constant, s.empirical_constant)),
            }
        }
        fold(&mut max_coarse, &reps);
        let refined = member.resample(fine).map_err(err)?.check_all(false).map_err(err)?;
        for r in &refined {
            all_finite &= r.empirical_constant.is_finite();
            if r.name == "poincare_pz" {
                poincare_violations += r.violations;
            }
        }
        fold(&mut max_fine, &refined);
    }
    let mut refine_gap = 0.0_f64;
    let mut constants = Vec::new();
    for (name, c) in &max_coarse {
        if name == "minkowski" || name == "poincare_pz" {
            continue;
        }
        let f = max_fine[name];
        refine_gap = refine_gap.max(relative_gap(*c, f));
        constants.push(format!("{name} {c:.4}/{f:.4}"));
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = minkowski <= 1.0 + MINKOWSKI_TOL
        && poincare_violations == 0
        && all_finite
        && scale_gap <= SCALE_TOL
        && refine_gap <= REFINE_TOL
        && secs < SUITE_BUDGET_S;
    Ok((
        ok,
        format!(
            "minkowski max {minkowski:.12}, poincare violations {poincare_violations}, scale gap {scale_gap:.1e}, \
             refinement gap {:.2}% (max constants N/2N: {}), runtime {secs:.1} s",
            100.0 * refine_gap,
            constants.join(", ")
        ),
    ))
}

fn criterion_10() -> Outcome {
    let tg = run(&exact_config(InitKind::TaylorGreen)).map_err(err)?;
    let tg_integral = tg.records.last().map_or(f64::NAN, |r| r.criterion_accum);
    let mut c = random_config(20, true);
    c.diag_every = 3;
    let out = run(&c).map_err(err)?;
    let recs = &out.records;
    let nondecreasing = recs.windows(2).all(|w| w[1].criterion_accum >= w[0].criterion_accum);
    let series = TimeSeries::from_samples(recs.iter().map(|r| (r.t, r.pz_l2q)).collect()).map_err(err)?;
    let reference = time_lalpha(&series, c.alpha).map_err(err)?.powf(c.alpha);
    let accum = recs.last().map_or(f64::NAN, |r| r.criterion_accum);
    let gap = relative_gap(accum, reference);
    let z_dependent = recs.iter().any(|r| r.pz_l2q > 0.0);
    Ok((
        tg_integral == 0.0 && nondecreasing && z_dependent && gap <= ACCOUNTING_TOL,
        format!(
            "Taylor-Green integral {tg_integral:e}; forced run accum {accum:.6e} vs time_lalpha^alpha {reference:.6e} \
             (relative gap {gap:.1e}), nondecreasing: {nondecreasing}"
        ),
    ))
}

fn criterion_11() -> Outcome {
    let mut zero = SolverConfig::new(1.0, 1e-3, 0.05, grid(16, 16, 9), InitKind::Zero);
    zero.diag_every = 5;
    let mut shear = zero.clone();
    shear.init = InitKind::Shear;
    let mut tg = zero.clone();
    tg.init = InitKind::TaylorGreen;
    let mut monotone = true;
    let mut origin_exact = true;
    let mut parts = Vec::new();
    for c in [zero, shear, tg, random_config(30, false), random_config(31, true)] {
        let out = run(&c).map_err(err)?;
        let init: &InitNorms = &out.init_norms;
        let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for r in &out.records {
            let now = (kr(r.t, &c, &out.records, init).map_err(err)?, k2(r.t, &c, &out.records, init).map_err(err)?);
            monotone &= now.0 >= prev.0 && now.1 >= prev.1;
            prev = now;
        }
        let kr0 = kr(0.0, &c, &out.records, init).map_err(err)?;
        let target = 1.0 + init.v0_h1.powi(6);
        origin_exact &= kr0 == target;
        parts.push(format!("{}: K_R(0) {kr0:.6e} vs {target:.6e}", c.init.as_str()));
    }
    Ok((monotone && origin_exact, format!("monotone: {monotone}; {}", parts.join(", "))))
}

fn criterion_12() -> Outcome {
    let c = random_config(40, true);
    let steps = c.n_steps() as u64;
    let mut straight = Simulation::new(&c).map_err(err)?;
    for _ in 0..steps {
        straight.step().map_err(err)?;
    }
    let mut first = Simulation::new(&c).map_err(err)?;
    for _ in 0..steps / 2 {
        first.step().map_err(err)?;
    }
    let restored = decode(&encode(&first.checkpoint())).map_err(err)?;
    let mut second = Simulation::resume(&c, restored).map_err(err)?;
    while second.step_count() < steps {
        second.step().map_err(err)?;
    }
    let same = straight.checkpoint() == second.checkpoint() && straight.pressure() == second.pressure();
    // the same through the run verb and a checkpoint file, diagnostics included
    let dir = tempfile::tempdir().map_err(err)?;
    let (half_dir, full_dir) = (dir.path().join("half"), dir.path().join("full"));
    let mut half = c.clone();
    half.t_end = c.t_end / 2.0;
    let codes = (
        cmd_run(&half, &half_dir, None),
        cmd_run(&c, &full_dir, Some(&half_dir.join(CHECKPOINT_FILE))),
    );
    let full = run(&c).map_err(err)?;
    let resumed = read_checkpoint(&full_dir.join(CHECKPOINT_FILE)).map_err(err)?;
    let tail = read_diagnostics(&full_dir.join(DIAGNOSTICS_FILE)).map_err(err)?;
    let reference: Vec<DiagnosticsRecord> = full.records.iter().filter(|r| r.t > half.t_end + 1e-12).copied().collect();
    let bits = |rs: &[DiagnosticsRecord]| -> Vec<[u64; 4]> {
        rs.iter().map(|r| [r.t.to_bits(), r.energy.to_bits(), r.pz_l2q.to_bits(), r.criterion_accum.to_bits()]).collect()
    };
    let same_run = codes == (EXIT_OK, EXIT_OK) && resumed == full.checkpoint && bits(&tail) == bits(&reference);
    Ok((
        same && same_run,
        format!(
            "{steps} steps, restart at {}: stepping bit-identical {same}; run verb restart bit-identical \
             (state, history, accumulators, {} records) {same_run}",
            steps / 2,
            tail.len()
        ),
    ))
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (n, f) in criteria {
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let known = KNOWN_RED.iter().find(|(k, _)| *k == n);
        let status = if pass { "PASS" } else { "FAIL" };
        match (pass, known) {
            (false, Some((_, why))) => println!("{status} criterion {n}: {detail} [known: {why}]"),
            (false, None) => {
                println!("{status} criterion {n}: {detail}");
                unexpected.push(n);
            }
            _ => println!("{status} criterion {n}: {detail}"),
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
