use std::path::Path;

use super::manifest::unix_now;
use super::{
    diagnostics_csv, inequality_csv, read_checkpoint, read_diagnostics, write_atomic, write_checkpoint, RunManifest,
    CHECKPOINT_FILE, CONVERGENCE_FILE, DIAGNOSTICS_FILE, EXIT_BLOW_UP, EXIT_CHECK, EXIT_IO, EXIT_OK, INEQUALITY_FILE,
    MANIFEST_FILE, REPORT_FILE,
};
use crate::field::Grid;
use crate::inequality::{sweep, SweepOptions};
use crate::monitor::{verdict, CriterionReport, DiagnosticsRecord, InitNorms};
use crate::solver::{exact_shear, exact_taylor_green, run, InitKind, Simulation, SolverConfig, SolverError};

/// Accepted observed temporal order.
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);
/// Relative errors below this are treated as roundoff, not truncation.
pub const ROUNDOFF_FLOOR: f64 = 1e-11;

fn fail_io(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_IO
}

fn render_report(report: &CriterionReport) -> String {
    format!("{}\n{}", report.to_text(), report.to_key_values())
}

fn report_for(
    records: &[DiagnosticsRecord],
    config: &SolverConfig,
    blow_up: Option<f64>,
) -> Result<CriterionReport, String> {
    let init = config.initial_state().map_err(|e| e.to_string())?;
    let forcing = config.forcing_spec().map_err(|e| e.to_string())?;
    let norms = InitNorms::new(&init, &forcing, config.r).map_err(|e| e.to_string())?;
    verdict(records, &norms, config, blow_up).map_err(|e| e.to_string())
}

/// Runs `config` and writes diagnostics, report, final checkpoint and
/// manifest into `out`. With `restart` the run continues from a checkpoint.
pub fn cmd_run(config: &SolverConfig, out: &Path, restart: Option<&Path>) -> i32 {
    let started = unix_now();
    if let Err(e) = std::fs::create_dir_all(out) {
        return fail_io(format!("cannot create {}: {e}", out.display()));
    }
    let sim = match restart {
        None => Simulation::new(config),
        Some(path) => match read_checkpoint(path) {
            Ok(cp) => Simulation::resume(config, cp),
            Err(e) => return fail_io(e),
        },
    };
    let outcome = match sim.and_then(Simulation::finish) {
        Ok(o) => o,
        Err(e) => return fail_io(e),
    };
    let blow_up = outcome.blow_up.as_ref().map(|(t, _)| *t);
    let report = match report_for(&outcome.records, config, blow_up) {
        Ok(r) => render_report(&r),
        Err(e) => format!("report unavailable: {e}\n"),
    };
    let code = if blow_up.is_some() { EXIT_BLOW_UP } else { EXIT_OK };
    let mut manifest = RunManifest::new(config, started);
    manifest.exit_code = code;
    manifest.blow_up_last_valid_t = blow_up;
    let writes: [(&str, Vec<u8>); 2] =
        [(DIAGNOSTICS_FILE, diagnostics_csv(&outcome.records).into_bytes()), (REPORT_FILE, report.clone().into_bytes())];
    for (name, bytes) in writes {
        if let Err(e) = write_atomic(&out.join(name), &bytes) {
            return fail_io(format!("{name}: {e}"));
        }
        manifest.outputs.push(name.to_string());
    }
    if let Err(e) = write_checkpoint(&out.join(CHECKPOINT_FILE), &outcome.checkpoint) {
        return fail_io(e);
    }
    manifest.outputs.push(CHECKPOINT_FILE.to_string());
    manifest.finished_unix = unix_now();
    if let Err(e) = manifest.write(&out.join(MANIFEST_FILE)) {
        return fail_io(e);
    }
    print!("{report}");
    if let Some((t, reason)) = &outcome.blow_up {
        eprintln!("blow-up after t = {t}: {reason}");
    }
    code
}

/// Sweeps the seeded inequality family and writes one CSV row per
/// `(inequality, field)` pair.
pub fn cmd_verify_inequalities(seed: u64, grid: Grid, count: usize, out: &Path, options: SweepOptions) -> i32 {
    if count == 0 {
        return fail_io("--count must be at least 1");
    }
    if let Err(e) = std::fs::create_dir_all(out) {
        return fail_io(format!("cannot create {}: {e}", out.display()));
    }
    let rows = match sweep(grid, seed, count, options) {
        Ok(rows) => rows,
        Err(e) => return fail_io(e),
    };
    if let Err(e) = write_atomic(&out.join(INEQUALITY_FILE), inequality_csv(&rows).as_bytes()) {
        return fail_io(e);
    }
    let failures: Vec<_> = rows.iter().filter(|r| !r.report.pass).collect();
    let mut names: Vec<&str> = rows.iter().map(|r| r.report.name.as_str()).collect();
    names.dedup();
    names.sort_unstable();
    names.dedup();
    for name in names {
        let max = rows
            .iter()
            .filter(|r| r.report.name == name)
            .map(|r| r.report.empirical_constant)
            .fold(0.0, f64::max);
        println!("{name:<12} max constant {max:.6e}");
    }
    if failures.is_empty() {
        println!("all {} checks passed", rows.len());
        EXIT_OK
    } else {
        for f in &failures {
            eprintln!(
                "FAIL {} field {}: lhs {:e} rhs {:e} constant {:e}",
                f.report.name, f.index, f.report.lhs, f.report.rhs_structure, f.report.empirical_constant
            );
        }
        eprintln!("{} of {} checks failed", failures.len(), rows.len());
        EXIT_CHECK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceStatus {
    Converged,
    OutOfRange,
    /// Errors at the roundoff floor: no truncation error left to measure.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub dts: [f64; 3],
    /// Relative L2 errors against the closed form at `t_end`.
    pub errors: [f64; 3],
    /// `log2(e(dt) / e(dt/2))` and `log2(e(dt/2) / e(dt/4))`.
    pub orders: [f64; 2],
    pub status: ConvergenceStatus,
}

impl ConvergenceResult {
    /// The finest-pair estimate.
    pub fn order(&self) -> f64 {
        self.orders[1]
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (dt, e) in self.dts.iter().zip(self.errors) {
            s.push_str(&format!("dt = {dt:e}  relative error = {e:e}\n"));
        }
        s.push_str(&format!("observed orders {:.4} {:.4}\n", self.orders[0], self.orders[1]));
        s.push_str(&format!("status {:?}\n", self.status));
        s
    }
}

/// Runs `base` at `dt`, `dt/2`, `dt/4` against its closed-form solution.
pub fn convergence_study(base: &SolverConfig) -> Result<ConvergenceResult, SolverError> {
    if !base.init.is_exact() || base.forcing != crate::solver::ForcingKind::None {
        return Err(SolverError::Consistency(
            "convergence needs an unforced shear or taylor_green initial condition".into(),
        ));
    }
    let mut dts = [0.0; 3];
    let mut errors = [0.0; 3];
    for (i, factor) in [1.0, 0.5, 0.25].into_iter().enumerate() {
        let mut c = base.clone();
        c.dt = base.dt * factor;
        c.diag_every = usize::MAX;
        let out = run(&c)?;
        let t = out.final_state.t;
        let exact = match c.init {
            InitKind::Shear => exact_shear(c.grid, t, c.nu)?,
            _ => exact_taylor_green(c.grid, t, c.nu)?,
        };
        dts[i] = c.dt;
        errors[i] = out.final_state.sub(&exact)?.l2()? / exact.l2()?;
    }
    let orders = [(errors[0] / errors[1]).log2(), (errors[1] / errors[2]).log2()];
    let status = if errors.iter().any(|&e| e < ROUNDOFF_FLOOR) {
        ConvergenceStatus::Inconclusive
    } else if (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&orders[1]) {
        ConvergenceStatus::Converged
    } else {
        ConvergenceStatus::OutOfRange
    };
    Ok(ConvergenceResult { dts, errors, orders, status })
}

pub fn cmd_convergence(base: &SolverConfig, out: &Path) -> i32 {
    let result = match convergence_study(base) {
        Ok(r) => r,
        Err(e) => return fail_io(e),
    };
    let text = result.render();
    print!("{text}");
    if std::fs::create_dir_all(out).and_then(|_| write_atomic(&out.join(CONVERGENCE_FILE), text.as_bytes())).is_err()
    {
        return fail_io(format!("cannot write {}", out.join(CONVERGENCE_FILE).display()));
    }
    match result.status {
        ConvergenceStatus::Converged => EXIT_OK,
        ConvergenceStatus::Inconclusive => {
            eprintln!("inconclusive: errors are at the roundoff floor ({ROUNDOFF_FLOOR:e})");
            EXIT_CHECK
        }
        ConvergenceStatus::OutOfRange => {
            eprintln!("observed order {:.4} outside [{}, {}]", result.order(), ORDER_RANGE.0, ORDER_RANGE.1);
            EXIT_CHECK
        }
    }
}

/// Re-renders the criterion report of a finished run from its CSV.
pub fn cmd_report(config: &SolverConfig, out: &Path) -> i32 {
    let records = match read_diagnostics(&out.join(DIAGNOSTICS_FILE)) {
        Ok(r) => r,
        Err(e) => return fail_io(e),
    };
    let blow_up = std::fs::read_to_string(out.join(MANIFEST_FILE))
        .ok()
        .and_then(|t| RunManifest::parse(&t).ok())
        .and_then(|(_, _, b)| b);
    match report_for(&records, config, blow_up) {
        Ok(r) => {
            let text = render_report(&r);
            print!("{text}");
            if let Err(e) = write_atomic(&out.join(REPORT_FILE), text.as_bytes()) {
                return fail_io(e);
            }
            EXIT_OK
        }
        Err(e) => fail_io(e),
    }
}
