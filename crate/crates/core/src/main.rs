use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use channelflow::cli::{
    cmd_convergence, cmd_report, cmd_run, cmd_verify_inequalities, parse_config, EXIT_IO,
};
use channelflow::field::Grid;
use channelflow::inequality::{SweepOptions, DEFAULT_CAP};

#[derive(Parser)]
#[command(name = "channelflow", version, about = "Stress-free channel Navier–Stokes with regularity diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write diagnostics, report, checkpoint, manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Continue from a checkpoint instead of the configured initial state.
        #[arg(long)]
        restart: Option<PathBuf>,
    },
    /// Check the functional inequalities on a seeded random family.
    VerifyInequalities {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, num_args = 3, value_names = ["NX", "NY", "NZ"], default_values_t = [16, 16, 9])]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: f64,
        /// Self-test: evaluate Minkowski with its sides swapped (must fail).
        #[arg(long)]
        negative_control: bool,
    },
    /// Observed temporal order at dt, dt/2, dt/4 on an exact solution.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Re-render the criterion report from a run's diagnostics CSV.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("CHANNELFLOW_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return code(if usage { EXIT_IO } else { 0 });
        }
    };
    configure_threads();
    let load = |path: &PathBuf| {
        parse_config(path).map_err(|e| {
            eprintln!("config error: {e}");
            code(EXIT_IO)
        })
    };
    match cli.command {
        Command::Run { config, out, restart } => match load(&config) {
            Ok(c) => code(cmd_run(&c, &out, restart.as_deref())),
            Err(e) => e,
        },
        Command::VerifyInequalities { seed, grid, count, out, cap, negative_control } => {
            let grid = match Grid::new(grid[0], grid[1], grid[2]) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("--grid: {e}");
                    return code(EXIT_IO);
                }
            };
            code(cmd_verify_inequalities(seed, grid, count, &out, SweepOptions { cap, reversed_minkowski: negative_control }))
        }
        Command::Convergence { config, out } => match load(&config) {
            Ok(c) => code(cmd_convergence(&c, &out)),
            Err(e) => e,
        },
        Command::Report { config, out } => match load(&config) {
            Ok(c) => code(cmd_report(&c, &out)),
            Err(e) => e,
        },
    }
}
