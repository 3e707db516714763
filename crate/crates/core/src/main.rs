use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dihedral_rb::cli::{self, RunOverrides, OUT_DIR_ENV};
use dihedral_rb::Error;

#[derive(Parser)]
#[command(
    name = "dihedral-rb",
    version,
    about = "Dihedral randomized benchmarking simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate, write decay data and fit a report.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated sequence lengths replacing the config's grid.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        lengths: Option<Vec<usize>>,
        /// Directory for relative output paths.
        #[arg(long, env = OUT_DIR_ENV)]
        out_dir: Option<PathBuf>,
    },
    /// Check a config without simulating.
    Verify { config: PathBuf },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error[{}]: {e}", e.category());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match args.command {
        Command::Run {
            config,
            seed,
            lengths,
            out_dir,
        } => {
            let overrides = RunOverrides {
                seed,
                lengths,
                out_dir,
            };
            match cli::run(&config, &overrides) {
                Ok(outcome) => {
                    for p in &outcome.data_paths {
                        println!("data: {}", p.display());
                    }
                    println!("report: {}", outcome.report_path.display());
                    let fit = &outcome.report.fit;
                    println!(
                        "p0 = {:.6} +- {:.6}, p1 = {:.6} +- {:.6}, F_avg = {:.6} +- {:.6}",
                        fit.p0, fit.p0_err, fit.p1, fit.p1_err, fit.f_avg, fit.f_avg_err
                    );
                    if let Some(t) = &fit.target_gate {
                        println!(
                            "F_T = {:.6} in [{:.6}, {:.6}] (implicit [{:.6}, {:.6}])",
                            t.fidelity,
                            t.interval[0],
                            t.interval[1],
                            t.implicit_interval[0],
                            t.implicit_interval[1]
                        );
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { config } => match cli::verify(&config) {
            Ok(summary) => {
                println!(
                    "ok: D_{} {:?}, {} noisy gates checked",
                    summary.plan.order, summary.plan.mode, summary.gates_checked
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
