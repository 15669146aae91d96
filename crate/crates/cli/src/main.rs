//! `cpode` command-line tool.
//!
//! Exit codes: 0 ok, 2 usage or parse error, 3 I/O error, 4 numerical blow-up.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cpode",
    version,
    about = "Three-substep explicit ODE integrator and corruption-poverty scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence table on a manufactured problem, k = 2^-e for e in RANGE.
    Converge {
        /// `example1` or `example2`.
        problem: String,
        /// Inclusive exponent range, e.g. `4..8`.
        range: String,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the compartment model from a preset or a config file.
    #[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
    Simulate {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// `plus` (default) or `minus`.
        #[arg(long)]
        sign: Option<String>,
        /// Trajectory CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Era summary CSV output path.
        #[arg(long)]
        summary_out: Option<PathBuf>,
        /// Write every n-th grid point of the trajectory.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Print the roots of the first characteristic polynomial and their moduli.
    Roots,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Converge {
            problem,
            range,
            out,
        } => commands::converge(&problem, &range, out.as_deref()),
        Command::Simulate {
            preset,
            config,
            sign,
            out,
            summary_out,
            every,
        } => commands::simulate(&commands::SimulateArgs {
            preset,
            config,
            sign,
            out,
            summary_out,
            every,
        }),
        Command::Roots => commands::roots(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
