//! `discowalk`: simulate, compile, verify and search discontinuous quantum
//! walk circuits from the command line.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Leakage tolerance when neither `--tol` nor `DISCOWALK_TOL` is given.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Search success threshold when neither `--tol` nor `DISCOWALK_SEARCH_TOL` is given.
pub const DEFAULT_SEARCH_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "discowalk",
    version,
    about = "Discontinuous quantum walk simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a circuit, run it and report output probabilities.
    Simulate {
        circuit: PathBuf,
        /// Input bitstring, qubit 0 first. All basis inputs when omitted.
        #[arg(long)]
        input: Option<String>,
        /// Write per-phase amplitudes as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Leakage tolerance (overrides DISCOWALK_TOL).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compile a circuit into a rail layout and phase schedule.
    Compile {
        circuit: PathBuf,
        /// Write the layout in the graph exchange format.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Write the phase schedule.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Search edge weights for a widget problem.
    Search {
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        /// Objective below which the search counts as converged
        /// (overrides DISCOWALK_SEARCH_TOL).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run several staggered walkers through one layout.
    Pipeline {
        circuit: PathBuf,
        #[arg(long, default_value_t = 2)]
        walkers: usize,
        /// Leakage tolerance (overrides DISCOWALK_TOL).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List the widget catalog, or print one widget in exchange format.
    Widgets {
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Widgets,
    Gates,
    Pipeline,
    Xy,
}

/// A command's stdout and whether every check held.
pub struct Report {
    pub text: String,
    pub ok: bool,
    /// Printed to stderr when `ok` is false.
    pub failure: Option<String>,
}

impl Report {
    pub fn ok(text: String) -> Self {
        Self {
            text,
            ok: true,
            failure: None,
        }
    }
}

/// Usage and input errors; exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<discowalk::Error> for UsageError {
    fn from(e: discowalk::Error) -> Self {
        Self(e.to_string())
    }
}

/// `flag`, else the environment variable `var`, else `default`.
pub fn resolve_tol(flag: Option<f64>, var: &str, default: f64) -> Result<f64, UsageError> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(var) {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| UsageError(format!("{var}: expected a number, found `{s}`")))?,
            Err(_) => default,
        },
    };
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(UsageError(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

fn dispatch(command: Command) -> Result<Report, UsageError> {
    match command {
        Command::Simulate {
            circuit,
            input,
            trace,
            tol,
        } => commands::simulate(&circuit, input.as_deref(), trace.as_deref(), tol),
        Command::Compile {
            circuit,
            layout,
            schedule,
        } => commands::compile(&circuit, layout.as_deref(), schedule.as_deref()),
        Command::Verify { suite } => Ok(verify::run(suite)),
        Command::Search {
            problem,
            seed,
            restarts,
            max_iters,
            tol,
        } => commands::search(&problem, seed, restarts, max_iters, tol),
        Command::Pipeline {
            circuit,
            walkers,
            tol,
        } => commands::pipeline(&circuit, walkers, tol),
        Command::Widgets { name } => commands::widgets(name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(report) => {
            print!("{}", report.text);
            if report.ok {
                ExitCode::SUCCESS
            } else {
                if let Some(msg) = report.failure {
                    eprintln!("error: {msg}");
                }
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
