use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qfsim::phase::BasisTag;
use qfsim::{tolerance, Execution, Tolerances};
use qfsim_cli::commands::{self, Output, Settings, ORACLE_THRESHOLD};
use qfsim_cli::CliError;

#[derive(Parser)]
#[command(name = "qfsim", version, about = "Quasi-free fermionic semigroups: criteria, stationary states, evolution")]
struct Cli {
    #[command(flatten)]
    tol: ToleranceArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ToleranceArgs {
    /// Relative tolerance for structural identities
    #[arg(long, global = true, default_value_t = tolerance::STRUCTURE)]
    tol_structure: f64,
    /// Residual tolerance for reconstructions and Lyapunov solves
    #[arg(long, global = true, default_value_t = tolerance::NUMERIC)]
    tol_numeric: f64,
    /// Relative LU pivot treated as singular
    #[arg(long, global = true, default_value_t = tolerance::PIVOT)]
    tol_pivot: f64,
    /// Multiplier in the Kalman rank threshold
    #[arg(long, global = true, default_value_t = tolerance::RANK_FACTOR)]
    rank_factor: f64,
    /// Eigenvalue cluster gap for the spectral criterion
    #[arg(long, global = true, default_value_t = tolerance::CLUSTER_GAP)]
    cluster_gap: f64,
    /// Pinning threshold for the support decomposition
    #[arg(long, global = true, default_value_t = tolerance::PIN)]
    tol_pin: f64,
    /// Margin below zero for a Hurwitz drift
    #[arg(long, global = true, default_value_t = tolerance::HURWITZ)]
    tol_hurwitz: f64,
}

impl ToleranceArgs {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        let t = Tolerances {
            structure: self.tol_structure,
            numeric: self.tol_numeric,
            pivot: self.tol_pivot,
            rank_factor: self.rank_factor,
            cluster_gap: self.cluster_gap,
            pin: self.tol_pin,
            hurwitz: self.tol_hurwitz,
        };
        let all = [t.structure, t.numeric, t.pivot, t.rank_factor, t.cluster_gap, t.pin, t.hurwitz];
        if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(CliError::Input("tolerances must be finite and non-negative".into()));
        }
        Ok(t)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Kalman rank, uniqueness and convergence of one or more models
    Check {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        /// Evaluate the models concurrently
        #[arg(long)]
        parallel: bool,
    },
    /// Unique stationary covariance: occupations and currents
    Stationary {
        model: PathBuf,
        /// Include the full 2L×2L creation/annihilation covariance
        #[arg(long)]
        full_matrix: bool,
    },
    /// Covariance time series as CSV
    Evolve {
        model: PathBuf,
        /// vacuum, filled, half, stationary, or a covariance JSON file
        #[arg(long, default_value = "half")]
        m0: String,
        #[arg(long)]
        t_final: f64,
        /// Number of evenly spaced sample times, including t = 0 when more than one
        #[arg(long, default_value_t = 11)]
        samples: usize,
        /// Propagate the sample times concurrently
        #[arg(long)]
        parallel: bool,
    },
    /// Compare the dense Fock-space oracle against the covariance flow
    OracleCompare {
        model: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// sb, bs or b1sb2:N (defaults to the model's embedding)
        #[arg(long)]
        iso: Option<String>,
        /// Seed for the random quasi-free initial state
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ORACLE_THRESHOLD)]
        threshold: f64,
    },
    /// Model file utilities
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
}

#[derive(Subcommand)]
enum ModelAction {
    /// Print a model file for a preset
    Build {
        preset: String,
        /// Preset parameter as key=value (repeatable)
        #[arg(long = "param")]
        params: Vec<String>,
        /// Write explicit matrices in this basis instead of the preset reference
        #[arg(long)]
        explicit: Option<String>,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let tol = cli.tol.tolerances()?;
    let settings = |parallel: bool| Settings {
        tol,
        exec: if parallel { Execution::Parallel } else { Execution::Sequential },
    };
    match cli.command {
        Command::Check { models, parallel } => commands::check(&models, &settings(parallel)),
        Command::Stationary { model, full_matrix } => commands::stationary(&model, full_matrix, &settings(false)),
        Command::Evolve { model, m0, t_final, samples, parallel } => {
            commands::evolve(&model, &m0, t_final, samples, &settings(parallel))
        }
        Command::OracleCompare { model, t, iso, seed, threshold } => {
            commands::oracle_compare(&model, t, iso.as_deref(), seed, threshold, &settings(false))
        }
        Command::Model { action: ModelAction::Build { preset, params, explicit } } => {
            let basis = explicit
                .map(|b| b.parse::<BasisTag>().map_err(|_| CliError::Input(format!("unknown basis tag {b}"))))
                .transpose()?;
            commands::model_build(&preset, &params, basis, &settings(false))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.code != 0 {
                eprintln!("qfsim: check failed (exit {})", out.code);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("qfsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
