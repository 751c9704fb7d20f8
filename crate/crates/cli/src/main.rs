//! Command-line front end: JSON results on stdout (or --out), a short summary
//! on stderr. Exit 0 on success, 1 on domain errors, 2 on usage errors.

mod commands;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "gausstopo", version, about = "Topology of translation-invariant Gaussian states and operations")]
pub struct Cli {
    /// Worker threads for per-k work (serial when unset or 1).
    #[arg(long, global = true, env = "GAUSSTOPO_THREADS")]
    pub threads: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance for constraint and symmetry checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomly generated models.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model file (JSON, or TOML by extension).
    #[arg(long)]
    pub model: PathBuf,
    /// Grid points per axis: N, or N,N[,N].
    #[arg(long)]
    pub grid: Option<String>,
    /// Symmetry class; overrides the model file.
    #[arg(long)]
    pub class: Option<String>,
    /// Symmetry spec JSON {"trs", "u1", "su2"}; overrides the model file.
    #[arg(long)]
    pub spec: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check the defining constraints of a model's field.
    Validate(ModelArgs),
    /// Symmetry class from a spec, plus emergent relations when a model is given.
    Classify {
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Evaluate one invariant: chern, winding, pfaffian, sewing, fukane, cs.
    Invariant {
        #[arg(long)]
        name: String,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Explicit deformation paths.
    Deform {
        #[command(subcommand)]
        action: DeformCmd,
    },
    /// Decide disentanglability and emit the disentangler when one is built.
    Disentangle {
        #[command(flatten)]
        model: ModelArgs,
        /// Spatial dimension asked about (defaults to the model's).
        #[arg(long)]
        dim: Option<usize>,
        /// Write the disentangling operation as a field file.
        #[arg(long)]
        emit_op: Option<PathBuf>,
    },
    /// Classification tables.
    Tables {
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        /// Emit every table.
        #[arg(long)]
        dump: bool,
    },
    /// Write a named model (or a seeded random one) as a model file.
    Model {
        #[arg(long)]
        name: String,
        /// Comma-separated k=v pairs, e.g. mu=1,t=1,delta=1.
        #[arg(long)]
        params: Option<String>,
        /// Class of a random model.
        #[arg(long)]
        class: Option<String>,
    },
    /// Validation, class, emergent relations, invariants and disentanglability in one document.
    Report(ModelArgs),
}

#[derive(Subcommand, Debug)]
pub enum DeformCmd {
    /// Path from a boson state to the identity.
    TrivializeBstate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Write the sampled path as a JSON bundle.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Path from a boson operation to its unitary polar factor.
    UnitarizeBop {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Operation carrying the start of a state path to its end.
    Connect {
        /// Start model (a Hamiltonian; the path interpolates linearly to --to).
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        to: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
        /// Read the path from a JSON bundle instead.
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 1e-6)]
        path_tol: f64,
        #[arg(long)]
        emit_op: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        gausstopo::parallel::set_threads(n);
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
