//! `nmrq`: spin-system Hamiltonians, eigensolvers, spectra and ZNE demos.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure, 4 resource cap.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nmrq::Error;

#[derive(Parser, Debug)]
#[command(
    name = "nmrq",
    version,
    about = "Spin-system NMR simulation on a statevector quantum simulator"
)]
struct Cli {
    /// Directory for CSV outputs.
    #[arg(long, global = true, env = "NMRQ_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Pauli decomposition; optionally write the dense matrix.
    Hamiltonian(HamiltonianArgs),
    /// Eigenvalues by the chosen backend.
    Eig(EigArgs),
    /// FID, spectrum and peak list.
    Spectrum(SpectrumArgs),
    /// Ideal, unmitigated and extrapolated VQE cost at the converged parameters.
    ZneDemo(ZneArgs),
}

#[derive(Args, Debug)]
pub struct HamiltonianArgs {
    /// Spin-system TOML file.
    pub input: PathBuf,
    /// Also write hamiltonian.csv with the dense matrix.
    #[arg(long)]
    pub dense: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Qpe,
    Vqe,
    VqeFolded,
    VqeDeflation,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    /// Singlet for two spins, odd-parity uniform state otherwise.
    Default,
    Singlet,
    Even,
    Odd,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpeStates {
    /// Seeded random states.
    Random,
    /// Exact eigenvectors from the dense oracle.
    Oracle,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpeEvolution {
    Gates,
    Compiled,
    Exact,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtrapolationArg {
    Richardson,
    Linear,
    Quadratic,
}

#[derive(Args, Debug, Clone)]
pub struct SamplingArgs {
    /// Estimate expectations from this many shots per measurement group
    /// (exact statevector expectations when omitted).
    #[arg(long)]
    pub shots: Option<u64>,
    /// Single-qubit depolarizing probability (enables noise).
    #[arg(long)]
    pub p1: Option<f64>,
    /// Two-qubit depolarizing probability (enables noise).
    #[arg(long)]
    pub p2: Option<f64>,
    /// Zero-noise extrapolation of every noisy cost evaluation.
    #[arg(long)]
    pub zne: bool,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub fold_counts: Vec<usize>,
    #[arg(long, value_enum, default_value = "richardson")]
    pub extrapolation: ExtrapolationArg,
}

#[derive(Args, Debug)]
pub struct EigArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: Backend,
    /// Random seed (generated and recorded when omitted).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 12)]
    pub ancillas: usize,
    #[arg(long, default_value_t = 10)]
    pub trotter: usize,
    /// Shots per QPE attempt.
    #[arg(long, default_value_t = 100)]
    pub qpe_shots: u64,
    #[arg(long, default_value_t = 10)]
    pub qpe_attempts: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub qpe_states: QpeStates,
    /// Number of random QPE initial states (default 2 * 2^n).
    #[arg(long)]
    pub qpe_count: Option<usize>,
    #[arg(long, value_enum, default_value = "compiled")]
    pub evolution: QpeEvolution,
    #[arg(long, value_enum, default_value = "default")]
    pub initial: InitialKind,
    /// Folded-spectrum target; ignored with --w-sweep.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<f64>,
    /// Sweep w over the eigenvalue bounds.
    #[arg(long)]
    pub w_sweep: bool,
    /// Levels for deflation.
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    /// Penalty weight for deflation (default: width of the eigenvalue bracket).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub max_evaluations: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumBackend {
    Exact,
    Vqe,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DftArg {
    Auto,
    Direct,
    Fft,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: SpectrumBackend,
    /// FID points.
    #[arg(long, default_value_t = 4096)]
    pub d: usize,
    /// Spectral width in Hz (default: offset +- 6 ppm).
    #[arg(long)]
    pub sw: Option<f64>,
    /// Exponential decay constant in seconds.
    #[arg(long)]
    pub t2: Option<f64>,
    /// Keep only `lo,hi` ppm in spectrum.csv.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ppm_window: Option<Vec<f64>>,
    /// Sample at `t_j = j * SW` instead of `j / SW`.
    #[arg(long)]
    pub literal_timing: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub dft: DftArg,
    /// Peak threshold as a fraction of the tallest point.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct ZneArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots per noise scale.
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0.001)]
    pub p1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p2: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub fold_counts: Vec<usize>,
    #[arg(long, value_enum, default_value = "richardson")]
    pub extrapolation: ExtrapolationArg,
    /// Independent repetitions (seeds `seed, seed+1, ...`).
    #[arg(long, default_value_t = 1)]
    pub repetitions: u64,
    #[arg(long, value_enum, default_value = "default")]
    pub initial: InitialKind,
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Resource(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numerical(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse { .. } => Failure::Input(e.to_string()),
            Error::ResourceLimit { .. } => Failure::Resource(e.to_string()),
            Error::Degenerate(_) | Error::CannotComplete { .. } | Error::Inconsistent(_) => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Hamiltonian(a) => commands::hamiltonian(a),
        Command::Eig(a) => commands::eig(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::ZneDemo(a) => commands::zne_demo(a),
    };
    let run = match result {
        Ok(run) => run,
        Err(f) => {
            eprintln!("error: {}", f.message());
            return ExitCode::from(f.code());
        }
    };
    print!("{}", run.report);
    if !run.files.is_empty() {
        match output::write_all(&cli.out_dir, &run.files) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: writing to {}: {e}", cli.out_dir.display());
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
