use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kg_lattice::dynamics::Scheme;

use crate::config::{BoundaryArg, EvalPoint, List};

/// Numerical laboratory for the Klein-Gordon lattice with quartic on-site
/// potential.
///
/// Every value can also come from a `key=value` file given with --config;
/// flags win over the file. Outputs start with a `# key: value` header that
/// echoes the effective configuration.
#[derive(Debug, Parser)]
#[command(name = "kglab", version)]
pub struct Cli {
    /// Optional `key=value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Leave the timestamp out of the header, for byte-identical reruns.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Run data-parallel work on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phonon frequencies as a table of (k, ω_k, ω_k²).
    Spectrum(SpectrumArgs),
    /// Integrate the lattice and tabulate the trajectory.
    Simulate(SimulateArgs),
    /// Drift of the normal-form integrals against the amplitude.
    Drift(DriftArgs),
    /// Frequency relations up to fourth order and the triviality check.
    Resonances(ResonancesArgs),
    /// Hessians of the quartic normal form in the actions.
    Kam(KamArgs),
    /// Exact logarithmic residue of the second variational equation.
    Residue(ResidueArgs),
    /// Numerical checks of the dihedral symmetry.
    Symmetry(SymmetryArgs),
    /// Normal form and its integrals at one state.
    #[command(name = "normalform-eval")]
    NormalformEval(NormalFormArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Number of sites.
    #[arg(long)]
    pub n: Option<usize>,
    /// On-site linear coefficient (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Quartic coefficient (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// `periodic` (default) or `fixed`.
    #[arg(long)]
    pub boundary: Option<BoundaryArg>,
    /// `verlet` (default) or `linear-split`.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub record_every: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Amplitude along the seeded random direction, in phonon space for a
    /// periodic lattice and in site space for fixed ends.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Explicit initial positions, comma separated (overrides the seed).
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<List<f64>>,
    /// Explicit initial momenta, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<List<f64>>,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Increasing amplitudes, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<List<f64>>,
    /// Constant c of the horizon T = c / ε.
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    /// Step size; chosen from the spectrum when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// `linear-split` (default) or `verlet`.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds; more than one reports the median.
    #[arg(long)]
    pub seeds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ResonancesArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Residual below which a relation counts as exact.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Working precision in bits.
    #[arg(long)]
    pub bits: Option<usize>,
    /// Largest N searched without complaint.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct KamArgs {
    /// Sites of the periodic lattice (with --odd) or interior sites (with
    /// --fixed).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Periodic lattice with odd N.
    #[arg(long)]
    pub odd: bool,
    /// Lattice with fixed ends.
    #[arg(long)]
    pub fixed: bool,
}

#[derive(Debug, Args)]
pub struct ResidueArgs {
    /// Truncation order of the series (default 12).
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<i32>,
    /// Rational point such as `a=1,g3=1`.
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<EvalPoint>,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random states for the invariance checks.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Steps of the flow-commutation check.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NormalFormArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Site positions, comma separated (overrides the seed).
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<List<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<List<f64>>,
}
