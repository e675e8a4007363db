use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "l2tors", version, about = "Finite-quotient and exact computations of L²-torsion")]
pub struct Cli {
    /// Worker threads (overrides L2TORS_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Report file; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a tower against a presentation, a complex (∂∂ = 0 on every
    /// level) or a mapping torus on its extended tower.
    Validate(ValidateArgs),
    /// L²-Betti number estimates.
    Betti(BettiArgs),
    /// Fuglede–Kadison log-determinant of a Laplacian.
    Logdet(LogdetArgs),
    /// L²-torsion of a complex over a tower, or exactly over ℤⁿ.
    Torsion(TorsionArgs),
    /// L²-torsion of a twisted chain self-map (mapping torus).
    AutoTorsion(AutoTorsionArgs),
    /// Logarithmic Mahler measure of a Laurent polynomial.
    Mahler(MahlerArgs),
    /// Evaluate a decomposition tree.
    Combine(CombineArgs),
    /// Homology torsion growth along a tower.
    Growth(GrowthArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    /// Fixed eigenvalue cutoff; default scales with the level matrix.
    #[arg(long)]
    pub cutoff: Option<f64>,

    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,

    /// Largest level dimension sent to the dense eigensolver.
    #[arg(long, default_value_t = 4096)]
    pub dense_limit: usize,

    /// Seed of the Lanczos probe vectors.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Dense,
    Fourier,
    Lanczos,
}

#[derive(Args, Debug, Clone)]
pub struct QuadratureArgs {
    /// Starting quadrature points per axis.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,

    /// Stop refining once two grids agree to this.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Cap on the number of points of one grid.
    #[arg(long, default_value_t = 1 << 24)]
    pub max_points: usize,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Presentation file (`gens …; rels …;`).
    #[arg(long, conflicts_with_all = ["complex", "mapping_torus"])]
    pub presentation: Option<PathBuf>,

    #[arg(long, conflicts_with = "mapping_torus")]
    pub complex: Option<PathBuf>,

    #[arg(long)]
    pub mapping_torus: Option<PathBuf>,

    #[arg(long)]
    pub tower: Option<PathBuf>,

    /// Multiplier m of the stable-letter order on extended levels.
    #[arg(long, default_value_t = 4)]
    pub t_order: usize,
}

#[derive(Args, Debug)]
pub struct BettiArgs {
    #[arg(long)]
    pub complex: PathBuf,
    #[arg(long)]
    pub tower: PathBuf,
    /// Single degree; all degrees when absent.
    #[arg(long)]
    pub degree: Option<usize>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Args, Debug)]
pub struct LogdetArgs {
    #[arg(long)]
    pub complex: PathBuf,
    #[arg(long)]
    pub tower: PathBuf,
    /// Degree p of the Laplacian Δ_p.
    #[arg(long)]
    pub degree: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Args, Debug)]
pub struct TorsionArgs {
    #[arg(long)]
    pub complex: PathBuf,
    #[arg(long, required_unless_present = "abelian")]
    pub tower: Option<PathBuf>,
    /// Exact route through Mahler measures (free abelian groups only).
    #[arg(long)]
    pub abelian: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

#[derive(Args, Debug)]
pub struct AutoTorsionArgs {
    /// Mapping-torus file: complex, automorphism and chain map.
    #[arg(long)]
    pub mapping_torus: PathBuf,
    /// Tower of the base group.
    #[arg(long)]
    pub tower: PathBuf,
    /// Multiplier m of the stable-letter order on extended levels.
    #[arg(long, default_value_t = 4)]
    pub t_order: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Args, Debug)]
pub struct MahlerArgs {
    /// Laurent polynomial, e.g. `2 + x + y` or `x^2 Y - 3`.
    #[arg(long)]
    pub poly: String,
    /// Variable names in order.
    #[arg(long, value_delimiter = ',', default_values_t = ["x".to_string(), "y".to_string(), "z".to_string(), "w".to_string()])]
    pub vars: Vec<String>,
    /// Monte Carlo with this many samples instead of quadrature.
    #[arg(long)]
    pub monte_carlo: Option<usize>,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

#[derive(Args, Debug)]
pub struct CombineArgs {
    /// Decomposition tree (JSON).
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[arg(long)]
    pub complex: PathBuf,
    #[arg(long)]
    pub tower: PathBuf,
    /// Also report the engine ρ⁽²⁾ headline.
    #[arg(long)]
    pub with_engine: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}
