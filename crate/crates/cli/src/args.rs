use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wh2",
    version,
    about = "Weighted-H2 model reduction for SISO descriptor systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic system G and weight W (optionally a plant P with W from the loop).
    Gen(GenArgs),
    /// Weighted norm of G by residues and by quadrature.
    Norm(NormArgs),
    /// Weighted inner product of G and H by residues and by quadrature.
    Inner(InnerArgs),
    /// Reduce G and write the reduced system and a report.
    Reduce(ReduceArgs),
    /// Interpolatory optimality residuals of a reduced model.
    Validate(ValidateArgs),
    /// Reduction-order and dominant-split sweep with method comparison.
    Sweep(SweepArgs),
    /// Magnitude response of G and G_r on a log grid.
    Bode(BodeArgs),
    /// Closed-loop time responses with the full and the reduced controller.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Wirka,
    Irka,
    Bt,
    Fwbt,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Wirka => "wirka",
            Method::Irka => "irka",
            Method::Bt => "bt",
            Method::Fwbt => "fwbt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Input {
    Impulse,
    Cos,
}

/// Benchmark generation shared by `gen` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Order of the synthetic G.
    #[arg(long, default_value_t = 60)]
    pub order: usize,
    /// Order of the synthetic weight (ignored when a plant is generated).
    #[arg(long, default_value_t = 12)]
    pub weight_order: usize,
    #[arg(long, env = "WH2_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub bench: BenchArgs,
    /// Also generate a plant of this order and set W = P(1 + PG)⁻¹.
    #[arg(long)]
    pub plant_order: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long)]
    pub g: PathBuf,
    /// Weight; W = 1 when omitted.
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct InnerArgs {
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long)]
    pub h: PathBuf,
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Full-order system; a generated benchmark when omitted.
    #[arg(long)]
    pub g: Option<PathBuf>,
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[command(flatten)]
    pub bench: BenchArgs,
    #[arg(long, value_enum, default_value_t = Method::Wirka)]
    pub method: Method,
    #[arg(long)]
    pub r: usize,
    /// Dominant poles of G used for the left basis (W-IRKA).
    #[arg(long, default_value_t = 2)]
    pub nu: usize,
    /// Dominant poles of W used for the left basis; defaults to r − ν.
    #[arg(long)]
    pub varpi: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Reduced system output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report file; standard output when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long)]
    pub gr: PathBuf,
    #[arg(long)]
    pub w: Option<PathBuf>,
    /// Largest acceptable relative residual.
    #[arg(long, default_value_t = 1e-4)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub g: Option<PathBuf>,
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[command(flatten)]
    pub bench: BenchArgs,
    /// Plant for the closed-loop stability column.
    #[arg(long)]
    pub plant: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![8, 10, 12])]
    pub r: Vec<usize>,
    /// ν values of the split table; all of r, r−1, …, 0 when omitted.
    #[arg(long, value_delimiter = ',')]
    pub splits: Option<Vec<usize>>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Method::Wirka, Method::Irka, Method::Fwbt])]
    pub methods: Vec<Method>,
    /// ν used by W-IRKA in the method comparison.
    #[arg(long, default_value_t = 2)]
    pub nu: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BodeArgs {
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long)]
    pub gr: PathBuf,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub per_decade: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub plant: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long)]
    pub gr: PathBuf,
    #[arg(long, value_enum, default_value_t = Input::Impulse)]
    pub input: Input,
    /// Angular frequency of the cosine input.
    #[arg(long, default_value_t = 2.0)]
    pub omega: f64,
    /// Step size; derived from the fastest closed-loop pole when omitted.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    pub t_end: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
