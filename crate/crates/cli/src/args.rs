use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "orthoieq",
    version,
    about = "Polynomial solutions of nonlinear integral equations from weight moments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Working precision in decimal digits (at least 16).
    #[arg(long, global = true, env = "ORTHOIEQ_PRECISION", default_value_t = 50)]
    pub precision: u32,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    pub mode: ModeArg,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for the pseudo-random verification sample points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the moments m_0..m_{count-1} of a weight.
    Moments {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Solve for the degree-n polynomial (or a range of degrees).
    Poly {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        degrees: DegreeArgs,
        #[command(flatten)]
        variant: VariantArgs,
        /// Skip substituting the solution back into the equation.
        #[arg(long)]
        no_verify: bool,
    },
    /// Substitute polynomials from a file into the equation. With
    /// `--enumerate` the patterns of degree n are solved and checked instead.
    Verify {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        variant: VariantArgs,
        #[command(flatten)]
        degrees: DegreeArgs,
        /// JSON polynomial records, one per line, or `-` for stdin.
        #[arg(long = "poly", value_name = "FILE", required_unless_present = "enumerate")]
        poly: Option<PathBuf>,
        /// Explicit sample points (comma separated) instead of the defaults.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        samples: Vec<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetName {
    Laguerre,
    JacobiAdd,
    ChebyshevU2Add,
    JacobiMult,
    ChebyshevU2Mult,
    Uniform,
}

#[derive(Args, Debug, Clone)]
pub struct WeightArgs {
    #[arg(long, value_enum, conflicts_with_all = ["expr", "contour"])]
    pub preset: Option<PresetName>,
    /// Laguerre parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Jacobi parameter p.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Jacobi parameter q.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Weight expression in x, normalized over `--interval`.
    #[arg(long, conflicts_with = "contour", requires = "interval")]
    pub expr: Option<String>,
    /// Interval endpoints; `inf` and `-inf` are allowed.
    #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"], allow_hyphen_values = true)]
    pub interval: Vec<String>,
    /// Contour weight 1/(c x) on a path from -1 to 1.
    #[arg(long)]
    pub contour: bool,
    #[arg(long, default_value_t = 0, requires = "contour")]
    pub winding: u32,
}

#[derive(Args, Debug, Clone)]
pub struct DegreeArgs {
    /// Degree (or first degree of a range).
    #[arg(short = 'n', long = "degree", default_value_t = 1)]
    pub n: usize,
    /// Last degree of a range, inclusive.
    #[arg(long)]
    pub to: Option<usize>,
    /// Largest degree accepted without an explicit override.
    #[arg(long, default_value_t = 10)]
    pub max_degree: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantName {
    Additive,
    Multiplicative,
    Shift,
    Functional,
    ArbitraryF,
}

#[derive(Args, Debug, Clone)]
pub struct VariantArgs {
    #[arg(long, value_enum, default_value_t = VariantName::Additive)]
    pub variant: VariantName,
    /// Multiplicative pattern: comma-separated indices below n (empty for none).
    #[arg(long, conflicts_with_all = ["enumerate", "parity"])]
    pub pattern: Option<String>,
    /// Try every multiplicative pattern.
    #[arg(long)]
    pub enumerate: bool,
    /// Multiplicative parity class.
    #[arg(long, conflicts_with = "enumerate")]
    pub parity: bool,
    /// Shift offset a (rational, optionally complex like `1+2i`).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Shift slope b.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Function f for the functional and arbitrary-f variants.
    #[arg(long)]
    pub f: Option<String>,
}
