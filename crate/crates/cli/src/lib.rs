//! Library side of the `meanmotion` command: input files, reports and subcommands.

pub mod commands;
pub mod input;
pub mod report;

use std::path::PathBuf;

use clap::{Args, ValueEnum};

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub numerical: bool,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            numerical: false,
        }
    }

    /// Wrap a library error, prefixed with the stage that raised it.
    pub fn core(stage: &str, err: meanmotion::Error) -> Self {
        Self {
            numerical: !err.is_validation(),
            message: format!("{stage}: {err}"),
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.numerical {
            3
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Closed,
    Bww,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Horizon for the zero count.
    #[arg(long = "T")]
    pub horizon: f64,
    /// Horizons for the empirical rate; defaults to T.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the quadrature tolerance from the input file.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "T-max")]
    pub t_max: f64,
    /// Smallest horizon; defaults to T-max / points.
    #[arg(long = "T-min")]
    pub t_min: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub spacing: Spacing,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args)]
pub struct WvolumeArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub amps: Vec<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    /// Required with `--method mc`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args)]
pub struct ZerosArgs {
    /// Problem file; alternative to --freqs/--amps.
    #[arg(long, conflicts_with_all = ["freqs", "amps"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', requires = "amps")]
    pub freqs: Vec<f64>,
    /// Real amplitudes, one per frequency.
    #[arg(long, value_delimiter = ',', requires = "freqs", allow_negative_numbers = true)]
    pub amps: Vec<f64>,
    #[arg(long = "T")]
    pub horizon: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args)]
pub struct BesselArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=1))]
    pub order: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    /// Also evaluate the integral-representation oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "T")]
    pub horizon: f64,
    /// Integration step; defaults to 0.01/λ_max.
    #[arg(long)]
    pub h: Option<f64>,
    /// Initial state; defaults to the origin.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Vec<f64>,
    /// Emit every n-th trajectory point (the final point is always kept).
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

