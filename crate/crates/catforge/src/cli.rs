use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "catforge",
    version,
    about = "Squeezed-cat fidelities from photon subtraction and addition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity of one scheme with one squeezed cat.
    Fidelity(FidelityArgs),
    /// Sweep curves for a figure, plus a manifest.
    Figure(FigureArgs),
    /// Sample a Wigner function on a grid.
    Wigner(WignerArgs),
    /// Cross-check the back-ends against each other.
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// `key=value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub common: Common,
    /// tpss, psas, realistic-tpss or realistic-psas.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rprime: Option<f64>,
    /// Tap transmissivity.
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Amplifier gain.
    #[arg(long = "G")]
    pub g: Option<f64>,
    /// Detector efficiency.
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct FigureArgs {
    #[command(flatten)]
    pub common: Common,
    /// 1, 2, 5, 6, 7, 8 or 9.
    #[arg(long)]
    pub id: Option<u32>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long = "G")]
    pub g: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub rprime_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rprime_max: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Effective parameter `T tanh|r|` (figure 9).
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    /// Fixed target squeezing (figure 9).
    #[arg(long, allow_negative_numbers = true)]
    pub rprime: Option<f64>,
    #[arg(long)]
    pub n_min: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Phase-space grid step (figure 9).
    #[arg(long)]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct WignerArgs {
    #[command(flatten)]
    pub common: Common,
    /// tpss, psas, sscs, npss or realistic.
    #[arg(long)]
    pub state: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rprime: Option<f64>,
    /// even or odd (sscs).
    #[arg(long)]
    pub parity: Option<String>,
    /// Photons subtracted (npss).
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    /// tpss or psas coupler chain (realistic).
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long = "G")]
    pub g: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Grid spans `[−x_max, x_max]`.
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// fast or full.
    #[arg(long)]
    pub level: Option<String>,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
