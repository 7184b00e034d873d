use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Essential quantum correlations of two-mode light.
#[derive(Debug, Parser)]
#[command(name = "essq", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// State as a JSON file or inline JSON, e.g. '{"kind":"tmsv","xi":0.55}'.
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Fock cutoff per mode; overrides the cutoff in the state JSON.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Omit the `# generated_unix=` line from CSV files.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate M(t e; tau) over directions x t-values x tau-values.
    Mgf(MgfArgs),
    /// The map e -> M(t e; tau) e over a latitude-longitude sphere grid.
    Surface(SurfaceArgs),
    /// Second-order determinant of |1,1> versus splitter transmissivity.
    HomScan(HomScanArgs),
    /// Second-order determinant of the two-mode squeezed vacuum.
    TmsvScan(TmsvScanArgs),
    /// Run the nonclassicality criteria on one state and direction.
    Nctest(NctestArgs),
    /// Click statistics, recovered moments and optional sampling.
    Clicks(ClicksArgs),
    /// Invert the MGF to a phase-space density on a Stokes grid.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MgfArgs {
    /// Direction `x,y,z` (repeatable, renormalized).
    #[arg(long = "e", value_name = "X,Y,Z", allow_hyphen_values = true, default_values_t = ["0,0,1".to_string()])]
    pub directions: Vec<String>,
    /// Comma-separated t values; complex as `a+bi`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: String,
    /// Comma-separated tau values, or `start:stop:count`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub tau: String,
    /// Skip points with |Re t| > tau.
    #[arg(long)]
    pub existence_only: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub t: String,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 32)]
    pub n_theta: usize,
    #[arg(long, default_value_t = 64)]
    pub n_phi: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HomScanArgs {
    /// Transmissivities |T|^2, comma list or `start:stop:count`.
    #[arg(long, default_value = "0:1:41", allow_hyphen_values = true)]
    pub t2: String,
    /// Amplitudes t; defaults to sqrt2, sqrt3, 2.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TmsvScanArgs {
    #[arg(long = "tanh-xi", default_value = "0.05:0.95:19", allow_hyphen_values = true)]
    pub tanh_xi: String,
    #[arg(long, default_value = "0.05:0.5:10", allow_hyphen_values = true)]
    pub tau: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NctestArgs {
    #[arg(long = "e", value_name = "X,Y,Z", default_value = "0,0,1", allow_hyphen_values = true)]
    pub direction: String,
    /// Matrix points `t:tau` separated by `;`, e.g. `0:0;1.7:0`.
    #[arg(long, default_value = "0:0;1:0", allow_hyphen_values = true)]
    pub points: String,
    /// Wave vector for the characteristic-function test.
    #[arg(long, value_name = "X,Y,Z", default_value = "0,0,1", allow_hyphen_values = true)]
    pub k: String,
    /// Verdict tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClicksArgs {
    #[arg(long = "e", value_name = "X,Y,Z", default_value = "0,0,1", allow_hyphen_values = true)]
    pub direction: String,
    #[arg(long, default_value_t = 4)]
    pub da: usize,
    #[arg(long, default_value_t = 4)]
    pub db: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eta_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_b: f64,
    #[arg(long, default_value_t = 0.0)]
    pub nu_a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub nu_b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps_b: f64,
    /// Draw this many click events and estimate the moments from them.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Keep the dark-count factor in the recovered moments.
    #[arg(long)]
    pub no_dark_correction: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowArg {
    Hann,
    None,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconstructArgs {
    /// Coherent ensemble as JSON file or inline JSON; alternative to --state.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Grid centre `x,y,z`; defaults to the mean Stokes vector.
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub center: Option<String>,
    /// Half-width of the cubic grid; defaults to a width covering the source.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Points per axis (even, >= 8).
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Converging factor; defaults to 1 / (2 S_max).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = WindowArg::Hann)]
    pub window: WindowArg,
    /// Samples for the Monte-Carlo oracle (coherent ensembles only; 0 skips).
    #[arg(long, default_value_t = 1_000_000)]
    pub oracle_samples: u64,
    /// Negativity tolerance relative to the peak for the classicality flag.
    #[arg(long, default_value_t = 0.02)]
    pub classicality_tol: f64,
}
