use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drcw_core::analysis::PrslNorm;
use drcw_core::nullspec::DopplerNull;
use drcw_core::sequences::WindowKind;

/// Design and evaluate Doppler-resilient complementary waveforms.
#[derive(Debug, Parser)]
#[command(name = "drcw", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed for randomized rounding.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Doppler grid points for metrics and curves (default 8192, or the
    /// document's own setting for `analyze`).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Randomized rounding trials.
    #[arg(long, global = true, default_value_t = drcw_core::design::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Relative duality gap at which the SDP solver stops.
    #[arg(long, global = true, default_value_t = drcw_core::sdp::DEFAULT_TOL)]
    pub tol: f64,
    /// Output file (`design`, `table`, `verify`) or directory (`analyze`).
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Use the literal `1 - z cos(theta) + z^2` factor for Doppler nulls.
    #[arg(long = "legacy-eq11", global = true)]
    pub legacy: bool,
    /// PRSL reference level [default: global, or the document's own setting
    /// for `analyze`].
    #[arg(long, global = true, value_enum)]
    pub prsl_norm: Option<NormArg>,
    /// SDP iteration budget.
    #[arg(long, global = true, default_value_t = drcw_core::sdp::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Write the SDP iteration trace to this CSV file.
    #[arg(long, global = true)]
    pub sdp_trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Global,
    PerDoppler,
}

impl From<NormArg> for PrslNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Global => PrslNorm::Global,
            NormArg::PerDoppler => PrslNorm::PerDoppler,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Nm,
    Ptm,
    Bd,
    Uniform,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a design and write it as a JSON document.
    Design(DesignArgs),
    /// Export CAF, PRSL and Doppler-profile curves of a design document.
    Analyze(AnalyzeArgs),
    /// Metrics table over zero-Doppler null orders and windows.
    Table(TableArgs),
    /// Check Golay complementarity or a design document.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(value_enum)]
    pub method: MethodArg,
    /// Number of pulses.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    /// Golay sequence length.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Null order at zero Doppler (nm only).
    #[arg(long, default_value_t = 20)]
    pub k0: usize,
    /// Extra Doppler null as ANGLE:ORDER, e.g. `0.8pi:4` or `2.5rad:2` (nm only).
    #[arg(long = "null", value_parser = parse_null)]
    pub nulls: Vec<DopplerNull>,
    /// Window template (nm only).
    #[arg(long, default_value = "hamming", value_parser = parse_window)]
    pub window: WindowKind,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Design document.
    pub document: PathBuf,
    /// Doppler points of the CAF export.
    #[arg(long, default_value_t = 1024)]
    pub caf_grid: usize,
    /// Also render SVG plots next to the CSV files.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Zero-Doppler null orders, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "10,15,20,25,30,35,40")]
    pub k0: Vec<usize>,
    /// Windows, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_window, default_value = "hamming,rectangular")]
    pub windows: Vec<WindowKind>,
    /// Number of pulses.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    /// Golay sequence length.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check the generated Golay pair of this length.
    #[arg(long, conflicts_with = "document")]
    pub golay: Option<usize>,
    /// Design document to check.
    #[arg(required_unless_present = "golay")]
    pub document: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<WindowKind, String> {
    s.parse().map_err(|e: drcw_core::Error| e.to_string())
}

/// Angle in multiples of pi (`0.8pi`) or radians (`2.51rad`).
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (value, scale) = if let Some(v) = s.strip_suffix("pi") {
        (v, PI)
    } else if let Some(v) = s.strip_suffix("rad") {
        (v, 1.0)
    } else {
        return Err(format!("angle `{s}` needs a unit suffix: `pi` or `rad`"));
    };
    let value = if value.is_empty() { "1" } else { value };
    let x: f64 = value
        .parse()
        .map_err(|_| format!("angle `{s}` is not a number followed by `pi` or `rad`"))?;
    Ok(x * scale)
}

pub fn parse_null(s: &str) -> Result<DopplerNull, String> {
    let (angle, order) = s
        .split_once(':')
        .ok_or_else(|| format!("null `{s}` must be ANGLE:ORDER, e.g. 0.8pi:4"))?;
    let theta = parse_angle(angle)?;
    let order = order
        .trim()
        .parse()
        .map_err(|_| format!("null order `{order}` is not a nonnegative integer"))?;
    Ok(DopplerNull { theta, order })
}
