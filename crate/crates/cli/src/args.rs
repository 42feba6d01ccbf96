use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pf", version, about = "Particle-field spectra, trajectories and invariance checks")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` file; keys mirror the long flags, flags win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "natural")]
    pub units: Units,

    /// Speed of light override (SI only)
    #[arg(long, global = true)]
    pub c: Option<f64>,

    /// Reduced Planck constant override (SI only)
    #[arg(long, global = true)]
    pub hbar: Option<f64>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary spectrum of a box or a sampled potential
    Spectrum(SpectrumArgs),
    /// Classical particle trajectory with the PF coordinate q
    Trajectory(TrajectoryArgs),
    /// Randomized check of the interval matching across frames
    LorentzCheck(LorentzArgs),
    /// Non-relativistic and photon limit tables
    Limits(LimitsArgs),
}

pub const COMMAND_NAMES: [&str; 4] = ["spectrum", "trajectory", "lorentz-check", "limits"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    MassDependent,
    MassIndependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Auto,
    Analytic,
    Fd,
    Shooting,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Infinite square well on [0, a]
    #[arg(long = "box", conflicts_with = "potential", required_unless_present = "potential", requires = "a")]
    pub infinite_box: bool,

    /// Box width
    #[arg(long, value_parser = parse_length)]
    pub a: Option<f64>,

    /// Two-column `x,V` CSV with the potential
    #[arg(long, value_name = "CSV")]
    pub potential: Option<PathBuf>,

    /// Domain bounds for a sampled potential (default: its sample range)
    #[arg(long, value_parser = parse_length, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, value_parser = parse_length, allow_negative_numbers = true)]
    pub hi: Option<f64>,

    /// Rest mass
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,

    #[arg(long, default_value_t = 3)]
    pub levels: usize,

    #[arg(long, value_enum, default_value = "mass-independent")]
    pub form: Form,

    #[arg(long, value_enum, default_value = "auto")]
    pub solver: Solver,

    /// Grid points including both walls
    #[arg(long, default_value_t = pf_core::spectral::DEFAULT_GRID_SIZE)]
    pub grid: usize,

    /// Shooting boundary-residual tolerance
    #[arg(long, default_value_t = pf_core::spectral::DEFAULT_SHOOTING_TOLERANCE)]
    pub tol: f64,

    /// Shooting energy window (default: searched automatically)
    #[arg(long, requires = "bracket_hi", allow_negative_numbers = true)]
    pub bracket_lo: Option<f64>,
    #[arg(long, requires = "bracket_lo", allow_negative_numbers = true)]
    pub bracket_hi: Option<f64>,

    /// Directory for per-level `x,chi` dumps
    #[arg(long, value_name = "DIR")]
    pub eigenfields: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldPreset {
    Zero,
    Linear,
    Sine,
    Box,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForcePreset {
    Free,
    Harmonic,
    Constant,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, value_enum, default_value = "zero")]
    pub field: FieldPreset,

    /// Two-column `x,chi` CSV for the sampled field
    #[arg(long, value_name = "CSV", required_if_eq("field", "sampled"))]
    pub profile: Option<PathBuf>,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub slope: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub wavenumber: f64,
    /// Box eigenfield index
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    /// Box width
    #[arg(long, value_parser = parse_length, default_value = "pi")]
    pub a: f64,
    /// Domain of the analytic presets other than the box
    #[arg(long, value_parser = parse_length, default_value = "-10", allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, value_parser = parse_length, default_value = "10", allow_negative_numbers = true)]
    pub hi: f64,

    #[arg(long, value_enum, default_value = "free")]
    pub force: ForcePreset,
    #[arg(long, default_value_t = 1.0)]
    pub stiffness: f64,
    #[arg(long, value_parser = parse_length, default_value = "0", allow_negative_numbers = true)]
    pub center: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub force_value: f64,

    #[arg(long, value_parser = parse_length, default_value = "0", allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub v0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// PF coupling factor
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Origin of q (default: left edge of the field's domain)
    #[arg(long, value_parser = parse_length, allow_negative_numbers = true)]
    pub x_ref: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LorentzArgs {
    /// Overridden by PF_SEED when set
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 10_000)]
    pub high_gamma_samples: usize,
    #[arg(long, default_value_t = 0.9)]
    pub max_speed: f64,
    #[arg(long, default_value_t = 0.1)]
    pub max_slope: f64,
    #[arg(long, default_value_t = 10.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 1e6)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Nonrel,
    Photon,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(value_enum)]
    pub family: Family,

    /// Box width (nonrel)
    #[arg(long, value_parser = parse_length, default_value = "pi")]
    pub a: f64,
    /// Levels per mass (nonrel)
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    /// Rest masses (nonrel)
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub m0: Vec<f64>,
    /// Particle Lorentz factors (photon)
    #[arg(long, value_delimiter = ',', default_value = "1e3,1e6,1e9")]
    pub gamma_p: Vec<f64>,
    /// Field slopes (photon)
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,2", allow_negative_numbers = true)]
    pub chi_slope: Vec<f64>,
}

/// A length: a number, or a multiple or fraction of `pi` such as `pi`,
/// `2pi`, `pi/2` or `3*pi/4`.
pub fn parse_length(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(['*', ' '], "");
    let bad = || format!("expected a number or a multiple of pi, got {s:?}");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coefficient = match &t[..at] {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match &t[at + 2..] {
        "" => 1.0,
        rest => rest
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .ok_or_else(bad)?,
    };
    Ok(coefficient * std::f64::consts::PI / divisor)
}
