use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zenodark::application::{DICKE_M_A, DICKE_M_B, DICKE_THETA_1};
use zenodark::dynamics::{DEFAULT_STEPS_PER_UNIT_TIME, DEFAULT_TIME_SCALE};
use zenodark::holonomy::{DEFAULT_INITIAL_STEPS, DEFAULT_MAX_STEPS, DEFAULT_TOLERANCE};
use zenodark::subspace::DEFAULT_DECOUPLING_SEED;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ZENODARK_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "zenodark",
    version,
    about = "Dark-subspace holonomy experiments"
)]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file, or a directory to receive `<command>.<ext>`.
    /// Falls back to $ZENODARK_OUT_DIR, then stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    /// Suppress the one-line summary on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// List the sector basis.
    Basis(SectorArgs),
    /// Zeno frame (kernel of the cavity coupling, decoupled part removed).
    Zeno(ZenoArgs),
    /// Dark frame at one control point.
    Dark(DarkArgs),
    /// Zero-energy and dark dimensions over a range of sectors.
    Degeneracy(DegeneracyArgs),
    /// Holonomy of a path, by transport and/or closed form.
    Holonomy(HolonomyArgs),
    /// Bloch points reached by random generator words.
    Universality(UniversalityArgs),
    /// Pauli X from repeated W sequences.
    SynthX(SynthXArgs),
    /// Dicke-state preparation by W'.
    Dicke(DickeArgs),
    /// Fidelity versus g: full, Zeno, holonomic and no-phi columns.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Basis(_) => "basis",
            Command::Zeno(_) => "zeno",
            Command::Dark(_) => "dark",
            Command::Degeneracy(_) => "degeneracy",
            Command::Holonomy(_) => "holonomy",
            Command::Universality(_) => "universality",
            Command::SynthX(_) => "synth-x",
            Command::Dicke(_) => "dicke",
            Command::Sweep(_) => "sweep",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Basis(_)
            | Command::Degeneracy(_)
            | Command::Universality(_)
            | Command::SynthX(_)
            | Command::Sweep(_) => Format::Csv,
            Command::Zeno(_) | Command::Dark(_) | Command::Holonomy(_) | Command::Dicke(_) => {
                Format::Json
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct SectorArgs {
    /// Number of atoms.
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    /// Atoms in subensemble A (also the excitation number).
    #[arg(long, default_value_t = 2)]
    pub p: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZenoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    /// Cavity coupling g/Omega.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Seed of the random draws that detect decoupled directions.
    #[arg(long, default_value_t = DEFAULT_DECOUPLING_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DarkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Mixing angle; accepts literals such as `pi/4`.
    #[arg(long, default_value = "pi/4", value_parser = angle)]
    pub theta: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub phi_a: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub phi_b: f64,
    /// Rabi scale Omega.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DegeneracyArgs {
    #[arg(long, default_value_t = 6)]
    pub n_max: u32,
    #[arg(long, default_value_t = 6)]
    pub p_max: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Transport,
    Closed,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransportArgs {
    /// Starting steps per segment for refinement.
    #[arg(long, default_value_t = DEFAULT_INITIAL_STEPS)]
    pub initial_steps: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    /// Stop doubling when successive refinements differ by less than this.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Rotate the internal step frames at random (results must not change).
    #[arg(long)]
    pub gauge_seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HolonomyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    /// Path program, e.g. `theta:0->pi/4; phi:ma=1,mb=0@theta=pi/4`.
    #[arg(long, default_value = "")]
    pub path: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Transport)]
    pub method: MethodArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub transport: TransportArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UniversalityArgs {
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 30)]
    pub max_len: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Cells of the equal-area partition used for the fill fraction.
    #[arg(long, default_value_t = 200)]
    pub cells: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthXArgs {
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub m_a: i64,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub m_b: i64,
    #[arg(long, default_value_t = 200)]
    pub max_reps: usize,
    /// Bisection tolerance for theta_1*.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrepMethod {
    Transport,
    Closed,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DickeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    #[arg(long, default_value_t = DICKE_M_A, allow_hyphen_values = true)]
    pub m_a: i64,
    #[arg(long, default_value_t = DICKE_M_B, allow_hyphen_values = true)]
    pub m_b: i64,
    #[arg(long, default_value_t = DICKE_THETA_1, value_parser = angle)]
    pub theta1: f64,
    #[arg(long, value_enum, default_value_t = PrepMethod::Transport)]
    pub method: PrepMethod,
    /// Rank all windings in [-m, m] on a theta grid instead (closed form).
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 25)]
    pub m_range: i64,
    /// Lower end of the theta_1 search grid.
    #[arg(long, default_value = "0.05", value_parser = angle)]
    pub theta_lo: f64,
    #[arg(long, default_value = "1.52", value_parser = angle)]
    pub theta_hi: f64,
    /// Grid points in [theta_lo, theta_hi].
    #[arg(long, default_value_t = 148)]
    pub grid: usize,
    /// Rows kept in the search output.
    #[arg(long, default_value_t = 50)]
    pub top: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocationArg {
    Proportional,
    SqrtArc,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Linear,
    Smootherstep,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    /// Comma-separated g/Omega values.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub g_list: Vec<f64>,
    /// Total time is `time_scale / g`.
    #[arg(long, default_value_t = DEFAULT_TIME_SCALE)]
    pub time_scale: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_UNIT_TIME)]
    pub steps_per_unit_time: f64,
    /// Main path; defaults to W'(-24,1;0.669).
    #[arg(long)]
    pub path: Option<String>,
    #[arg(long, value_enum, default_value_t = AllocationArg::SqrtArc)]
    pub allocation: AllocationArg,
    #[arg(long, value_enum, default_value_t = ProfileArg::Smootherstep)]
    pub profile: ProfileArg,
}

fn angle(s: &str) -> Result<f64, String> {
    zenodark::holonomy::parse_angle(s).map_err(|e| e.to_string())
}
