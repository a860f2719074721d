use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "roadsight", version, about = "Sight-distance diagnostics on road-corridor scans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simplify a point cloud into a scene mesh.
    BuildScene(BuildSceneArgs),
    /// Sweep available sight distance, compare with demand, report deficits.
    Diagnose(DiagnoseArgs),
    /// Generate a synthetic corridor with its closed-form sight distance.
    Synth(SynthArgs),
    /// Serve scene, profile and on-demand visibility queries over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Ply,
    Obj,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Ply => "ply",
            MeshFormat::Obj => "obj",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fixed,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    PointPair,
    Box,
}

#[derive(Debug, Args)]
pub struct BuildSceneArgs {
    /// Point cloud (.ply, or XYZ CSV).
    #[arg(long)]
    pub cloud: PathBuf,
    /// Trajectory CSV.
    #[arg(long)]
    pub traj: PathBuf,
    /// Run configuration JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub keep_every: Option<usize>,
    /// RANSAC seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "ply")]
    pub format: MeshFormat,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Run on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Scene mesh (.ply or .obj).
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub traj: PathBuf,
    /// Run configuration JSON; must contain a `demand` section.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Comma-separated fixed distances (m); implies `--mode fixed`.
    #[arg(long, value_delimiter = ',')]
    pub distances: Option<Vec<f64>>,
    /// Search step of the max-distance mode (m).
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub cap: Option<f64>,
    /// Spacing of the swept stations (m).
    #[arg(long)]
    pub station_step: Option<f64>,
    #[arg(long, value_enum)]
    pub target: Option<TargetArg>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: SynthKind,
}

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Flat straight road.
    Straight(StraightArgs),
    /// Parabolic crest vertical curve.
    Crest(CrestArgs),
    /// Circular bend with a wall inside the curve.
    Bend(BendArgs),
}

#[derive(Debug, Args)]
pub struct StraightArgs {
    #[arg(long, default_value_t = 1000.0)]
    pub length: f64,
    #[arg(long, default_value_t = 7.0)]
    pub width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CrestArgs {
    /// Vertical radius (m).
    #[arg(long, default_value_t = 2000.0)]
    pub rv: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub length: f64,
    #[arg(long, default_value_t = 7.0)]
    pub width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    /// Eye height used for the oracle (m).
    #[arg(long, default_value_t = 1.0)]
    pub eye_height: f64,
    /// Target height used for the oracle (m).
    #[arg(long, default_value_t = 0.6)]
    pub target_height: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BendArgs {
    /// Curve radius (m).
    #[arg(long, default_value_t = 200.0)]
    pub radius: f64,
    /// Wall offset inside the curve (m).
    #[arg(long, default_value_t = 4.0)]
    pub m: f64,
    #[arg(long, default_value_t = 3.0)]
    pub wall_height: f64,
    #[arg(long, default_value_t = 400.0)]
    pub arc_length: f64,
    #[arg(long, default_value_t = 7.0)]
    pub width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub traj: PathBuf,
    /// Profile JSON written by `diagnose`.
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of static UI assets.
    #[arg(long)]
    pub assets: Option<PathBuf>,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
}
