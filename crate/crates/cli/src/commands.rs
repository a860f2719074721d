use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use roadsight_core::cloud::build_scene;
use roadsight_core::config::WorkbenchConfig;
use roadsight_core::demand::fill_required;
use roadsight_core::diagnosis::{export_report, find_deficits, DeficitReport, ReportFiles};
use roadsight_core::io::{read_cloud, read_mesh, write_cloud, write_mesh};
use roadsight_core::road::{read_trajectory_csv, write_trajectory_csv, Trajectory};
use roadsight_core::sight::{station_grid, sweep, OcclusionIndex, SweepMode, TargetSpec, VisibilityProfile};
use roadsight_core::synth::{self, Corridor};
use roadsight_core::Execution;

use crate::args::{BuildSceneArgs, Command, DiagnoseArgs, ModeArg, SynthArgs, SynthKind, TargetArg};
use crate::failure::{CliError, CliResult};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::BuildScene(args) => build_scene_cmd(&args).map(|_| ()),
        Command::Diagnose(args) => diagnose(&args).map(|_| ()),
        Command::Synth(args) => synth_cmd(&args).map(|_| ()),
        Command::Serve(args) => crate::serve::run(&args),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn load_config(path: Option<&Path>) -> CliResult<WorkbenchConfig> {
    Ok(match path {
        Some(p) => WorkbenchConfig::load(p)?,
        None => WorkbenchConfig::default(),
    })
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        context: dir.display().to_string(),
        source,
    })
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        context: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone)]
pub struct SceneOutputs {
    pub mesh: PathBuf,
    pub report: PathBuf,
}

pub fn build_scene_cmd(args: &BuildSceneArgs) -> CliResult<SceneOutputs> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(k) = args.keep_every {
        config.pipeline.keep_every = k;
    }
    if let Some(seed) = args.seed {
        config.pipeline.planes.seed = seed;
    }
    config.pipeline.validate()?;
    let cloud = read_cloud(&args.cloud)?;
    let traj = read_trajectory_csv(&args.traj)?;
    let (mesh, report) = build_scene(&cloud, &traj, &config.pipeline, execution(args.sequential))?;
    create_dir(&args.out)?;
    let outputs = SceneOutputs {
        mesh: args.out.join(format!("scene.{}", args.format.extension())),
        report: args.out.join("pipeline_report.json"),
    };
    write_mesh(&mesh, &outputs.mesh)?;
    write_json(&outputs.report, &report)?;
    println!(
        "{} points -> {} triangles in {} plane regions; wrote {}",
        report.input_points,
        report.triangles,
        report.regions.len(),
        outputs.mesh.display()
    );
    Ok(outputs)
}

/// Loads a trajectory and fills curvature/grade when the file lacks them.
pub fn load_trajectory(path: &Path, window: f64) -> CliResult<Trajectory> {
    let traj = read_trajectory_csv(path)?;
    Ok(if traj.has_geometry() {
        traj
    } else {
        traj.estimate_geometry(window)?
    })
}

#[derive(Debug, Clone)]
pub struct DiagnoseOutputs {
    pub files: ReportFiles,
    pub profile: VisibilityProfile,
    pub deficits: DeficitReport,
}

pub fn diagnose(args: &DiagnoseArgs) -> CliResult<DiagnoseOutputs> {
    let Some(config_path) = args.config.as_deref() else {
        return Err(CliError::Usage(
            "--config is required: diagnose needs a `demand` section (base_v85) to compute required distances".into(),
        ));
    };
    let mut config = WorkbenchConfig::load(config_path)?;
    let demand = config
        .demand
        .clone()
        .ok_or_else(|| CliError::Usage(format!("--config {}: missing `demand` section (base_v85 is required)", config_path.display())))?;
    let sweep_cfg = &mut config.sweep;
    if let Some(d) = &args.distances {
        sweep_cfg.distances = d.clone();
        sweep_cfg.mode = SweepMode::Fixed;
    }
    match args.mode {
        Some(ModeArg::Fixed) => sweep_cfg.mode = SweepMode::Fixed,
        Some(ModeArg::Max) => sweep_cfg.mode = SweepMode::Max,
        None => {}
    }
    if let Some(step) = args.step {
        sweep_cfg.search_step = step;
    }
    if let Some(cap) = args.cap {
        sweep_cfg.cap = cap;
    }
    if let Some(step) = args.station_step {
        sweep_cfg.station_step = step;
    }
    match args.target {
        Some(TargetArg::Box) if !matches!(sweep_cfg.target, TargetSpec::Box { .. }) => {
            sweep_cfg.target = TargetSpec::vehicle_box()
        }
        Some(TargetArg::PointPair) if !matches!(sweep_cfg.target, TargetSpec::PointPair { .. }) => {
            sweep_cfg.target = TargetSpec::point_pair()
        }
        _ => {}
    }
    sweep_cfg.execution = execution(args.sequential);
    config.validate()?;

    let mesh = read_mesh(&args.mesh)?;
    let traj = load_trajectory(&args.traj, config.geometry_window)?;
    let index = OcclusionIndex::build(&mesh);
    let stations = station_grid(&traj, config.sweep.station_step)?;
    let mut profile = sweep(&index, &traj, &stations, &config.sweep)?;
    fill_required(&mut profile, &traj, &demand)?;
    let deficits = find_deficits(&profile)?;
    let files = export_report(&profile, &deficits, &args.out)?;
    println!(
        "{} stations, {} deficit segment(s), {} braking-infeasible station(s); wrote {}",
        profile.len(),
        deficits.segments.len(),
        deficits.infeasible_stations.len(),
        args.out.display()
    );
    Ok(DiagnoseOutputs {
        files,
        profile,
        deficits,
    })
}

#[derive(Debug, Clone)]
pub struct SynthOutputs {
    pub manifest: PathBuf,
    pub manifest_value: Value,
}

fn write_corridor(corridor: &Corridor, out: &Path) -> CliResult<Value> {
    create_dir(out)?;
    write_mesh(&corridor.mesh, &out.join("scene.ply"))?;
    write_trajectory_csv(&corridor.trajectory, &out.join("trajectory.csv"))?;
    write_cloud(&corridor.cloud, &out.join("cloud.csv"))?;
    let profiles = corridor
        .cloud
        .profile_ids
        .as_ref()
        .map(|ids| ids.iter().max().map_or(0, |m| *m as usize + 1))
        .unwrap_or(0);
    Ok(json!({
        "files": {
            "mesh": "scene.ply",
            "trajectory": "trajectory.csv",
            "cloud": "cloud.csv",
        },
        "counts": {
            "triangles": corridor.mesh.triangle_count(),
            "vertices": corridor.mesh.vertices.len(),
            "cloud_points": corridor.cloud.len(),
            "profiles": profiles,
            "stations": corridor.trajectory.len(),
        },
        "s_range": [corridor.trajectory.s_start(), corridor.trajectory.s_end()],
    }))
}

pub fn synth_cmd(args: &SynthArgs) -> CliResult<SynthOutputs> {
    let (out, mut manifest) = match &args.kind {
        SynthKind::Straight(a) => {
            let c = synth::gen_straight(a.length, a.width, a.spacing)?;
            let mut m = write_corridor(&c, &a.out)?;
            m["kind"] = json!("straight");
            m["parameters"] = json!({"length": a.length, "width": a.width, "spacing": a.spacing});
            (a.out.clone(), m)
        }
        SynthKind::Crest(a) => {
            let c = synth::gen_crest(a.rv, a.length, a.width, a.spacing)?;
            let mut m = write_corridor(&c.corridor, &a.out)?;
            m["kind"] = json!("crest");
            m["parameters"] = json!({"rv": a.rv, "length": a.length, "width": a.width, "spacing": a.spacing});
            m["eye_height"] = json!(a.eye_height);
            m["target_height"] = json!(a.target_height);
            m["oracle_S"] = json!(c.oracle(a.eye_height, a.target_height));
            m["summit_s"] = json!(c.summit_s);
            (a.out.clone(), m)
        }
        SynthKind::Bend(a) => {
            let b = synth::gen_bend_wall(a.radius, a.m, a.wall_height, a.arc_length, a.width, a.spacing)?;
            let mut m = write_corridor(&b.corridor, &a.out)?;
            m["kind"] = json!("bend");
            m["parameters"] = json!({
                "radius": a.radius, "m": a.m, "wall_height": a.wall_height,
                "arc_length": a.arc_length, "width": a.width, "spacing": a.spacing,
            });
            m["oracle_S"] = json!(b.oracle());
            (a.out.clone(), m)
        }
    };
    manifest["generator_version"] = json!(env!("CARGO_PKG_VERSION"));
    let path = out.join("manifest.json");
    write_json(&path, &manifest)?;
    println!("wrote {}", path.display());
    Ok(SynthOutputs {
        manifest: path,
        manifest_value: manifest,
    })
}
