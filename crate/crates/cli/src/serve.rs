//! Read-only HTTP layer over pre-loaded artefacts.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use roadsight_core::config::WorkbenchConfig;
use roadsight_core::io::read_mesh;
use roadsight_core::mesh::SceneMesh;
use roadsight_core::road::{read_trajectory_csv, Trajectory};
use roadsight_core::sight::{BoxDims, OcclusionIndex, SightContext, TargetSpec};

use crate::args::ServeArgs;
use crate::failure::{CliError, CliResult};

/// Triangle budget of `/api/scene` when none is given.
pub const DEFAULT_SCENE_BUDGET: usize = 50_000;

pub struct AppState {
    pub mesh: SceneMesh,
    pub index: OcclusionIndex,
    pub traj: Trajectory,
    pub profile: Value,
    pub config: WorkbenchConfig,
}

impl AppState {
    pub fn new(mesh: SceneMesh, traj: Trajectory, profile: Value, config: WorkbenchConfig) -> Self {
        let index = OcclusionIndex::build(&mesh);
        AppState {
            mesh,
            index,
            traj,
            profile,
            config,
        }
    }

    pub fn load(mesh: &Path, traj: &Path, profile: &Path, config: Option<&Path>) -> CliResult<Self> {
        let config = match config {
            Some(p) => WorkbenchConfig::load(p)?,
            None => WorkbenchConfig::default(),
        };
        config.validate()?;
        let text = std::fs::read_to_string(profile).map_err(|source| CliError::Io {
            context: profile.display().to_string(),
            source,
        })?;
        let profile_json: Value = serde_json::from_str(&text).map_err(|source| roadsight_core::Error::Json {
            context: profile.display().to_string(),
            source,
        })?;
        Ok(AppState::new(read_mesh(mesh)?, read_trajectory_csv(traj)?, profile_json, config))
    }
}

pub fn router(state: Arc<AppState>, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/profile", get(profile))
        .route("/api/scene", get(scene))
        .route("/api/visibility", get(visibility))
        .route("/api/meta", get(meta))
        .with_state(state);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}

pub fn run(args: &ServeArgs) -> CliResult<()> {
    let state = Arc::new(AppState::load(&args.mesh, &args.traj, &args.profile, args.config.as_deref())?);
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .map_err(|_| CliError::Usage(format!("--host {}: not an IP address", args.host)))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|source| CliError::Io {
            context: format!("binding {addr}"),
            source,
        })?;
        println!("serving on http://{addr}");
        axum::serve(listener, router(state, args.assets.clone()))
            .await
            .map_err(|source| CliError::Io {
                context: "serving".into(),
                source,
            })
    })
}

struct ApiError {
    status: StatusCode,
    field: Option<&'static str>,
    message: String,
}

impl ApiError {
    fn bad_field(field: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            field: Some(field),
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            field: None,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.message, "field": self.field}))).into_response()
    }
}

type Params = Query<HashMap<String, String>>;

fn number(params: &HashMap<String, String>, field: &'static str) -> Result<f64, ApiError> {
    let raw = params
        .get(field)
        .ok_or_else(|| ApiError::bad_field(field, format!("missing query parameter `{field}`")))?;
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ApiError::bad_field(field, format!("`{field}` must be a finite number, got {raw:?}"))),
    }
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        field: None,
        message: "no such resource".into(),
    }
}

async fn profile(State(state): State<Arc<AppState>>) -> Json<Value> {
    Json(state.profile.clone())
}

async fn scene(State(state): State<Arc<AppState>>, Query(params): Params) -> Result<Json<Value>, ApiError> {
    let budget = match params.get("budget") {
        None => DEFAULT_SCENE_BUDGET,
        Some(raw) => raw
            .trim()
            .parse::<usize>()
            .map_err(|_| ApiError::bad_field("budget", format!("`budget` must be a nonnegative integer, got {raw:?}")))?,
    };
    let sub = state.mesh.subsample(budget);
    let arrays = sub.to_arrays();
    Ok(Json(json!({
        "total_triangles": state.mesh.triangle_count(),
        "triangles": sub.triangle_count(),
        "vertices": arrays.vertices,
        "indices": arrays.indices,
    })))
}

async fn visibility(State(state): State<Arc<AppState>>, Query(params): Params) -> Result<Json<Value>, ApiError> {
    let s = number(&params, "s")?;
    let d = number(&params, "d")?;
    let target = match params.get("target").map(String::as_str) {
        None => state.config.sweep.target,
        Some("box") => match state.config.sweep.target {
            t @ TargetSpec::Box { .. } => t,
            TargetSpec::PointPair { .. } => TargetSpec::vehicle_box(),
        },
        Some("point_pair") => match state.config.sweep.target {
            t @ TargetSpec::PointPair { .. } => t,
            TargetSpec::Box { .. } => TargetSpec::point_pair(),
        },
        Some(other) => {
            return Err(ApiError::bad_field("target", format!("unknown target {other:?} (box or point_pair)")))
        }
    };
    let result = tokio::task::spawn_blocking(move || {
        let ctx = SightContext {
            index: &state.index,
            traj: &state.traj,
            observer: state.config.sweep.observer,
            target,
            density: state.config.sweep.density,
        };
        let check = ctx.check(s, d)?;
        let fraction = match check.fraction {
            Some(f) => Some(f),
            None => ctx.box_fraction(s, d, &BoxDims::default())?,
        };
        Ok::<_, roadsight_core::Error>(json!({
            "s": s,
            "d": d,
            "in_range": check.in_range,
            "visible": check.visible,
            "fraction": fraction,
            "target": target,
        }))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
    .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(Json(result))
}

async fn meta(State(state): State<Arc<AppState>>) -> Json<Value> {
    Json(json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": state.config,
        "trajectory": {
            "s_start": state.traj.s_start(),
            "s_end": state.traj.s_end(),
            "stations": state.traj.len(),
        },
        "mesh": {
            "triangles": state.mesh.triangle_count(),
            "vertices": state.mesh.vertices.len(),
        },
    }))
}
