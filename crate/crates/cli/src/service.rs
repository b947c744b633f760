//! Read-only HTTP service over a loaded archive.
//!
//! `GET /meta`, `GET /query?i=&j=&alpha=` and `GET /points?i=&j=`. All
//! bodies are JSON; unbounded α is written as the string `"inf"`. Until the
//! archive has finished loading every endpoint answers 503.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::{json, Value};
use tempalpha::{Archive, BoxTree, EdgeSide, PointId};
use tower_http::cors::CorsLayer;

pub const DEFAULT_EDGE_CAP: usize = 1_000_000;

/// An archive with its stab index, ready to answer queries.
pub struct Loaded {
    pub archive: Archive,
    pub tree: BoxTree,
}

impl Loaded {
    pub fn new(mut archive: Archive) -> Loaded {
        let tree = archive.index.take().unwrap_or_else(|| BoxTree::from_cuboids(&archive.cuboids));
        Loaded { archive, tree }
    }

    pub fn n(&self) -> PointId {
        self.archive.points.len() as PointId
    }
}

pub struct AppState {
    pub loaded: OnceLock<Loaded>,
    pub edge_cap: usize,
}

impl AppState {
    pub fn pending(edge_cap: usize) -> Arc<AppState> {
        Arc::new(AppState { loaded: OnceLock::new(), edge_cap })
    }

    pub fn ready(loaded: Loaded, edge_cap: usize) -> Arc<AppState> {
        let s = AppState::pending(edge_cap);
        let _ = s.loaded.set(loaded);
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError { status, message: message.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

pub fn alpha_json(v: f64) -> Value {
    if v.is_infinite() {
        json!("inf")
    } else {
        json!(v)
    }
}

fn side_name(s: EdgeSide) -> &'static str {
    match s {
        EdgeSide::Front => "front",
        EdgeSide::Back => "back",
    }
}

pub fn meta(l: &Loaded) -> Value {
    let cs = &l.archive.cuboids;
    let lo = cs.iter().map(|c| c.alpha_lo).fold(f64::INFINITY, f64::min);
    let hi = cs.iter().flat_map(|c| [c.alpha_lo, c.alpha_hi]).filter(|v| v.is_finite()).fold(0.0, f64::max);
    json!({
        "n": l.n(),
        "alpha_min_observed": if lo.is_finite() { json!(lo) } else { Value::Null },
        "alpha_max_finite": hi,
        "cuboid_count": cs.len(),
        "triangle_count": l.archive.triangles,
        "dataset_name": l.archive.name,
    })
}

fn param<T: std::str::FromStr>(q: &HashMap<String, String>, key: &str) -> Result<T, ApiError> {
    let raw = q.get(key).ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, format!("missing parameter `{key}`")))?;
    raw.trim().parse().map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed parameter `{key}`: {raw:?}")))
}

fn window(l: &Loaded, q: &HashMap<String, String>) -> Result<(PointId, PointId), ApiError> {
    let i: PointId = param(q, "i")?;
    let j: PointId = param(q, "j")?;
    if i < 1 || i >= j || j > l.n() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("need 1 <= i < j <= {}, got i={i} j={j}", l.n())));
    }
    Ok((i, j))
}

/// Edges with an empty α-ball in window `[i, j]`.
pub fn query(l: &Loaded, q: &HashMap<String, String>, cap: usize) -> Result<Value, ApiError> {
    let clock = Instant::now();
    let (i, j) = window(l, q)?;
    let alpha: f64 = param(q, "alpha")?;
    if !(alpha > 0.0) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "alpha must be positive"));
    }
    let mut hits = BTreeMap::new();
    let mut over = false;
    l.tree.stab_with(i, j, alpha, |id| {
        let c = &l.archive.cuboids[id as usize];
        hits.entry((c.a, c.b, c.side as u8)).or_insert(*c);
        over |= hits.len() > cap;
    });
    if over {
        return Err(ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, format!("more than {cap} edges")));
    }
    let edges: Vec<Value> = hits
        .values()
        .map(|c| json!({ "a": c.a, "b": c.b, "side": side_name(c.side), "alpha_lo": c.alpha_lo, "alpha_hi": alpha_json(c.alpha_hi) }))
        .collect();
    Ok(json!({ "count": edges.len(), "edges": edges, "elapsed_microseconds": clock.elapsed().as_micros() as u64 }))
}

pub fn points(l: &Loaded, q: &HashMap<String, String>) -> Result<Value, ApiError> {
    let (i, j) = window(l, q)?;
    let pts: Vec<Value> = l.archive.points[(i - 1) as usize..j as usize]
        .iter()
        .map(|p| json!({ "index": p.index, "x": p.x, "y": p.y }))
        .collect();
    Ok(json!({ "count": pts.len(), "points": pts }))
}

fn loaded(s: &AppState) -> Result<&Loaded, ApiError> {
    s.loaded.get().ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "archive still loading"))
}

async fn meta_h(State(s): State<Arc<AppState>>) -> Result<Json<Value>, ApiError> {
    Ok(Json(meta(loaded(&s)?)))
}

async fn query_h(State(s): State<Arc<AppState>>, Query(q): Query<HashMap<String, String>>) -> Result<Json<Value>, ApiError> {
    Ok(Json(query(loaded(&s)?, &q, s.edge_cap)?))
}

async fn points_h(State(s): State<Arc<AppState>>, Query(q): Query<HashMap<String, String>>) -> Result<Json<Value>, ApiError> {
    Ok(Json(points(loaded(&s)?, &q)?))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/meta", get(meta_h))
        .route("/query", get(query_h))
        .route("/points", get(points_h))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Binds `port` and serves while the archive at `path` loads in the background.
pub async fn serve(path: std::path::PathBuf, port: u16, edge_cap: usize) -> anyhow::Result<()> {
    let state = AppState::pending(edge_cap);
    let loader = state.clone();
    let job = tokio::task::spawn_blocking(move || -> anyhow::Result<()> {
        let archive = Archive::load(&path).map_err(|e| anyhow::anyhow!("load {}: {e}", path.display()))?;
        let _ = loader.loaded.set(Loaded::new(archive));
        Ok(())
    });
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let server = axum::serve(listener, router(state));
    tokio::select! {
        r = server => r?,
        r = job => {
            r??;
            eprintln!("archive loaded");
            std::future::pending::<()>().await;
        }
    }
    Ok(())
}
