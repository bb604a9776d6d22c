use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use multiverse::graph::{Arc as GraphArc, MultiverseGraph};

use crate::error::NavError;
use crate::projection::ProjectionKind;
use crate::session::{start_session, take_step, NavigationSession, SessionOptions, StepPreview};
use crate::store::AppState;

pub const SCHEMA_VERSION: u32 = 1;

/// Every body goes out wrapped with `schema_version`.
#[derive(Serialize)]
struct Envelope<T> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

fn reply<T: Serialize>(status: StatusCode, body: T) -> Response {
    (
        status,
        Json(Envelope {
            schema_version: SCHEMA_VERSION,
            body,
        }),
    )
        .into_response()
}

#[derive(Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

impl IntoResponse for NavError {
    fn into_response(self) -> Response {
        reply(
            self.status(),
            serde_json::json!({"error": ErrorBody { code: self.code(), message: self.to_string() }}),
        )
    }
}

fn parse<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, NavError> {
    serde_json::from_slice(body).map_err(|e| NavError::BadRequest(format!("invalid request body: {e}")))
}

#[derive(Serialize)]
struct GraphCreated {
    graph_id: String,
    vertices: usize,
    candidates: Vec<usize>,
}

async fn upload_graph(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, NavError> {
    let graph: MultiverseGraph<f64> = parse(&body)?;
    let candidates = graph.candidates().to_vec();
    let vertices = graph.len();
    let (graph_id, _) = state.add_graph(graph)?;
    Ok(reply(
        StatusCode::CREATED,
        GraphCreated {
            graph_id,
            vertices,
            candidates,
        },
    ))
}

#[derive(Serialize)]
struct SummaryVertex {
    id: usize,
    x: f64,
    y: f64,
    class: u32,
    candidate: bool,
}

#[derive(Serialize)]
struct GraphSummary {
    graph_id: String,
    projection: ProjectionKind,
    k: usize,
    target_class: u32,
    vertices: Vec<SummaryVertex>,
    candidates: Vec<usize>,
    arcs: Vec<GraphArc<f64>>,
}

async fn graph_summary(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, NavError> {
    let entry = state.graph(&id)?;
    let g = &entry.graph;
    let vertices = (0..g.len())
        .map(|v| SummaryVertex {
            id: v,
            x: entry.coords[v][0],
            y: entry.coords[v][1],
            class: g.class_of(v),
            candidate: g.is_candidate(v),
        })
        .collect();
    Ok(reply(
        StatusCode::OK,
        GraphSummary {
            graph_id: id,
            projection: entry.projection,
            k: g.k(),
            target_class: g.target_class(),
            vertices,
            candidates: g.candidates().to_vec(),
            arcs: g.arcs().collect(),
        },
    ))
}

#[derive(Deserialize)]
struct CreateSession {
    graph_id: String,
    factual: usize,
    top_c: Option<usize>,
    alt_count: Option<usize>,
    alt_separation: Option<f64>,
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, NavError> {
    let req: CreateSession = parse(&body)?;
    let entry = state.graph(&req.graph_id)?;
    let defaults = SessionOptions::default();
    let options = SessionOptions {
        top_c: req.top_c.unwrap_or(defaults.top_c),
        alt_count: req.alt_count.unwrap_or(defaults.alt_count),
        alt_separation: req.alt_separation.unwrap_or(defaults.alt_separation),
    };
    let id = state.new_session_id();
    // preview computation runs Dijkstra per neighbour; keep it off the reactor
    let session = tokio::task::spawn_blocking(move || {
        start_session(&entry.graph, &req.graph_id, id, req.factual, options)
    })
    .await
    .map_err(NavError::internal)??;
    state.insert_session(session.clone())?;
    Ok(reply(StatusCode::CREATED, session))
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, NavError> {
    let slot = state.session(&id)?;
    let session = slot.session.lock().await;
    Ok(reply(StatusCode::OK, &*session))
}

#[derive(Serialize)]
struct Previews<'a> {
    session_id: &'a str,
    current: usize,
    version: u64,
    previews: &'a [StepPreview],
}

async fn get_previews(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, NavError> {
    let slot = state.session(&id)?;
    let session = slot.session.lock().await;
    Ok(reply(
        StatusCode::OK,
        Previews {
            session_id: &session.id,
            current: session.current,
            version: session.version,
            previews: &session.previews,
        },
    ))
}

#[derive(Deserialize)]
struct StepRequest {
    neighbor: usize,
    /// Optimistic concurrency guard: refuse the step if the session moved on.
    expected_version: Option<u64>,
}

async fn step(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, NavError> {
    let req: StepRequest = parse(&body)?;
    let slot = state.session(&id)?;
    let mut guard = slot
        .session
        .try_lock()
        .map_err(|_| NavError::Conflict("another step on this session is in progress".into()))?;
    if let Some(v) = req.expected_version {
        if v != guard.version {
            return Err(NavError::Conflict(format!(
                "session is at version {}, request expected {v}",
                guard.version
            )));
        }
    }
    let entry = state.graph(&guard.graph_id)?;
    let mut next: NavigationSession = guard.clone();
    let next = tokio::task::spawn_blocking(move || take_step(&entry.graph, &mut next, req.neighbor).map(|_| next))
        .await
        .map_err(NavError::internal)??;
    state.persist_session(&next)?;
    *guard = next;
    Ok(reply(StatusCode::OK, &*guard))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/graphs", post(upload_graph))
        .route("/graphs/{id}/summary", get(graph_summary))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/previews", get(get_previews))
        .route("/sessions/{id}/step", post(step))
        .with_state(state)
}
