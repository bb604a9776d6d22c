//! Shared service state: uploaded graphs and live sessions.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use multiverse::graph::MultiverseGraph;

use crate::error::NavError;
use crate::projection::{project_2d, ProjectionKind};
use crate::session::NavigationSession;

#[derive(Clone, Debug)]
pub struct NavigatorConfig {
    /// Sessions untouched for this long are dropped.
    pub idle_timeout: Duration,
    /// When set, graphs and sessions are written here and reloaded on start.
    pub persist_dir: Option<PathBuf>,
}

impl Default for NavigatorConfig {
    fn default() -> Self {
        Self {
            idle_timeout: Duration::from_secs(3600),
            persist_dir: None,
        }
    }
}

pub struct GraphEntry {
    pub graph: MultiverseGraph<f64>,
    pub projection: ProjectionKind,
    pub coords: Vec<[f64; 2]>,
}

impl GraphEntry {
    pub fn new(graph: MultiverseGraph<f64>) -> Self {
        let (projection, coords) = project_2d(graph.instances());
        Self {
            graph,
            projection,
            coords,
        }
    }
}

pub struct SessionSlot {
    /// Steps take this with `try_lock`, so a concurrent second step is refused.
    pub session: tokio::sync::Mutex<NavigationSession>,
    last_access: Mutex<Instant>,
}

impl SessionSlot {
    fn new(session: NavigationSession) -> Self {
        Self {
            session: tokio::sync::Mutex::new(session),
            last_access: Mutex::new(Instant::now()),
        }
    }

    fn touch(&self) {
        *self.last_access.lock().expect("poisoned") = Instant::now();
    }

    fn idle_for(&self) -> Duration {
        self.last_access.lock().expect("poisoned").elapsed()
    }
}

pub struct AppState {
    graphs: RwLock<HashMap<String, Arc<GraphEntry>>>,
    sessions: RwLock<HashMap<String, Arc<SessionSlot>>>,
    config: NavigatorConfig,
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(tmp, path)
}

impl AppState {
    pub fn new(config: NavigatorConfig) -> Self {
        Self {
            graphs: RwLock::default(),
            sessions: RwLock::default(),
            config,
        }
    }

    /// Creates the state and reloads anything persisted under `persist_dir`.
    pub fn open(config: NavigatorConfig) -> std::io::Result<Self> {
        let state = Self::new(config);
        let Some(dir) = state.config.persist_dir.clone() else {
            return Ok(state);
        };
        std::fs::create_dir_all(dir.join("graphs"))?;
        std::fs::create_dir_all(dir.join("sessions"))?;
        for (sub, is_graph) in [("graphs", true), ("sessions", false)] {
            for entry in std::fs::read_dir(dir.join(sub))? {
                let path = entry?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
                    continue;
                };
                let text = std::fs::read_to_string(&path)?;
                if is_graph {
                    match serde_json::from_str::<MultiverseGraph<f64>>(&text) {
                        Ok(g) => {
                            state.graphs.write().expect("poisoned").insert(id, Arc::new(GraphEntry::new(g)));
                        }
                        Err(e) => tracing::warn!("skipping persisted graph {}: {e}", path.display()),
                    }
                } else {
                    match serde_json::from_str::<NavigationSession>(&text) {
                        Ok(s) => {
                            state.sessions.write().expect("poisoned").insert(id, Arc::new(SessionSlot::new(s)));
                        }
                        Err(e) => tracing::warn!("skipping persisted session {}: {e}", path.display()),
                    }
                }
            }
        }
        Ok(state)
    }

    pub fn config(&self) -> &NavigatorConfig {
        &self.config
    }

    pub fn add_graph(&self, graph: MultiverseGraph<f64>) -> Result<(String, Arc<GraphEntry>), NavError> {
        let id = new_id();
        if let Some(dir) = &self.config.persist_dir {
            let bytes = serde_json::to_vec(&graph).map_err(NavError::internal)?;
            write_atomically(&dir.join("graphs").join(format!("{id}.json")), &bytes).map_err(NavError::internal)?;
        }
        let entry = Arc::new(GraphEntry::new(graph));
        self.graphs.write().expect("poisoned").insert(id.clone(), entry.clone());
        Ok((id, entry))
    }

    pub fn graph(&self, id: &str) -> Result<Arc<GraphEntry>, NavError> {
        self.graphs
            .read()
            .expect("poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| NavError::UnknownGraph(id.to_string()))
    }

    pub fn new_session_id(&self) -> String {
        new_id()
    }

    pub fn insert_session(&self, session: NavigationSession) -> Result<(), NavError> {
        self.persist_session(&session)?;
        let id = session.id.clone();
        self.sessions
            .write()
            .expect("poisoned")
            .insert(id, Arc::new(SessionSlot::new(session)));
        Ok(())
    }

    /// Looks a session up, dropping it first if it has been idle too long.
    pub fn session(&self, id: &str) -> Result<Arc<SessionSlot>, NavError> {
        let slot = self.sessions.read().expect("poisoned").get(id).cloned();
        match slot {
            Some(s) if s.idle_for() <= self.config.idle_timeout => {
                s.touch();
                Ok(s)
            }
            Some(_) => {
                self.remove_session(id);
                Err(NavError::UnknownSession(id.to_string()))
            }
            None => Err(NavError::UnknownSession(id.to_string())),
        }
    }

    pub fn persist_session(&self, session: &NavigationSession) -> Result<(), NavError> {
        if let Some(dir) = &self.config.persist_dir {
            let bytes = serde_json::to_vec(session).map_err(NavError::internal)?;
            write_atomically(&dir.join("sessions").join(format!("{}.json", session.id)), &bytes)
                .map_err(NavError::internal)?;
        }
        Ok(())
    }

    fn remove_session(&self, id: &str) {
        self.sessions.write().expect("poisoned").remove(id);
        if let Some(dir) = &self.config.persist_dir {
            let _ = std::fs::remove_file(dir.join("sessions").join(format!("{id}.json")));
        }
    }

    /// Drops every idle session; returns how many went.
    pub fn sweep_expired(&self) -> usize {
        let expired: Vec<String> = self
            .sessions
            .read()
            .expect("poisoned")
            .iter()
            .filter(|(_, s)| s.idle_for() > self.config.idle_timeout)
            .map(|(id, _)| id.clone())
            .collect();
        for id in &expired {
            self.remove_session(id);
        }
        expired.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("poisoned").len()
    }
}
