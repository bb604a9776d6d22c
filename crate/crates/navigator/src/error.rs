use axum::http::StatusCode;

#[derive(Debug)]
pub enum NavError {
    UnknownGraph(String),
    UnknownSession(String),
    UnknownVertex(usize),
    FactualIsCandidate(usize),
    NotAdjacent { from: usize, to: usize },
    Completed,
    Conflict(String),
    BadRequest(String),
    Internal(String),
}

impl NavError {
    pub(crate) fn internal(e: impl std::fmt::Display) -> Self {
        NavError::Internal(e.to_string())
    }

    pub fn status(&self) -> StatusCode {
        match self {
            NavError::UnknownGraph(_) | NavError::UnknownSession(_) | NavError::UnknownVertex(_) => {
                StatusCode::NOT_FOUND
            }
            NavError::FactualIsCandidate(_) | NavError::NotAdjacent { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            NavError::Completed | NavError::Conflict(_) => StatusCode::CONFLICT,
            NavError::BadRequest(_) => StatusCode::BAD_REQUEST,
            NavError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            NavError::UnknownGraph(_) => "unknown-graph",
            NavError::UnknownSession(_) => "unknown-session",
            NavError::UnknownVertex(_) => "unknown-vertex",
            NavError::FactualIsCandidate(_) => "factual-is-candidate",
            NavError::NotAdjacent { .. } => "not-adjacent",
            NavError::Completed => "session-complete",
            NavError::Conflict(_) => "conflict",
            NavError::BadRequest(_) => "bad-request",
            NavError::Internal(_) => "internal",
        }
    }
}

impl std::fmt::Display for NavError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NavError::UnknownGraph(id) => write!(f, "no graph with id '{id}'"),
            NavError::UnknownSession(id) => write!(f, "no session with id '{id}' (it may have expired)"),
            NavError::UnknownVertex(v) => write!(f, "vertex {v} is not in the graph"),
            NavError::FactualIsCandidate(v) => write!(f, "vertex {v} is already a counterfactual candidate"),
            NavError::NotAdjacent { from, to } => write!(f, "there is no arc from {from} to {to}"),
            NavError::Completed => write!(f, "session already reached a counterfactual"),
            NavError::Conflict(m) | NavError::BadRequest(m) | NavError::Internal(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for NavError {}
