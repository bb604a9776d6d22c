//! HTTP service for walking a multiverse graph one arc at a time.
//!
//! A client uploads a graph produced by `multiverse build`, opens a session at
//! a factual vertex and then repeatedly reads the per-neighbour previews and
//! posts a step, until the walk lands on a counterfactual candidate.

pub mod api;
pub mod error;
pub mod projection;
pub mod session;
pub mod store;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

pub use api::{router, SCHEMA_VERSION};
pub use error::NavError;
pub use session::{NavigationSession, SessionOptions, StepPreview};
pub use store::{AppState, NavigatorConfig};

/// Binds `addr` and serves until the process stops. `on_bound` receives the
/// actual address, which matters when port 0 was requested.
pub async fn serve(
    addr: SocketAddr,
    config: NavigatorConfig,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let state = Arc::new(AppState::open(config)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);

    let sweeper = state.clone();
    let period = (state.config().idle_timeout / 4).clamp(Duration::from_millis(100), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let dropped = sweeper.sweep_expired();
            if dropped > 0 {
                tracing::info!("expired {dropped} idle sessions");
            }
        }
    });
    axum::serve(listener, router(state)).await
}
