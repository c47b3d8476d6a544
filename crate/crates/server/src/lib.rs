//! JSON-over-HTTP sessions for steering simulations.
//!
//! | method | path                    | body                                   |
//! |--------|-------------------------|----------------------------------------|
//! | POST   | `/sessions`             | `{"scenario": name or object, "seed"?}`  |
//! | POST   | `/sessions/{id}/step`   | `{"actions"?: [...], "feedback"?: {"gamma", "f"?}}` |
//! | POST   | `/sessions/{id}/fork`   | `{"at_step": k}`                         |
//! | GET    | `/sessions/{id}/series` |                                        |
//! | GET    | `/scenarios`            |                                        |
//! | GET    | `/healthz`              |                                        |
//!
//! Every response body carries `"schema_version": "1"`. Errors are
//! `{"error": {"code", "message"}}`.

pub mod api;
pub mod error;
pub mod registry;

use std::sync::Arc;

use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;

pub use error::ApiError;
pub use registry::{Registry, DEFAULT_MAX_SESSIONS};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Origin allowed by CORS; `None` disables CORS headers.
    pub allow_origin: Option<String>,
    pub max_sessions: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { allow_origin: None, max_sessions: DEFAULT_MAX_SESSIONS }
    }
}

pub fn router(cfg: &ServerConfig) -> Result<Router, String> {
    let state: api::AppState = Arc::new(Registry::new(cfg.max_sessions));
    let mut app = Router::new()
        .route("/healthz", get(api::healthz))
        .route("/scenarios", get(api::list_scenarios))
        .route("/sessions", post(api::create_session))
        .route("/sessions/{id}/step", post(api::step_session))
        .route("/sessions/{id}/fork", post(api::fork_session))
        .route("/sessions/{id}/series", get(api::get_series))
        .fallback(api::not_found)
        .method_not_allowed_fallback(api::method_not_allowed)
        .with_state(state);
    if let Some(origin) = &cfg.allow_origin {
        let origin = HeaderValue::from_str(origin).map_err(|e| format!("invalid origin {origin:?}: {e}"))?;
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    Ok(app)
}

/// Serves `app` (from [`router`]) until the listener fails or ctrl-c is received.
pub async fn serve(listener: TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
