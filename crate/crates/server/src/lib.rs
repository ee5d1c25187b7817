//! HTTP/JSON service: retrieval, prediction, submissions with admin review,
//! statistics, and static hosting of the web UI under `/ui`.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | GET | `/api/health` | | `{"status":"ok"}` |
//! | GET | `/api/compounds/{id}` | | compound record |
//! | GET | `/api/compounds/{id}/history` | | retired versions |
//! | GET | `/api/search?mode=&q=` | | search response |
//! | POST | `/api/search/advanced` | filters | search response |
//! | POST | `/api/search/structure` | `{smiles, threshold_percent}` | search response |
//! | POST | `/api/search/substructure` | `{smiles}` | search response |
//! | POST | `/api/predict` | `{smiles or name, trans_ring_double_bonds, phase}` | prediction |
//! | POST | `/api/submissions` | `{submitter, compound}` | submission |
//! | GET | `/api/submissions/{id}` | | submission |
//! | GET | `/api/stats` | | store statistics |
//! | GET | `/api/casrn/{casrn}` | | `{casrn, valid}` |
//! | GET | `/api/admin/pending` | | pending submissions |
//! | POST | `/api/admin/pending/{id}/approve` | `{note}` | submission |
//! | POST | `/api/admin/pending/{id}/reject` | `{note}` | submission |
//! | POST | `/api/admin/ingest` | `{format, content}` | ingest report |
//! | GET | `/api/admin/audit` | | audit report |
//!
//! Admin routes need the `x-admin-token` header.

mod config;
mod routes;

use std::sync::Arc;

use therminfo_core::Engine;

pub use config::{ConfigError, ServerConfig, DEFAULT_PORT};
pub use routes::{router, AppState, ADMIN_TOKEN_HEADER};

/// Bind and serve until ctrl-c.
pub async fn serve(config: ServerConfig) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let engine_config = config.engine_config();
    let engine = tokio::task::spawn_blocking(move || Engine::open(&engine_config)).await??;
    let state = AppState {
        engine: Arc::new(engine),
        admin_token: config.admin_token.clone().map(Arc::from),
    };
    let app = router(state, config.ui_dir.as_deref());
    let listener = tokio::net::TcpListener::bind(config.addr()).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
