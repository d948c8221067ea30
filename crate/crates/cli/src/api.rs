//! Stateless position-in, answer-out JSON API over an immutable solution store.

use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;

use semistrong::othello::parse_hex16;
use semistrong::store::{AnswerStatus, SolutionDatabase};
use semistrong::{BoardSize, MoveSet, Position};

#[derive(Clone, Debug, Deserialize)]
pub struct AnswerQuery {
    pub size: u32,
    pub mover: String,
    pub opp: String,
    /// Moves played so far; only logged.
    pub transcript: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiAnswer {
    /// Mover's guaranteed final disc difference; `null` when not covered.
    pub value: Option<i32>,
    /// A square like `"c4"`, `"ps"` for a forced pass, `null` at a terminal
    /// position or outside coverage.
    pub best_move: Option<String>,
    /// Legal moves, or `["ps"]` when the mover must pass.
    pub legal_moves: Vec<String>,
    pub status: String,
    pub final_score: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub error: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (StatusCode::BAD_REQUEST, Json(self)).into_response()
    }
}

fn bad(msg: impl Into<String>) -> ApiError {
    ApiError { error: msg.into() }
}

/// Decodes a query into a position on the database's board.
pub fn decode_query(db: &SolutionDatabase, q: &AnswerQuery) -> Result<Position, ApiError> {
    let size = BoardSize::from_edge(q.size).ok_or_else(|| bad(format!("unsupported size {}", q.size)))?;
    if size != db.size() {
        return Err(bad(format!("this server answers {} positions", db.size())));
    }
    let mover = parse_hex16(&q.mover).map_err(|e| bad(e.to_string()))?;
    let opp = parse_hex16(&q.opp).map_err(|e| bad(e.to_string()))?;
    Position::new(size, mover, opp).map_err(|e| bad(e.to_string()))
}

/// Looks the position up (solving small endgames on demand) and maps the
/// answer into the query's orientation.
pub fn answer_position(db: &SolutionDatabase, p: &Position) -> ApiAnswer {
    let size = p.size();
    let answer = db.answer(p);
    let mut legal_moves: Vec<String> = MoveSet(p.legal_moves()).iter().map(|s| s.name(size)).collect();
    let must_pass = legal_moves.is_empty() && !p.is_terminal();
    if must_pass {
        legal_moves.push("ps".to_string());
    }
    let best_move = match answer.status {
        AnswerStatus::Terminal | AnswerStatus::NotCovered => None,
        _ => Some(answer.best_move.map_or_else(|| "ps".to_string(), |m| m.name(size))),
    };
    ApiAnswer {
        value: answer.value,
        best_move,
        legal_moves,
        status: answer.status.as_str().to_string(),
        final_score: (answer.status == AnswerStatus::Terminal).then(|| p.terminal_score()),
    }
}

#[derive(Clone)]
struct AppState {
    db: Arc<SolutionDatabase>,
    /// Bounds concurrent on-demand endgame solves.
    solvers: Arc<Semaphore>,
}

pub fn router(db: Arc<SolutionDatabase>, max_solvers: usize) -> Router {
    let state = AppState { db, solvers: Arc::new(Semaphore::new(max_solvers.max(1))) };
    Router::new()
        .route("/api/v1/answer", get(answer))
        .route("/healthz", get(|| async { "ok" }))
        .with_state(state)
}

async fn answer(
    State(state): State<AppState>,
    query: Result<Query<AnswerQuery>, QueryRejection>,
) -> Result<Json<ApiAnswer>, ApiError> {
    let Query(q) = query.map_err(|e| bad(e.body_text()))?;
    let p = decode_query(&state.db, &q)?;
    if let Some(t) = &q.transcript {
        log::info!("query {} transcript {t}", p.notation());
    }
    let _permit = state.solvers.acquire().await.map_err(|_| bad("server shutting down"))?;
    let db = state.db.clone();
    let out = tokio::task::spawn_blocking(move || answer_position(&db, &p))
        .await
        .map_err(|e| bad(format!("solver task failed: {e}")))?;
    Ok(Json(out))
}
