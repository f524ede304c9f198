//! HTTP/JSON front end for the engine.
//!
//! All mutations go through one write lock, so each request sees either the
//! state before or after a batch, never a mix. Engine calls run on the
//! blocking pool because they fsync the event log.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;
use tracing::{error, info, warn};

use skillrec_core::config::Config;
use skillrec_core::engine::{BatchReport, CreateLearner, Engine, FeedbackResult};
use skillrec_core::error::Error as CoreError;
use skillrec_core::importance::JobSkillProfile;
use skillrec_core::learner::LearnerProfile;
use skillrec_core::oer::OerRecord;
use skillrec_core::recommender::{RecommendOutcome, Recommendation};

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(Utc::now)
}

pub struct AppState {
    engine: Arc<RwLock<Engine>>,
    clock: Clock,
}

impl AppState {
    pub fn new(engine: Engine, clock: Clock) -> Arc<Self> {
        Arc::new(AppState {
            engine: Arc::new(RwLock::new(engine)),
            clock,
        })
    }

    pub fn engine(&self) -> &Arc<RwLock<Engine>> {
        &self.engine
    }

    /// Runs `f` on the blocking pool with exclusive access to the engine.
    async fn mutate<T, F>(&self, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&mut Engine) -> Result<T, CoreError> + Send + 'static,
    {
        let mut guard = self.engine.clone().write_owned().await;
        tokio::task::spawn_blocking(move || f(&mut guard))
            .await
            .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
            .map_err(ApiError::from)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code: code.into(),
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "not_found", message),
            CoreError::Invalid(_) | CoreError::UnknownProperty(_) | CoreError::UnknownClass { .. } => {
                Self::new(StatusCode::BAD_REQUEST, "invalid_input", message)
            }
            CoreError::State(_) | CoreError::UserMismatch { .. } => {
                Self::new(StatusCode::CONFLICT, "conflict", message)
            }
            _ => {
                error!(error = %message, "request failed");
                Self::internal(message)
            }
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_json", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// A recommendation outcome, with the OER record attached when one was issued.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationView {
    #[serde(flatten)]
    pub outcome: RecommendOutcome,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oer: Option<OerRecord>,
}

fn view(engine: &Engine, outcome: RecommendOutcome) -> RecommendationView {
    let oer = match &outcome {
        RecommendOutcome::Issued(r) => engine.state().catalog.get(&r.oer_id).cloned(),
        _ => None,
    };
    RecommendationView { outcome, oer }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackView {
    pub recommendation: Recommendation,
    pub profile: LearnerProfile,
    pub next: RecommendationView,
}

fn feedback_view(engine: &Engine, result: FeedbackResult) -> FeedbackView {
    FeedbackView {
        recommendation: result.recommendation,
        profile: result.profile,
        next: view(engine, result.next),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub counts: BTreeMap<String, usize>,
}

async fn health(State(app): State<Arc<AppState>>) -> Json<Health> {
    let engine = app.engine.read().await;
    Json(Health {
        status: "ok".into(),
        counts: engine.state().counts(),
    })
}

#[derive(Debug, Deserialize)]
struct JobQuery {
    #[serde(default)]
    query: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JobList {
    pub jobs: Vec<String>,
}

async fn jobs(State(app): State<Arc<AppState>>, Query(q): Query<JobQuery>) -> Json<JobList> {
    let engine = app.engine.read().await;
    Json(JobList {
        jobs: engine.state().jobs(&q.query),
    })
}

#[derive(Debug, Deserialize)]
struct LocationQuery {
    #[serde(default)]
    location: String,
}

async fn job_skills(
    State(app): State<Arc<AppState>>,
    Path(job): Path<String>,
    Query(q): Query<LocationQuery>,
) -> ApiResult<JobSkillProfile> {
    let engine = app.engine.read().await;
    engine
        .state()
        .profile_for(&job, &q.location)
        .cloned()
        .map(Json)
        .ok_or_else(|| CoreError::NotFound(format!("skill profile for job `{job}`")).into())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreatedLearner {
    pub user_id: String,
    pub profile: LearnerProfile,
}

async fn create_learner(
    State(app): State<Arc<AppState>>,
    body: Result<Json<CreateLearner>, JsonRejection>,
) -> Result<(StatusCode, Json<CreatedLearner>), ApiError> {
    let Json(request) = body?;
    let profile = app.mutate(move |e| e.create_learner(request)).await?;
    Ok((
        StatusCode::CREATED,
        Json(CreatedLearner {
            user_id: profile.user_id.clone(),
            profile,
        }),
    ))
}

async fn get_learner(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<LearnerProfile> {
    let engine = app.engine.read().await;
    Ok(Json(engine.learner(&id)?.clone()))
}

async fn update_skills(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<BTreeMap<String, f64>>, JsonRejection>,
) -> ApiResult<LearnerProfile> {
    let Json(skills) = body?;
    Ok(Json(app.mutate(move |e| e.update_skills(&id, skills)).await?))
}

async fn recommendation(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<RecommendationView> {
    let now = (app.clock)();
    Ok(Json(
        app.mutate(move |e| {
            let outcome = e.recommendation(&id, now)?;
            Ok(view(e, outcome))
        })
        .await?,
    ))
}

#[derive(Debug, Deserialize)]
struct RatingBody {
    stars: u8,
}

async fn rate(
    State(app): State<Arc<AppState>>,
    Path(rid): Path<String>,
    body: Result<Json<RatingBody>, JsonRejection>,
) -> ApiResult<FeedbackView> {
    let Json(RatingBody { stars }) = body?;
    let now = (app.clock)();
    Ok(Json(
        app.mutate(move |e| {
            let result = e.rate(&rid, stars, now)?;
            Ok(feedback_view(e, result))
        })
        .await?,
    ))
}

async fn irrelevant(State(app): State<Arc<AppState>>, Path(rid): Path<String>) -> ApiResult<FeedbackView> {
    let now = (app.clock)();
    Ok(Json(
        app.mutate(move |e| {
            let result = e.mark_irrelevant(&rid, now)?;
            Ok(feedback_view(e, result))
        })
        .await?,
    ))
}

async fn change(State(app): State<Arc<AppState>>, Path(rid): Path<String>) -> ApiResult<FeedbackView> {
    let now = (app.clock)();
    Ok(Json(
        app.mutate(move |e| {
            let result = e.change(&rid, now)?;
            Ok(feedback_view(e, result))
        })
        .await?,
    ))
}

#[derive(Debug, Default, Deserialize)]
struct BatchBody {
    period_end: Option<DateTime<Utc>>,
}

async fn batch(
    State(app): State<Arc<AppState>>,
    body: Result<Json<BatchBody>, JsonRejection>,
) -> ApiResult<BatchReport> {
    // An empty body means "now".
    let body = match body {
        Ok(Json(b)) => b,
        Err(JsonRejection::MissingJsonContentType(_)) => BatchBody::default(),
        Err(e) => return Err(e.into()),
    };
    let now = body.period_end.unwrap_or_else(|| (app.clock)());
    Ok(Json(app.mutate(move |e| e.run_batch(now)).await?))
}

async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/jobs", get(jobs))
        .route("/jobs/{job}/skills", get(job_skills))
        .route("/learners", post(create_learner))
        .route("/learners/{id}", get(get_learner))
        .route("/learners/{id}/skills", patch(update_skills))
        .route("/learners/{id}/recommendation", get(recommendation))
        .route("/recommendations/{rid}/rating", post(rate))
        .route("/recommendations/{rid}/irrelevant", post(irrelevant))
        .route("/recommendations/{rid}/change", post(change))
        .route("/admin/batch", post(batch))
        .fallback(fallback)
        .with_state(state)
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Engine(#[from] CoreError),
    #[error("cannot listen on port {port}: {source}")]
    Bind {
        port: u16,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs batch jobs every `period` until the process stops.
pub fn spawn_scheduler(app: Arc<AppState>, period: Duration) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut ticks = tokio::time::interval(period);
        ticks.tick().await;
        loop {
            ticks.tick().await;
            let now = (app.clock)();
            match app.mutate(move |e| e.run_batch(now)).await {
                Ok(report) => info!(refits = report.refits, noop = report.noop, "scheduled batch"),
                Err(e) => warn!(error = %e.message, "scheduled batch failed"),
            }
        }
    })
}

/// Restores state from `config.data_dir` and serves until interrupted, then
/// writes a final snapshot.
pub async fn serve(config: Config, clock: Clock) -> Result<(), ServeError> {
    let port = config.port;
    let scheduler_secs = config.scheduler_secs;
    let engine = tokio::task::spawn_blocking(move || Engine::open(config))
        .await
        .map_err(|e| std::io::Error::other(e.to_string()))??;
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port))
        .await
        .map_err(|source| ServeError::Bind { port, source })?;
    let app = AppState::new(engine, clock);
    if scheduler_secs > 0 {
        spawn_scheduler(app.clone(), Duration::from_secs(scheduler_secs));
    }
    info!(port, "listening");
    axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    let now = (app.clock)();
    app.mutate(move |e| e.snapshot(now))
        .await
        .map_err(|e| std::io::Error::other(e.message))?;
    Ok(())
}
