//! JSON-over-HTTP facade for one library's model, usage data and annotations.
//!
//! Reads never block each other. `PUT /v1/annotations` validates the full
//! replacement set, persists it atomically and swaps it in under the write
//! lock, so no reader observes a half-applied update.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use slimapi_core::annotations::{validate, AnnotationSet, ValidationResult};
use slimapi_core::classify::{classify, suggest_annotations, ClassificationReport, MoveConfig, RemovalConfig};
use slimapi_core::error::Error as CoreError;
use slimapi_core::generate::{infer_adapted_api, render_wrappers};
use slimapi_core::json::{self, to_canonical_string, Document};
use slimapi_core::model::ApiModel;
use slimapi_core::usage::UsageDocument;
use tokio::sync::RwLock;
use tower_http::cors::{AllowOrigin, CorsLayer};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: annotation set is invalid for the model ({count} error(s))")]
    InvalidAnnotations { path: PathBuf, count: usize, validation: ValidationResult },
}

/// Input files of a session.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub api: PathBuf,
    pub usages: PathBuf,
    /// Created on the first successful PUT when missing.
    pub annotations: PathBuf,
}

/// The loaded session: immutable inputs plus the mutable annotation set.
#[derive(Debug)]
pub struct AppState {
    model: ApiModel,
    model_json: String,
    public_model_json: String,
    usages_json: String,
    usages: UsageDocument,
    classification: ClassificationReport,
    classification_json: String,
    annotations_path: PathBuf,
    annotations: RwLock<AnnotationSet>,
}

impl AppState {
    /// Loads and cross-validates the inputs.
    pub fn load(config: &ServiceConfig) -> Result<Self, LoadError> {
        let model = ApiModel::read_from(&config.api)?;
        let usages = UsageDocument::read_from(&config.usages)?;
        let annotations = if config.annotations.exists() {
            AnnotationSet::read_from(&config.annotations)?
        } else {
            AnnotationSet::empty_for(&model)
        };
        Self::new(model, usages, annotations, &config.annotations)
    }

    pub fn new(
        model: ApiModel,
        usages: UsageDocument,
        mut annotations: AnnotationSet,
        annotations_path: &Path,
    ) -> Result<Self, LoadError> {
        let classification = classify(&model, &usages.counts)?;
        let validation = validate(&annotations, &model, Some(&usages.counts));
        if !validation.is_ok() {
            return Err(LoadError::InvalidAnnotations {
                path: annotations_path.to_owned(),
                count: validation.errors.len(),
                validation,
            });
        }
        annotations.canonicalize();
        Ok(Self {
            model_json: model.to_json(),
            public_model_json: model.public_view().to_json(),
            usages_json: usages.to_json(),
            classification_json: to_canonical_string(&classification) + "\n",
            model,
            usages,
            classification,
            annotations_path: annotations_path.to_owned(),
            annotations: RwLock::new(annotations),
        })
    }

    pub fn model(&self) -> &ApiModel {
        &self.model
    }

    pub async fn annotations(&self) -> AnnotationSet {
        self.annotations.read().await.clone()
    }
}

/// Which origins may call the service from a browser.
#[derive(Debug, Clone, Default)]
pub enum Cors {
    #[default]
    Any,
    Origin(String),
}

pub fn router(state: Arc<AppState>, cors: &Cors) -> Router {
    let origin = match cors {
        Cors::Any => AllowOrigin::any(),
        Cors::Origin(o) => match HeaderValue::from_str(o) {
            Ok(v) => AllowOrigin::list([v]),
            Err(_) => AllowOrigin::list(Vec::<HeaderValue>::new()),
        },
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::PUT, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/model", get(model))
        .route("/v1/usages", get(usages))
        .route("/v1/classification", get(classification))
        .route("/v1/annotations", get(get_annotations).put(put_annotations))
        .route("/v1/annotations/suggest", post(suggest))
        .route("/v1/generate", post(generate))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed)
        .layer(cors)
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(state: AppState, addr: SocketAddr, cors: &Cors) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(state), cors)).await
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn ok(body: String) -> Response {
    json_response(StatusCode::OK, body)
}

fn canonical<T: Serialize>(value: &T) -> String {
    to_canonical_string(value) + "\n"
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    status: u16,
    message: &'a str,
}

fn error(status: StatusCode, message: &str) -> Response {
    json_response(status, canonical(&ErrorBody { error: ErrorDetail { status: status.as_u16(), message } }))
}

fn unprocessable(validation: &ValidationResult) -> Response {
    json_response(StatusCode::UNPROCESSABLE_ENTITY, canonical(validation))
}

async fn not_found() -> Response {
    error(StatusCode::NOT_FOUND, "no such route")
}

async fn method_not_allowed() -> Response {
    error(StatusCode::METHOD_NOT_ALLOWED, "method not allowed")
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    let schemas: BTreeMap<&str, &str> = [
        ("annotations", json::ANNOTATIONS_SCHEMA),
        ("api", json::API_SCHEMA),
        ("migration", json::MIGRATION_SCHEMA),
        ("report", json::REPORT_SCHEMA),
        ("usages", json::USAGES_SCHEMA),
    ]
    .into();
    ok(canonical(&serde_json::json!({
        "status": "ok",
        "service": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "library": {"name": state.model.library_name(), "version": state.model.library_version()},
        "schemas": schemas,
    })))
}

#[derive(Deserialize)]
struct ModelQuery {
    #[serde(default)]
    public: bool,
}

async fn model(State(state): State<Arc<AppState>>, query: Result<Query<ModelQuery>, axum::extract::rejection::QueryRejection>) -> Response {
    match query {
        Ok(Query(q)) if q.public => ok(state.public_model_json.clone()),
        Ok(_) => ok(state.model_json.clone()),
        Err(e) => error(StatusCode::BAD_REQUEST, &e.body_text()),
    }
}

async fn usages(State(state): State<Arc<AppState>>) -> Response {
    ok(state.usages_json.clone())
}

async fn classification(State(state): State<Arc<AppState>>) -> Response {
    ok(state.classification_json.clone())
}

async fn get_annotations(State(state): State<Arc<AppState>>) -> Response {
    ok(state.annotations.read().await.to_json())
}

/// Replaces the whole set. Nothing changes unless the set validates and the
/// file is written.
async fn put_annotations(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let text = match std::str::from_utf8(&body) {
        Ok(t) => t,
        Err(_) => return error(StatusCode::BAD_REQUEST, "body is not UTF-8"),
    };
    let mut set = match AnnotationSet::from_json(text) {
        Ok(set) => set,
        Err(e) => return error(StatusCode::BAD_REQUEST, &e.to_string()),
    };
    let validation = validate(&set, &state.model, Some(&state.usages.counts));
    if !validation.is_ok() {
        return unprocessable(&validation);
    }
    set.canonicalize();
    let mut current = state.annotations.write().await;
    let path = state.annotations_path.clone();
    let bytes = set.to_json();
    let written = tokio::task::spawn_blocking(move || json::write_file(&path, bytes.as_bytes())).await;
    match written {
        Ok(Ok(())) => {
            *current = set;
            ok(canonical(&validation))
        }
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, &e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, &e.to_string()),
    }
}

/// Options of `POST /v1/annotations/suggest`; an empty body uses the defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SuggestRequest {
    /// Replaces the keep-list of never-removed function names.
    keep: Option<Vec<String>>,
    moves: bool,
    /// Suffix to destination module, added to or overriding the defaults.
    suffixes: BTreeMap<String, String>,
}

fn parse_optional<T: Default + for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, Response> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| error(StatusCode::BAD_REQUEST, &format!("malformed request body: {e}")))
}

async fn suggest(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let request: SuggestRequest = match parse_optional(&body) {
        Ok(r) => r,
        Err(response) => return response,
    };
    let mut removals = RemovalConfig::default();
    if let Some(keep) = request.keep {
        removals.keep = keep;
    }
    let mut moves = MoveConfig::default();
    for (suffix, module) in &request.suffixes {
        moves.set(suffix, module);
    }
    let moves = (request.moves || !request.suffixes.is_empty()).then_some(&moves);
    ok(suggest_annotations(&state.model, &state.classification, &removals, moves).to_json())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GenerateRequest {
    package_name: Option<String>,
}

async fn generate(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let request: GenerateRequest = match parse_optional(&body) {
        Ok(r) => r,
        Err(response) => return response,
    };
    let set = state.annotations.read().await.clone();
    match infer_adapted_api(&state.model, &set, request.package_name.as_deref()) {
        Ok(adapted) => ok(canonical(&render_wrappers(&adapted).archive())),
        Err(CoreError::Validation(v)) => unprocessable(&v),
        Err(e) => error(StatusCode::UNPROCESSABLE_ENTITY, &e.to_string()),
    }
}
