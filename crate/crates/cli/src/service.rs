//! HTTP session over one registry and one random state.
//!
//! | method | path        | body                                                   |
//! |--------|-------------|--------------------------------------------------------|
//! | POST   | `/seed`     | `{"seed": 1}`                                          |
//! | POST   | `/unions`   | `{"name": "u", "members": ["int","str"], "weights"?: [3,1]}` |
//! | POST   | `/records`  | `{"name": "m.c", "fields": [{"name": "a", "type": "int"}]}` |
//! | POST   | `/typeinfo` | a TypeInfo document, optional `?max_iters=N`           |
//! | POST   | `/examples` | `{"type": "list[int]", "n": 10}`                       |
//! | GET    | `/types`    |                                                        |
//!
//! Requests are handled one at a time under a lock, so the response
//! transcript is a function of the seed and the request order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;
use typeseed::pipeline::{parse_type_info, DEFAULT_MAX_ITERS};
use typeseed::{
    extract_appropriate_functions, generate_examples, parse_type_expression, register_types_fixed_point, GenerateError,
    ParseError, RandomState, Registry, RegistryError, TypeExpr,
};

use crate::{signature_json, wire_array};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceConfig {
    pub port: u16,
    pub seed: u64,
    pub max_examples_per_request: usize,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("max examples per request must be at least 1")]
    ZeroMaxExamples,
}

impl ServiceConfig {
    pub fn new(port: u16, seed: u64, max_examples_per_request: usize) -> Result<Self, ConfigError> {
        if max_examples_per_request == 0 {
            return Err(ConfigError::ZeroMaxExamples);
        }
        Ok(ServiceConfig {
            port,
            seed,
            max_examples_per_request,
        })
    }
}

struct Session {
    registry: Registry,
    state: RandomState,
}

#[derive(Clone)]
struct AppState {
    session: Arc<Mutex<Session>>,
    max_examples: usize,
}

#[derive(Debug, Error)]
enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("{0}")]
    Internal(String),
}

impl From<GenerateError> for ApiError {
    fn from(e: GenerateError) -> Self {
        match e {
            GenerateError::Registry(e) => ApiError::Registry(e),
            GenerateError::Parse(e) => ApiError::Parse(e),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl ApiError {
    fn status_and_kind(&self) -> (StatusCode, &'static str) {
        match self {
            ApiError::BadRequest(_) => (StatusCode::BAD_REQUEST, "bad-request"),
            ApiError::Parse(_) => (StatusCode::BAD_REQUEST, "parse-error"),
            ApiError::Registry(e) => match e {
                RegistryError::UnresolvedType(_) => (StatusCode::UNPROCESSABLE_ENTITY, "unresolved-type"),
                RegistryError::AliasCycle { .. }
                | RegistryError::SelfAlias(_)
                | RegistryError::AliasShadowsType(_)
                | RegistryError::BreaksClosure { .. }
                | RegistryError::ReservedName(_) => (StatusCode::CONFLICT, "registration-conflict"),
                RegistryError::UnsupportedRecursion(_) => (StatusCode::UNPROCESSABLE_ENTITY, "unsupported-recursion"),
                _ => (StatusCode::UNPROCESSABLE_ENTITY, "invalid-type"),
            },
            ApiError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = self.status_and_kind();
        (
            status,
            Json(json!({"error": {"kind": kind, "message": self.to_string()}})),
        )
            .into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

fn parse_types(texts: &[String]) -> Result<Vec<TypeExpr>, ApiError> {
    Ok(texts
        .iter()
        .map(|t| parse_type_expression(t))
        .collect::<Result<_, _>>()?)
}

pub fn router(config: ServiceConfig) -> Router {
    let state = AppState {
        session: Arc::new(Mutex::new(Session {
            registry: Registry::init_types(),
            state: RandomState::from_seed(config.seed),
        })),
        max_examples: config.max_examples_per_request,
    };
    Router::new()
        .route("/seed", post(set_seed))
        .route("/unions", post(add_union))
        .route("/records", post(add_record))
        .route("/typeinfo", post(add_typeinfo))
        .route("/examples", post(examples))
        .route("/types", get(list_types))
        .with_state(state)
}

fn lock(app: &AppState) -> Result<std::sync::MutexGuard<'_, Session>, ApiError> {
    app.session
        .lock()
        .map_err(|_| ApiError::Internal("session lock poisoned".into()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedRequest {
    seed: u64,
}

async fn set_seed(State(app): State<AppState>, body: String) -> ApiResult {
    let req: SeedRequest = parse_body(&body)?;
    lock(&app)?.state = RandomState::from_seed(req.seed);
    Ok(Json(json!({"seed": req.seed})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnionRequest {
    name: String,
    members: Vec<String>,
    weights: Option<Vec<u32>>,
}

async fn add_union(State(app): State<AppState>, body: String) -> ApiResult {
    let req: UnionRequest = parse_body(&body)?;
    let members = parse_types(&req.members)?;
    let mut session = lock(&app)?;
    session
        .registry
        .register_union_weighted(&req.name, &members, req.weights)?;
    Ok(Json(json!({"registered": req.name.to_lowercase(), "kind": "union"})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpec {
    name: String,
    #[serde(rename = "type")]
    ty: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordRequest {
    name: String,
    fields: Vec<FieldSpec>,
}

async fn add_record(State(app): State<AppState>, body: String) -> ApiResult {
    let req: RecordRequest = parse_body(&body)?;
    let fields = req
        .fields
        .into_iter()
        .map(|f| Ok((f.name, parse_type_expression(&f.ty)?)))
        .collect::<Result<Vec<_>, ParseError>>()?;
    let mut session = lock(&app)?;
    session.registry.register_record(&req.name, &fields)?;
    Ok(Json(json!({"registered": req.name.to_lowercase(), "kind": "record"})))
}

async fn add_typeinfo(
    State(app): State<AppState>,
    Query(query): Query<HashMap<String, String>>,
    body: String,
) -> ApiResult {
    let max_iters = match query.get("max_iters") {
        Some(v) => v
            .parse()
            .map_err(|_| ApiError::BadRequest(format!("invalid max_iters '{v}'")))?,
        None => DEFAULT_MAX_ITERS,
    };
    let info = parse_type_info(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut session = lock(&app)?;
    let report = register_types_fixed_point(&mut session.registry, &info, max_iters);
    let appropriate: Vec<Value> = extract_appropriate_functions(&session.registry, &info)
        .into_iter()
        .map(signature_json)
        .collect();
    Ok(Json(json!({"report": report, "appropriate": appropriate})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExamplesRequest {
    #[serde(rename = "type")]
    ty: String,
    #[serde(default = "one")]
    n: usize,
}

fn one() -> usize {
    1
}

async fn examples(State(app): State<AppState>, body: String) -> ApiResult {
    let req: ExamplesRequest = parse_body(&body)?;
    if req.n > app.max_examples {
        return Err(ApiError::BadRequest(format!(
            "n = {} exceeds the limit of {} examples per request",
            req.n, app.max_examples
        )));
    }
    let ty = parse_type_expression(&req.ty)?;
    let mut session = lock(&app)?;
    let (values, next) = generate_examples(&session.registry, &ty, req.n, session.state)?;
    session.state = next;
    Ok(Json(wire_array(&values)))
}

async fn list_types(State(app): State<AppState>) -> ApiResult {
    let session = lock(&app)?;
    let types: Vec<Value> = session
        .registry
        .types()
        .map(|d| json!({"name": d.name, "kind": d.kind_name()}))
        .collect();
    let aliases: serde_json::Map<String, Value> = session
        .registry
        .aliases()
        .map(|(a, t)| (a.to_string(), Value::from(t)))
        .collect();
    Ok(Json(json!({"types": types, "aliases": aliases})))
}

pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(config)).await
}
