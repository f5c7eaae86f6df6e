use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::RwLock;
use tracer_core::analyses::{
    check_consistency, discover_solutions, infer_relations, infer_solutions, localize, AnalysisError, AnalysisMode,
    AnalysisReport, Engine, InferredTuple, Options, Verdict,
};
use tracer_core::forl::{load_spec, TypedSpec};
use tracer_core::model::{ModelError, Origin, TraceLink, TraceabilityInformation};

#[derive(Debug, Clone)]
struct Workspace {
    spec_text: String,
    spec: Arc<TypedSpec>,
    info: TraceabilityInformation,
    path: Option<PathBuf>,
    /// Tuples of the solution last shown, with the revision they belong to.
    shown: Option<(u64, Vec<InferredTuple>)>,
}

#[derive(Debug, Clone)]
enum Problem {
    Infer { targets: Vec<String> },
    Discover { fresh: usize, link_fresh: bool },
}

#[derive(Debug)]
struct Cursor {
    problem: Problem,
    revision: u64,
    reports: Vec<AnalysisReport>,
    index: usize,
    exhausted: bool,
}

/// Shared service state: one workspace behind a lock, plus the open
/// solution cursors keyed by token.
#[derive(Debug)]
pub struct AppState {
    ws: RwLock<Workspace>,
    cursors: Mutex<HashMap<String, Cursor>>,
    counter: AtomicU64,
}

impl AppState {
    pub fn new(spec_text: String, spec: TypedSpec, info: TraceabilityInformation, path: Option<PathBuf>) -> Arc<Self> {
        Arc::new(AppState {
            ws: RwLock::new(Workspace {
                spec_text,
                spec: Arc::new(spec),
                info,
                path,
                shown: None,
            }),
            cursors: Mutex::new(HashMap::new()),
            counter: AtomicU64::new(0),
        })
    }

    async fn snapshot(&self) -> Workspace {
        self.ws.read().await.clone()
    }

    async fn show(&self, revision: u64, report: &AnalysisReport) {
        let mut ws = self.ws.write().await;
        if ws.info.revision == revision {
            ws.shown = Some((revision, report.inferred.clone()));
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }

    fn stale(current: u64) -> Self {
        ApiError {
            status: StatusCode::CONFLICT,
            body: json!({ "error": "stale revision", "revision": current }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        let status = match e {
            ModelError::UnknownLink(_) => StatusCode::NOT_FOUND,
            ModelError::UnknownRelation(_)
            | ModelError::TypeViolation(_)
            | ModelError::ArityMismatch { .. }
            | ModelError::UntypedEndpoint { .. }
            | ModelError::UnknownSignature(_)
            | ModelError::AbstractSignature(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e.to_string())
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Bounds(_) | AnalysisError::NoFreshAtoms => Self::bad_request(e.to_string()),
            AnalysisError::NonHornFact(_) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            _ => Self::internal(e.to_string()),
        }
    }
}

fn body<T: DeserializeOwned + Default>(bytes: &Bytes) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/workspace", get(get_workspace))
        .route("/api/graph", get(get_graph))
        .route("/api/spec", get(get_spec).post(replace_spec))
        .route("/api/analysis/consistency", post(consistency))
        .route("/api/analysis/infer", post(infer))
        .route("/api/analysis/discover", post(discover))
        .route("/api/solutions/{token}/next", get(next_solution))
        .route("/api/solutions/{token}/prev", get(prev_solution))
        .route("/api/traces", post(create_trace))
        .route("/api/traces/accept", post(accept_trace))
        .route("/api/traces/{id}", delete(delete_trace))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

type ApiResult = Result<Json<Value>, ApiError>;

async fn get_workspace(State(st): State<Arc<AppState>>) -> ApiResult {
    let ws = st.snapshot().await;
    let doc: Value = serde_json::from_str(&ws.info.save()).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(Json(json!({ "revision": ws.info.revision, "workspace": doc })))
}

async fn get_spec(State(st): State<Arc<AppState>>) -> ApiResult {
    let ws = st.snapshot().await;
    Ok(Json(json!({ "revision": ws.info.revision, "text": ws.spec_text })))
}

#[derive(Debug, Serialize)]
struct GraphEdge {
    id: Option<String>,
    relation: Option<String>,
    endpoints: Vec<String>,
    source: String,
    target: String,
    provenance: &'static str,
    style: &'static str,
    accepted: bool,
}

fn provenance(o: Origin) -> &'static str {
    match o {
        Origin::Manual => "manual",
        Origin::Dl => "DL",
        Origin::Rl => "RL",
    }
}

async fn get_graph(State(st): State<Arc<AppState>>) -> ApiResult {
    let ws = st.snapshot().await;
    let nodes: Vec<Value> = ws
        .info
        .locations
        .iter()
        .map(|l| {
            json!({
                "id": l.id,
                "sig": ws.info.types.get(&l.id),
                "label": l.id,
                "broken": l.broken,
            })
        })
        .collect();
    let mut edges: Vec<GraphEdge> = ws
        .info
        .links
        .iter()
        .map(|l| GraphEdge {
            id: Some(l.id.clone()),
            relation: l.relation.clone(),
            endpoints: l.endpoints.clone(),
            source: l.endpoints.first().cloned().unwrap_or_default(),
            target: l.endpoints.last().cloned().unwrap_or_default(),
            provenance: provenance(l.origin),
            style: "solid",
            accepted: l.origin == Origin::Rl,
        })
        .collect();
    if let Some((rev, tuples)) = &ws.shown {
        if *rev == ws.info.revision {
            edges.extend(tuples.iter().map(|t| GraphEdge {
                id: None,
                relation: Some(t.relation.clone()),
                endpoints: t.tuple.clone(),
                source: t.tuple.first().cloned().unwrap_or_default(),
                target: t.tuple.last().cloned().unwrap_or_default(),
                provenance: "RL",
                style: "dashed",
                accepted: false,
            }));
        }
    }
    Ok(Json(json!({ "revision": ws.info.revision, "nodes": nodes, "edges": edges })))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisRequest {
    #[serde(default)]
    targets: Vec<String>,
    #[serde(default)]
    engine: Option<Engine>,
    #[serde(default)]
    fresh: Option<usize>,
    #[serde(default, rename = "linkFresh")]
    link_fresh: bool,
    #[serde(default)]
    timing: bool,
}

#[derive(Debug, Serialize)]
struct SolutionResponse {
    token: Option<String>,
    index: usize,
    revision: u64,
    exhausted: bool,
    report: Option<AnalysisReport>,
}

async fn consistency(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: AnalysisRequest = body(&bytes)?;
    let ws = st.snapshot().await;
    let opts = Options {
        timing: req.timing,
        ..Options::default()
    };
    let report = blocking(move || {
        let inst = ws.info.to_relational(&ws.spec)?;
        Ok(check_consistency(&ws.spec, &inst, &opts)?)
    })
    .await?;
    Ok(Json(serde_json::to_value(report).expect("report serializes")))
}

fn negative(mode: AnalysisMode, violated: Vec<String>) -> AnalysisReport {
    let mut r = AnalysisReport::new(mode, Verdict::Inconsistent);
    r.violated = violated;
    r
}

/// The `n`-th minimal solution of `problem`, or the localized violation
/// when there is none at all.
fn nth_solution(ws: &Workspace, problem: &Problem, n: usize) -> Result<Result<Option<AnalysisReport>, AnalysisReport>, ApiError> {
    let inst = ws.info.to_relational(&ws.spec)?;
    let (mut sols, mode) = match problem {
        Problem::Infer { targets } => {
            let names: Vec<&str> = targets.iter().map(String::as_str).collect();
            (infer_solutions(&ws.spec, &inst, &names)?, AnalysisMode::Infer)
        }
        Problem::Discover { fresh, link_fresh } => {
            (discover_solutions(&ws.spec, &inst, *fresh, *link_fresh)?, AnalysisMode::Discover)
        }
    };
    let sat = |e: tracer_core::sat::SatError| ApiError::internal(e.to_string());
    for i in 0..n {
        if sols.next_model().map_err(sat)?.is_none() {
            if i == 0 {
                break;
            }
            return Ok(Ok(None));
        }
    }
    match sols.next_report().map_err(sat)? {
        Some(r) => Ok(Ok(Some(r))),
        None if sols.produced() == 0 => {
            let violated = localize(&ws.spec, sols.bounds(), sols.facts()).map_err(sat)?;
            Ok(Err(negative(mode, violated)))
        }
        None => Ok(Ok(None)),
    }
}

async fn open_cursor(st: Arc<AppState>, problem: Problem) -> Result<SolutionResponse, ApiError> {
    let ws = st.snapshot().await;
    let revision = ws.info.revision;
    let p = problem.clone();
    let first = blocking(move || nth_solution(&ws, &p, 0)).await?;
    let report = match first {
        Err(negative) => {
            return Ok(SolutionResponse {
                token: None,
                index: 0,
                revision,
                exhausted: true,
                report: Some(negative),
            })
        }
        Ok(r) => r.expect("first solution exists when premises are consistent"),
    };
    st.show(revision, &report).await;
    let token = format!("s{}", st.counter.fetch_add(1, Ordering::Relaxed) + 1);
    st.cursors.lock().unwrap().insert(
        token.clone(),
        Cursor {
            problem,
            revision,
            reports: vec![report.clone()],
            index: 0,
            exhausted: false,
        },
    );
    Ok(SolutionResponse {
        token: Some(token),
        index: 0,
        revision,
        exhausted: false,
        report: Some(report),
    })
}

async fn infer(State(st): State<Arc<AppState>>, bytes: Bytes) -> Result<Json<SolutionResponse>, ApiError> {
    let req: AnalysisRequest = body(&bytes)?;
    let ws = st.snapshot().await;
    let targets = if req.targets.is_empty() {
        ws.spec.annotated_targets().into_iter().map(|r| ws.spec.rel_name(r).to_string()).collect()
    } else {
        req.targets
    };
    if targets.is_empty() {
        return Err(ApiError::bad_request("no targets given"));
    }
    if req.engine == Some(Engine::Horn) {
        let revision = ws.info.revision;
        let names = targets.clone();
        let opts = Options {
            engine: Engine::Horn,
            timing: req.timing,
        };
        let report = blocking(move || {
            let inst = ws.info.to_relational(&ws.spec)?;
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            Ok(infer_relations(&ws.spec, &inst, &names, &opts))
        })
        .await?;
        let report = match report {
            Ok(r) => r,
            Err(AnalysisError::InconsistentPremises { violated }) => negative(AnalysisMode::Infer, violated),
            Err(e) => return Err(e.into()),
        };
        st.show(revision, &report).await;
        return Ok(Json(SolutionResponse {
            token: None,
            index: 0,
            revision,
            exhausted: true,
            report: Some(report),
        }));
    }
    Ok(Json(open_cursor(st, Problem::Infer { targets }).await?))
}

async fn discover(State(st): State<Arc<AppState>>, bytes: Bytes) -> Result<Json<SolutionResponse>, ApiError> {
    let req: AnalysisRequest = body(&bytes)?;
    let problem = Problem::Discover {
        fresh: req.fresh.unwrap_or(1),
        link_fresh: req.link_fresh,
    };
    if req.fresh == Some(0) {
        return Err(AnalysisError::NoFreshAtoms.into());
    }
    Ok(Json(open_cursor(st, problem).await?))
}

fn cursor_state(st: &AppState, token: &str, current: u64) -> Result<(Problem, usize, usize, bool), ApiError> {
    let cursors = st.cursors.lock().unwrap();
    let c = cursors
        .get(token)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown solution token `{token}`")))?;
    if c.revision != current {
        return Err(ApiError::stale(current));
    }
    Ok((c.problem.clone(), c.index, c.reports.len(), c.exhausted))
}

fn respond(st: &AppState, token: &str, revision: u64, exhausted: bool) -> SolutionResponse {
    let cursors = st.cursors.lock().unwrap();
    let c = &cursors[token];
    SolutionResponse {
        token: Some(token.to_string()),
        index: c.index,
        revision,
        exhausted,
        report: if exhausted { None } else { Some(c.reports[c.index].clone()) },
    }
}

async fn next_solution(State(st): State<Arc<AppState>>, Path(token): Path<String>) -> Result<Json<SolutionResponse>, ApiError> {
    let ws = st.snapshot().await;
    let revision = ws.info.revision;
    let (problem, index, cached, exhausted) = cursor_state(&st, &token, revision)?;
    if index + 1 < cached {
        st.cursors.lock().unwrap().get_mut(&token).unwrap().index += 1;
    } else if exhausted {
        return Ok(Json(respond(&st, &token, revision, true)));
    } else {
        let found = blocking(move || nth_solution(&ws, &problem, cached)).await?;
        let mut cursors = st.cursors.lock().unwrap();
        let c = cursors.get_mut(&token).ok_or_else(|| ApiError::stale(revision))?;
        match found {
            Ok(Some(r)) if c.reports.len() == cached => {
                c.reports.push(r);
                c.index = cached;
            }
            Ok(Some(_)) => c.index = (c.index + 1).min(c.reports.len() - 1),
            _ => {
                c.exhausted = true;
                drop(cursors);
                return Ok(Json(respond(&st, &token, revision, true)));
            }
        }
    }
    let resp = respond(&st, &token, revision, false);
    if let Some(r) = &resp.report {
        st.show(revision, r).await;
    }
    Ok(Json(resp))
}

async fn prev_solution(State(st): State<Arc<AppState>>, Path(token): Path<String>) -> Result<Json<SolutionResponse>, ApiError> {
    let revision = st.snapshot().await.info.revision;
    let (_, index, _, _) = cursor_state(&st, &token, revision)?;
    if index > 0 {
        st.cursors.lock().unwrap().get_mut(&token).unwrap().index -= 1;
    }
    let resp = respond(&st, &token, revision, false);
    if let Some(r) = &resp.report {
        st.show(revision, r).await;
    }
    Ok(Json(resp))
}

/// Installs `info` and clears the open cursors. Writes the workspace file
/// when there is one.
fn commit(st: &AppState, ws: &mut Workspace, info: TraceabilityInformation) -> Result<(), ApiError> {
    if let Some(p) = &ws.path {
        std::fs::write(p, info.save()).map_err(|e| ApiError::internal(format!("cannot write workspace: {e}")))?;
    }
    ws.info = info;
    ws.shown = None;
    st.cursors.lock().unwrap().clear();
    Ok(())
}

fn check_revision(ws: &Workspace, revision: Option<u64>) -> Result<(), ApiError> {
    match revision {
        None => Err(ApiError::bad_request("missing `revision`")),
        Some(r) if r != ws.info.revision => Err(ApiError::stale(ws.info.revision)),
        Some(_) => Ok(()),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateTrace {
    revision: Option<u64>,
    #[serde(default)]
    id: Option<String>,
    relation: String,
    endpoints: Vec<String>,
}

async fn create_trace(State(st): State<Arc<AppState>>, bytes: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req: CreateTrace = body(&bytes)?;
    let mut ws = st.ws.write().await;
    check_revision(&ws, req.revision)?;
    let mut next = ws.info.clone();
    let id = req.id.unwrap_or_else(|| next.fresh_id("m"));
    let link = TraceLink {
        id: id.clone(),
        endpoints: req.endpoints,
        relation: Some(req.relation),
        origin: Origin::Manual,
    };
    next.add_link(link.clone())?;
    next.to_relational(&ws.spec)?;
    commit(&st, &mut ws, next)?;
    Ok((StatusCode::CREATED, Json(json!({ "revision": ws.info.revision, "link": link }))))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AcceptTrace {
    revision: Option<u64>,
    relation: String,
    tuple: Vec<String>,
}

async fn accept_trace(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: AcceptTrace = body(&bytes)?;
    let mut ws = st.ws.write().await;
    check_revision(&ws, req.revision)?;
    let (next, accepted) = ws.info.accept_trace(&ws.spec, &req.relation, &req.tuple)?;
    if next.revision != ws.info.revision {
        commit(&st, &mut ws, next)?;
    }
    Ok(Json(json!({ "revision": ws.info.revision, "accepted": accepted })))
}

#[derive(Debug, Deserialize)]
struct RevisionQuery {
    revision: Option<u64>,
}

async fn delete_trace(State(st): State<Arc<AppState>>, Path(id): Path<String>, Query(q): Query<RevisionQuery>) -> ApiResult {
    let mut ws = st.ws.write().await;
    check_revision(&ws, q.revision)?;
    let mut next = ws.info.clone();
    let removed = next.remove_link(&id)?;
    commit(&st, &mut ws, next)?;
    Ok(Json(json!({ "revision": ws.info.revision, "removed": removed })))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReplaceSpec {
    revision: Option<u64>,
    text: String,
}

async fn replace_spec(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult {
    let req: ReplaceSpec = body(&bytes)?;
    let mut ws = st.ws.write().await;
    check_revision(&ws, req.revision)?;
    let spec = load_spec(&req.text).map_err(|e| ApiError {
        status: StatusCode::BAD_REQUEST,
        body: json!({ "error": "specification does not type-check", "diagnostics": e.diagnostics() }),
    })?;
    ws.info.to_relational(&spec)?;
    let mut next = ws.info.clone();
    next.revision += 1;
    commit(&st, &mut ws, next)?;
    ws.spec = Arc::new(spec);
    ws.spec_text = req.text;
    let warnings = ws.spec.warnings.clone();
    Ok(Json(json!({ "revision": ws.info.revision, "warnings": warnings })))
}
