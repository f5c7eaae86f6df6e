use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use tracer::server::{router, AppState};
use tracer_core::analyses::{infer_relations, Options};
use tracer_core::forl::load_spec;
use tracer_core::model::TraceabilityInformation;

fn data(name: &str) -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)).unwrap()
}

fn state_for(workspace: &str, path: Option<PathBuf>) -> Arc<AppState> {
    let text = data("sidp.forl");
    let spec = load_spec(&text).unwrap();
    let info = TraceabilityInformation::load(&data(workspace)).unwrap();
    AppState::new(text, spec, info, path)
}

fn app(workspace: &str) -> Router {
    router(state_for(workspace, None))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, Method::GET, uri, None).await
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, Method::POST, uri, Some(body)).await
}

fn has(report: &Value, relation: &str, tuple: &[&str]) -> bool {
    report["inferred"]
        .as_array()
        .unwrap()
        .iter()
        .any(|t| t["relation"] == relation && t["tuple"] == json!(tuple))
}

const RL: [(&str, &str, &str); 5] = [
    ("conflicts", "r6", "r4"),
    ("requires", "r1", "r5"),
    ("conflicts", "r6", "r1"),
    ("requires", "r2", "r5"),
    ("conflicts", "r2", "r6"),
];

#[tokio::test]
async fn workspace_and_spec_are_served() {
    let app = app("table1.trace.json");
    let (s, v) = get(&app, "/api/workspace").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["revision"], 0);
    assert_eq!(v["workspace"]["locations"].as_array().unwrap().len(), 6);
    let (s, v) = get(&app, "/api/spec").await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["text"].as_str().unwrap().contains("abstract sig Artifact"));
}

#[tokio::test]
async fn graph_has_nodes_and_provenance() {
    let app = app("table1.trace.json");
    let (s, v) = get(&app, "/api/graph").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 6);
    let edges = v["edges"].as_array().unwrap();
    assert!(!edges.is_empty());
    assert!(edges.iter().all(|e| e["style"] == "solid" && e["accepted"] == false));
    assert!(edges.iter().any(|e| e["id"] == "m1" && e["provenance"] == "manual"));
    assert_eq!(edges.iter().filter(|e| e["provenance"] == "DL").count(), edges.len() - 1);
}

#[tokio::test]
async fn consistency_endpoint() {
    let (s, v) = post(&app("table1.trace.json"), "/api/analysis/consistency", json!({})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["verdict"], "consistent");
    let (s, v) = post(&app("contains-chain.trace.json"), "/api/analysis/consistency", json!({})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["verdict"], "inconsistent");
    assert!(v["violated"].as_array().unwrap().contains(&json!("ContainsTransitive")));
}

#[tokio::test]
async fn infer_contains_rl_rows_and_shows_dashed_edges() {
    let app = app("table1.trace.json");
    let (s, v) = post(&app, "/api/analysis/infer", json!({})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["index"], 0);
    assert!(v["token"].is_string());
    for (r, a, b) in RL {
        assert!(has(&v["report"], r, &[a, b]), "missing {r}({a},{b})");
    }
    let (_, g) = get(&app, "/api/graph").await;
    let dashed: Vec<&Value> = g["edges"].as_array().unwrap().iter().filter(|e| e["style"] == "dashed").collect();
    assert_eq!(dashed.len(), v["report"]["inferred"].as_array().unwrap().len());
    assert!(dashed.iter().all(|e| e["provenance"] == "RL" && e["accepted"] == false));
}

#[tokio::test]
async fn infer_matches_in_process_analysis() {
    let app = app("table1.trace.json");
    let (_, v) = post(&app, "/api/analysis/infer", json!({ "targets": ["requires", "conflicts"] })).await;
    let spec = load_spec(&data("sidp.forl")).unwrap();
    let inst = TraceabilityInformation::load(&data("table1.trace.json")).unwrap().to_relational(&spec).unwrap();
    let local = infer_relations(&spec, &inst, &["requires", "conflicts"], &Options::default()).unwrap();
    assert_eq!(v["report"], serde_json::to_value(&local).unwrap());
    let (_, h) = post(&app, "/api/analysis/infer", json!({ "targets": ["requires", "conflicts"], "engine": "horn" })).await;
    assert_eq!(h["report"]["inferred"], v["report"]["inferred"]);
    assert_eq!(h["exhausted"], true);
}

#[tokio::test]
async fn accepted_tuple_is_no_longer_inferred() {
    let app = app("table1.trace.json");
    let (_, before) = post(&app, "/api/analysis/infer", json!({})).await;
    assert!(has(&before["report"], "requires", &["r1", "r5"]));
    let (s, v) = post(
        &app,
        "/api/traces/accept",
        json!({ "revision": 0, "relation": "requires", "tuple": ["r1", "r5"] }),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["accepted"]["status"], "added");
    assert_eq!(v["revision"], 1);
    let (_, after) = post(&app, "/api/analysis/infer", json!({})).await;
    assert!(!has(&after["report"], "requires", &["r1", "r5"]));
    assert!(has(&after["report"], "requires", &["r2", "r5"]));

    let (_, g) = get(&app, "/api/graph").await;
    let accepted: Vec<&Value> = g["edges"].as_array().unwrap().iter().filter(|e| e["accepted"] == true).collect();
    assert_eq!(accepted.len(), 1);
    assert_eq!(accepted[0]["endpoints"], json!(["r1", "r5"]));
    assert_eq!(accepted[0]["provenance"], "RL");

    let (_, again) = post(
        &app,
        "/api/traces/accept",
        json!({ "revision": 1, "relation": "requires", "tuple": ["r1", "r5"] }),
    )
    .await;
    assert_eq!(again["accepted"]["status"], "duplicate");
    assert_eq!(again["revision"], 1);
}

#[tokio::test]
async fn solution_cursor_walks_and_exhausts() {
    let app = app("table1.trace.json");
    let (_, v) = post(&app, "/api/analysis/infer", json!({})).await;
    let token = v["token"].as_str().unwrap().to_string();
    let (s, next) = get(&app, &format!("/api/solutions/{token}/next")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(next["exhausted"], true);
    assert!(next["report"].is_null());
    let (s, prev) = get(&app, &format!("/api/solutions/{token}/prev")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(prev["index"], 0);
    assert_eq!(prev["report"], v["report"]);
}

#[tokio::test]
async fn discover_cursor_enumerates_several_solutions() {
    let text = data("alm.forl");
    let spec = load_spec(&text).unwrap();
    let info = TraceabilityInformation::load(
        r#"{"version":1,"locations":[{"id":"r","kind":"File","path":"r.txt"}],"types":{"r":"ContractRequirement"}}"#,
    )
    .unwrap();
    let app = router(AppState::new(text, spec, info, None));
    let (s, first) = post(&app, "/api/analysis/discover", json!({ "fresh": 2, "linkFresh": true })).await;
    assert_eq!(s, StatusCode::OK, "{first}");
    let token = first["token"].as_str().unwrap().to_string();
    let mut seen = vec![first["report"].clone()];
    loop {
        let (s, v) = get(&app, &format!("/api/solutions/{token}/next")).await;
        assert_eq!(s, StatusCode::OK);
        if v["exhausted"] == true {
            break;
        }
        assert_eq!(v["index"], seen.len());
        assert!(!seen.contains(&v["report"]));
        seen.push(v["report"].clone());
        assert!(seen.len() < 50);
    }
    assert!(seen.len() >= 2);
    let (_, back) = get(&app, &format!("/api/solutions/{token}/prev")).await;
    assert_eq!(back["report"], seen[seen.len() - 2]);
}

#[tokio::test]
async fn unknown_and_stale_tokens() {
    let app = app("table1.trace.json");
    let (s, _) = get(&app, "/api/solutions/nope/next").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (_, v) = post(&app, "/api/analysis/infer", json!({})).await;
    let token = v["token"].as_str().unwrap().to_string();
    let (s, _) = post(
        &app,
        "/api/traces",
        json!({ "revision": 0, "relation": "refines", "endpoints": ["r1", "r2"] }),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    let (s, _) = get(&app, &format!("/api/solutions/{token}/next")).await;
    assert!(s == StatusCode::CONFLICT || s == StatusCode::NOT_FOUND, "{s}");
}

#[tokio::test]
async fn stale_revision_is_rejected() {
    let app = app("table1.trace.json");
    let (s, v) = post(
        &app,
        "/api/traces",
        json!({ "revision": 7, "relation": "refines", "endpoints": ["r1", "r2"] }),
    )
    .await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["revision"], 0);
}

#[tokio::test]
async fn manual_trace_creation_and_errors() {
    let app = app("table1.trace.json");
    let (s, v) = post(
        &app,
        "/api/traces",
        json!({ "revision": 0, "id": "m2", "relation": "refines", "endpoints": ["r1", "r2"] }),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    assert_eq!(v["revision"], 1);
    let (_, g) = get(&app, "/api/graph").await;
    assert!(g["edges"].as_array().unwrap().iter().any(|e| e["id"] == "m2" && e["provenance"] == "manual"));

    let (s, _) = post(&app, "/api/traces", json!({ "revision": 1, "relation": "nope", "endpoints": ["r1", "r2"] })).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (s, _) = post(&app, "/api/traces", json!({ "revision": 1, "relation": "refines", "endpoints": ["r1"] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/api/traces", json!({ "revision": 1, "relation": "refines", "endpoints": ["r1", "zz"] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/api/traces", json!({ "revision": 1, "id": "m2", "relation": "refines", "endpoints": ["r1", "r3"] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/api/traces", json!({ "revision": 1, "relation": "refines", "endpoints": ["r1", "r2", "r3"] })).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (s, _) = post(&app, "/api/traces/accept", json!({ "revision": 1, "relation": "Requirement", "tuple": ["r1", "r2"] })).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (_, w) = get(&app, "/api/workspace").await;
    assert_eq!(w["revision"], 1);
}

#[tokio::test]
async fn malformed_bodies_are_bad_requests() {
    let app = app("table1.trace.json");
    let req = Request::builder()
        .method(Method::POST)
        .uri("/api/traces")
        .body(Body::from("{not json"))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/api/analysis/infer", json!({ "bogus": 1 })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/api/traces", json!({ "relation": "refines", "endpoints": ["r1", "r2"] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/api/analysis/infer", json!({ "targets": ["nope"] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn delete_trace() {
    let app = app("table1.trace.json");
    let (s, v) = call(&app, Method::DELETE, "/api/traces/dl1?revision=0", None).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["removed"]["id"], "dl1");
    assert_eq!(v["revision"], 1);
    let (s, _) = call(&app, Method::DELETE, "/api/traces/dl1?revision=1", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, Method::DELETE, "/api/traces/dl2?revision=0", None).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn mutations_are_saved_to_the_workspace_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ws.json");
    std::fs::write(&path, data("table1.trace.json")).unwrap();
    let app = router(state_for("table1.trace.json", Some(path.clone())));
    let (s, _) = post(&app, "/api/traces/accept", json!({ "revision": 0, "relation": "requires", "tuple": ["r1", "r5"] })).await;
    assert_eq!(s, StatusCode::OK);
    let saved = TraceabilityInformation::load(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved.revision, 1);
    assert!(saved.links.iter().any(|l| l.endpoints == ["r1", "r5"] && l.relation.as_deref() == Some("requires")));
}

#[tokio::test]
async fn spec_replacement_rechecks_types() {
    let app = app("table1.trace.json");
    let original = data("sidp.forl");
    let (s, v) = post(&app, "/api/spec", json!({ "revision": 0, "text": "sig A {" })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());

    let renamed = original.replace("sig Specification extends Artifact {}", "sig Spec extends Artifact {}");
    let (s, _) = post(&app, "/api/spec", json!({ "revision": 0, "text": renamed })).await;
    assert_eq!(s, StatusCode::OK);

    let cut = "abstract sig Artifact {\n  requires: set Artifact,\n  refines: set Artifact\n}\nsig Requirement extends Artifact {}\n";
    let (s, v) = post(&app, "/api/spec", json!({ "revision": 1, "text": cut })).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{v}");

    let (s, _) = post(&app, "/api/spec", json!({ "revision": 0, "text": original })).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (_, spec) = get(&app, "/api/spec").await;
    assert!(spec["text"].as_str().unwrap().contains("sig Spec extends"));
    assert_eq!(spec["revision"], 1);
}
