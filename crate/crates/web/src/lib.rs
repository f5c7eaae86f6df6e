//! WebAssembly entry points for the single-page demo in `www/`.
//!
//! Every operation takes and returns JSON text; the exported wrappers only
//! turn error strings into JS exceptions.

use serde_json::json;
use tracer_core::analyses::{check_consistency, infer_relations, AnalysisError, AnalysisMode, AnalysisReport, Options, Verdict};
use tracer_core::dl::parse_ontology;
use tracer_core::forl::load_spec;
use tracer_core::model::TraceabilityInformation;
use tracer_core::nl::{dl_pipeline, Lexicon};
use wasm_bindgen::prelude::*;

pub const SAMPLE_SPEC: &str = include_str!("../../../data/sidp.forl");
pub const SAMPLE_WORKSPACE: &str = include_str!("../../../data/table1.trace.json");
pub const SAMPLE_SENTENCES: &str = include_str!("../../../data/table1.sentences.txt");
pub const SAMPLE_LEXICON: &str = include_str!("../../../data/sidp.lexicon.json");
pub const SAMPLE_ONTOLOGY: &str = include_str!("../../../data/sidp.ontology");

fn load(spec: &str, workspace: &str) -> Result<(tracer_core::forl::TypedSpec, tracer_core::relational::Instance), String> {
    let spec = load_spec(spec).map_err(|e| {
        e.diagnostics()
            .iter()
            .map(|d| d.render("spec"))
            .collect::<Vec<_>>()
            .join("\n")
    })?;
    let info = TraceabilityInformation::load(workspace).map_err(|e| format!("workspace: {e}"))?;
    let inst = info.to_relational(&spec).map_err(|e| format!("workspace: {e}"))?;
    Ok((spec, inst))
}

/// Consistency report for a spec and workspace.
pub fn check_json(spec: &str, workspace: &str) -> Result<String, String> {
    let (spec, inst) = load(spec, workspace)?;
    let r = check_consistency(&spec, &inst, &Options::default()).map_err(|e| e.to_string())?;
    Ok(r.to_json())
}

/// Inference report; `targets` is a comma or whitespace separated list,
/// empty for the spec's annotated targets.
pub fn infer_json(spec: &str, workspace: &str, targets: &str) -> Result<String, String> {
    let (spec, inst) = load(spec, workspace)?;
    let mut names: Vec<String> = targets
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    if names.is_empty() {
        names = spec.annotated_targets().into_iter().map(|r| spec.rel_name(r).to_string()).collect();
    }
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let r = match infer_relations(&spec, &inst, &names, &Options::default()) {
        Ok(r) => r,
        Err(AnalysisError::InconsistentPremises { violated }) => {
            let mut r = AnalysisReport::new(AnalysisMode::Infer, Verdict::Inconsistent);
            r.violated = violated;
            r
        }
        Err(e) => return Err(e.to_string()),
    };
    Ok(r.to_json())
}

/// Axioms, detected traces and workspace links for a sentence file.
pub fn dl_trace_json(sentences: &str, lexicon: &str, ontology: &str) -> Result<String, String> {
    let lex = Lexicon::from_json(lexicon).map_err(|e| format!("lexicon: {e}"))?;
    let onto = parse_ontology(ontology).map_err(|e| format!("ontology: {e}"))?;
    let report = dl_pipeline(sentences, &lex, &onto).map_err(|e| e.to_string())?;
    Ok(report.to_json())
}

pub fn samples_json() -> String {
    json!({
        "spec": SAMPLE_SPEC,
        "workspace": SAMPLE_WORKSPACE,
        "sentences": SAMPLE_SENTENCES,
        "lexicon": SAMPLE_LEXICON,
        "ontology": SAMPLE_ONTOLOGY,
    })
    .to_string()
}

#[wasm_bindgen]
pub fn check(spec: &str, workspace: &str) -> Result<String, JsError> {
    check_json(spec, workspace).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn infer(spec: &str, workspace: &str, targets: &str) -> Result<String, JsError> {
    infer_json(spec, workspace, targets).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dl_trace(sentences: &str, lexicon: &str, ontology: &str) -> Result<String, JsError> {
    dl_trace_json(sentences, lexicon, ontology).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn samples() -> String {
    samples_json()
}
