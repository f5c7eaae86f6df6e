use serde::Serialize;

use super::{chunk_and_lex, flat_to_dl, parse_sentence, Lexicon, ParseOutcome};
use crate::dl::{reduce_traces, to_dl_string, DetectedTrace, DlError, Ontology, SidpAxiom, TraceDetector, TraceKind};
use crate::model::{Origin, TraceLink};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sentence {
    pub id: String,
    pub line: usize,
    pub text: String,
}

/// One sentence per line with an optional `id:` label. Blank lines and
/// lines starting with `#` are ignored; unlabeled sentences get `s{n}`.
pub fn parse_sentences(text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let labeled = line.split_once(':').filter(|(id, _)| {
            !id.is_empty() && id.chars().all(|c| c.is_alphanumeric() || "_-.".contains(c))
        });
        let (id, text) = match labeled {
            Some((id, rest)) => (id.to_string(), rest.trim()),
            None => (format!("s{}", out.len() + 1), line),
        };
        out.push(Sentence {
            id,
            line: i + 1,
            text: text.to_string(),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomRow {
    pub id: String,
    pub line: usize,
    pub sentence: String,
    pub status: &'static str,
    pub chunks: Vec<String>,
    pub flat: String,
    pub axiom: String,
    pub concept: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceFailure {
    pub id: String,
    pub line: usize,
    pub sentence: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DlPipelineReport {
    pub schema: u32,
    pub axioms: Vec<AxiomRow>,
    pub failures: Vec<SentenceFailure>,
    /// Every pairwise detection, before reduction.
    pub raw: Vec<DetectedTrace>,
    pub traces: Vec<DetectedTrace>,
    /// `traces` as workspace links; conflicts appear in both directions.
    pub links: Vec<TraceLink>,
}

impl DlPipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parses every sentence, runs trace detection over all pairs of parsed
/// sentences, and reduces the result to covering entailments and most
/// general conflicts.
pub fn dl_pipeline(sentences: &str, lex: &Lexicon, onto: &Ontology) -> Result<DlPipelineReport, DlError> {
    let mut axioms = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for s in parse_sentences(sentences) {
        let chunks = chunk_and_lex(&s.text, lex);
        let outcome = parse_sentence(&chunks, lex);
        let translated = outcome.flat().map(|f| (f, flat_to_dl(f, &s.id)));
        match (&outcome, translated) {
            (_, Some((flat, Ok(ax)))) => {
                let (status, skipped) = match &outcome {
                    ParseOutcome::Partial { skipped, .. } => ("partial", skipped.clone()),
                    _ => ("full", Vec::new()),
                };
                rows.push(AxiomRow {
                    id: s.id.clone(),
                    line: s.line,
                    sentence: s.text.clone(),
                    status,
                    chunks: chunks.iter().map(|c| c.tag(lex)).collect(),
                    flat: flat.to_string(),
                    axiom: ax.to_string(),
                    concept: to_dl_string(&ax.concept()),
                    skipped,
                });
                axioms.push(ax);
            }
            (_, Some((_, Err(e)))) => failures.push(failure(&s, e.to_string())),
            (ParseOutcome::Failure { reason }, None) => failures.push(failure(&s, reason.clone())),
            _ => unreachable!(),
        }
    }
    let mut detector = TraceDetector::new(onto)?;
    let raw = pairwise(&mut detector, &axioms)?;
    let ids: Vec<String> = axioms.iter().map(|a| a.source.clone()).collect();
    let traces = reduce_traces(&ids, &raw);
    let mut links = Vec::new();
    for t in &traces {
        let mut push = |a: &str, b: &str| {
            links.push(TraceLink {
                id: format!("dl{}", links.len() + 1),
                endpoints: vec![a.to_string(), b.to_string()],
                relation: Some(t.kind.relation().to_string()),
                origin: Origin::Dl,
            })
        };
        push(&t.from, &t.to);
        if t.kind == TraceKind::Conflicts {
            push(&t.to, &t.from);
        }
    }
    Ok(DlPipelineReport {
        schema: crate::analyses::SCHEMA_VERSION,
        axioms: rows,
        failures,
        raw,
        traces,
        links,
    })
}

fn failure(s: &super::Sentence, reason: String) -> SentenceFailure {
    SentenceFailure {
        id: s.id.clone(),
        line: s.line,
        sentence: s.text.clone(),
        reason,
    }
}

fn pairwise(detector: &mut TraceDetector, axioms: &[SidpAxiom]) -> Result<Vec<DetectedTrace>, DlError> {
    let mut out = Vec::new();
    for i in 0..axioms.len() {
        for j in i + 1..axioms.len() {
            out.extend(detector.detect(&axioms[i], &axioms[j])?);
        }
    }
    Ok(out)
}
