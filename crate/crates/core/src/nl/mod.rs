//! Controlled-language frontend: lexicon, chunker, template grammar, flat
//! semantics and its translation to DL.

mod pipeline;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dl::{Concept, Role, SidpAxiom};

pub use pipeline::{dl_pipeline, parse_sentences, AxiomRow, DlPipelineReport, Sentence, SentenceFailure};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NlError {
    #[error("malformed lexicon: {0}")]
    Lexicon(String),
    #[error("unknown literal label l{0}")]
    UnknownLiteral(usize),
    #[error("flat semantics has no root subset literal")]
    NoRoot,
    #[error("flat semantics is cyclic at l{0}")]
    Cyclic(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NominalEntry {
    pub surface: String,
    pub concept: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerbalEntry {
    pub anchor: String,
    #[serde(default)]
    pub coanchors: Vec<String>,
    pub role: String,
    #[serde(default)]
    pub inverse: bool,
    pub schema: String,
}

/// Known sentence templates, by schema id.
pub const SCHEMAS: &[&str] = &["passive"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lexicon {
    #[serde(default)]
    pub nominals: Vec<NominalEntry>,
    #[serde(default)]
    pub verbals: Vec<VerbalEntry>,
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric() && c != '-' && c != '_').to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

impl Lexicon {
    /// Reads the JSON lexicon. Surfaces are lowercased and whitespace-normalized.
    pub fn from_json(text: &str) -> Result<Self, NlError> {
        let mut lex: Lexicon = serde_json::from_str(text).map_err(|e| NlError::Lexicon(e.to_string()))?;
        for n in &mut lex.nominals {
            n.surface = words(&n.surface).join(" ");
            if n.surface.is_empty() {
                return Err(NlError::Lexicon(format!("empty surface for concept `{}`", n.concept)));
            }
        }
        for v in &mut lex.verbals {
            v.anchor = words(&v.anchor).join(" ");
            v.coanchors = v.coanchors.iter().map(|c| words(c).join(" ")).collect();
            if v.anchor.is_empty() || v.anchor.contains(' ') {
                return Err(NlError::Lexicon(format!("anchor for role `{}` must be one word", v.role)));
            }
            if !SCHEMAS.contains(&v.schema.as_str()) {
                return Err(NlError::Lexicon(format!("unknown schema `{}`", v.schema)));
            }
        }
        Ok(lex)
    }
}

const PREPOSITIONS: [&str; 6] = ["in", "into", "on", "at", "within", "inside"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChunkKind {
    Np { concept: String },
    Verb { entry: usize, negated: bool },
    Prep,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chunk {
    #[serde(flatten)]
    pub kind: ChunkKind,
    pub text: String,
    /// Token range covered by the chunk.
    pub start: usize,
    pub end: usize,
}

impl Chunk {
    pub fn tag(&self, lex: &Lexicon) -> String {
        match &self.kind {
            ChunkKind::Np { concept } => format!("[NP:{concept}]"),
            ChunkKind::Verb { entry, negated } => {
                let neg = if *negated { "not " } else { "" };
                format!("[V:{neg}{}]", lex.verbals[*entry].role)
            }
            ChunkKind::Prep => format!("[P:{}]", self.text),
            ChunkKind::Unknown => format!("[?:{}]", self.text),
        }
    }
}

fn match_verbal(v: &VerbalEntry, toks: &[String]) -> Option<(usize, bool)> {
    let mut i = 0;
    let mut negated = false;
    for (k, co) in v.coanchors.iter().enumerate() {
        if toks.get(i) != Some(co) {
            return None;
        }
        i += 1;
        if k == 0 && toks.get(i).map(String::as_str) == Some("not") {
            negated = true;
            i += 1;
        }
    }
    if toks.get(i) != Some(&v.anchor) {
        return None;
    }
    Some((i + 1, negated))
}

/// Splits a sentence into lexicon chunks: verbal patterns first, then the
/// longest nominal surface, then prepositions; everything else is unknown.
pub fn chunk_and_lex(sentence: &str, lex: &Lexicon) -> Vec<Chunk> {
    let toks = words(sentence);
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let rest = &toks[i..];
        let verbal = lex
            .verbals
            .iter()
            .enumerate()
            .filter_map(|(e, v)| match_verbal(v, rest).map(|(len, neg)| (len, e, neg)))
            .max_by_key(|&(len, e, _)| (len, std::cmp::Reverse(e)));
        if let Some((len, entry, negated)) = verbal {
            out.push(Chunk {
                kind: ChunkKind::Verb { entry, negated },
                text: rest[..len].join(" "),
                start: i,
                end: i + len,
            });
            i += len;
            continue;
        }
        let nominal = lex
            .nominals
            .iter()
            .filter_map(|n| {
                let sw: Vec<&str> = n.surface.split(' ').collect();
                let hit = sw.len() <= rest.len() && sw.iter().zip(rest).all(|(a, b)| a == b);
                hit.then_some((sw.len(), n))
            })
            .max_by_key(|&(len, _)| len);
        if let Some((len, n)) = nominal {
            out.push(Chunk {
                kind: ChunkKind::Np {
                    concept: n.concept.clone(),
                },
                text: rest[..len].join(" "),
                start: i,
                end: i + len,
            });
            i += len;
            continue;
        }
        let kind = if PREPOSITIONS.contains(&rest[0].as_str()) {
            ChunkKind::Prep
        } else {
            ChunkKind::Unknown
        };
        out.push(Chunk {
            kind,
            text: rest[0].clone(),
            start: i,
            end: i + 1,
        });
        i += 1;
    }
    out
}

pub type Label = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Literal {
    Subset { sub: Label, sup: Label },
    Exists { role: String, arg: Label },
    And { left: Label, right: Label },
    Or { left: Label, right: Label },
    Not { arg: Label },
    Concept { name: String },
    Top,
    Rinv { role: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatSemantics {
    pub literals: Vec<(Label, Literal)>,
}

impl fmt::Display for FlatSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, lit)) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "l{l}:")?;
            match lit {
                Literal::Subset { sub, sup } => write!(f, "subset(l{sub},l{sup})")?,
                Literal::Exists { role, arg } => write!(f, "exists({role},l{arg})")?,
                Literal::And { left, right } => write!(f, "and(l{left},l{right})")?,
                Literal::Or { left, right } => write!(f, "or(l{left},l{right})")?,
                Literal::Not { arg } => write!(f, "not(l{arg})")?,
                Literal::Concept { name } => write!(f, "{name}")?,
                Literal::Top => f.write_str("Thing")?,
                Literal::Rinv { role } => write!(f, "{role}inv")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ParseOutcome {
    Full { flat: FlatSemantics },
    Partial { flat: FlatSemantics, skipped: Vec<String> },
    Failure { reason: String },
}

impl ParseOutcome {
    pub fn flat(&self) -> Option<&FlatSemantics> {
        match self {
            ParseOutcome::Full { flat } | ParseOutcome::Partial { flat, .. } => Some(flat),
            ParseOutcome::Failure { .. } => None,
        }
    }
}

/// Matches `NP shall [not] be V-ed [P NP]`. The subject is the first noun
/// phrase not governed by a preposition; unused chunks are skipped.
pub fn parse_sentence(chunks: &[Chunk], lex: &Lexicon) -> ParseOutcome {
    let governed = |i: usize| {
        chunks[..i]
            .iter()
            .rev()
            .find(|c| c.kind != ChunkKind::Unknown)
            .is_some_and(|c| c.kind == ChunkKind::Prep)
    };
    let Some(subj) = (0..chunks.len()).find(|&i| matches!(chunks[i].kind, ChunkKind::Np { .. }) && !governed(i)) else {
        return ParseOutcome::Failure {
            reason: "no subject".into(),
        };
    };
    let Some(verb) = (subj + 1..chunks.len()).find(|&i| matches!(chunks[i].kind, ChunkKind::Verb { .. })) else {
        return ParseOutcome::Failure {
            reason: "no verbal anchor".into(),
        };
    };
    let mut used = vec![subj, verb];
    let mut location = None;
    if let Some(p) = (verb + 1..chunks.len()).find(|&i| chunks[i].kind == ChunkKind::Prep) {
        if let Some(n) = (p + 1..chunks.len()).find(|&i| matches!(chunks[i].kind, ChunkKind::Np { .. })) {
            used.extend([p, n]);
            location = Some(n);
        }
    }
    let concept = |i: usize| match &chunks[i].kind {
        ChunkKind::Np { concept } => concept.clone(),
        _ => unreachable!(),
    };
    let ChunkKind::Verb { entry, negated } = chunks[verb].kind else { unreachable!() };
    let v = &lex.verbals[entry];
    let flat = passive_schema(&concept(subj), v, negated, location.map(concept));
    let skipped: Vec<String> = (0..chunks.len())
        .filter(|i| !used.contains(i))
        .map(|i| chunks[i].text.clone())
        .collect();
    if skipped.is_empty() {
        ParseOutcome::Full { flat }
    } else {
        ParseOutcome::Partial { flat, skipped }
    }
}

fn passive_schema(subject: &str, v: &VerbalEntry, negated: bool, location: Option<String>) -> FlatSemantics {
    let mut lits = vec![
        (0, Literal::Subset { sub: 1, sup: 2 }),
        (1, Literal::Concept { name: subject.into() }),
    ];
    let mut next = 2;
    if negated {
        lits.push((2, Literal::Not { arg: 3 }));
        next = 3;
    }
    lits.push((
        next,
        Literal::Exists {
            role: v.role.clone(),
            arg: next + 1,
        },
    ));
    lits.push((
        next + 1,
        match location {
            Some(name) => Literal::Concept { name },
            None => Literal::Top,
        },
    ));
    if v.inverse {
        lits.push((next + 2, Literal::Rinv { role: v.role.clone() }));
    }
    FlatSemantics { literals: lits }
}

/// Translates flat semantics to `subject ⊑ predicate`.
pub fn flat_to_dl(flat: &FlatSemantics, source: &str) -> Result<SidpAxiom, NlError> {
    let roots: Vec<(Label, Label)> = flat
        .literals
        .iter()
        .filter_map(|(_, l)| match l {
            Literal::Subset { sub, sup } => Some((*sub, *sup)),
            _ => None,
        })
        .collect();
    let [(sub, sup)] = roots[..] else { return Err(NlError::NoRoot) };
    let mut stack = Vec::new();
    let subject = tau(flat, sub, &mut stack)?;
    let predicate = tau(flat, sup, &mut stack)?;
    Ok(SidpAxiom::new(source, subject, predicate))
}

fn tau(flat: &FlatSemantics, l: Label, stack: &mut Vec<Label>) -> Result<Concept, NlError> {
    if stack.contains(&l) {
        return Err(NlError::Cyclic(l));
    }
    let lit = flat
        .literals
        .iter()
        .find(|(x, lit)| *x == l && !matches!(lit, Literal::Rinv { .. }))
        .map(|(_, lit)| lit)
        .ok_or(NlError::UnknownLiteral(l))?;
    stack.push(l);
    let c = match lit {
        Literal::Concept { name } => Concept::atomic(name),
        Literal::Top => Concept::Top,
        Literal::Not { arg } => Concept::not(tau(flat, *arg, stack)?),
        Literal::And { left, right } => Concept::and(vec![tau(flat, *left, stack)?, tau(flat, *right, stack)?]),
        Literal::Or { left, right } => Concept::or(vec![tau(flat, *left, stack)?, tau(flat, *right, stack)?]),
        Literal::Exists { role, arg } => {
            let inverse = flat
                .literals
                .iter()
                .any(|(_, x)| matches!(x, Literal::Rinv { role: r } if r == role));
            let r = Role {
                name: role.clone(),
                inverse,
            };
            Concept::exists(r, tau(flat, *arg, stack)?)
        }
        Literal::Subset { .. } | Literal::Rinv { .. } => return Err(NlError::UnknownLiteral(l)),
    };
    stack.pop();
    Ok(c)
}
