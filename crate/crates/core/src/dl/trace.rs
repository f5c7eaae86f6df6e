use serde::Serialize;

use super::{Concept, DlError, Ontology, Reasoner, SidpAxiom};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Conflicts,
    Refines,
    Requires,
    Equals,
}

impl TraceKind {
    pub fn relation(self) -> &'static str {
        match self {
            TraceKind::Conflicts => "conflicts",
            TraceKind::Refines => "refines",
            TraceKind::Requires => "requires",
            TraceKind::Equals => "equals",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DetectedTrace {
    pub kind: TraceKind,
    pub from: String,
    pub to: String,
}

impl DetectedTrace {
    pub fn new(kind: TraceKind, from: &str, to: &str) -> Self {
        DetectedTrace {
            kind,
            from: from.to_string(),
            to: to.to_string(),
        }
    }
}

/// Two reasoners over the same ontology: one with the role inclusions and
/// one without, to tell refinement from requirement.
#[derive(Debug, Clone)]
pub struct TraceDetector {
    full: Reasoner,
    plain: Reasoner,
}

impl TraceDetector {
    pub fn new(onto: &Ontology) -> Result<Self, DlError> {
        Ok(TraceDetector {
            full: Reasoner::new(onto)?,
            plain: Reasoner::new(&onto.without_role_inclusions())?,
        })
    }

    pub fn reasoner(&mut self) -> &mut Reasoner {
        &mut self.full
    }

    pub fn detect(&mut self, a: &SidpAxiom, b: &SidpAxiom) -> Result<Vec<DetectedTrace>, DlError> {
        let (ca, cb) = (a.concept(), b.concept());
        let both = Concept::and(vec![ca.clone(), cb.clone()]);
        if !self.full.is_satisfiable(&both)? {
            return Ok(vec![DetectedTrace::new(TraceKind::Conflicts, &a.source, &b.source)]);
        }
        let ab = self.full.subsumes(&cb, &ca)?;
        let ba = self.full.subsumes(&ca, &cb)?;
        let mut out = Vec::new();
        match (ab, ba) {
            (true, true) => out.push(DetectedTrace::new(TraceKind::Equals, &a.source, &b.source)),
            (true, false) => {
                let kind = self.entailment_kind(&cb, &ca)?;
                out.push(DetectedTrace::new(kind, &a.source, &b.source));
            }
            (false, true) => {
                let kind = self.entailment_kind(&ca, &cb)?;
                out.push(DetectedTrace::new(kind, &b.source, &a.source));
            }
            (false, false) => {}
        }
        Ok(out)
    }

    fn entailment_kind(&mut self, sup: &Concept, sub: &Concept) -> Result<TraceKind, DlError> {
        Ok(if self.plain.subsumes(sup, sub)? {
            TraceKind::Refines
        } else {
            TraceKind::Requires
        })
    }
}

pub fn detect_trace(a: &SidpAxiom, b: &SidpAxiom, onto: &Ontology) -> Result<Vec<DetectedTrace>, DlError> {
    TraceDetector::new(onto)?.detect(a, b)
}

/// Keeps the covering entailments (no strictly intermediate axiom) and the
/// most general conflicting pairs; equalities are kept as they are.
/// Conflicts are reported once per unordered pair, lower id first.
pub fn reduce_traces(ids: &[String], raw: &[DetectedTrace]) -> Vec<DetectedTrace> {
    let n = ids.len();
    let pos = |s: &str| ids.iter().position(|i| i == s);
    let mut le = vec![vec![false; n]; n];
    let mut conflict = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for t in raw {
        let (Some(a), Some(b)) = (pos(&t.from), pos(&t.to)) else { continue };
        match t.kind {
            TraceKind::Refines | TraceKind::Requires => le[a][b] = true,
            TraceKind::Equals => {
                le[a][b] = true;
                le[b][a] = true;
            }
            TraceKind::Conflicts => {
                conflict[a][b] = true;
                conflict[b][a] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let lt = |a: usize, b: usize| le[a][b] && !le[b][a];
    let mut out = Vec::new();
    for t in raw {
        let (Some(a), Some(b)) = (pos(&t.from), pos(&t.to)) else { continue };
        let keep = match t.kind {
            TraceKind::Equals => true,
            TraceKind::Refines | TraceKind::Requires => !(0..n).any(|c| lt(a, c) && lt(c, b)),
            TraceKind::Conflicts => !(0..n).any(|c| {
                (0..n).any(|d| {
                    conflict[c][d] && le[a][c] && le[b][d] && !(le[c][a] && le[d][b])
                })
            }),
        };
        if keep {
            let t = if t.kind == TraceKind::Conflicts && b < a {
                DetectedTrace::new(t.kind, &t.to, &t.from)
            } else {
                t.clone()
            };
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}
