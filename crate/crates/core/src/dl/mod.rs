//! Description-logic concepts, background ontologies, a tableau reasoner
//! and trace detection between sentence axioms.

mod syntax;
mod tableau;
mod trace;

use std::fmt;

pub use syntax::{parse_concept, parse_ontology};
pub use tableau::{Reasoner, NODE_BUDGET};
pub use trace::{detect_trace, reduce_traces, DetectedTrace, TraceDetector, TraceKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    pub name: String,
    pub inverse: bool,
}

impl Role {
    pub fn named(name: &str) -> Self {
        Role {
            name: name.to_string(),
            inverse: false,
        }
    }

    pub fn inv(&self) -> Self {
        Role {
            name: self.name.clone(),
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "inv({})", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Atomic(String),
    Not(Box<Concept>),
    And(Vec<Concept>),
    Or(Vec<Concept>),
    Exists(Role, Box<Concept>),
    Forall(Role, Box<Concept>),
}

impl Concept {
    pub fn atomic(name: &str) -> Self {
        Concept::Atomic(name.to_string())
    }

    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn exists(r: Role, c: Concept) -> Self {
        Concept::Exists(r, Box::new(c))
    }

    pub fn forall(r: Role, c: Concept) -> Self {
        Concept::Forall(r, Box::new(c))
    }

    pub fn and(cs: Vec<Concept>) -> Self {
        Concept::And(cs)
    }

    pub fn or(cs: Vec<Concept>) -> Self {
        Concept::Or(cs)
    }

    /// Negation normal form with flattened, sorted, deduplicated `And`/`Or`.
    pub fn nnf(&self) -> Concept {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, pos: bool) -> Concept {
        match (self, pos) {
            (Concept::Top, true) | (Concept::Bottom, false) => Concept::Top,
            (Concept::Top, false) | (Concept::Bottom, true) => Concept::Bottom,
            (Concept::Atomic(_), true) => self.clone(),
            (Concept::Atomic(_), false) => Concept::not(self.clone()),
            (Concept::Not(c), _) => c.nnf_signed(!pos),
            (Concept::And(cs), true) | (Concept::Or(cs), false) => {
                junction(true, cs.iter().map(|c| c.nnf_signed(pos)))
            }
            (Concept::Or(cs), true) | (Concept::And(cs), false) => {
                junction(false, cs.iter().map(|c| c.nnf_signed(pos)))
            }
            (Concept::Exists(r, c), true) | (Concept::Forall(r, c), false) => {
                Concept::exists(r.clone(), c.nnf_signed(pos))
            }
            (Concept::Forall(r, c), true) | (Concept::Exists(r, c), false) => {
                Concept::forall(r.clone(), c.nnf_signed(pos))
            }
        }
    }
}

fn junction(conj: bool, parts: impl Iterator<Item = Concept>) -> Concept {
    let mut items = Vec::new();
    for p in parts {
        match p {
            Concept::And(xs) if conj => items.extend(xs),
            Concept::Or(xs) if !conj => items.extend(xs),
            Concept::Top if conj => {}
            Concept::Bottom if !conj => {}
            Concept::Bottom if conj => return Concept::Bottom,
            Concept::Top if !conj => return Concept::Top,
            other => items.push(other),
        }
    }
    items.sort();
    items.dedup();
    match (items.len(), conj) {
        (0, true) => Concept::Top,
        (0, false) => Concept::Bottom,
        (1, _) => items.pop().unwrap(),
        (_, true) => Concept::And(items),
        (_, false) => Concept::Or(items),
    }
}

/// Prefix syntax, as accepted by [`parse_concept`].
impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, cs: &[Concept]| {
            write!(f, "{op}(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        };
        match self {
            Concept::Top => f.write_str("Thing"),
            Concept::Bottom => f.write_str("Nothing"),
            Concept::Atomic(a) => f.write_str(a),
            Concept::Not(c) => write!(f, "not({c})"),
            Concept::And(cs) => list(f, "and", cs),
            Concept::Or(cs) => list(f, "or", cs),
            Concept::Exists(r, c) => write!(f, "some({r} {c})"),
            Concept::Forall(r, c) => write!(f, "all({r} {c})"),
        }
    }
}

/// Conventional notation with ⊓, ⊔, ∃, ∀ and ⁻.
pub fn to_dl_string(c: &Concept) -> String {
    fn role(r: &Role) -> String {
        if r.inverse {
            format!("{}⁻", r.name)
        } else {
            r.name.clone()
        }
    }
    fn go(c: &Concept, nested: bool) -> String {
        let s = match c {
            Concept::Top => return "⊤".into(),
            Concept::Bottom => return "⊥".into(),
            Concept::Atomic(a) => return a.clone(),
            Concept::Not(c) => return format!("¬{}", go(c, true)),
            Concept::And(cs) => cs.iter().map(|c| go(c, true)).collect::<Vec<_>>().join(" ⊓ "),
            Concept::Or(cs) => cs.iter().map(|c| go(c, true)).collect::<Vec<_>>().join(" ⊔ "),
            Concept::Exists(r, c) => return format!("∃{}.{}", role(r), go(c, true)),
            Concept::Forall(r, c) => return format!("∀{}.{}", role(r), go(c, true)),
        };
        if nested {
            format!("({s})")
        } else {
            s
        }
    }
    go(c, false)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub subclass: Vec<(Concept, Concept)>,
    pub disjoint: Vec<(Concept, Concept)>,
    pub role_inclusions: Vec<(Role, Role)>,
    pub functional: Vec<Role>,
}

impl Ontology {
    /// The same ontology without role inclusion axioms.
    pub fn without_role_inclusions(&self) -> Ontology {
        Ontology {
            role_inclusions: Vec::new(),
            ..self.clone()
        }
    }
}

/// The DL formula assigned to one sentence, read as `subject ⊑ predicate`.
/// Trace detection works on the concept `subject ⊓ predicate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidpAxiom {
    pub source: String,
    pub subject: Concept,
    pub predicate: Concept,
}

impl SidpAxiom {
    pub fn new(source: &str, subject: Concept, predicate: Concept) -> Self {
        SidpAxiom {
            source: source.to_string(),
            subject,
            predicate,
        }
    }

    pub fn concept(&self) -> Concept {
        Concept::and(vec![self.subject.clone(), self.predicate.clone()]).nnf()
    }
}

impl fmt::Display for SidpAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊑ {}", to_dl_string(&self.subject), to_dl_string(&self.predicate))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DlError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("role inclusions are cyclic through `{0}`")]
    CyclicRoles(String),
    #[error("tableau exceeded its budget of {0} nodes")]
    ResourceLimit(usize),
}
