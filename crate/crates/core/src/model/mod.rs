//! Traceability workspace: locations, links, type assignments, and their
//! flattening into a relational instance.

mod io;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use io::MalformedDocument;

use crate::forl::TypedSpec;
use crate::relational::{Instance, Universe};

pub const WORKSPACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LocationKind {
    Text { path: String, offset: u64, length: u64 },
    File { path: String },
    Xmi { path: String, fragment: String },
    Java {
        path: String,
        #[serde(rename = "astPath")]
        ast_path: Vec<String>,
    },
}

impl LocationKind {
    pub fn path(&self) -> &str {
        match self {
            LocationKind::Text { path, .. }
            | LocationKind::File { path }
            | LocationKind::Xmi { path, .. }
            | LocationKind::Java { path, .. } => path,
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLocation {
    pub id: String,
    #[serde(flatten)]
    pub kind: LocationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub broken: bool,
}

impl TraceLocation {
    pub fn text(id: &str, path: &str, offset: u64, length: u64) -> Self {
        TraceLocation {
            id: id.to_string(),
            kind: LocationKind::Text {
                path: path.to_string(),
                offset,
                length,
            },
            parent: None,
            broken: false,
        }
    }

    pub fn file(id: &str, path: &str) -> Self {
        TraceLocation {
            id: id.to_string(),
            kind: LocationKind::File { path: path.to_string() },
            parent: None,
            broken: false,
        }
    }
}

/// Where a link came from: drawn by hand, detected from text by the DL
/// pipeline, or inferred by relational reasoning and accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Origin {
    #[default]
    #[serde(rename = "manual")]
    Manual,
    #[serde(rename = "DL")]
    Dl,
    #[serde(rename = "RL")]
    Rl,
}

fn is_manual(o: &Origin) -> bool {
    *o == Origin::Manual
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLink {
    pub id: String,
    pub endpoints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(default, skip_serializing_if = "is_manual")]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("unknown signature `{0}`")]
    UnknownSignature(String),
    #[error("signature `{0}` is abstract and cannot be assigned directly")]
    AbstractSignature(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown link `{0}`")]
    UnknownLink(String),
    #[error("endpoint `{location}` of link `{link}` has no type")]
    UntypedEndpoint { link: String, location: String },
    #[error("link `{link}` has {found} endpoints but `{relation}` has arity {expected}")]
    ArityMismatch {
        link: String,
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("{0}")]
    TypeViolation(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("a link needs at least two endpoints")]
    TooFewEndpoints,
    #[error("location containment is cyclic at `{0}`")]
    ContainmentCycle(String),
    #[error(transparent)]
    Malformed(#[from] MalformedDocument),
}

/// Result of accepting a tuple into the workspace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Accepted {
    Added { link: String },
    Duplicate { link: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraceabilityInformation {
    pub locations: Vec<TraceLocation>,
    pub links: Vec<TraceLink>,
    pub types: BTreeMap<String, String>,
    pub revision: u64,
}

impl TraceabilityInformation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn location(&self, id: &str) -> Option<&TraceLocation> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn link(&self, id: &str) -> Option<&TraceLink> {
        self.links.iter().find(|l| l.id == id)
    }

    fn has_id(&self, id: &str) -> bool {
        self.location(id).is_some() || self.link(id).is_some()
    }

    pub fn add_location(&mut self, loc: TraceLocation) -> Result<(), ModelError> {
        if self.has_id(&loc.id) {
            return Err(ModelError::DuplicateId(loc.id));
        }
        if let Some(p) = &loc.parent {
            if self.location(p).is_none() {
                return Err(ModelError::UnknownLocation(p.clone()));
            }
        }
        self.locations.push(loc);
        self.locations.sort_by(|a, b| a.id.cmp(&b.id));
        self.revision += 1;
        Ok(())
    }

    pub fn add_link(&mut self, link: TraceLink) -> Result<(), ModelError> {
        if self.has_id(&link.id) {
            return Err(ModelError::DuplicateId(link.id));
        }
        if link.endpoints.len() < 2 {
            return Err(ModelError::TooFewEndpoints);
        }
        if let Some(e) = link.endpoints.iter().find(|e| self.location(e).is_none()) {
            return Err(ModelError::UnknownLocation(e.clone()));
        }
        self.links.push(link);
        self.links.sort_by(|a, b| a.id.cmp(&b.id));
        self.revision += 1;
        Ok(())
    }

    pub fn remove_link(&mut self, id: &str) -> Result<TraceLink, ModelError> {
        let i = self
            .links
            .iter()
            .position(|l| l.id == id)
            .ok_or_else(|| ModelError::UnknownLink(id.to_string()))?;
        self.revision += 1;
        Ok(self.links.remove(i))
    }

    /// An id not yet used, of the form `{prefix}{n}`.
    pub fn fresh_id(&self, prefix: &str) -> String {
        (1..)
            .map(|n| format!("{prefix}{n}"))
            .find(|id| !self.has_id(id))
            .unwrap()
    }

    /// Types a location; reassignment replaces the previous sig.
    pub fn assign_type(&self, spec: &TypedSpec, loc: &str, sig: &str) -> Result<Self, ModelError> {
        if self.location(loc).is_none() {
            return Err(ModelError::UnknownLocation(loc.to_string()));
        }
        let s = spec
            .sig(sig)
            .ok_or_else(|| ModelError::UnknownSignature(sig.to_string()))?;
        if spec.sigs[s].is_abstract {
            return Err(ModelError::AbstractSignature(sig.to_string()));
        }
        let mut next = self.clone();
        next.types.insert(loc.to_string(), sig.to_string());
        next.revision += 1;
        Ok(next)
    }

    fn endpoint_sigs(&self, spec: &TypedSpec, link: &TraceLink) -> Result<Vec<usize>, ModelError> {
        link.endpoints
            .iter()
            .map(|e| {
                let ty = self.types.get(e).ok_or_else(|| ModelError::UntypedEndpoint {
                    link: link.id.clone(),
                    location: e.clone(),
                })?;
                spec.sig(ty).ok_or_else(|| ModelError::UnknownSignature(ty.clone()))
            })
            .collect()
    }

    /// Fields of matching arity whose column sigs are supersigs of the
    /// endpoint types, in declaration order.
    pub fn approximate_link_type(&self, spec: &TypedSpec, link: &TraceLink) -> Result<Vec<String>, ModelError> {
        let sigs = self.endpoint_sigs(spec, link)?;
        Ok(spec
            .field_ids()
            .filter(|&r| {
                let cols = &spec.relations[r].columns;
                cols.len() == sigs.len() && cols.iter().zip(&sigs).all(|(&c, &s)| spec.is_subsig(s, c))
            })
            .map(|r| spec.rel_name(r).to_string())
            .collect())
    }

    /// Relational instance: one atom per typed location, in id order; each
    /// sig holds the atoms typed by it or by one of its subsigs; each field
    /// holds the endpoint tuples of the links typed by it.
    pub fn to_relational(&self, spec: &TypedSpec) -> Result<Instance, ModelError> {
        let universe = Universe::new(self.types.keys().cloned());
        let mut inst = Instance::empty(spec, universe);
        for (loc, ty) in &self.types {
            if self.location(loc).is_none() {
                return Err(ModelError::UnknownLocation(loc.clone()));
            }
            let s = spec.sig(ty).ok_or_else(|| ModelError::UnknownSignature(ty.clone()))?;
            if spec.sigs[s].is_abstract {
                return Err(ModelError::AbstractSignature(ty.clone()));
            }
            for (t, info) in spec.sigs.iter().enumerate() {
                if spec.is_subsig(s, t) {
                    inst.add(info.rel, &[loc.as_str()]);
                }
            }
        }
        for link in &self.links {
            let Some(rel) = &link.relation else { continue };
            let r = spec
                .relation(rel)
                .filter(|&r| !spec.relations[r].is_sig())
                .ok_or_else(|| ModelError::UnknownRelation(rel.clone()))?;
            let arity = spec.relations[r].arity();
            if link.endpoints.len() != arity {
                return Err(ModelError::ArityMismatch {
                    link: link.id.clone(),
                    relation: rel.clone(),
                    expected: arity,
                    found: link.endpoints.len(),
                });
            }
            self.endpoint_sigs(spec, link)?;
            let eps: Vec<&str> = link.endpoints.iter().map(String::as_str).collect();
            inst.add(r, &eps);
        }
        Ok(inst)
    }

    /// Materializes `relation(endpoints)` as a link of origin RL. Accepting
    /// a tuple that is already present changes nothing.
    pub fn accept_trace(&self, spec: &TypedSpec, relation: &str, endpoints: &[String]) -> Result<(Self, Accepted), ModelError> {
        let r = spec
            .relation(relation)
            .filter(|&r| !spec.relations[r].is_sig())
            .ok_or_else(|| ModelError::UnknownRelation(relation.to_string()))?;
        let cols = &spec.relations[r].columns;
        if cols.len() != endpoints.len() {
            return Err(ModelError::TypeViolation(format!(
                "`{relation}` has arity {} but {} endpoints were given",
                cols.len(),
                endpoints.len()
            )));
        }
        for (e, &c) in endpoints.iter().zip(cols) {
            let ok = self
                .types
                .get(e)
                .and_then(|ty| spec.sig(ty))
                .is_some_and(|s| spec.is_subsig(s, c));
            if !ok {
                return Err(ModelError::TypeViolation(format!(
                    "`{e}` is not a typed {} atom",
                    spec.sigs[c].name
                )));
            }
        }
        if let Some(l) = self
            .links
            .iter()
            .find(|l| l.relation.as_deref() == Some(relation) && l.endpoints == endpoints)
        {
            return Ok((self.clone(), Accepted::Duplicate { link: l.id.clone() }));
        }
        let mut next = self.clone();
        let id = next.fresh_id("rl");
        next.add_link(TraceLink {
            id: id.clone(),
            endpoints: endpoints.to_vec(),
            relation: Some(relation.to_string()),
            origin: Origin::Rl,
        })?;
        Ok((next, Accepted::Added { link: id }))
    }

    /// Flags locations whose document cannot be read under `root`, or whose
    /// text span runs past the end of it. Returns the ids newly flagged.
    pub fn mark_broken(&mut self, root: &Path) -> Vec<String> {
        let mut cache: HashMap<String, Option<usize>> = HashMap::new();
        let mut flagged = Vec::new();
        for loc in &mut self.locations {
            let path = loc.kind.path().to_string();
            let chars = *cache
                .entry(path.clone())
                .or_insert_with(|| std::fs::read_to_string(root.join(&path)).ok().map(|s| s.chars().count()));
            let broken = match (&loc.kind, chars) {
                (_, None) => true,
                (LocationKind::Text { offset, length, .. }, Some(n)) => offset + length > n as u64,
                _ => false,
            };
            if broken && !loc.broken {
                flagged.push(loc.id.clone());
            }
            loc.broken = broken;
        }
        flagged
    }

    /// Structural checks: unique ids, resolvable references, acyclic
    /// containment.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.check().map_err(|(_, e)| e)
    }

    /// Like `validate`, with a JSON pointer to the offending element.
    fn check(&self) -> Result<(), (String, ModelError)> {
        let mut ids = BTreeSet::new();
        for (i, loc) in self.locations.iter().enumerate() {
            if !ids.insert(loc.id.as_str()) {
                return Err((format!("/locations/{i}/id"), ModelError::DuplicateId(loc.id.clone())));
            }
        }
        for (i, link) in self.links.iter().enumerate() {
            if !ids.insert(link.id.as_str()) {
                return Err((format!("/links/{i}/id"), ModelError::DuplicateId(link.id.clone())));
            }
        }
        for (i, loc) in self.locations.iter().enumerate() {
            let mut seen = BTreeSet::new();
            let mut cur = loc;
            while let Some(p) = &cur.parent {
                let ptr = format!("/locations/{i}/parent");
                if !seen.insert(cur.id.as_str()) {
                    return Err((ptr, ModelError::ContainmentCycle(loc.id.clone())));
                }
                cur = self
                    .location(p)
                    .ok_or_else(|| (ptr, ModelError::UnknownLocation(p.clone())))?;
            }
        }
        for (i, link) in self.links.iter().enumerate() {
            if link.endpoints.len() < 2 {
                return Err((format!("/links/{i}/endpoints"), ModelError::TooFewEndpoints));
            }
            if let Some(j) = link.endpoints.iter().position(|e| self.location(e).is_none()) {
                return Err((
                    format!("/links/{i}/endpoints/{j}"),
                    ModelError::UnknownLocation(link.endpoints[j].clone()),
                ));
            }
        }
        if let Some(k) = self.types.keys().find(|k| self.location(k).is_none()) {
            return Err((format!("/types/{k}"), ModelError::UnknownLocation(k.clone())));
        }
        Ok(())
    }
}
