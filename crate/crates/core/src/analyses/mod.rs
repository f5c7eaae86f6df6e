//! Consistency checking, trace-relation inference, trace-element discovery
//! and the Horn fixpoint.

mod engine;
mod fixpoint;
mod matcher;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use engine::{Session, Valuation};

use crate::forl::ir::RelId;
use crate::forl::TypedSpec;
use crate::grounder::{ground, Polarity, VarMap};
use crate::relational::{build_bounds, Bounds, BoundsError, Instance, Mode, TupleSet};
use crate::sat::{Cnf, SatError};

pub const SCHEMA_VERSION: u32 = 1;
pub const PROVENANCE_RL: &str = "RL";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("inference impossible: the premises are inconsistent (violated: {})", violated.join(", "))]
    InconsistentPremises { violated: Vec<String> },
    #[error("fact `{0}` is not Horn and is violated by the least fixpoint")]
    NonHornFact(String),
    #[error("no suggestion: unsatisfiable even with fresh atoms (violated: {})", violated.join(", "))]
    NoSuggestion { violated: Vec<String> },
    #[error("fresh atom count must be at least 1")]
    NoFreshAtoms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Horn,
    #[default]
    Sat,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub engine: Engine,
    /// Report wall-clock time in `stats.ms`; otherwise it stays 0 so output
    /// is byte-deterministic.
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisMode {
    Consistency,
    Infer,
    Discover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Solutions,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InferredTuple {
    pub relation: String,
    pub tuple: Vec<String>,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub vars: usize,
    pub clauses: usize,
    pub ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub mode: AnalysisMode,
    pub verdict: Verdict,
    pub inferred: Vec<InferredTuple>,
    pub violated: Vec<String>,
    pub stats: Stats,
}

impl AnalysisReport {
    pub fn new(mode: AnalysisMode, verdict: Verdict) -> Self {
        AnalysisReport {
            schema: SCHEMA_VERSION,
            mode,
            verdict,
            inferred: Vec::new(),
            violated: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Whether `relation(tuple)` is among the inferred tuples.
    pub fn has(&self, relation: &str, tuple: &[&str]) -> bool {
        self.inferred
            .iter()
            .any(|t| t.relation == relation && t.tuple.iter().map(String::as_str).eq(tuple.iter().copied()))
    }
}

struct Timer {
    start: Option<Instant>,
}

impl Timer {
    fn start(opts: &Options) -> Self {
        Timer {
            start: opts.timing.then(Instant::now),
        }
    }

    fn ms(&self) -> u64 {
        self.start.map_or(0, |s| s.elapsed().as_millis() as u64)
    }
}

fn is_sat(spec: &TypedSpec, bounds: &Bounds, facts: &[usize]) -> Result<bool, SatError> {
    let mut s = Session::new(spec, bounds.clone(), facts, false);
    Ok(s.solve(&[])?.is_some())
}

/// Deletion-based localization: drops each fact in turn when the rest stays
/// unsatisfiable. What remains is a minimal unsatisfiable subset; removing
/// any one of its facts restores satisfiability.
pub fn localize(spec: &TypedSpec, bounds: &Bounds, facts: &[usize]) -> Result<Vec<String>, SatError> {
    let mut core: Vec<usize> = facts.to_vec();
    let mut i = 0;
    while i < core.len() {
        let mut rest = core.clone();
        rest.remove(i);
        if is_sat(spec, bounds, &rest)? {
            i += 1;
        } else {
            core = rest;
        }
    }
    Ok(core.iter().map(|&f| spec.facts[f].name.clone()).collect())
}

/// Checks the instance against every non-annotated fact with all relations
/// fixed. When the spec has `Reason@` facts, a second pass frees their
/// target relations and checks all facts together, so an instance whose
/// closure under the reasoning facts contradicts a constraint is reported
/// too.
pub fn check_consistency(spec: &TypedSpec, instance: &Instance, opts: &Options) -> Result<AnalysisReport, AnalysisError> {
    let timer = Timer::start(opts);
    let exact = build_bounds(&Mode::Consistency, spec, instance)?;
    let facts = spec.consistency_facts();
    let mut phases = vec![(exact, facts)];
    let targets = spec.annotated_targets();
    if !targets.is_empty() {
        let closure = build_bounds(&Mode::Infer { targets }, spec, instance)?;
        phases.push((closure, (0..spec.facts.len()).collect()));
    }
    let mut report = AnalysisReport::new(AnalysisMode::Consistency, Verdict::Consistent);
    for (bounds, facts) in phases {
        let mut s = Session::new(spec, bounds.clone(), &facts, false);
        let sat = s.solve(&[])?.is_some();
        report.stats.vars = report.stats.vars.max(s.num_vars());
        report.stats.clauses = report.stats.clauses.max(s.num_clauses());
        if !sat {
            report.verdict = Verdict::Inconsistent;
            report.violated = localize(spec, &bounds, &facts)?;
            break;
        }
    }
    report.stats.ms = timer.ms();
    Ok(report)
}

pub fn resolve_targets(spec: &TypedSpec, targets: &[&str]) -> Result<Vec<RelId>, AnalysisError> {
    let mut ids = Vec::new();
    for &t in targets {
        match spec.relation(t) {
            Some(r) if !spec.relations[r].is_sig() => {
                if !ids.contains(&r) {
                    ids.push(r);
                }
            }
            _ => return Err(BoundsError::UnknownTarget(t.to_string()).into()),
        }
    }
    ids.sort_unstable();
    Ok(ids)
}

fn inferred_tuples(spec: &TypedSpec, bounds: &Bounds, values: &[TupleSet]) -> Vec<InferredTuple> {
    let mut out = Vec::new();
    for (r, v) in values.iter().enumerate() {
        for t in v.difference(&bounds.lower[r]).iter() {
            out.push(InferredTuple {
                relation: spec.rel_name(r).to_string(),
                tuple: bounds.universe.names(t),
                provenance: PROVENANCE_RL.to_string(),
            });
        }
    }
    out
}

/// Alternative subset-minimal models of an inference or discovery problem.
/// Each model found is blocked together with all its supersets.
pub struct Solutions<'a> {
    session: Session<'a>,
    facts: Vec<usize>,
    mode: AnalysisMode,
    done: bool,
    produced: usize,
}

impl<'a> Solutions<'a> {
    fn new(spec: &'a TypedSpec, bounds: Bounds, facts: Vec<usize>, mode: AnalysisMode) -> Self {
        Solutions {
            session: Session::new(spec, bounds, &facts, false),
            facts,
            mode,
            done: false,
            produced: 0,
        }
    }

    pub fn bounds(&self) -> &Bounds {
        &self.session.bounds
    }

    pub fn var_map(&self) -> &VarMap {
        &self.session.var_map
    }

    pub fn next_model(&mut self) -> Result<Option<Valuation>, SatError> {
        if self.done {
            return Ok(None);
        }
        let Some(first) = self.session.solve(&[])? else {
            self.done = true;
            return Ok(None);
        };
        let min = self.session.minimize(first)?;
        self.session.block_supersets(&min);
        self.produced += 1;
        Ok(Some(min))
    }

    /// The next solution as a report.
    pub fn next_report(&mut self) -> Result<Option<AnalysisReport>, SatError> {
        let Some(val) = self.next_model()? else {
            return Ok(None);
        };
        let spec = self.session.spec();
        let mut report = AnalysisReport::new(self.mode, Verdict::Solutions);
        report.inferred = inferred_tuples(spec, &self.session.bounds, &val.values);
        report.stats.vars = self.session.num_vars();
        report.stats.clauses = self.session.num_clauses();
        Ok(Some(report))
    }

    pub fn produced(&self) -> usize {
        self.produced
    }

    pub fn facts(&self) -> &[usize] {
        &self.facts
    }
}

fn infer_setup(spec: &TypedSpec, instance: &Instance, targets: &[&str]) -> Result<(Bounds, Vec<usize>), AnalysisError> {
    let ids = resolve_targets(spec, targets)?;
    let bounds = build_bounds(&Mode::Infer { targets: ids.clone() }, spec, instance)?;
    Ok((bounds, spec.inference_facts(&ids)))
}

/// Iterator over minimal inference models.
pub fn infer_solutions<'a>(spec: &'a TypedSpec, instance: &Instance, targets: &[&str]) -> Result<Solutions<'a>, AnalysisError> {
    let (bounds, facts) = infer_setup(spec, instance, targets)?;
    Ok(Solutions::new(spec, bounds, facts, AnalysisMode::Infer))
}

/// Infers tuples of the target relations: the first subset-minimal model
/// minus the instance. With the Horn engine the least fixpoint is computed
/// directly instead.
pub fn infer_relations(spec: &TypedSpec, instance: &Instance, targets: &[&str], opts: &Options) -> Result<AnalysisReport, AnalysisError> {
    let timer = Timer::start(opts);
    let mut report = match opts.engine {
        Engine::Horn => {
            let (bounds, facts) = infer_setup(spec, instance, targets)?;
            let values = fixpoint::least_fixpoint(spec, &bounds, &facts)?;
            let mut r = AnalysisReport::new(AnalysisMode::Infer, Verdict::Solutions);
            r.inferred = inferred_tuples(spec, &bounds, &values);
            r
        }
        Engine::Sat => {
            let mut sols = infer_solutions(spec, instance, targets)?;
            match sols.next_report()? {
                Some(r) => r,
                None => {
                    let violated = localize(spec, sols.bounds(), sols.facts())?;
                    return Err(AnalysisError::InconsistentPremises { violated });
                }
            }
        }
    };
    report.stats.ms = timer.ms();
    Ok(report)
}

/// Semi-naive least fixpoint of the inference facts for `targets`.
pub fn horn_fixpoint(spec: &TypedSpec, instance: &Instance, targets: &[&str]) -> Result<Vec<TupleSet>, AnalysisError> {
    let (bounds, facts) = infer_setup(spec, instance, targets)?;
    fixpoint::least_fixpoint(spec, &bounds, &facts)
}

fn discover_setup(spec: &TypedSpec, instance: &Instance, fresh: usize, link_fresh: bool) -> Result<Bounds, AnalysisError> {
    if fresh == 0 {
        return Err(AnalysisError::NoFreshAtoms);
    }
    Ok(build_bounds(&Mode::Discover { fresh, link_fresh }, spec, instance)?)
}

pub fn discover_solutions<'a>(spec: &'a TypedSpec, instance: &Instance, fresh: usize, link_fresh: bool) -> Result<Solutions<'a>, AnalysisError> {
    let bounds = discover_setup(spec, instance, fresh, link_fresh)?;
    Ok(Solutions::new(spec, bounds, spec.consistency_facts(), AnalysisMode::Discover))
}

/// Suggests sig memberships (and links, with `link_fresh`) for `fresh` new
/// atoms that make the instance satisfy the non-annotated facts.
pub fn discover_locations(spec: &TypedSpec, instance: &Instance, fresh: usize, link_fresh: bool, opts: &Options) -> Result<AnalysisReport, AnalysisError> {
    let timer = Timer::start(opts);
    let mut sols = discover_solutions(spec, instance, fresh, link_fresh)?;
    match sols.next_report()? {
        Some(mut r) => {
            r.stats.ms = timer.ms();
            Ok(r)
        }
        None => {
            let violated = localize(spec, sols.bounds(), sols.facts())?;
            Err(AnalysisError::NoSuggestion { violated })
        }
    }
}

/// Eagerly grounded CNF of a problem, for DIMACS export.
pub fn problem_cnf(spec: &TypedSpec, bounds: &Bounds, facts: &[usize], polarity: Polarity) -> (Cnf, VarMap) {
    let g = ground(spec, bounds, facts);
    (g.to_cnf(polarity), g.var_map)
}
