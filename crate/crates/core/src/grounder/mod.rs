//! Grounding of typed formulas over bounds into a boolean circuit, and
//! Tseitin conversion of that circuit into CNF.

mod circuit;
mod matrix;
mod tseitin;

use std::collections::HashMap;

pub use circuit::{Circuit, Gate, Node};
pub use matrix::{Grounder, Matrix};
pub use tseitin::{to_cnf, Polarity, TseitinEncoder};

use crate::forl::ir::RelId;
use crate::forl::TypedSpec;
use crate::relational::{Bounds, Tuple, TupleSet};
use crate::sat::{Model, Var};

/// One boolean variable per tuple in `upper \ lower`, numbered in relation
/// order then lexicographic tuple order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarMap {
    entries: Vec<(RelId, Tuple)>,
    index: HashMap<(RelId, Tuple), Var>,
}

impl VarMap {
    pub fn new(bounds: &Bounds) -> Self {
        let mut map = VarMap::default();
        for r in 0..bounds.upper.len() {
            for t in bounds.upper[r].difference(&bounds.lower[r]).iter() {
                let v = Var(map.entries.len() as u32);
                map.entries.push((r, t.clone()));
                map.index.insert((r, t.clone()), v);
            }
        }
        map
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn var(&self, rel: RelId, tuple: &[u32]) -> Option<Var> {
        self.index.get(&(rel, tuple.to_vec())).copied()
    }

    pub fn entry(&self, v: Var) -> (RelId, &Tuple) {
        let (r, t) = &self.entries[v.index()];
        (*r, t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, RelId, &Tuple)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, (r, t))| (Var(i as u32), *r, t))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.entries.len() as u32).map(Var)
    }

    /// Relation values under a model: the lower bound plus every true
    /// variable.
    pub fn decode(&self, bounds: &Bounds, model: &Model) -> Vec<TupleSet> {
        self.decode_with(bounds, |v| model.value(v))
    }

    pub fn decode_with(&self, bounds: &Bounds, value: impl Fn(Var) -> bool) -> Vec<TupleSet> {
        let mut out = bounds.lower.clone();
        for (v, r, t) in self.iter() {
            if value(v) {
                out[r].insert(t.clone());
            }
        }
        out
    }
}

/// A set of facts grounded into one circuit.
#[derive(Debug, Clone)]
pub struct Grounding {
    pub circuit: Circuit,
    pub var_map: VarMap,
    /// Root node per grounded fact, by fact index.
    pub fact_roots: Vec<(usize, Node)>,
    pub root: Node,
}

/// Grounds the selected facts of `spec` over `bounds`.
pub fn ground(spec: &TypedSpec, bounds: &Bounds, facts: &[usize]) -> Grounding {
    let var_map = VarMap::new(bounds);
    let mut g = Grounder::new(bounds, &var_map);
    let mut fact_roots = Vec::with_capacity(facts.len());
    for &i in facts {
        let f = &spec.facts[i];
        let node = g.ground_formula(&f.formula, f.num_vars());
        fact_roots.push((i, node));
    }
    let mut circuit = g.into_circuit();
    let root = circuit.and(fact_roots.iter().map(|&(_, n)| n));
    Grounding {
        circuit,
        var_map,
        fact_roots,
        root,
    }
}

impl Grounding {
    pub fn to_cnf(&self, polarity: Polarity) -> crate::sat::Cnf {
        to_cnf(&self.circuit, self.root, self.var_map.len() as u32, polarity)
    }
}
