//! Finite universes, tuple sets, bounds and a concrete evaluator.

mod bounds;
mod eval;

use std::collections::{BTreeSet, HashMap};

pub use bounds::{build_bounds, Bounds, BoundsError, Mode};
pub use eval::{eval_expr, eval_formula, Evaluator};

use crate::forl::TypedSpec;

pub type Atom = u32;
pub type Tuple = Vec<Atom>;

/// Ordered atom names. Index order is the order used for variable
/// numbering, so it must be stable for identical inputs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Universe {
    atoms: Vec<String>,
    index: HashMap<String, Atom>,
}

impl Universe {
    /// Atoms sorted lexicographically, duplicates removed.
    pub fn new<I, S>(atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = atoms.into_iter().map(Into::into).collect();
        let mut u = Universe::default();
        for a in set {
            u.push(a);
        }
        u
    }

    /// Appends an atom after the existing ones; returns its index.
    pub fn push(&mut self, name: impl Into<String>) -> Atom {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.atoms.len() as Atom;
        self.index.insert(name.clone(), i);
        self.atoms.push(name);
        i
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, name: &str) -> Option<Atom> {
        self.index.get(name).copied()
    }

    pub fn name(&self, a: Atom) -> &str {
        &self.atoms[a as usize]
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn names(&self, t: &[Atom]) -> Vec<String> {
        t.iter().map(|&a| self.name(a).to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleSet {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

impl TupleSet {
    pub fn empty(arity: usize) -> Self {
        TupleSet {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    pub fn from_tuples<I: IntoIterator<Item = Tuple>>(arity: usize, tuples: I) -> Self {
        let mut s = TupleSet::empty(arity);
        for t in tuples {
            s.insert(t);
        }
        s
    }

    pub fn unary<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        TupleSet::from_tuples(1, atoms.into_iter().map(|a| vec![a]))
    }

    /// All `arity`-tuples over atoms `0..n`.
    pub fn all(arity: usize, n: usize) -> Self {
        let cols: Vec<TupleSet> = (0..arity).map(|_| TupleSet::unary(0..n as Atom)).collect();
        TupleSet::product_of(&cols, arity)
    }

    /// Cartesian product of unary sets.
    pub fn product_of(cols: &[TupleSet], arity: usize) -> Self {
        let mut acc = vec![Vec::new()];
        for c in cols {
            let mut next = Vec::new();
            for prefix in &acc {
                for t in &c.tuples {
                    let mut p = prefix.clone();
                    p.extend_from_slice(t);
                    next.push(p);
                }
            }
            acc = next;
        }
        TupleSet::from_tuples(arity, acc)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Atom]) -> bool {
        self.tuples.contains(t)
    }

    pub fn insert(&mut self, t: Tuple) -> bool {
        assert_eq!(t.len(), self.arity, "tuple arity mismatch");
        self.tuples.insert(t)
    }

    pub fn remove(&mut self, t: &[Atom]) -> bool {
        self.tuples.remove(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> + '_ {
        self.tuples.iter()
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    pub fn union(&self, other: &TupleSet) -> TupleSet {
        TupleSet {
            arity: self.arity,
            tuples: self.tuples.union(&other.tuples).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &TupleSet) -> TupleSet {
        TupleSet {
            arity: self.arity,
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &TupleSet) -> TupleSet {
        TupleSet {
            arity: self.arity,
            tuples: self.tuples.difference(&other.tuples).cloned().collect(),
        }
    }

    pub fn product(&self, other: &TupleSet) -> TupleSet {
        let mut out = TupleSet::empty(self.arity + other.arity);
        for a in &self.tuples {
            for b in &other.tuples {
                let mut t = a.clone();
                t.extend_from_slice(b);
                out.tuples.insert(t);
            }
        }
        out
    }

    pub fn join(&self, other: &TupleSet) -> TupleSet {
        let mut by_first: HashMap<Atom, Vec<&Tuple>> = HashMap::new();
        for b in &other.tuples {
            by_first.entry(b[0]).or_default().push(b);
        }
        let mut out = TupleSet::empty(self.arity + other.arity - 2);
        for a in &self.tuples {
            if let Some(bs) = by_first.get(&a[a.len() - 1]) {
                for b in bs {
                    let mut t = a[..a.len() - 1].to_vec();
                    t.extend_from_slice(&b[1..]);
                    out.tuples.insert(t);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> TupleSet {
        TupleSet::from_tuples(2, self.tuples.iter().map(|t| vec![t[1], t[0]]))
    }

    /// Least transitive superset.
    pub fn closure(&self) -> TupleSet {
        let mut acc = self.clone();
        loop {
            let next = acc.union(&acc.join(self));
            if next.len() == acc.len() {
                return acc;
            }
            acc = next;
        }
    }

    pub fn iden(n: usize) -> TupleSet {
        TupleSet::from_tuples(2, (0..n as Atom).map(|a| vec![a, a]))
    }
}

/// A relational instance: one tuple set per relation of a spec, over a
/// universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub universe: Universe,
    pub values: Vec<TupleSet>,
}

impl Instance {
    pub fn empty(spec: &TypedSpec, universe: Universe) -> Self {
        Instance {
            universe,
            values: spec
                .relations
                .iter()
                .map(|r| TupleSet::empty(r.arity()))
                .collect(),
        }
    }

    pub fn value(&self, spec: &TypedSpec, name: &str) -> Option<&TupleSet> {
        spec.relation(name).map(|r| &self.values[r])
    }

    /// Adds a tuple by atom names; unknown names are added to the universe.
    pub fn add(&mut self, rel: usize, atoms: &[&str]) {
        let t: Tuple = atoms.iter().map(|a| self.universe.push(*a)).collect();
        self.values[rel].insert(t);
    }

    /// Adds `atom` to sig `sig` and all its `extends` ancestors.
    pub fn add_to_sig(&mut self, spec: &TypedSpec, sig: usize, atom: &str) {
        let a = self.universe.push(atom);
        let mut s = Some(sig);
        while let Some(id) = s {
            self.values[spec.sigs[id].rel].insert(vec![a]);
            s = spec.sigs[id].parent;
        }
    }
}
