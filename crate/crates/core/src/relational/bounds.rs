use super::{Atom, Instance, TupleSet, Universe};
use crate::forl::ir::RelId;
use crate::forl::TypedSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// Every relation fixed to its instance value.
    Consistency,
    /// Target fields range from their instance value up to the full product
    /// of their column sigs; everything else is fixed.
    Infer { targets: Vec<RelId> },
    /// Fresh atoms may join any sig; fields stay fixed unless `link_fresh`,
    /// in which case they may gain tuples mentioning a fresh atom.
    Discover { fresh: usize, link_fresh: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub universe: Universe,
    pub lower: Vec<TupleSet>,
    pub upper: Vec<TupleSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("unknown target relation `{0}`")]
    UnknownTarget(String),
    #[error("tuple {tuple:?} of `{relation}` lies outside its column types")]
    TupleOutsideType { relation: String, tuple: Vec<String> },
}

impl Bounds {
    pub fn is_exact(&self, r: RelId) -> bool {
        self.lower[r] == self.upper[r]
    }

    /// Structural invariants; returns a description of the first violation.
    pub fn check_invariants(&self, spec: &TypedSpec) -> Result<(), String> {
        for (r, rel) in spec.relations.iter().enumerate() {
            if !self.lower[r].is_subset(&self.upper[r]) {
                return Err(format!("lower ⊄ upper for {}", rel.name));
            }
            let cols: Vec<TupleSet> = rel
                .columns
                .iter()
                .map(|&c| self.upper[spec.sigs[c].rel].clone())
                .collect();
            if !rel.is_sig() {
                let product = TupleSet::product_of(&cols, rel.arity());
                if !self.upper[r].is_subset(&product) {
                    return Err(format!("upper of {} exceeds its column types", rel.name));
                }
            }
        }
        for s in &spec.sigs {
            if let Some(p) = s.parent {
                if !self.upper[s.rel].is_subset(&self.upper[spec.sigs[p].rel]) {
                    return Err(format!("upper of {} exceeds its parent", s.name));
                }
            }
        }
        Ok(())
    }
}

fn column_product(spec: &TypedSpec, sig_values: &[TupleSet], rel: RelId) -> TupleSet {
    let r = &spec.relations[rel];
    let cols: Vec<TupleSet> = r
        .columns
        .iter()
        .map(|&c| sig_values[spec.sigs[c].rel].clone())
        .collect();
    TupleSet::product_of(&cols, r.arity())
}

pub fn build_bounds(mode: &Mode, spec: &TypedSpec, instance: &Instance) -> Result<Bounds, BoundsError> {
    for r in spec.field_ids() {
        let product = column_product(spec, &instance.values, r);
        if let Some(t) = instance.values[r].iter().find(|t| !product.contains(t)) {
            return Err(BoundsError::TupleOutsideType {
                relation: spec.rel_name(r).to_string(),
                tuple: instance.universe.names(t),
            });
        }
    }
    let lower = instance.values.clone();
    let mut universe = instance.universe.clone();
    let upper = match mode {
        Mode::Consistency => lower.clone(),
        Mode::Infer { targets } => {
            let mut upper = lower.clone();
            for &t in targets {
                if t >= spec.relations.len() || spec.relations[t].is_sig() {
                    return Err(BoundsError::UnknownTarget(
                        spec.relations.get(t).map_or_else(|| t.to_string(), |r| r.name.clone()),
                    ));
                }
                upper[t] = column_product(spec, &lower, t).union(&lower[t]);
            }
            upper
        }
        Mode::Discover { fresh, link_fresh } => {
            let fresh_atoms: Vec<Atom> = (0..*fresh)
                .map(|i| universe.push(format!("$fresh{i}")))
                .collect();
            let mut upper = lower.clone();
            for s in &spec.sigs {
                for &a in &fresh_atoms {
                    upper[s.rel].insert(vec![a]);
                }
            }
            if *link_fresh {
                for r in spec.field_ids() {
                    let product = column_product(spec, &upper, r);
                    for t in product.iter() {
                        if t.iter().any(|a| fresh_atoms.contains(a)) {
                            upper[r].insert(t.clone());
                        }
                    }
                }
            }
            upper
        }
    };
    Ok(Bounds {
        universe,
        lower,
        upper,
    })
}
