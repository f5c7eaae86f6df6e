//! Bottom-up matching of normalized rules against a set of tuples.

use std::collections::{HashMap, HashSet};

use crate::forl::rules::{Atom as RuleAtom, Head, Rule, Term};
use crate::relational::{Atom, Tuple, TupleSet};

/// Tuples of one relation with a per-column index.
#[derive(Debug, Clone, Default)]
pub struct Table {
    set: HashSet<Tuple>,
    tuples: Vec<Tuple>,
    by_col: Vec<HashMap<Atom, Vec<usize>>>,
}

impl Table {
    pub fn new(arity: usize) -> Self {
        Table {
            set: HashSet::new(),
            tuples: Vec::new(),
            by_col: vec![HashMap::new(); arity],
        }
    }

    pub fn insert(&mut self, t: Tuple) -> bool {
        if !self.set.insert(t.clone()) {
            return false;
        }
        let i = self.tuples.len();
        for (c, &a) in t.iter().enumerate() {
            self.by_col[c].entry(a).or_default().push(i);
        }
        self.tuples.push(t);
        true
    }

    pub fn contains(&self, t: &[Atom]) -> bool {
        self.set.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> + '_ {
        self.tuples.iter()
    }
}

/// One table per relation.
#[derive(Debug, Clone, Default)]
pub struct Db {
    pub tables: Vec<Table>,
}

impl Db {
    pub fn from_values(values: &[TupleSet]) -> Self {
        let mut db = Db::empty(values.iter().map(TupleSet::arity));
        for (r, v) in values.iter().enumerate() {
            for t in v.iter() {
                db.tables[r].insert(t.clone());
            }
        }
        db
    }

    pub fn empty(arities: impl Iterator<Item = usize>) -> Self {
        Db {
            tables: arities.map(Table::new).collect(),
        }
    }

    pub fn contains(&self, rel: usize, t: &[Atom]) -> bool {
        self.tables[rel].contains(t)
    }
}

/// Calls `f` with every binding of the rule's variables (as `Some` where
/// bound by the body) under which every body atom holds. Body atom `delta.0`
/// is matched against `delta.1` instead of `db` when given.
pub fn for_each_match(
    rule: &Rule,
    db: &Db,
    delta: Option<(usize, &Db)>,
    f: &mut dyn FnMut(&[Option<Atom>]),
) {
    let mut binding = vec![None; rule.num_vars];
    let mut remaining: Vec<usize> = (0..rule.body.len()).collect();
    if let Some((i, _)) = delta {
        remaining.retain(|&j| j != i);
        remaining.insert(0, i);
    }
    search(rule, db, delta, &mut remaining, &mut binding, f);
}

fn search(
    rule: &Rule,
    db: &Db,
    delta: Option<(usize, &Db)>,
    remaining: &mut Vec<usize>,
    binding: &mut Vec<Option<Atom>>,
    f: &mut dyn FnMut(&[Option<Atom>]),
) {
    if remaining.is_empty() {
        f(binding);
        return;
    }
    // most-bound atom next, keeping the delta atom first
    let pick = if delta.is_some() && remaining[0] == delta.unwrap().0 && binding.iter().all(Option::is_none) {
        0
    } else {
        (0..remaining.len())
            .max_by_key(|&k| {
                let a = &rule.body[remaining[k]];
                let bound = a.args.iter().filter(|&&v| binding[v as usize].is_some()).count();
                (bound, std::cmp::Reverse(k))
            })
            .unwrap()
    };
    let ai = remaining.remove(pick);
    let atom: &RuleAtom = &rule.body[ai];
    let table = match delta {
        Some((d, ddb)) if d == ai => &ddb.tables[atom.rel],
        _ => &db.tables[atom.rel],
    };
    let key = atom
        .args
        .iter()
        .enumerate()
        .find_map(|(c, &v)| binding[v as usize].map(|a| (c, a)));
    let candidates: Box<dyn Iterator<Item = &Tuple>> = match key {
        Some((c, a)) => match table.by_col[c].get(&a) {
            Some(ix) => Box::new(ix.iter().map(|&i| &table.tuples[i])),
            None => Box::new(std::iter::empty()),
        },
        None => Box::new(table.tuples.iter()),
    };
    let candidates: Vec<&Tuple> = candidates.collect();
    for t in candidates {
        let mut newly: Vec<Term> = Vec::new();
        let mut ok = true;
        for (&v, &a) in atom.args.iter().zip(t.iter()) {
            match binding[v as usize] {
                Some(b) if b != a => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    binding[v as usize] = Some(a);
                    newly.push(v);
                }
            }
        }
        if ok {
            search(rule, db, delta, remaining, binding, f);
        }
        for v in newly {
            binding[v as usize] = None;
        }
    }
    remaining.insert(pick, ai);
}

/// Completes a partial binding by letting the unbound variables among
/// `vars` range over `0..universe`, calling `f` on each binding. Variables
/// outside `vars` that are still unbound read as atom 0.
pub fn for_each_completion(binding: &[Option<Atom>], vars: &[Term], universe: usize, f: &mut dyn FnMut(&[Atom])) {
    let mut free: Vec<usize> = vars
        .iter()
        .map(|&v| v as usize)
        .filter(|&i| binding[i].is_none())
        .collect();
    free.sort_unstable();
    free.dedup();
    let mut total: Vec<Atom> = binding.iter().map(|b| b.unwrap_or(0)).collect();
    if !free.is_empty() && universe == 0 {
        return;
    }
    loop {
        f(&total);
        let mut k = 0;
        loop {
            if k == free.len() {
                return;
            }
            let i = free[k];
            total[i] += 1;
            if (total[i] as usize) < universe {
                break;
            }
            total[i] = 0;
            k += 1;
        }
    }
}

/// Variables the head mentions.
pub fn head_vars(head: &Head) -> Vec<Term> {
    match head {
        Head::Atom(a) => a.args.clone(),
        Head::Equal(x, y) => vec![*x, *y],
        Head::False => Vec::new(),
    }
}

pub fn instantiate(atom: &RuleAtom, total: &[Atom]) -> Tuple {
    atom.args.iter().map(|&v| total[v as usize]).collect()
}
