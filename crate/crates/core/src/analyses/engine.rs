//! SAT-backed model finding with lazy rule instantiation.
//!
//! Facts with a rule form are not grounded up front. Each model is checked
//! against them; every violated ground instance is added as a clause and the
//! solver runs again. Facts without a rule form are grounded eagerly through
//! the circuit. When no instance is violated the model satisfies every
//! selected fact.

use std::collections::HashSet;

use super::matcher::{for_each_completion, for_each_match, head_vars, instantiate, Db};
use crate::forl::rules::{Head, Rule};
use crate::forl::TypedSpec;
use crate::grounder::{Grounder, Polarity, TseitinEncoder, VarMap};
use crate::relational::{Bounds, TupleSet};
use crate::sat::{Lit, Model, SatError, SolveResult, Solver, SolverConfig, Var};

pub struct Session<'a> {
    spec: &'a TypedSpec,
    pub bounds: Bounds,
    pub var_map: VarMap,
    solver: Solver,
    lazy: Vec<(usize, &'a Rule)>,
    seen: HashSet<Vec<Lit>>,
    unsat: bool,
    pub refinements: usize,
}

/// A model restricted to the bounds' free tuples.
#[derive(Debug, Clone)]
pub struct Valuation {
    pub values: Vec<TupleSet>,
    pub true_vars: Vec<Var>,
}

impl<'a> Session<'a> {
    /// `eager` grounds every fact through the circuit, bypassing the lazy
    /// path.
    pub fn new(spec: &'a TypedSpec, bounds: Bounds, facts: &[usize], eager: bool) -> Self {
        let var_map = VarMap::new(&bounds);
        let mut solver = Solver::new(SolverConfig::from_env());
        solver.ensure_vars(var_map.len() as u32);
        let mut lazy = Vec::new();
        let mut eager_facts = Vec::new();
        for &i in facts {
            match (&spec.facts[i].rules, eager) {
                (Some(rules), false) => lazy.extend(rules.iter().map(|r| (i, r))),
                _ => eager_facts.push(i),
            }
        }
        let mut unsat = false;
        if !eager_facts.is_empty() {
            let mut g = Grounder::new(&bounds, &var_map);
            let roots: Vec<_> = eager_facts
                .iter()
                .map(|&i| g.ground_formula(&spec.facts[i].formula, spec.facts[i].num_vars()))
                .collect();
            let mut circuit = g.into_circuit();
            let root = circuit.and(roots);
            let mut enc = TseitinEncoder::new(var_map.len() as u32, Polarity::Full);
            let clauses = enc.assert_root(&circuit, root);
            solver.ensure_vars(enc.num_vars());
            for c in clauses {
                if !solver.add_clause(&c) {
                    unsat = true;
                }
            }
        }
        Session {
            spec,
            bounds,
            var_map,
            solver,
            lazy,
            seen: HashSet::new(),
            unsat,
            refinements: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.solver.num_vars() as usize
    }

    pub fn num_clauses(&self) -> usize {
        self.solver.num_clauses()
    }

    fn add_clause(&mut self, c: Vec<Lit>) {
        if !self.solver.add_clause(&c) {
            self.unsat = true;
        }
    }

    /// A model of all selected facts under `assumptions`, or `None`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<Option<Valuation>, SatError> {
        loop {
            if self.unsat {
                return Ok(None);
            }
            let model = match self.solver.solve(assumptions)? {
                SolveResult::Unsat { .. } => return Ok(None),
                SolveResult::Sat(m) => m,
            };
            let val = self.valuation(&model);
            let clauses = self.violations(&val.values);
            if clauses.is_empty() {
                return Ok(Some(val));
            }
            self.refinements += 1;
            for c in clauses {
                self.add_clause(c);
            }
        }
    }

    fn valuation(&self, model: &Model) -> Valuation {
        let true_vars: Vec<Var> = self.var_map.vars().filter(|&v| model.value(v)).collect();
        Valuation {
            values: self.var_map.decode(&self.bounds, model),
            true_vars,
        }
    }

    /// Ground clauses for the rule instances that `values` violates.
    fn violations(&mut self, values: &[TupleSet]) -> Vec<Vec<Lit>> {
        let db = Db::from_values(values);
        let n = self.bounds.universe.len();
        let mut out = Vec::new();
        let lazy = std::mem::take(&mut self.lazy);
        for &(_, rule) in &lazy {
            let hv = head_vars(&rule.head);
            for_each_match(rule, &db, None, &mut |binding| {
                for_each_completion(binding, &hv, n, &mut |total| {
                    let violated = match &rule.head {
                        Head::Atom(a) => !db.contains(a.rel, &instantiate(a, total)),
                        Head::Equal(x, y) => total[*x as usize] != total[*y as usize],
                        Head::False => true,
                    };
                    if violated {
                        if let Some(c) = self.ground_clause(rule, total) {
                            out.push(c);
                        }
                    }
                });
            });
        }
        self.lazy = lazy;
        out
    }

    /// `body => head` for one binding, with fixed tuples folded away;
    /// `None` when the clause is already satisfied or was added before.
    fn ground_clause(&mut self, rule: &Rule, total: &[u32]) -> Option<Vec<Lit>> {
        let mut clause = Vec::new();
        for a in &rule.body {
            let t = instantiate(a, total);
            if self.bounds.lower[a.rel].contains(&t) {
                continue;
            }
            match self.var_map.var(a.rel, &t) {
                Some(v) => clause.push(v.neg()),
                None => return None,
            }
        }
        if let Head::Atom(a) = &rule.head {
            let t = instantiate(a, total);
            if self.bounds.lower[a.rel].contains(&t) {
                return None;
            }
            if let Some(v) = self.var_map.var(a.rel, &t) {
                clause.push(v.pos());
            }
        }
        clause.sort_unstable();
        clause.dedup();
        if self.seen.insert(clause.clone()) {
            Some(clause)
        } else {
            None
        }
    }

    /// Shrinks `val` to a subset-minimal model over the free tuples.
    pub fn minimize(&mut self, mut val: Valuation) -> Result<Valuation, SatError> {
        loop {
            if val.true_vars.is_empty() {
                return Ok(val);
            }
            let act = self.solver.new_var();
            let mut shrink: Vec<Lit> = vec![act.neg()];
            shrink.extend(val.true_vars.iter().map(|v| v.neg()));
            self.add_clause(shrink);
            let truth: HashSet<Var> = val.true_vars.iter().copied().collect();
            let mut assumptions = vec![act.pos()];
            assumptions.extend(self.var_map.vars().filter(|v| !truth.contains(v)).map(|v| v.neg()));
            let next = self.solve(&assumptions)?;
            self.add_clause(vec![act.neg()]);
            match next {
                Some(smaller) => val = smaller,
                None => return Ok(val),
            }
        }
    }

    /// Forbids every model whose true free tuples include those of `val`.
    pub fn block_supersets(&mut self, val: &Valuation) {
        let c: Vec<Lit> = val.true_vars.iter().map(|v| v.neg()).collect();
        self.add_clause(c);
    }

    pub fn spec(&self) -> &'a TypedSpec {
        self.spec
    }
}
