use super::{Atom, TupleSet};
use crate::forl::ir::{Expr, ExprKind, Formula, MultTest, Quantifier};

/// Concrete semantics over a total valuation (one tuple set per relation).
pub struct Evaluator<'a> {
    values: &'a [TupleSet],
    universe_size: usize,
}

/// Value of `expr`; `env[v]` is the atom bound to variable `v`.
pub fn eval_expr(expr: &Expr, values: &[TupleSet], universe_size: usize, env: &[Atom]) -> TupleSet {
    Evaluator::new(values, universe_size).expr(expr, env)
}

pub fn eval_formula(f: &Formula, values: &[TupleSet], universe_size: usize, env: &mut Vec<Atom>) -> bool {
    Evaluator::new(values, universe_size).formula(f, env)
}

impl<'a> Evaluator<'a> {
    pub fn new(values: &'a [TupleSet], universe_size: usize) -> Self {
        Evaluator {
            values,
            universe_size,
        }
    }

    pub fn expr(&self, e: &Expr, env: &[Atom]) -> TupleSet {
        match &e.kind {
            ExprKind::Rel(r) => self.values[*r].clone(),
            ExprKind::Var(v) => TupleSet::unary([env[*v]]),
            ExprKind::Univ => TupleSet::unary(0..self.universe_size as Atom),
            ExprKind::Iden => TupleSet::iden(self.universe_size),
            ExprKind::None => TupleSet::empty(1),
            ExprKind::Join(a, b) => self.expr(a, env).join(&self.expr(b, env)),
            ExprKind::Product(a, b) => self.expr(a, env).product(&self.expr(b, env)),
            ExprKind::Union(a, b) => self.expr(a, env).union(&self.expr(b, env)),
            ExprKind::Intersect(a, b) => self.expr(a, env).intersection(&self.expr(b, env)),
            ExprKind::Difference(a, b) => self.expr(a, env).difference(&self.expr(b, env)),
            ExprKind::Transpose(a) => self.expr(a, env).transpose(),
            ExprKind::Closure(a) => self.expr(a, env).closure(),
            ExprKind::ReflexiveClosure(a) => self
                .expr(a, env)
                .closure()
                .union(&TupleSet::iden(self.universe_size)),
        }
    }

    pub fn formula(&self, f: &Formula, env: &mut Vec<Atom>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::In(a, b) => self.expr(a, env).is_subset(&self.expr(b, env)),
            Formula::Equal(a, b) => self.expr(a, env) == self.expr(b, env),
            Formula::Mult(t, e) => {
                let n = self.expr(e, env).len();
                match t {
                    MultTest::No => n == 0,
                    MultTest::Some => n >= 1,
                    MultTest::Lone => n <= 1,
                    MultTest::One => n == 1,
                }
            }
            Formula::Not(g) => !self.formula(g, env),
            Formula::And(fs) => fs.iter().all(|g| self.formula(g, env)),
            Formula::Or(fs) => fs.iter().any(|g| self.formula(g, env)),
            Formula::Implies(a, b) => !self.formula(a, env) || self.formula(b, env),
            Formula::Iff(a, b) => self.formula(a, env) == self.formula(b, env),
            Formula::Quant {
                quantifier,
                var,
                bound,
                body,
            } => {
                let dom = self.expr(bound, env);
                if env.len() <= *var {
                    env.resize(*var + 1, 0);
                }
                let check = |a: Atom, env: &mut Vec<Atom>| {
                    env[*var] = a;
                    self.formula(body, env)
                };
                match quantifier {
                    Quantifier::All => dom.iter().all(|t| check(t[0], env)),
                    Quantifier::Some => dom.iter().any(|t| check(t[0], env)),
                }
            }
        }
    }
}
