//! Resolved, typed formulas. Names are replaced by relation and variable
//! indices; every expression carries its arity and bounding type.

use std::collections::BTreeSet;

pub use super::ast::{MultTest, Multiplicity};

pub type SigId = usize;
pub type RelId = usize;
pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Col {
    Univ,
    Sig(SigId),
}

/// Union of column products bounding an expression's value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Type(pub BTreeSet<Vec<Col>>);

impl Type {
    pub fn single(cols: Vec<Col>) -> Self {
        Type(BTreeSet::from([cols]))
    }

    pub fn univ(arity: usize) -> Self {
        Type::single(vec![Col::Univ; arity])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub arity: usize,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Rel(RelId),
    Var(VarId),
    Univ,
    Iden,
    None,
    Join(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    Intersect(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
    Transpose(Box<Expr>),
    Closure(Box<Expr>),
    ReflexiveClosure(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Some,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    In(Expr, Expr),
    Equal(Expr, Expr),
    Mult(MultTest, Expr),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant {
        quantifier: Quantifier,
        var: VarId,
        bound: Expr,
        body: Box<Formula>,
    },
}

impl Expr {
    /// Every relation mentioned, in order of first occurrence.
    pub fn relations(&self, out: &mut Vec<RelId>) {
        match &self.kind {
            ExprKind::Rel(r) => {
                if !out.contains(r) {
                    out.push(*r)
                }
            }
            ExprKind::Var(_) | ExprKind::Univ | ExprKind::Iden | ExprKind::None => {}
            ExprKind::Join(a, b)
            | ExprKind::Product(a, b)
            | ExprKind::Union(a, b)
            | ExprKind::Intersect(a, b)
            | ExprKind::Difference(a, b) => {
                a.relations(out);
                b.relations(out);
            }
            ExprKind::Transpose(a) | ExprKind::Closure(a) | ExprKind::ReflexiveClosure(a) => {
                a.relations(out)
            }
        }
    }
}

impl Formula {
    pub fn relations(&self) -> Vec<RelId> {
        let mut out = Vec::new();
        self.collect_relations(&mut out);
        out
    }

    fn collect_relations(&self, out: &mut Vec<RelId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::In(a, b) | Formula::Equal(a, b) => {
                a.relations(out);
                b.relations(out);
            }
            Formula::Mult(_, e) => e.relations(out),
            Formula::Not(f) => f.collect_relations(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_relations(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_relations(out);
                b.collect_relations(out);
            }
            Formula::Quant { bound, body, .. } => {
                bound.relations(out);
                body.collect_relations(out);
            }
        }
    }
}
