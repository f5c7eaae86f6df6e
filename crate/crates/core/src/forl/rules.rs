//! Normalization of facts into function-free rules
//! `body atoms => head`, where the head is a single atom, an equality
//! between variables, or `false` (a denial).
//!
//! A fact normalizes when, after pushing universal quantifiers outward, it
//! is a conjunction of implications whose premises are built from
//! membership of variable tuples in monotone expressions (join, product,
//! union, intersection, transpose, `iden`, `univ`) and whose conclusions
//! are memberships in a relation or its transpose.

use super::ir::{ExprKind, Formula, MultTest, Quantifier, RelId};
use super::ir::Expr;
use super::typecheck::TypedSpec;

/// Rule-local variable.
pub type Term = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub rel: RelId,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Head {
    Atom(Atom),
    Equal(Term, Term),
    False,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub num_vars: usize,
    pub body: Vec<Atom>,
    pub head: Head,
}

impl Rule {
    /// Variables that occur in no body atom range over the whole universe.
    pub fn unbound_vars(&self) -> Vec<Term> {
        (0..self.num_vars as Term)
            .filter(|v| !self.body.iter().any(|a| a.args.contains(v)))
            .collect()
    }
}

const MAX_ALTERNATIVES: usize = 256;

#[derive(Debug, Clone, Default)]
struct Conj {
    atoms: Vec<Atom>,
    eqs: Vec<(Term, Term)>,
}

fn cross(xs: Vec<Conj>, ys: Vec<Conj>) -> Option<Vec<Conj>> {
    if xs.len() * ys.len() > MAX_ALTERNATIVES {
        return None;
    }
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in &xs {
        for y in &ys {
            let mut c = x.clone();
            c.atoms.extend(y.atoms.iter().cloned());
            c.eqs.extend(y.eqs.iter().copied());
            out.push(c);
        }
    }
    Some(out)
}

struct Normalizer {
    next: Term,
    out: Vec<(Conj, RawHead)>,
}

enum RawHead {
    Atom(Atom),
    Equal(Term, Term),
    False,
}

/// Rule form of a typed fact, or `None` when it does not normalize.
pub fn normalize(_spec: &TypedSpec, f: &Formula, fact_vars: usize) -> Option<Vec<Rule>> {
    let mut n = Normalizer {
        next: fact_vars as Term,
        out: Vec::new(),
    };
    n.rules(f, vec![Conj::default()])?;
    let mut rules = Vec::new();
    for (conj, head) in n.out {
        if let Some(r) = finish(conj, head, n.next as usize) {
            if !rules.contains(&r) {
                rules.push(r);
            }
        }
    }
    Some(rules)
}

fn find(parent: &mut [Term], x: Term) -> Term {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut y = x;
    while parent[y as usize] != r {
        let nxt = parent[y as usize];
        parent[y as usize] = r;
        y = nxt;
    }
    r
}

fn finish(conj: Conj, head: RawHead, total: usize) -> Option<Rule> {
    let mut parent: Vec<Term> = (0..total as Term).collect();
    for &(a, b) in &conj.eqs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
    let mut renum: Vec<Option<Term>> = vec![None; total];
    let mut count = 0;
    let mut map = |t: Term, parent: &mut Vec<Term>| {
        let r = find(parent, t) as usize;
        *renum[r].get_or_insert_with(|| {
            count += 1;
            count - 1
        })
    };
    let mut body = Vec::new();
    for a in conj.atoms {
        let args = a.args.iter().map(|&t| map(t, &mut parent)).collect();
        let atom = Atom { rel: a.rel, args };
        if !body.contains(&atom) {
            body.push(atom);
        }
    }
    let head = match head {
        RawHead::False => Head::False,
        RawHead::Atom(a) => {
            let args = a.args.iter().map(|&t| map(t, &mut parent)).collect();
            let atom = Atom { rel: a.rel, args };
            if body.contains(&atom) {
                return None;
            }
            Head::Atom(atom)
        }
        RawHead::Equal(a, b) => {
            let (x, y) = (map(a, &mut parent), map(b, &mut parent));
            if x == y {
                return None;
            }
            Head::Equal(x.min(y), x.max(y))
        }
    };
    Some(Rule {
        num_vars: count as usize,
        body,
        head,
    })
}

fn tuple_vars(e: &Expr, out: &mut Vec<Term>) -> bool {
    match &e.kind {
        ExprKind::Var(v) => {
            out.push(*v as Term);
            true
        }
        ExprKind::Product(a, b) => tuple_vars(a, out) && tuple_vars(b, out),
        _ => false,
    }
}

impl Normalizer {
    fn fresh(&mut self, n: usize) -> Vec<Term> {
        let v: Vec<Term> = (self.next..self.next + n as Term).collect();
        self.next += n as Term;
        v
    }

    fn emit(&mut self, ctx: &[Conj], head: impl Fn() -> RawHead) {
        for c in ctx {
            self.out.push((c.clone(), head()));
        }
    }

    fn rules(&mut self, f: &Formula, ctx: Vec<Conj>) -> Option<()> {
        match f {
            Formula::True => Some(()),
            Formula::False => {
                self.emit(&ctx, || RawHead::False);
                Some(())
            }
            Formula::And(fs) => {
                for g in fs {
                    self.rules(g, ctx.clone())?;
                }
                Some(())
            }
            Formula::Quant {
                quantifier: Quantifier::All,
                var,
                bound,
                body,
            } => {
                let b = self.bodies(bound, &[*var as Term])?;
                let ctx = cross(ctx, b)?;
                self.rules(body, ctx)
            }
            Formula::Implies(a, b) => {
                let c = self.conds(a)?;
                let ctx = cross(ctx, c)?;
                self.rules(b, ctx)
            }
            Formula::Not(a) => {
                let c = self.conds(a)?;
                let ctx = cross(ctx, c)?;
                self.emit(&ctx, || RawHead::False);
                Some(())
            }
            Formula::Mult(MultTest::No, e) => {
                let xs = self.fresh(e.arity);
                let b = self.bodies(e, &xs)?;
                let ctx = cross(ctx, b)?;
                self.emit(&ctx, || RawHead::False);
                Some(())
            }
            Formula::In(lhs, rhs) => {
                let mut ts = Vec::new();
                let ctx = if tuple_vars(lhs, &mut ts) {
                    ctx
                } else {
                    ts = self.fresh(lhs.arity);
                    let b = self.bodies(lhs, &ts)?;
                    cross(ctx, b)?
                };
                let heads = self.heads(rhs, &ts)?;
                for (extra, h) in heads {
                    for c in &ctx {
                        let mut c = c.clone();
                        c.eqs.extend(extra.iter().copied());
                        let h = match &h {
                            RawHead::Atom(a) => RawHead::Atom(a.clone()),
                            RawHead::Equal(a, b) => RawHead::Equal(*a, *b),
                            RawHead::False => RawHead::False,
                        };
                        self.out.push((c, h));
                    }
                }
                Some(())
            }
            Formula::Equal(a, b) => match (&a.kind, &b.kind) {
                (ExprKind::Var(x), ExprKind::Var(y)) => {
                    let (x, y) = (*x as Term, *y as Term);
                    self.emit(&ctx, || RawHead::Equal(x, y));
                    Some(())
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// Conclusions of `ts in e`, each a conjunct of the head.
    #[allow(clippy::type_complexity)]
    fn heads(&mut self, e: &Expr, ts: &[Term]) -> Option<Vec<(Vec<(Term, Term)>, RawHead)>> {
        Some(match &e.kind {
            ExprKind::Rel(r) => vec![(
                vec![],
                RawHead::Atom(Atom {
                    rel: *r,
                    args: ts.to_vec(),
                }),
            )],
            ExprKind::Transpose(inner) => match &inner.kind {
                ExprKind::Rel(r) => vec![(
                    vec![],
                    RawHead::Atom(Atom {
                        rel: *r,
                        args: vec![ts[1], ts[0]],
                    }),
                )],
                _ => return None,
            },
            ExprKind::Var(v) => vec![(vec![], RawHead::Equal(ts[0], *v as Term))],
            ExprKind::Iden => vec![(vec![], RawHead::Equal(ts[0], ts[1]))],
            ExprKind::Univ => vec![],
            ExprKind::None => vec![(vec![], RawHead::False)],
            ExprKind::Intersect(a, b) => {
                let mut h = self.heads(a, ts)?;
                h.extend(self.heads(b, ts)?);
                h
            }
            ExprKind::Product(a, b) => {
                let k = a.arity;
                let mut h = self.heads(a, &ts[..k])?;
                h.extend(self.heads(b, &ts[k..])?);
                h
            }
            _ => return None,
        })
    }

    /// Premise `f` as alternative conjunctions of atoms.
    fn conds(&mut self, f: &Formula) -> Option<Vec<Conj>> {
        match f {
            Formula::True => Some(vec![Conj::default()]),
            Formula::False => Some(vec![]),
            Formula::And(fs) => {
                let mut acc = vec![Conj::default()];
                for g in fs {
                    let c = self.conds(g)?;
                    acc = cross(acc, c)?;
                }
                Some(acc)
            }
            Formula::Or(fs) => {
                let mut acc = Vec::new();
                for g in fs {
                    acc.extend(self.conds(g)?);
                    if acc.len() > MAX_ALTERNATIVES {
                        return None;
                    }
                }
                Some(acc)
            }
            Formula::In(lhs, rhs) => {
                let mut ts = Vec::new();
                if !tuple_vars(lhs, &mut ts) {
                    return None;
                }
                self.bodies(rhs, &ts)
            }
            Formula::Equal(a, b) => match (&a.kind, &b.kind) {
                (ExprKind::Var(x), ExprKind::Var(y)) => Some(vec![Conj {
                    atoms: vec![],
                    eqs: vec![(*x as Term, *y as Term)],
                }]),
                _ => None,
            },
            Formula::Quant {
                quantifier: Quantifier::Some,
                var,
                bound,
                body,
            } => {
                let b = self.bodies(bound, &[*var as Term])?;
                let c = self.conds(body)?;
                cross(b, c)
            }
            Formula::Mult(MultTest::Some, e) => {
                let xs = self.fresh(e.arity);
                self.bodies(e, &xs)
            }
            _ => None,
        }
    }

    /// `ts in e` as alternative conjunctions of atoms.
    fn bodies(&mut self, e: &Expr, ts: &[Term]) -> Option<Vec<Conj>> {
        Some(match &e.kind {
            ExprKind::Rel(r) => vec![Conj {
                atoms: vec![Atom {
                    rel: *r,
                    args: ts.to_vec(),
                }],
                eqs: vec![],
            }],
            ExprKind::Var(v) => vec![Conj {
                atoms: vec![],
                eqs: vec![(ts[0], *v as Term)],
            }],
            ExprKind::Univ => vec![Conj::default()],
            ExprKind::None => vec![],
            ExprKind::Iden => vec![Conj {
                atoms: vec![],
                eqs: vec![(ts[0], ts[1])],
            }],
            ExprKind::Union(a, b) => {
                let mut x = self.bodies(a, ts)?;
                x.extend(self.bodies(b, ts)?);
                if x.len() > MAX_ALTERNATIVES {
                    return None;
                }
                x
            }
            ExprKind::Intersect(a, b) => {
                let x = self.bodies(a, ts)?;
                let y = self.bodies(b, ts)?;
                cross(x, y)?
            }
            ExprKind::Product(a, b) => {
                let k = a.arity;
                let x = self.bodies(a, &ts[..k])?;
                let y = self.bodies(b, &ts[k..])?;
                cross(x, y)?
            }
            ExprKind::Join(a, b) => {
                let z = self.fresh(1)[0];
                let k = a.arity - 1;
                let mut left: Vec<Term> = ts[..k].to_vec();
                left.push(z);
                let mut right = vec![z];
                right.extend_from_slice(&ts[k..]);
                let x = self.bodies(a, &left)?;
                let y = self.bodies(b, &right)?;
                cross(x, y)?
            }
            ExprKind::Transpose(a) => self.bodies(a, &[ts[1], ts[0]])?,
            ExprKind::Difference(..) | ExprKind::Closure(_) | ExprKind::ReflexiveClosure(_) => {
                return None
            }
        })
    }
}
