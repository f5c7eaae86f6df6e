use std::collections::{BTreeSet, HashMap};

use super::ast::{self, ExprKind as A, FormulaKind as F, SigKind, SpecAst, Span};
use super::ir::{self, Col, Expr, ExprKind, Formula, Quantifier, RelId, SigId, Type, VarId};
use super::printer::formula_to_string;
use super::rules::{normalize, Rule};
use super::{Diagnostic, Severity, TypeError};

/// Types with more alternatives than this collapse to `univ`.
const MAX_TYPE_ALTERNATIVES: usize = 64;

#[derive(Debug, Clone)]
pub struct SigInfo {
    pub name: String,
    pub is_abstract: bool,
    /// `extends` parent.
    pub parent: Option<SigId>,
    /// `in A + B` parents.
    pub subset_of: Vec<SigId>,
    /// `extends` children, in declaration order.
    pub children: Vec<SigId>,
    pub rel: RelId,
    pub fields: Vec<RelId>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelKind {
    Sig(SigId),
    Field { owner: SigId },
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub name: String,
    pub kind: RelKind,
    /// Column sigs; a sig relation has its own sig as sole column.
    pub columns: Vec<SigId>,
    pub multiplicity: Option<(ir::Multiplicity, ir::Multiplicity)>,
}

impl Relation {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn is_sig(&self) -> bool {
        matches!(self.kind, RelKind::Sig(_))
    }
}

#[derive(Debug, Clone)]
pub struct TypedFact {
    pub name: String,
    /// `Reason@` targets; `None` for ordinary facts.
    pub targets: Option<Vec<RelId>>,
    pub formula: Formula,
    pub var_names: Vec<String>,
    /// Generated from declarations (hierarchy, typing, multiplicities).
    pub implicit: bool,
    /// Rule form when the fact normalizes to implications between
    /// membership atoms (see [`super::rules`]).
    pub rules: Option<Vec<Rule>>,
    pub span: Span,
    pub source: String,
}

impl TypedFact {
    pub fn is_annotated(&self) -> bool {
        self.targets.is_some()
    }

    /// Every rule derives a tuple; no denials or equalities.
    pub fn is_horn(&self) -> bool {
        self.rules
            .as_ref()
            .is_some_and(|rs| rs.iter().all(|r| matches!(r.head, super::rules::Head::Atom(_))))
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }
}

#[derive(Debug, Clone)]
pub struct TypedSpec {
    pub ast: SpecAst,
    pub sigs: Vec<SigInfo>,
    pub relations: Vec<Relation>,
    pub facts: Vec<TypedFact>,
    pub warnings: Vec<Diagnostic>,
    rel_index: HashMap<String, RelId>,
    sig_index: HashMap<String, SigId>,
}

impl TypedSpec {
    pub fn relation(&self, name: &str) -> Option<RelId> {
        self.rel_index.get(name).copied()
    }

    pub fn sig(&self, name: &str) -> Option<SigId> {
        self.sig_index.get(name).copied()
    }

    pub fn rel_name(&self, r: RelId) -> &str {
        &self.relations[r].name
    }

    pub fn field_ids(&self) -> impl Iterator<Item = RelId> + '_ {
        (0..self.relations.len()).filter(|&r| !self.relations[r].is_sig())
    }

    pub fn fact(&self, name: &str) -> Option<&TypedFact> {
        self.facts.iter().find(|f| f.name == name)
    }

    /// `a` is `b` or an `extends`-ancestor of `b`.
    pub fn is_ancestor(&self, a: SigId, mut b: SigId) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.sigs[b].parent {
                Some(p) => b = p,
                None => return false,
            }
        }
    }

    /// `a` is a (reflexive, transitive) subsignature of `b`, following both
    /// `extends` and single-parent `in` declarations.
    pub fn is_subsig(&self, a: SigId, b: SigId) -> bool {
        if self.is_ancestor(b, a) {
            return true;
        }
        let s = &self.sigs[a];
        if let Some(p) = s.parent {
            if self.is_subsig(p, b) {
                return true;
            }
        }
        s.subset_of.len() == 1 && self.is_subsig(s.subset_of[0], b)
    }

    /// Whether two sigs may share atoms under the hierarchy constraints.
    pub fn overlaps(&self, a: SigId, b: SigId) -> bool {
        if a == b {
            return true;
        }
        if !self.sigs[a].subset_of.is_empty() {
            return self.sigs[a].subset_of.iter().any(|&p| self.overlaps(p, b));
        }
        if !self.sigs[b].subset_of.is_empty() {
            return self.sigs[b].subset_of.iter().any(|&p| self.overlaps(a, p));
        }
        self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }

    fn meet(&self, a: Col, b: Col) -> Option<Col> {
        match (a, b) {
            (Col::Univ, x) | (x, Col::Univ) => Some(x),
            (Col::Sig(x), Col::Sig(y)) => {
                if !self.overlaps(x, y) {
                    None
                } else if self.is_ancestor(x, y) {
                    Some(Col::Sig(y))
                } else {
                    Some(Col::Sig(x))
                }
            }
        }
    }

    /// Non-annotated facts: the consistency check's fact set.
    pub fn consistency_facts(&self) -> Vec<usize> {
        (0..self.facts.len())
            .filter(|&i| !self.facts[i].is_annotated())
            .collect()
    }

    /// Non-annotated facts plus those whose targets intersect `targets`.
    pub fn inference_facts(&self, targets: &[RelId]) -> Vec<usize> {
        (0..self.facts.len())
            .filter(|&i| match &self.facts[i].targets {
                None => true,
                Some(ts) => ts.iter().any(|t| targets.contains(t)),
            })
            .collect()
    }

    /// Relations named by any `Reason@` annotation, in declaration order.
    pub fn annotated_targets(&self) -> Vec<RelId> {
        let mut set = BTreeSet::new();
        for f in &self.facts {
            if let Some(ts) = &f.targets {
                set.extend(ts.iter().copied());
            }
        }
        set.into_iter().collect()
    }
}

fn decl_error(detail: impl Into<String>, span: Span) -> TypeError {
    TypeError::Declaration {
        detail: detail.into(),
        span,
    }
}

pub fn typecheck(ast: &SpecAst) -> Result<TypedSpec, Vec<TypeError>> {
    let mut spec = declarations(ast).map_err(|e| vec![e])?;
    let mut errors = Vec::new();
    let mut facts = Vec::new();
    for (i, fd) in ast.facts.iter().enumerate() {
        let name = fd
            .name
            .clone()
            .unwrap_or_else(|| format!("fact@{}", fd.span.line.max(1)));
        if facts.iter().any(|f: &TypedFact| f.name == name) {
            errors.push(decl_error(format!("duplicate fact name `{name}`"), fd.span));
            continue;
        }
        let targets = match &fd.annotation {
            None => None,
            Some(a) => {
                let mut ts = Vec::new();
                for t in &a.targets {
                    match spec.relation(t).filter(|&r| !spec.relations[r].is_sig()) {
                        Some(r) => ts.push(r),
                        None => errors.push(TypeError::UnknownReasonTarget {
                            name: t.clone(),
                            span: a.span,
                        }),
                    }
                }
                Some(ts)
            }
        };
        let body = conjunction(&fd.body, fd.span);
        let source = fd
            .body
            .iter()
            .map(formula_to_string)
            .collect::<Vec<_>>()
            .join("\n");
        match check_fact(&mut spec, &name, &body) {
            Ok((formula, var_names)) => {
                let rules = normalize(&spec, &formula, var_names.len());
                facts.push(TypedFact {
                    name,
                    targets,
                    formula,
                    var_names,
                    implicit: false,
                    rules,
                    span: fd.span,
                    source,
                });
            }
            Err(e) => errors.extend(e),
        }
        let _ = i;
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let mut implicit = Vec::new();
    for (name, f) in implicit_facts(&spec) {
        let source = formula_to_string(&f);
        let (formula, var_names) = check_fact(&mut spec, &name, &f).map_err(|e| e.to_vec())?;
        let rules = normalize(&spec, &formula, var_names.len());
        implicit.push(TypedFact {
            name,
            targets: None,
            formula,
            var_names,
            implicit: true,
            rules,
            span: Span::default(),
            source,
        });
    }
    implicit.extend(facts);
    spec.facts = implicit;
    Ok(spec)
}

fn conjunction(items: &[ast::Formula], span: Span) -> ast::Formula {
    let mut it = items.iter().cloned();
    match it.next() {
        None => ast::Formula::new(
            F::Mult(ast::MultTest::No, ast::Expr::new(A::None, span)),
            span,
        ),
        Some(first) => it.fold(first, |acc, f| {
            ast::Formula::new(F::And(Box::new(acc), Box::new(f)), span)
        }),
    }
}

fn declarations(ast: &SpecAst) -> Result<TypedSpec, TypeError> {
    let mut spec = TypedSpec {
        ast: ast.clone(),
        sigs: Vec::new(),
        relations: Vec::new(),
        facts: Vec::new(),
        warnings: Vec::new(),
        rel_index: HashMap::new(),
        sig_index: HashMap::new(),
    };
    for (i, s) in ast.sigs.iter().enumerate() {
        if spec.sig_index.insert(s.name.clone(), i).is_some() {
            return Err(decl_error(format!("duplicate signature `{}`", s.name), s.span));
        }
    }
    let lookup = |spec: &TypedSpec, name: &str, span: Span| {
        spec.sig(name).ok_or_else(|| TypeError::UnknownName {
            name: name.to_string(),
            span,
        })
    };
    for s in &ast.sigs {
        let (parent, subset_of) = match &s.kind {
            SigKind::TopLevel => (None, vec![]),
            SigKind::Extends(p) => (Some(lookup(&spec, p, s.span)?), vec![]),
            SigKind::SubsetOf(ps) => {
                let mut v = Vec::new();
                for p in ps {
                    let id = lookup(&spec, p, s.span)?;
                    if !v.contains(&id) {
                        v.push(id);
                    }
                }
                (None, v)
            }
        };
        spec.sigs.push(SigInfo {
            name: s.name.clone(),
            is_abstract: s.is_abstract,
            parent,
            subset_of,
            children: vec![],
            rel: 0,
            fields: vec![],
            span: s.span,
        });
    }
    for i in 0..spec.sigs.len() {
        if let Some(p) = spec.sigs[i].parent {
            if !spec.sigs[p].subset_of.is_empty() {
                return Err(decl_error(
                    format!(
                        "`{}` cannot extend subset signature `{}`",
                        spec.sigs[i].name, spec.sigs[p].name
                    ),
                    spec.sigs[i].span,
                ));
            }
            spec.sigs[p].children.push(i);
        }
    }
    // cycles through extends or in
    for start in 0..spec.sigs.len() {
        let mut stack: Vec<SigId> = spec.sigs[start]
            .parent
            .into_iter()
            .chain(spec.sigs[start].subset_of.iter().copied())
            .collect();
        let mut seen = BTreeSet::new();
        while let Some(s) = stack.pop() {
            if s == start {
                return Err(decl_error(
                    format!("signature `{}` is its own ancestor", spec.sigs[start].name),
                    spec.sigs[start].span,
                ));
            }
            if seen.insert(s) {
                stack.extend(spec.sigs[s].parent);
                stack.extend(spec.sigs[s].subset_of.iter().copied());
            }
        }
    }
    for (i, s) in ast.sigs.iter().enumerate() {
        let rel = spec.relations.len();
        spec.relations.push(Relation {
            name: s.name.clone(),
            kind: RelKind::Sig(i),
            columns: vec![i],
            multiplicity: None,
        });
        spec.rel_index.insert(s.name.clone(), rel);
        spec.sigs[i].rel = rel;
        for f in &s.fields {
            if spec.rel_index.contains_key(&f.name) {
                return Err(decl_error(
                    format!("field `{}` clashes with an existing name", f.name),
                    f.span,
                ));
            }
            if f.columns.len() < 2 {
                return Err(decl_error("fields need arity of at least 2", f.span));
            }
            let mut columns = Vec::new();
            for c in &f.columns {
                columns.push(lookup(&spec, c, f.span)?);
            }
            let id = spec.relations.len();
            spec.relations.push(Relation {
                name: f.name.clone(),
                kind: RelKind::Field { owner: i },
                columns,
                multiplicity: Some(f.multiplicity),
            });
            spec.rel_index.insert(f.name.clone(), id);
            spec.sigs[i].fields.push(id);
        }
    }
    Ok(spec)
}

/// Implicit facts encoding the declarations' meaning, as surface formulas.
fn implicit_facts(spec: &TypedSpec) -> Vec<(String, ast::Formula)> {
    use ast::{Decl, Expr as E, Formula as Fm, FormulaKind as FK, MultTest};
    let sp = Span::default();
    let name = |n: &str| E::name(n);
    let bin = |k: fn(Box<E>, Box<E>) -> A, a: E, b: E| E::new(k(Box::new(a), Box::new(b)), sp);
    let union = |names: Vec<&str>| {
        names
            .into_iter()
            .map(name)
            .reduce(|a, b| bin(A::Union, a, b))
            .unwrap()
    };
    let mut out = Vec::new();
    let top: Vec<SigId> = (0..spec.sigs.len())
        .filter(|&s| spec.sigs[s].parent.is_none() && spec.sigs[s].subset_of.is_empty())
        .collect();
    let mut disjoint_groups = vec![top];
    for (i, s) in spec.sigs.iter().enumerate() {
        if let Some(p) = s.parent {
            out.push((
                format!("$hier_{}_in_{}", s.name, spec.sigs[p].name),
                Fm::new(FK::In(name(&s.name), name(&spec.sigs[p].name)), sp),
            ));
        }
        if !s.subset_of.is_empty() {
            let parents = s.subset_of.iter().map(|&p| spec.sigs[p].name.as_str()).collect();
            out.push((
                format!("$hier_{}_subset", s.name),
                Fm::new(FK::In(name(&s.name), union(parents)), sp),
            ));
        }
        if s.is_abstract && !s.children.is_empty() {
            let kids = s.children.iter().map(|&c| spec.sigs[c].name.as_str()).collect();
            out.push((
                format!("$hier_{}_abstract", s.name),
                Fm::new(FK::In(name(&s.name), union(kids)), sp),
            ));
        }
        disjoint_groups.push(s.children.clone());
        let _ = i;
    }
    for group in disjoint_groups {
        for (k, &a) in group.iter().enumerate() {
            for &b in &group[k + 1..] {
                let (na, nb) = (&spec.sigs[a].name, &spec.sigs[b].name);
                out.push((
                    format!("$hier_disj_{na}_{nb}"),
                    Fm::new(
                        FK::Mult(MultTest::No, bin(A::Intersect, name(na), name(nb))),
                        sp,
                    ),
                ));
            }
        }
    }
    for r in spec.field_ids() {
        let rel = &spec.relations[r];
        let cols: Vec<&str> = rel.columns.iter().map(|&c| spec.sigs[c].name.as_str()).collect();
        let product = cols
            .iter()
            .map(|c| name(c))
            .reduce(|a, b| bin(A::Product, a, b))
            .unwrap();
        out.push((
            format!("$typing_{}", rel.name),
            Fm::new(FK::In(name(&rel.name), product), sp),
        ));
        if let Some((m, n)) = rel.multiplicity {
            if rel.arity() != 2 {
                continue;
            }
            let test = |mu: ir::Multiplicity| match mu {
                ir::Multiplicity::Lone => Some(MultTest::Lone),
                ir::Multiplicity::One => Some(MultTest::One),
                ir::Multiplicity::Some => Some(MultTest::Some),
                ir::Multiplicity::Set => None,
            };
            let mut side = |mu, col: &str, forward: bool, label: &str| {
                if let Some(t) = test(mu) {
                    let v = "$x";
                    let joined = if forward {
                        bin(A::Join, name(v), name(&rel.name))
                    } else {
                        bin(A::Join, name(&rel.name), name(v))
                    };
                    out.push((
                        format!("$mult_{}_{label}", rel.name),
                        Fm::new(
                            FK::Quant {
                                quantifier: ast::Quantifier::All,
                                decls: vec![Decl {
                                    var: v.to_string(),
                                    bound: name(col),
                                }],
                                body: Box::new(Fm::new(FK::Mult(t, joined), sp)),
                            },
                            sp,
                        ),
                    ));
                }
            };
            side(n, cols[0], true, "target");
            side(m, cols[1], false, "source");
        }
    }
    out
}

struct Checker<'a> {
    spec: &'a TypedSpec,
    scope: Vec<(String, VarId, Type)>,
    var_names: Vec<String>,
    errors: Vec<TypeError>,
    warnings: Vec<Diagnostic>,
}

fn check_fact(
    spec: &mut TypedSpec,
    _name: &str,
    f: &ast::Formula,
) -> Result<(Formula, Vec<String>), Vec<TypeError>> {
    let mut c = Checker {
        spec: &*spec,
        scope: Vec::new(),
        var_names: Vec::new(),
        errors: Vec::new(),
        warnings: Vec::new(),
    };
    let out = c.formula(f);
    let (errors, warnings, var_names) = (c.errors, c.warnings, c.var_names);
    spec.warnings.extend(warnings);
    match out {
        Some(formula) if errors.is_empty() => Ok((formula, var_names)),
        _ => Err(errors),
    }
}

/// Type-checks a formula against a spec, e.g. an ad-hoc query.
pub fn typecheck_formula(
    spec: &TypedSpec,
    f: &ast::Formula,
) -> Result<(Formula, Vec<String>), Vec<TypeError>> {
    let mut c = Checker {
        spec,
        scope: Vec::new(),
        var_names: Vec::new(),
        errors: Vec::new(),
        warnings: Vec::new(),
    };
    match c.formula(f) {
        Some(formula) if c.errors.is_empty() => Ok((formula, c.var_names)),
        _ => Err(c.errors),
    }
}

fn cap(ty: Type, arity: usize) -> Type {
    if ty.0.len() > MAX_TYPE_ALTERNATIVES {
        Type::univ(arity)
    } else {
        ty
    }
}

impl Checker<'_> {
    fn formula(&mut self, f: &ast::Formula) -> Option<Formula> {
        Some(match &f.kind {
            F::Quant {
                quantifier,
                decls,
                body,
            } => {
                let mut bound_vars = Vec::new();
                let depth = self.scope.len();
                for d in decls {
                    let bound = self.expr(&d.bound);
                    let Some(bound) = bound else {
                        self.scope.truncate(depth);
                        return None;
                    };
                    if bound.arity != 1 {
                        self.errors.push(TypeError::ArityError {
                            detail: format!(
                                "bound of `{}` has arity {}, expected 1",
                                d.var, bound.arity
                            ),
                            span: d.bound.span,
                        });
                        self.scope.truncate(depth);
                        return None;
                    }
                    let id = self.var_names.len();
                    self.var_names.push(d.var.clone());
                    self.scope.push((d.var.clone(), id, bound.ty.clone()));
                    bound_vars.push((id, bound));
                }
                let body = self.formula(body);
                self.scope.truncate(depth);
                let mut body = body?;
                let q = match quantifier {
                    ast::Quantifier::All => Quantifier::All,
                    _ => Quantifier::Some,
                };
                for (var, bound) in bound_vars.into_iter().rev() {
                    body = Formula::Quant {
                        quantifier: q,
                        var,
                        bound,
                        body: Box::new(body),
                    };
                }
                if *quantifier == ast::Quantifier::No {
                    Formula::Not(Box::new(body))
                } else {
                    body
                }
            }
            F::In(a, b) | F::Equal(a, b) => {
                let (ea, eb) = (self.expr(a), self.expr(b));
                let (ea, eb) = (ea?, eb?);
                if ea.arity != eb.arity {
                    self.errors.push(TypeError::ArityError {
                        detail: format!(
                            "comparison between arities {} and {}",
                            ea.arity, eb.arity
                        ),
                        span: f.span,
                    });
                    return None;
                }
                if matches!(f.kind, F::In(..)) {
                    Formula::In(ea, eb)
                } else {
                    Formula::Equal(ea, eb)
                }
            }
            F::Mult(t, e) => Formula::Mult(*t, self.expr(e)?),
            F::Not(g) => Formula::Not(Box::new(self.formula(g)?)),
            F::And(a, b) | F::Or(a, b) => {
                let (fa, fb) = (self.formula(a), self.formula(b));
                let (fa, fb) = (fa?, fb?);
                let is_and = matches!(f.kind, F::And(..));
                let mut parts = Vec::new();
                for x in [fa, fb] {
                    match (x, is_and) {
                        (Formula::And(xs), true) | (Formula::Or(xs), false) => parts.extend(xs),
                        (x, _) => parts.push(x),
                    }
                }
                if is_and {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            F::Implies(a, b) | F::Iff(a, b) => {
                let (fa, fb) = (self.formula(a), self.formula(b));
                let (fa, fb) = (Box::new(fa?), Box::new(fb?));
                if matches!(f.kind, F::Implies(..)) {
                    Formula::Implies(fa, fb)
                } else {
                    Formula::Iff(fa, fb)
                }
            }
        })
    }

    fn expr(&mut self, e: &ast::Expr) -> Option<Expr> {
        let spec = self.spec;
        match &e.kind {
            A::Name(n) => {
                if let Some((_, id, ty)) = self.scope.iter().rev().find(|(v, _, _)| v == n) {
                    return Some(Expr {
                        kind: ExprKind::Var(*id),
                        arity: 1,
                        ty: ty.clone(),
                    });
                }
                match spec.relation(n) {
                    Some(r) => {
                        let rel = &spec.relations[r];
                        Some(Expr {
                            kind: ExprKind::Rel(r),
                            arity: rel.arity(),
                            ty: Type::single(rel.columns.iter().map(|&c| Col::Sig(c)).collect()),
                        })
                    }
                    None => {
                        self.errors.push(TypeError::UnknownName {
                            name: n.clone(),
                            span: e.span,
                        });
                        None
                    }
                }
            }
            A::Univ => Some(Expr {
                kind: ExprKind::Univ,
                arity: 1,
                ty: Type::univ(1),
            }),
            A::Iden => Some(Expr {
                kind: ExprKind::Iden,
                arity: 2,
                ty: Type::univ(2),
            }),
            A::None => Some(Expr {
                kind: ExprKind::None,
                arity: 1,
                ty: Type::default(),
            }),
            A::Union(a, b) | A::Intersect(a, b) | A::Difference(a, b) => {
                let (x, y) = (self.expr(a), self.expr(b));
                let (x, y) = (x?, y?);
                if x.arity != y.arity {
                    self.errors.push(TypeError::ArityError {
                        detail: format!("operands have arities {} and {}", x.arity, y.arity),
                        span: e.span,
                    });
                    return None;
                }
                let arity = x.arity;
                let (ty, kind): (Type, fn(Box<Expr>, Box<Expr>) -> ExprKind) = match &e.kind {
                    A::Union(..) => (
                        Type(x.ty.0.union(&y.ty.0).cloned().collect()),
                        ExprKind::Union,
                    ),
                    A::Intersect(..) => {
                        let mut t = BTreeSet::new();
                        for p in &x.ty.0 {
                            for q in &y.ty.0 {
                                let cols: Option<Vec<Col>> =
                                    p.iter().zip(q).map(|(&c, &d)| spec.meet(c, d)).collect();
                                t.extend(cols);
                            }
                        }
                        (Type(t), ExprKind::Intersect)
                    }
                    _ => (x.ty.clone(), ExprKind::Difference),
                };
                Some(Expr {
                    kind: kind(Box::new(x), Box::new(y)),
                    arity,
                    ty: cap(ty, arity),
                })
            }
            A::Product(a, b) => {
                let (x, y) = (self.expr(a), self.expr(b));
                let (x, y) = (x?, y?);
                let mut t = BTreeSet::new();
                for p in &x.ty.0 {
                    for q in &y.ty.0 {
                        t.insert(p.iter().chain(q).copied().collect::<Vec<_>>());
                    }
                }
                let arity = x.arity + y.arity;
                Some(Expr {
                    kind: ExprKind::Product(Box::new(x), Box::new(y)),
                    arity,
                    ty: cap(Type(t), arity),
                })
            }
            A::Join(a, b) => {
                let (x, y) = (self.expr(a), self.expr(b));
                let (x, y) = (x?, y?);
                if x.arity + y.arity < 3 {
                    self.errors.push(TypeError::ArityError {
                        detail: format!(
                            "join of arities {} and {} has no columns left",
                            x.arity, y.arity
                        ),
                        span: e.span,
                    });
                    return None;
                }
                let mut t = BTreeSet::new();
                for p in &x.ty.0 {
                    for q in &y.ty.0 {
                        if spec.meet(p[p.len() - 1], q[0]).is_some() {
                            t.insert(p[..p.len() - 1].iter().chain(&q[1..]).copied().collect::<Vec<_>>());
                        }
                    }
                }
                if t.is_empty() && !x.ty.is_empty() && !y.ty.is_empty() {
                    self.warnings.push(Diagnostic {
                        severity: Severity::Warning,
                        line: e.span.line,
                        col: e.span.col,
                        message: format!(
                            "join `{}` is always empty: column types do not overlap",
                            super::printer::expr_to_string(e)
                        ),
                    });
                }
                let arity = x.arity + y.arity - 2;
                Some(Expr {
                    kind: ExprKind::Join(Box::new(x), Box::new(y)),
                    arity,
                    ty: cap(Type(t), arity),
                })
            }
            A::Transpose(a) => {
                let x = self.expr(a)?;
                if x.arity != 2 {
                    self.errors.push(TypeError::ArityError {
                        detail: format!("transpose needs arity 2, found {}", x.arity),
                        span: e.span,
                    });
                    return None;
                }
                let ty = Type(x.ty.0.iter().map(|p| vec![p[1], p[0]]).collect());
                Some(Expr {
                    kind: ExprKind::Transpose(Box::new(x)),
                    arity: 2,
                    ty,
                })
            }
            A::Closure(a) | A::ReflexiveClosure(a) => {
                let x = self.expr(a)?;
                let text = super::printer::expr_to_string(a);
                if x.arity != 2 {
                    self.errors.push(TypeError::NonBinaryClosure {
                        detail: format!("`{text}` has arity {}", x.arity),
                        span: e.span,
                    });
                    return None;
                }
                let firsts: BTreeSet<Col> = x.ty.0.iter().map(|p| p[0]).collect();
                let lasts: BTreeSet<Col> = x.ty.0.iter().map(|p| p[1]).collect();
                let chains = lasts
                    .iter()
                    .any(|&l| firsts.iter().any(|&f| spec.meet(l, f).is_some()));
                if !chains && !x.ty.is_empty() {
                    self.errors.push(TypeError::NonBinaryClosure {
                        detail: format!("columns of `{text}` never overlap"),
                        span: e.span,
                    });
                    return None;
                }
                let mut t: BTreeSet<Vec<Col>> = firsts
                    .iter()
                    .flat_map(|&f| lasts.iter().map(move |&l| vec![f, l]))
                    .collect();
                let refl = matches!(e.kind, A::ReflexiveClosure(_));
                if refl {
                    t.insert(vec![Col::Univ, Col::Univ]);
                }
                let kind = if refl {
                    ExprKind::ReflexiveClosure(Box::new(x))
                } else {
                    ExprKind::Closure(Box::new(x))
                };
                Some(Expr {
                    kind,
                    arity: 2,
                    ty: cap(Type(t), 2),
                })
            }
        }
    }
}
