//! Surface syntax tree for `.forl` specifications.

use std::fmt;

/// Source position. Spans never take part in structural equality, so two
/// trees that differ only in layout compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecAst {
    pub sigs: Vec<SigDecl>,
    pub facts: Vec<FactDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigDecl {
    pub name: String,
    pub is_abstract: bool,
    pub kind: SigKind,
    pub fields: Vec<FieldDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigKind {
    TopLevel,
    Extends(String),
    SubsetOf(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Lone,
    Some,
    One,
    Set,
}

impl Multiplicity {
    pub fn keyword(self) -> &'static str {
        match self {
            Multiplicity::Lone => "lone",
            Multiplicity::Some => "some",
            Multiplicity::One => "one",
            Multiplicity::Set => "set",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    /// Column sigs, owner first.
    pub columns: Vec<String>,
    /// `(m, n)` for `owner m -> n target`; n-ary fields are `(Set, Set)`.
    pub multiplicity: (Multiplicity, Multiplicity),
    pub span: Span,
}

impl FieldDecl {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasonAnnotation {
    pub targets: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactDecl {
    pub name: Option<String>,
    pub annotation: Option<ReasonAnnotation>,
    /// Block items; the fact is their conjunction.
    pub body: Vec<Formula>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Some,
    No,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::All => "all",
            Quantifier::Some => "some",
            Quantifier::No => "no",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultTest {
    No,
    Some,
    Lone,
    One,
}

impl MultTest {
    pub fn keyword(self) -> &'static str {
        match self {
            MultTest::No => "no",
            MultTest::Some => "some",
            MultTest::Lone => "lone",
            MultTest::One => "one",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub var: String,
    pub bound: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub kind: FormulaKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaKind {
    Quant {
        quantifier: Quantifier,
        decls: Vec<Decl>,
        body: Box<Formula>,
    },
    In(Expr, Expr),
    Equal(Expr, Expr),
    Mult(MultTest, Expr),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// Sig, field or quantified variable; resolved by the type checker.
    Name(String),
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

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn name(n: &str) -> Self {
        Expr::new(ExprKind::Name(n.to_string()), Span::default())
    }
}

impl Formula {
    pub fn new(kind: FormulaKind, span: Span) -> Self {
        Formula { kind, span }
    }
}
