use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

pub fn parse_spec(src: &str) -> Result<SpecAst, SyntaxError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, depth: 0 };
    p.spec()
}

/// Parses a standalone formula, e.g. for queries typed into a UI.
pub fn parse_formula(src: &str) -> Result<Formula, SyntaxError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, depth: 0 };
    let f = p.formula()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(f)
}

const MAX_DEPTH: usize = 256;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

/// Intermediate result below the comparison level: a parenthesized formula
/// and a relational expression share the same syntactic positions.
enum Node {
    F(Formula),
    E(Expr),
}

fn join_span(a: Span, b: Span) -> Span {
    Span {
        start: a.start,
        end: b.end.max(a.end),
        line: a.line,
        col: a.col,
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let t = &self.tokens[self.pos];
        if let Tok::Unsupported(word) = &t.tok {
            return SyntaxError::unsupported(t.span, word);
        }
        SyntaxError::new(t.span, expected, t.tok.describe())
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Span, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.error(expected))
        }
    }

    fn ident(&mut self, expected: &str) -> Result<(String, Span), SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => Err(self.error(expected)),
        }
    }

    fn spec(&mut self) -> Result<SpecAst, SyntaxError> {
        let mut ast = SpecAst::default();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(ast),
                Tok::Sig | Tok::Abstract => ast.sigs.extend(self.sig()?),
                Tok::Fact | Tok::ReasonAt => ast.facts.push(self.fact()?),
                Tok::One | Tok::Lone | Tok::Some if *self.peek_at(1) == Tok::Sig => {
                    let t = &self.tokens[self.pos];
                    return Err(SyntaxError::unsupported(
                        t.span,
                        &format!("{} sig", t.tok.text()),
                    ));
                }
                _ => return Err(self.error("`sig`, `abstract`, `fact` or `Reason@`")),
            }
        }
    }

    fn sig(&mut self) -> Result<Vec<SigDecl>, SyntaxError> {
        let start = self.span();
        let is_abstract = self.eat(&Tok::Abstract);
        self.expect(Tok::Sig, "`sig`")?;
        let mut names = vec![self.ident("signature name")?.0];
        while self.eat(&Tok::Comma) {
            names.push(self.ident("signature name")?.0);
        }
        let kind = if self.eat(&Tok::Extends) {
            SigKind::Extends(self.ident("parent signature")?.0)
        } else if self.eat(&Tok::In) {
            let mut parents = vec![self.ident("parent signature")?.0];
            while self.eat(&Tok::Plus) {
                parents.push(self.ident("parent signature")?.0);
            }
            SigKind::SubsetOf(parents)
        } else {
            SigKind::TopLevel
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut fields = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                fields.extend(self.field(&names[0])?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace, "`,` or `}`")?;
        if names.len() > 1 && !fields.is_empty() {
            return Err(SyntaxError::new(
                start,
                "a single signature name when fields are declared",
                format!("{} names", names.len()),
            ));
        }
        let span = join_span(start, self.prev_span());
        Ok(names
            .into_iter()
            .map(|name| SigDecl {
                name,
                is_abstract,
                kind: kind.clone(),
                fields: fields.clone(),
                span,
            })
            .collect())
    }

    fn field(&mut self, owner: &str) -> Result<Vec<FieldDecl>, SyntaxError> {
        let start = self.span();
        let mut names = vec![self.ident("field name")?.0];
        while *self.peek() == Tok::Comma && matches!(self.peek_at(1), Tok::Ident(_)) {
            if *self.peek_at(2) != Tok::Comma && *self.peek_at(2) != Tok::Colon {
                break;
            }
            self.bump();
            names.push(self.ident("field name")?.0);
        }
        self.expect(Tok::Colon, "`:`")?;
        let mult = match self.peek() {
            Tok::Lone => Some(Multiplicity::Lone),
            Tok::Some => Some(Multiplicity::Some),
            Tok::One => Some(Multiplicity::One),
            Tok::Set => Some(Multiplicity::Set),
            _ => None,
        };
        if mult.is_some() {
            self.bump();
        }
        if mult.is_some() && *self.peek() == Tok::Arrow {
            self.bump();
            let n = match self.peek() {
                Tok::Lone => Multiplicity::Lone,
                Tok::Some => Multiplicity::Some,
                Tok::One => Multiplicity::One,
                Tok::Set => Multiplicity::Set,
                _ => return Err(self.error("a multiplicity after `->`")),
            };
            self.bump();
            let target = self.ident("column signature")?.0;
            if matches!(self.peek(), Tok::Arrow) {
                return Err(SyntaxError::new(
                    self.span(),
                    "`,` or `}` (multiplicity pairs are restricted to binary fields)",
                    self.peek().describe(),
                ));
            }
            return Ok(names
                .into_iter()
                .map(|name| FieldDecl {
                    name,
                    columns: vec![owner.to_string(), target.clone()],
                    multiplicity: (mult.unwrap(), n),
                    span: join_span(start, self.prev_span()),
                })
                .collect());
        }
        let mut columns = vec![owner.to_string(), self.ident("column signature")?.0];
        loop {
            match self.peek() {
                Tok::Arrow => {
                    self.bump();
                    columns.push(self.ident("column signature")?.0);
                }
                Tok::Lone | Tok::Some | Tok::One | Tok::Set => {
                    return Err(SyntaxError::new(
                        self.span(),
                        "`->`, `,` or `}` (multiplicity pairs are restricted to binary fields)",
                        self.peek().describe(),
                    ))
                }
                _ => break,
            }
        }
        if columns.len() > 2 && mult.is_some() {
            return Err(SyntaxError::new(
                start,
                "a binary field (multiplicity pairs are restricted to binary fields)",
                format!("{}-ary field", columns.len()),
            ));
        }
        let multiplicity = if columns.len() == 2 {
            (Multiplicity::Set, mult.unwrap_or(Multiplicity::One))
        } else {
            (Multiplicity::Set, Multiplicity::Set)
        };
        let span = join_span(start, self.prev_span());
        Ok(names
            .into_iter()
            .map(|name| FieldDecl {
                name,
                columns: columns.clone(),
                multiplicity,
                span,
            })
            .collect())
    }

    fn fact(&mut self) -> Result<FactDecl, SyntaxError> {
        let start = self.span();
        let annotation = if self.eat(&Tok::ReasonAt) {
            let mut targets = vec![self.ident("relation name after `Reason@`")?.0];
            while self.eat(&Tok::Comma) {
                targets.push(self.ident("relation name")?.0);
            }
            Some(ReasonAnnotation {
                targets,
                span: join_span(start, self.prev_span()),
            })
        } else {
            None
        };
        self.expect(Tok::Fact, "`fact`")?;
        let name = match self.peek().clone() {
            Tok::Ident(n) => {
                self.bump();
                Some(n)
            }
            _ => None,
        };
        let body = self.block()?;
        Ok(FactDecl {
            name,
            annotation,
            body,
            span: join_span(start, self.prev_span()),
        })
    }

    fn block(&mut self) -> Result<Vec<Formula>, SyntaxError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut items = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(self.error("`}`"));
            }
            items.push(self.formula()?);
        }
        self.bump();
        Ok(items)
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let n = self.or_node()?;
        self.as_formula(n)
    }

    fn as_formula(&self, n: Node) -> Result<Formula, SyntaxError> {
        match n {
            Node::F(f) => Ok(f),
            Node::E(_) => Err(self.error("`in`, `=` or `!=` after expression")),
        }
    }

    fn or_node(&mut self) -> Result<Node, SyntaxError> {
        let mut lhs = self.iff_node()?;
        while matches!(self.peek(), Tok::Or | Tok::OrOr) {
            let l = self.as_formula(lhs)?;
            self.bump();
            let r = self.iff_node().and_then(|n| self.as_formula(n))?;
            let span = join_span(l.span, r.span);
            lhs = Node::F(Formula::new(FormulaKind::Or(Box::new(l), Box::new(r)), span));
        }
        Ok(lhs)
    }

    fn iff_node(&mut self) -> Result<Node, SyntaxError> {
        let mut lhs = self.implies_node()?;
        while matches!(self.peek(), Tok::Iff | Tok::DoubleArrow) {
            let l = self.as_formula(lhs)?;
            self.bump();
            let r = self.implies_node().and_then(|n| self.as_formula(n))?;
            let span = join_span(l.span, r.span);
            lhs = Node::F(Formula::new(FormulaKind::Iff(Box::new(l), Box::new(r)), span));
        }
        Ok(lhs)
    }

    fn implies_node(&mut self) -> Result<Node, SyntaxError> {
        let lhs = self.and_node()?;
        if matches!(self.peek(), Tok::Implies | Tok::FatArrow) {
            let l = self.as_formula(lhs)?;
            self.bump();
            let r = self.descend(Self::implies_node)?;
            let r = self.as_formula(r)?;
            let span = join_span(l.span, r.span);
            return Ok(Node::F(Formula::new(
                FormulaKind::Implies(Box::new(l), Box::new(r)),
                span,
            )));
        }
        Ok(lhs)
    }

    fn and_node(&mut self) -> Result<Node, SyntaxError> {
        let mut lhs = self.unary_formula()?;
        while matches!(self.peek(), Tok::And | Tok::AndAnd) {
            let l = self.as_formula(lhs)?;
            self.bump();
            let r = self.unary_formula().and_then(|n| self.as_formula(n))?;
            let span = join_span(l.span, r.span);
            lhs = Node::F(Formula::new(FormulaKind::And(Box::new(l), Box::new(r)), span));
        }
        Ok(lhs)
    }

    fn descend(&mut self, f: fn(&mut Self) -> Result<Node, SyntaxError>) -> Result<Node, SyntaxError> {
        if self.depth >= MAX_DEPTH {
            return Err(SyntaxError::new(self.span(), "shallower nesting", "nesting deeper than 256 levels"));
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn is_quantifier_start(&self) -> bool {
        matches!(self.peek(), Tok::All | Tok::Some | Tok::No)
            && matches!(self.peek_at(1), Tok::Ident(_))
            && matches!(self.peek_at(2), Tok::Colon | Tok::Comma)
    }

    fn unary_formula(&mut self) -> Result<Node, SyntaxError> {
        let start = self.span();
        match self.peek() {
            Tok::Not | Tok::Bang => {
                self.bump();
                let inner = self.descend(Self::unary_formula)?;
                let inner = self.as_formula(inner)?;
                let span = join_span(start, inner.span);
                Ok(Node::F(Formula::new(FormulaKind::Not(Box::new(inner)), span)))
            }
            _ if self.is_quantifier_start() => self.descend(Self::quantified),
            Tok::All => {
                self.bump();
                Err(self.error("variable declaration `x: Expr` after `all`"))
            }
            Tok::No | Tok::Some | Tok::Lone | Tok::One => {
                let test = match self.bump().tok {
                    Tok::No => MultTest::No,
                    Tok::Some => MultTest::Some,
                    Tok::Lone => MultTest::Lone,
                    _ => MultTest::One,
                };
                let e = self.expr()?;
                let span = join_span(start, e.span);
                Ok(Node::F(Formula::new(FormulaKind::Mult(test, e), span)))
            }
            _ => self.comparison(),
        }
    }

    fn quantified(&mut self) -> Result<Node, SyntaxError> {
        let start = self.span();
        let quantifier = match self.bump().tok {
            Tok::All => Quantifier::All,
            Tok::Some => Quantifier::Some,
            _ => Quantifier::No,
        };
        let mut decls = Vec::new();
        loop {
            let mut vars = vec![self.ident("variable name")?.0];
            while self.eat(&Tok::Comma) {
                vars.push(self.ident("variable name")?.0);
            }
            self.expect(Tok::Colon, "`:`")?;
            if matches!(self.peek(), Tok::One | Tok::Lone | Tok::Some | Tok::Set) {
                return Err(self.error(
                    "a bounding expression (declaration multiplicities are not supported)",
                ));
            }
            let bound = self.expr()?;
            for v in vars {
                decls.push(Decl {
                    var: v,
                    bound: bound.clone(),
                });
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        let body = if *self.peek() == Tok::LBrace {
            let bstart = self.span();
            let items = self.block()?;
            conjoin(items, join_span(bstart, self.prev_span()))
        } else {
            self.expect(Tok::Bar, "`|` or `{`")?;
            self.formula()?
        };
        let span = join_span(start, body.span);
        Ok(Node::F(Formula::new(
            FormulaKind::Quant {
                quantifier,
                decls,
                body: Box::new(body),
            },
            span,
        )))
    }

    fn comparison(&mut self) -> Result<Node, SyntaxError> {
        let lhs = self.node()?;
        let negated = match (self.peek(), self.peek_at(1)) {
            (Tok::Not | Tok::Bang, Tok::In | Tok::Eq) => {
                self.bump();
                true
            }
            _ => false,
        };
        let op = self.peek().clone();
        if !matches!(op, Tok::In | Tok::Eq | Tok::NotEq) {
            return Ok(lhs);
        }
        let lhs = match lhs {
            Node::E(e) => e,
            Node::F(f) => {
                return Err(SyntaxError::new(
                    f.span,
                    "an expression before comparison",
                    "a formula",
                ))
            }
        };
        self.bump();
        let rhs = self.expr()?;
        let span = join_span(lhs.span, rhs.span);
        let (kind, neg) = match op {
            Tok::In => (FormulaKind::In(lhs, rhs), negated),
            Tok::Eq => (FormulaKind::Equal(lhs, rhs), negated),
            _ => (FormulaKind::Equal(lhs, rhs), true),
        };
        let f = Formula::new(kind, span);
        Ok(Node::F(if neg {
            Formula::new(FormulaKind::Not(Box::new(f)), span)
        } else {
            f
        }))
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        match self.node()? {
            Node::E(e) => Ok(e),
            Node::F(f) => Err(SyntaxError::new(f.span, "an expression", "a formula")),
        }
    }

    // expression precedence, loosest first: `+ -`, `&`, `->`, `.`, unary

    fn node(&mut self) -> Result<Node, SyntaxError> {
        let mut lhs = self.intersect_node()?;
        loop {
            let mk: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Tok::Plus => ExprKind::Union,
                Tok::Minus => ExprKind::Difference,
                _ => return Ok(lhs),
            };
            let l = self.as_expr(lhs)?;
            self.bump();
            let r = self.intersect_node().and_then(|n| self.as_expr(n))?;
            let span = join_span(l.span, r.span);
            lhs = Node::E(Expr::new(mk(Box::new(l), Box::new(r)), span));
        }
    }

    fn intersect_node(&mut self) -> Result<Node, SyntaxError> {
        let mut lhs = self.product_node()?;
        while *self.peek() == Tok::Amp {
            let l = self.as_expr(lhs)?;
            self.bump();
            let r = self.product_node().and_then(|n| self.as_expr(n))?;
            let span = join_span(l.span, r.span);
            lhs = Node::E(Expr::new(ExprKind::Intersect(Box::new(l), Box::new(r)), span));
        }
        Ok(lhs)
    }

    fn product_node(&mut self) -> Result<Node, SyntaxError> {
        let mut lhs = self.join_node()?;
        while *self.peek() == Tok::Arrow {
            let l = self.as_expr(lhs)?;
            self.bump();
            let r = self.join_node().and_then(|n| self.as_expr(n))?;
            let span = join_span(l.span, r.span);
            lhs = Node::E(Expr::new(ExprKind::Product(Box::new(l), Box::new(r)), span));
        }
        Ok(lhs)
    }

    fn join_node(&mut self) -> Result<Node, SyntaxError> {
        let mut lhs = self.unary_node()?;
        while *self.peek() == Tok::Dot {
            let l = self.as_expr(lhs)?;
            self.bump();
            let r = self.unary_node().and_then(|n| self.as_expr(n))?;
            let span = join_span(l.span, r.span);
            lhs = Node::E(Expr::new(ExprKind::Join(Box::new(l), Box::new(r)), span));
        }
        Ok(lhs)
    }

    fn unary_node(&mut self) -> Result<Node, SyntaxError> {
        let start = self.span();
        let mk: fn(Box<Expr>) -> ExprKind = match self.peek() {
            Tok::Tilde => ExprKind::Transpose,
            Tok::Caret => ExprKind::Closure,
            Tok::Star => ExprKind::ReflexiveClosure,
            _ => return self.primary(),
        };
        self.bump();
        let inner = self.descend(Self::unary_node)?;
        let inner = self.as_expr(inner)?;
        let span = join_span(start, inner.span);
        Ok(Node::E(Expr::new(mk(Box::new(inner)), span)))
    }

    fn primary(&mut self) -> Result<Node, SyntaxError> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(name) => ExprKind::Name(name),
            Tok::Univ => ExprKind::Univ,
            Tok::Iden => ExprKind::Iden,
            Tok::None => ExprKind::None,
            Tok::LParen => {
                self.bump();
                let n = self.descend(Self::or_node)?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(n);
            }
            _ => return Err(self.error("an expression")),
        };
        self.bump();
        Ok(Node::E(Expr::new(kind, span)))
    }

    fn as_expr(&self, n: Node) -> Result<Expr, SyntaxError> {
        match n {
            Node::E(e) => Ok(e),
            Node::F(f) => Err(SyntaxError::new(f.span, "an expression", "a formula")),
        }
    }
}

fn conjoin(mut items: Vec<Formula>, span: Span) -> Formula {
    if items.is_empty() {
        // an empty block is vacuously true: `no none`
        return Formula::new(
            FormulaKind::Mult(MultTest::No, Expr::new(ExprKind::None, span)),
            span,
        );
    }
    let first = items.remove(0);
    items.into_iter().fold(first, |acc, f| {
        let s = join_span(acc.span, f.span);
        Formula::new(FormulaKind::And(Box::new(acc), Box::new(f)), s)
    })
}
