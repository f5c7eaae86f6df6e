use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(ast: &SpecAst) -> String {
    let mut out = String::new();
    for sig in &ast.sigs {
        print_sig(&mut out, sig);
    }
    for fact in &ast.facts {
        if !out.is_empty() {
            out.push('\n');
        }
        print_fact(&mut out, fact);
    }
    out
}

fn print_sig(out: &mut String, sig: &SigDecl) {
    if sig.is_abstract {
        out.push_str("abstract ");
    }
    write!(out, "sig {}", sig.name).unwrap();
    match &sig.kind {
        SigKind::TopLevel => {}
        SigKind::Extends(p) => write!(out, " extends {p}").unwrap(),
        SigKind::SubsetOf(ps) => write!(out, " in {}", ps.join(" + ")).unwrap(),
    }
    if sig.fields.is_empty() {
        out.push_str(" {}\n");
        return;
    }
    out.push_str(" {\n");
    for (i, f) in sig.fields.iter().enumerate() {
        write!(out, "  {}: {}", f.name, field_type(f)).unwrap();
        out.push_str(if i + 1 < sig.fields.len() { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
}

fn field_type(f: &FieldDecl) -> String {
    let targets = &f.columns[1..];
    if targets.len() > 1 {
        return targets.join(" -> ");
    }
    match f.multiplicity {
        (Multiplicity::Set, n) => format!("{} {}", n.keyword(), targets[0]),
        (m, n) => format!("{} -> {} {}", m.keyword(), n.keyword(), targets[0]),
    }
}

fn print_fact(out: &mut String, fact: &FactDecl) {
    if let Some(a) = &fact.annotation {
        writeln!(out, "Reason@ {}", a.targets.join(", ")).unwrap();
    }
    out.push_str("fact ");
    if let Some(n) = &fact.name {
        write!(out, "{n} ").unwrap();
    }
    out.push_str("{\n");
    for f in &fact.body {
        writeln!(out, "  {}", formula_to_string(f)).unwrap();
    }
    out.push_str("}\n");
}

pub fn formula_to_string(f: &Formula) -> String {
    let mut s = String::new();
    formula(&mut s, f, 0);
    s
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e, 0);
    s
}

// Formula levels: 1 or, 2 iff, 3 implies, 4 and, 5 unary/atomic.
fn formula_level(f: &Formula) -> u8 {
    match &f.kind {
        FormulaKind::Or(..) => 1,
        FormulaKind::Iff(..) => 2,
        FormulaKind::Implies(..) => 3,
        FormulaKind::And(..) => 4,
        _ => 5,
    }
}

/// `min` is the loosest level that may appear unparenthesized here.
fn formula(out: &mut String, f: &Formula, min: u8) {
    let quant_needs_parens = matches!(f.kind, FormulaKind::Quant { .. }) && min > 0;
    if formula_level(f) < min || quant_needs_parens {
        out.push('(');
        formula(out, f, 0);
        out.push(')');
        return;
    }
    match &f.kind {
        FormulaKind::Quant {
            quantifier,
            decls,
            body,
        } => {
            out.push_str(quantifier.keyword());
            out.push(' ');
            for (i, d) in decls.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write!(out, "{}: ", d.var).unwrap();
                expr(out, &d.bound, 0);
            }
            out.push_str(" | ");
            formula(out, body, 0);
        }
        FormulaKind::In(a, b) => {
            expr(out, a, 0);
            out.push_str(" in ");
            expr(out, b, 0);
        }
        FormulaKind::Equal(a, b) => {
            expr(out, a, 0);
            out.push_str(" = ");
            expr(out, b, 0);
        }
        FormulaKind::Mult(t, e) => {
            write!(out, "{} ", t.keyword()).unwrap();
            expr(out, e, 0);
        }
        FormulaKind::Not(inner) => {
            out.push_str("not ");
            formula(out, inner, 5);
        }
        FormulaKind::And(a, b) => binary_formula(out, a, " and ", b, 4, false),
        FormulaKind::Or(a, b) => binary_formula(out, a, " or ", b, 1, false),
        FormulaKind::Iff(a, b) => binary_formula(out, a, " iff ", b, 2, false),
        FormulaKind::Implies(a, b) => binary_formula(out, a, " implies ", b, 3, true),
    }
}

fn binary_formula(out: &mut String, a: &Formula, op: &str, b: &Formula, level: u8, right_assoc: bool) {
    let (lmin, rmin) = if right_assoc {
        (level + 1, level)
    } else {
        (level, level + 1)
    };
    formula(out, a, lmin);
    out.push_str(op);
    // a trailing quantifier extends to the end anyway, but parenthesize it for
    // symmetry with the left side
    formula(out, b, rmin);
}

// Expression levels: 1 union/difference, 2 intersect, 3 product, 4 join, 5 unary, 6 atom.
fn expr_level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Union(..) | ExprKind::Difference(..) => 1,
        ExprKind::Intersect(..) => 2,
        ExprKind::Product(..) => 3,
        ExprKind::Join(..) => 4,
        ExprKind::Transpose(_) | ExprKind::Closure(_) | ExprKind::ReflexiveClosure(_) => 5,
        _ => 6,
    }
}

fn expr(out: &mut String, e: &Expr, min: u8) {
    if expr_level(e) < min {
        out.push('(');
        expr(out, e, 0);
        out.push(')');
        return;
    }
    let bin = |out: &mut String, a: &Expr, op: &str, b: &Expr, level: u8| {
        expr(out, a, level);
        out.push_str(op);
        expr(out, b, level + 1);
    };
    match &e.kind {
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::Univ => out.push_str("univ"),
        ExprKind::Iden => out.push_str("iden"),
        ExprKind::None => out.push_str("none"),
        ExprKind::Union(a, b) => bin(out, a, " + ", b, 1),
        ExprKind::Difference(a, b) => bin(out, a, " - ", b, 1),
        ExprKind::Intersect(a, b) => bin(out, a, " & ", b, 2),
        ExprKind::Product(a, b) => bin(out, a, " -> ", b, 3),
        ExprKind::Join(a, b) => bin(out, a, ".", b, 4),
        ExprKind::Transpose(a) => {
            out.push('~');
            expr(out, a, 5);
        }
        ExprKind::Closure(a) => {
            out.push('^');
            expr(out, a, 5);
        }
        ExprKind::ReflexiveClosure(a) => {
            out.push('*');
            expr(out, a, 5);
        }
    }
}
