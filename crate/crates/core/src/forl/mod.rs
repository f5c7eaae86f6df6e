//! The `.forl` specification language: a first-order relational logic in
//! Alloy syntax, restricted to what traceability semantics need.

pub mod ast;
pub mod ir;
mod lexer;
mod parser;
mod printer;
pub mod rules;
mod typecheck;

use std::fmt;

pub use ast::{SpecAst, Span};
pub use parser::{parse_formula, parse_spec};
pub use printer::{expr_to_string, formula_to_string, pretty_print};
pub use typecheck::{typecheck, typecheck_formula, TypedSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub expected: String,
    pub found: String,
}

impl SyntaxError {
    pub(crate) fn new(span: Span, expected: impl Into<String>, found: impl Into<String>) -> Self {
        SyntaxError {
            line: span.line,
            col: span.col,
            expected: expected.into(),
            found: found.into(),
        }
    }

    pub(crate) fn unsupported(span: Span, construct: &str) -> Self {
        let found = match construct {
            c if c.starts_with(|ch: char| ch.is_ascii_digit()) || c == "#" => {
                format!("integer expression `{c}` (integers are not part of the language)")
            }
            "let" | "pred" | "fun" => format!("`{construct}` (macros are not supported; inline the definition)"),
            "open" | "module" => format!("`{construct}` (the module system is not supported)"),
            "run" | "check" | "assert" => {
                format!("`{construct}` (commands are issued through the tool, not the spec)")
            }
            c if c.ends_with(" sig") => format!("`{c}` (ordered or scoped signatures are not supported)"),
            c => format!("unsupported construct `{c}`"),
        };
        SyntaxError {
            line: span.line,
            col: span.col,
            expected: "a supported construct".into(),
            found,
        }
    }

    pub fn diagnostic(&self) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            line: self.line,
            col: self.col,
            message: format!("expected {}, found {}", self.expected, self.found),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl Diagnostic {
    pub fn render(&self, path: &str) -> String {
        format!(
            "{path}:{}:{}: {}: {}",
            self.line, self.col, self.severity, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("{span}: unknown name `{name}`")]
    UnknownName { name: String, span: Span },
    #[error("{span}: arity mismatch: {detail}")]
    ArityError { detail: String, span: Span },
    #[error("{span}: closure needs a binary relation with overlapping columns: {detail}")]
    NonBinaryClosure { detail: String, span: Span },
    #[error("{span}: `Reason@` target `{name}` is not a declared field")]
    UnknownReasonTarget { name: String, span: Span },
    #[error("{span}: {detail}")]
    Declaration { detail: String, span: Span },
}

impl TypeError {
    pub fn span(&self) -> Span {
        match self {
            TypeError::UnknownName { span, .. }
            | TypeError::ArityError { span, .. }
            | TypeError::NonBinaryClosure { span, .. }
            | TypeError::UnknownReasonTarget { span, .. }
            | TypeError::Declaration { span, .. } => *span,
        }
    }

    pub fn diagnostic(&self) -> Diagnostic {
        let span = self.span();
        let full = self.to_string();
        let message = full
            .split_once(": ")
            .map_or(full.clone(), |(_, m)| m.to_string());
        Diagnostic {
            severity: Severity::Error,
            line: span.line,
            col: span.col,
            message,
        }
    }
}

/// Parse or type error, whichever stopped the frontend first.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Type(Vec<TypeError>),
}

impl FrontendError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            FrontendError::Syntax(e) => vec![e.diagnostic()],
            FrontendError::Type(es) => es.iter().map(TypeError::diagnostic).collect(),
        }
    }
}

/// Parses and type-checks in one step.
pub fn load_spec(src: &str) -> Result<TypedSpec, FrontendError> {
    let ast = parse_spec(src)?;
    typecheck(&ast).map_err(FrontendError::Type)
}
