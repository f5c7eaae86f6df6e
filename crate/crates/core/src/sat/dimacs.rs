use std::fmt::Write as _;

use thiserror::Error;

use super::{Cnf, Lit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Renders `cnf` as DIMACS text. Clauses appear in database order and each
/// clause keeps its literal order, so identical inputs give identical bytes.
pub fn export_dimacs(cnf: &Cnf) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.num_clauses());
    for clause in cnf.clauses() {
        for lit in clause {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut cnf = Cnf::new();
    let mut declared: Option<(u32, usize)> = None;
    let mut current: Vec<Lit> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(DimacsError::Syntax {
                    line: lineno,
                    message: "expected `p cnf <vars> <clauses>`".into(),
                });
            }
            let nv = parts[1].parse::<u32>().map_err(|e| DimacsError::Syntax {
                line: lineno,
                message: e.to_string(),
            })?;
            let nc = parts[2].parse::<usize>().map_err(|e| DimacsError::Syntax {
                line: lineno,
                message: e.to_string(),
            })?;
            declared = Some((nv, nc));
            cnf.set_num_vars(nv);
            continue;
        }
        if declared.is_none() {
            return Err(DimacsError::Syntax {
                line: lineno,
                message: "clause before problem line".into(),
            });
        }
        for tok in line.split_whitespace() {
            let v = tok.parse::<i32>().map_err(|e| DimacsError::Syntax {
                line: lineno,
                message: format!("bad literal `{tok}`: {e}"),
            })?;
            if v == 0 {
                cnf.add_clause(std::mem::take(&mut current));
            } else {
                current.push(Lit::from_dimacs(v));
            }
        }
    }
    if !current.is_empty() {
        cnf.add_clause(current);
    }
    if let Some((nv, nc)) = declared {
        if cnf.num_clauses() != nc || cnf.num_vars() != nv {
            return Err(DimacsError::Syntax {
                line: 0,
                message: format!(
                    "header declares {nv} vars / {nc} clauses, found {} / {}",
                    cnf.num_vars(),
                    cnf.num_clauses()
                ),
            });
        }
    }
    Ok(cnf)
}
