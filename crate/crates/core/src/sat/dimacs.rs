use thiserror::Error;

use crate::model::{CnfFormula, Lit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing 'p cnf' header")]
    MissingHeader,
}

/// Parses DIMACS CNF (`p cnf <vars> <clauses>` header, zero-terminated
/// clauses, `c` comment lines). Clauses may span lines. Tautological clauses
/// are dropped.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut cnf: Option<CnfFormula> = None;
    let mut current: Vec<Lit> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(DimacsError::Syntax {
                    line: lineno,
                    msg: "expected 'p cnf <vars> <clauses>'".into(),
                });
            }
            let n: usize = parts[2].parse().map_err(|_| DimacsError::Syntax {
                line: lineno,
                msg: format!("bad variable count '{}'", parts[2]),
            })?;
            cnf = Some(CnfFormula::with_vars(n));
            continue;
        }
        let f = cnf.as_mut().ok_or(DimacsError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| DimacsError::Syntax {
                line: lineno,
                msg: format!("bad literal '{tok}'"),
            })?;
            if v == 0 {
                f.add_lits(current.drain(..));
            } else {
                current.push(Lit::from_dimacs(v));
            }
        }
    }
    let mut f = cnf.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        f.add_lits(current);
    }
    Ok(f)
}
