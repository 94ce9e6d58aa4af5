//! Multi-objective OPB text format.
//!
//! ```text
//! * #variable= 3 #constraint= 1
//! min: 1 x1 2 ~x2;
//! min: 3 x3 -1 x1 4;
//! 1 x1 1 x2 1 x3 >= 2;
//! ```
//!
//! Lines starting with `*` are comments; a `#variable=` field in a comment
//! declares the variable count. Every other line is one statement ending in
//! `;`. Objective lines start with `min:` (or `max:`) and may end with a
//! bare integer constant.

use std::fmt::Write as _;

use moco_core::model::{Lit, MocoInstance, Objective, PbConstraint, Relation, Var};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpbError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("no objective line")]
    NoObjectives,
}

fn syntax(line: usize, msg: impl Into<String>) -> OpbError {
    OpbError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_lit(tok: &str, line: usize) -> Result<Lit, OpbError> {
    let (positive, rest) = match tok.strip_prefix('~') {
        Some(r) => (false, r),
        None => (true, tok),
    };
    let idx: usize = rest
        .strip_prefix('x')
        .and_then(|n| n.parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| syntax(line, format!("bad literal '{tok}'")))?;
    Ok(Lit::new(Var::new(idx - 1), positive))
}

fn parse_int(tok: &str, line: usize) -> Result<i64, OpbError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("bad integer '{tok}'")))
}

type Terms<'a> = (Vec<(i64, Lit)>, Option<&'a str>);

/// Parses `w1 l1 w2 l2 ...`, returning the terms and the leftover token if
/// the count is odd.
fn parse_terms<'a>(toks: &[&'a str], line: usize) -> Result<Terms<'a>, OpbError> {
    let mut terms = Vec::with_capacity(toks.len() / 2);
    let mut chunks = toks.chunks_exact(2);
    for pair in &mut chunks {
        terms.push((parse_int(pair[0], line)?, parse_lit(pair[1], line)?));
    }
    Ok((terms, chunks.remainder().first().copied()))
}

fn declared_vars(comment: &str) -> Option<usize> {
    let mut toks = comment.split_whitespace();
    while let Some(t) = toks.next() {
        if t == "#variable=" {
            return toks.next()?.parse().ok();
        }
    }
    None
}

pub fn parse_mo_opb(text: &str) -> Result<MocoInstance, OpbError> {
    let mut inst = MocoInstance::new(0);
    let mut declared = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(c) = s.strip_prefix('*') {
            if let Some(n) = declared_vars(c) {
                declared = declared.max(n);
            }
            continue;
        }
        let body = s
            .strip_suffix(';')
            .ok_or_else(|| syntax(line, "missing ';'"))?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        let head = toks.first().copied().unwrap_or("");
        if head == "min:" || head == "max:" {
            let (terms, rest) = parse_terms(&toks[1..], line)?;
            let constant = rest.map(|t| parse_int(t, line)).transpose()?.unwrap_or(0);
            inst.add_objective(if head == "min:" {
                Objective::new(terms, constant)
            } else {
                Objective::maximize(terms, constant)
            });
            continue;
        }
        let op_at = toks
            .iter()
            .position(|t| matches!(*t, ">=" | "<=" | "="))
            .ok_or_else(|| syntax(line, "expected '>=', '<=' or '='"))?;
        if op_at + 2 != toks.len() {
            return Err(syntax(line, "expected a single integer after the relation"));
        }
        let (terms, rest) = parse_terms(&toks[..op_at], line)?;
        if let Some(t) = rest {
            return Err(syntax(line, format!("dangling token '{t}'")));
        }
        let relation = match toks[op_at] {
            ">=" => Relation::AtLeast,
            "<=" => Relation::AtMost,
            _ => Relation::Equal,
        };
        let bound = parse_int(toks[op_at + 1], line)?;
        inst.add_constraint(PbConstraint::new(terms, relation, bound));
    }
    if inst.n_objectives() == 0 {
        return Err(OpbError::NoObjectives);
    }
    if declared > inst.n_vars() {
        let mut grown = MocoInstance::new(declared);
        for c in inst.constraints() {
            grown.add_constraint(c.clone());
        }
        for o in inst.objectives() {
            grown.add_objective(o.clone());
        }
        inst = grown;
    }
    Ok(inst)
}

fn push_terms(out: &mut String, terms: &[(u64, Lit)]) {
    for (w, l) in terms {
        write!(out, " {w} {l}").unwrap();
    }
}

/// Canonical text of an instance in normalized form. Plain clauses are
/// written as `>= 1` constraints.
pub fn render_mo_opb(inst: &MocoInstance) -> String {
    let mut out = String::new();
    let n_cons = inst.constraints().len() + inst.clauses().len();
    writeln!(out, "* #variable= {} #constraint= {}", inst.n_vars(), n_cons).unwrap();
    for o in inst.objectives() {
        out.push_str("min:");
        push_terms(&mut out, o.terms());
        if o.offset() != 0 || o.terms().is_empty() {
            write!(out, " {}", o.offset()).unwrap();
        }
        out.push_str(";\n");
    }
    for c in inst.constraints() {
        let mut line = String::new();
        push_terms(&mut line, c.terms());
        writeln!(out, "{} {} {};", line.trim_start(), c.relation().symbol(), c.bound()).unwrap();
    }
    for c in inst.clauses() {
        let terms: Vec<(u64, Lit)> = c.lits().iter().map(|&l| (1, l)).collect();
        let mut line = String::new();
        push_terms(&mut line, &terms);
        writeln!(out, "{} >= 1;", line.trim_start()).unwrap();
    }
    out
}
