//! Domain types shared by every engine: literals, clauses, pseudo-Boolean
//! constraints, objectives, assignments and objective vectors.

mod archive;
mod dominance;
mod pb;
mod result;

use std::fmt;
use std::ops::Not;

pub use archive::{Archive, ArchiveEntry, InsertOutcome};
pub use dominance::{is_lower_bound_set, non_dominated, strictly_dominates, weakly_dominates, ObjVec};
pub use pb::{MocoInstance, Objective, PbConstraint, Relation};
pub use result::{ParetoResult, SolveStats, Status};

use crate::Error;

/// A propositional variable. Indices are zero-based internally and printed
/// one-based (`x1` is `Var(0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn new(idx: usize) -> Self {
        Var(idx as u32)
    }

    /// Variable from a one-based DIMACS/OPB number.
    pub fn from_dimacs(n: u32) -> Self {
        assert!(n > 0, "DIMACS variables are one-based");
        Var(n - 1)
    }

    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

/// A literal packed as `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var.0 << 1 | (!positive) as u32)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_pos(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense index usable for per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    pub fn from_dimacs(n: i64) -> Self {
        assert!(n != 0, "0 is not a DIMACS literal");
        Lit::new(Var::from_dimacs(n.unsigned_abs() as u32), n > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_pos() {
            v
        } else {
            -v
        }
    }

    /// Value of the literal under a total assignment of its variable.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value == self.is_pos()
    }
}

impl Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg() {
            write!(f, "~")?;
        }
        write!(f, "{}", self.var())
    }
}

/// A disjunction of literals. Duplicates are removed and tautologies are
/// rejected when the clause is built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Self, Error> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return Err(Error::Tautology);
        }
        Ok(Clause(lits))
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_var(&self) -> Option<Var> {
        self.0.iter().map(|l| l.var()).max()
    }

    /// Evaluates the clause; variables beyond the assignment read as false.
    pub fn is_satisfied(&self, values: &[bool]) -> bool {
        self.0
            .iter()
            .any(|l| l.eval(values.get(l.var().idx()).copied().unwrap_or(false)))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Ordered multiset of clauses plus a variable-count watermark.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    clauses: Vec<Clause>,
    n_vars: usize,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(n_vars: usize) -> Self {
        CnfFormula {
            clauses: Vec::new(),
            n_vars,
        }
    }

    pub fn add(&mut self, clause: Clause) {
        if let Some(v) = clause.max_var() {
            self.n_vars = self.n_vars.max(v.idx() + 1);
        }
        self.clauses.push(clause);
    }

    /// Adds a clause given as a literal list; tautologies are silently dropped.
    pub fn add_lits(&mut self, lits: impl IntoIterator<Item = Lit>) {
        if let Ok(c) = Clause::new(lits) {
            self.add(c);
        }
    }

    pub fn extend(&mut self, other: CnfFormula) {
        self.n_vars = self.n_vars.max(other.n_vars);
        self.clauses.extend(other.clauses);
    }

    pub fn reserve_vars(&mut self, n_vars: usize) {
        self.n_vars = self.n_vars.max(n_vars);
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_satisfied(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied(values))
    }
}

impl FromIterator<Clause> for CnfFormula {
    fn from_iter<T: IntoIterator<Item = Clause>>(iter: T) -> Self {
        let mut cnf = CnfFormula::new();
        for c in iter {
            cnf.add(c);
        }
        cnf
    }
}

/// A total assignment to the instance variables (the solution tuple).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    /// The assignment whose bits spell `bits` in little-endian order over
    /// `n` variables (bit 0 is `x1`).
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Assignment((0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, var: Var) -> bool {
        self.0[var.idx()]
    }

    pub fn lit_value(&self, lit: Lit) -> bool {
        lit.eval(self.value(lit.var()))
    }

    /// Parses a `0`/`1` string as produced by [`Display`](fmt::Display).
    pub fn parse_bits(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Assignment)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
