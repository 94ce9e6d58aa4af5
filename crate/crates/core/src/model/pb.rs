use std::collections::BTreeMap;
use std::fmt;

use super::{Assignment, Clause, Lit, ObjVec, Var};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    AtLeast,
    AtMost,
    Equal,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Equal => "=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::AtLeast => lhs >= rhs,
            Relation::AtMost => lhs <= rhs,
            Relation::Equal => lhs == rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Folds a weighted literal sum into per-variable coefficients over positive
/// literals plus a constant, then re-expresses negative coefficients over the
/// complemented literal. Returns the positive-weight terms (sorted by
/// variable) and the constant the sum was shifted by.
fn normalize_terms(terms: &[(i64, Lit)]) -> (Vec<(u64, Lit)>, i64) {
    let mut coeff: BTreeMap<Var, i64> = BTreeMap::new();
    let mut constant = 0i64;
    for &(w, l) in terms {
        if l.is_pos() {
            *coeff.entry(l.var()).or_default() += w;
        } else {
            // w * ~x = w - w * x
            *coeff.entry(l.var()).or_default() -= w;
            constant += w;
        }
    }
    let mut out = Vec::with_capacity(coeff.len());
    for (v, c) in coeff {
        match c {
            0 => {}
            c if c > 0 => out.push((c as u64, v.pos())),
            c => {
                // c * x = |c| * ~x - |c|
                out.push((c.unsigned_abs(), v.neg()));
                constant += c;
            }
        }
    }
    (out, constant)
}

/// A linear pseudo-Boolean constraint `sum w_j * l_j  REL  bound` with
/// strictly positive weights and at most one literal per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PbConstraint {
    terms: Vec<(u64, Lit)>,
    relation: Relation,
    bound: i64,
}

impl PbConstraint {
    /// Normalizes an arbitrary integer-weighted constraint. Negative weights
    /// and repeated variables are folded away; the bound absorbs the shift.
    pub fn new(terms: Vec<(i64, Lit)>, relation: Relation, bound: i64) -> Self {
        let (terms, shift) = normalize_terms(&terms);
        PbConstraint {
            terms,
            relation,
            bound: bound - shift,
        }
    }

    /// Clause-shaped constraint `l_1 + ... + l_k >= 1`.
    pub fn clause(lits: impl IntoIterator<Item = Lit>) -> Self {
        Self::new(lits.into_iter().map(|l| (1, l)).collect(), Relation::AtLeast, 1)
    }

    pub fn terms(&self) -> &[(u64, Lit)] {
        &self.terms
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn weight_sum(&self) -> u64 {
        self.terms.iter().map(|t| t.0).sum()
    }

    pub fn lhs(&self, values: &[bool]) -> i64 {
        self.terms
            .iter()
            .filter(|(_, l)| l.eval(values[l.var().idx()]))
            .map(|(w, _)| *w as i64)
            .sum()
    }

    pub fn is_satisfied(&self, values: &[bool]) -> bool {
        self.relation.holds(self.lhs(values), self.bound)
    }

    pub fn max_var(&self) -> Option<Var> {
        self.terms.iter().map(|t| t.1.var()).max()
    }
}

impl fmt::Display for PbConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, l) in &self.terms {
            write!(f, "{w} {l} ")?;
        }
        write!(f, "{} {}", self.relation, self.bound)
    }
}

/// A minimized objective `offset + sum w_j * l_j` with positive weights.
///
/// The weighted sum (without the offset) is what the engines work with; its
/// lower bound is 0 and its upper bound is the weight total.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Objective {
    terms: Vec<(u64, Lit)>,
    offset: i64,
}

impl Objective {
    pub fn new(terms: Vec<(i64, Lit)>, constant: i64) -> Self {
        let (terms, shift) = normalize_terms(&terms);
        Objective {
            terms,
            offset: constant + shift,
        }
    }

    /// Objective to maximize, rewritten as minimization of its negation.
    pub fn maximize(terms: Vec<(i64, Lit)>, constant: i64) -> Self {
        Self::new(terms.into_iter().map(|(w, l)| (-w, l)).collect(), -constant)
    }

    /// Builds directly from already-normalized terms.
    pub fn from_normalized(terms: Vec<(u64, Lit)>, offset: i64) -> Self {
        debug_assert!(terms.iter().all(|t| t.0 > 0));
        Objective { terms, offset }
    }

    pub fn terms(&self) -> &[(u64, Lit)] {
        &self.terms
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn upper_bound(&self) -> u64 {
        self.terms.iter().map(|t| t.0).sum()
    }

    pub fn eval(&self, values: &[bool]) -> u64 {
        self.terms
            .iter()
            .filter(|(_, l)| l.eval(values[l.var().idx()]))
            .map(|(w, _)| *w)
            .sum()
    }
}

/// A multi-objective instance: variables, PB constraints, optional plain
/// clauses (used for relaxed formulas) and an ordered list of objectives.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MocoInstance {
    n_vars: usize,
    constraints: Vec<PbConstraint>,
    clauses: Vec<Clause>,
    objectives: Vec<Objective>,
}

impl MocoInstance {
    pub fn new(n_vars: usize) -> Self {
        MocoInstance {
            n_vars,
            ..Default::default()
        }
    }

    pub fn add_constraint(&mut self, c: PbConstraint) {
        if let Some(v) = c.max_var() {
            self.n_vars = self.n_vars.max(v.idx() + 1);
        }
        self.constraints.push(c);
    }

    pub fn add_clause(&mut self, c: Clause) {
        if let Some(v) = c.max_var() {
            self.n_vars = self.n_vars.max(v.idx() + 1);
        }
        self.clauses.push(c);
    }

    pub fn add_objective(&mut self, o: Objective) {
        if let Some(v) = o.terms.iter().map(|t| t.1.var()).max() {
            self.n_vars = self.n_vars.max(v.idx() + 1);
        }
        self.objectives.push(o);
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn constraints(&self) -> &[PbConstraint] {
        &self.constraints
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn offsets(&self) -> Vec<i64> {
        self.objectives.iter().map(|o| o.offset).collect()
    }

    /// Same variables and objectives, with a different constraint set.
    pub fn with_formula(&self, constraints: Vec<PbConstraint>, clauses: Vec<Clause>) -> Self {
        MocoInstance {
            n_vars: self.n_vars,
            constraints,
            clauses,
            objectives: self.objectives.clone(),
        }
    }

    /// Same formula, different objectives.
    pub fn with_objectives(&self, objectives: Vec<Objective>) -> Self {
        MocoInstance {
            n_vars: self.n_vars,
            constraints: self.constraints.clone(),
            clauses: self.clauses.clone(),
            objectives,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.objectives.is_empty() {
            return Err(Error::NoObjectives);
        }
        Ok(())
    }

    /// Direct evaluation of constraints and clauses (no CNF involved).
    pub fn is_feasible(&self, x: &Assignment) -> bool {
        let v = x.values();
        self.constraints.iter().all(|c| c.is_satisfied(v)) && self.clauses.iter().all(|c| c.is_satisfied(v))
    }

    pub fn evaluate(&self, x: &Assignment) -> ObjVec {
        ObjVec::new(self.objectives.iter().map(|o| o.eval(x.values())).collect())
    }

    /// Objective values in the caller's original units (offsets applied).
    pub fn reported(&self, y: &ObjVec) -> Vec<i64> {
        y.iter()
            .zip(&self.objectives)
            .map(|(&v, o)| v as i64 + o.offset)
            .collect()
    }
}
