//! PB constraint to CNF via the sequential weighted counter.

use super::VarAlloc;
use crate::model::{CnfFormula, Lit, PbConstraint, Relation};

/// Encodes a normalized constraint. Auxiliary variables come from `alloc`;
/// the models of the fragment projected onto the constraint's variables are
/// exactly its satisfying assignments.
pub fn encode_pb_constraint(c: &PbConstraint, alloc: &mut VarAlloc) -> CnfFormula {
    let mut cnf = CnfFormula::new();
    match c.relation() {
        Relation::AtLeast => at_least(c.terms(), c.bound(), alloc, &mut cnf),
        Relation::AtMost => at_most(c.terms(), c.bound(), alloc, &mut cnf),
        Relation::Equal => {
            at_least(c.terms(), c.bound(), alloc, &mut cnf);
            at_most(c.terms(), c.bound(), alloc, &mut cnf);
        }
    }
    cnf
}

fn at_least(terms: &[(u64, Lit)], bound: i64, alloc: &mut VarAlloc, cnf: &mut CnfFormula) {
    if bound <= 0 {
        return;
    }
    let total: u64 = terms.iter().map(|t| t.0).sum();
    if (total as i64) < bound {
        cnf.add(crate::model::Clause::empty());
        return;
    }
    if terms.iter().all(|t| t.0 as i64 >= bound) {
        cnf.add_lits(terms.iter().map(|t| t.1));
        return;
    }
    // sum w l >= B  <=>  sum w ~l <= W - B
    let flipped: Vec<(u64, Lit)> = terms.iter().map(|&(w, l)| (w, !l)).collect();
    at_most(&flipped, total as i64 - bound, alloc, cnf);
}

fn at_most(terms: &[(u64, Lit)], bound: i64, alloc: &mut VarAlloc, cnf: &mut CnfFormula) {
    if bound < 0 {
        cnf.add(crate::model::Clause::empty());
        return;
    }
    let k = bound as u64;
    let mut rest: Vec<(u64, Lit)> = Vec::with_capacity(terms.len());
    for &(w, l) in terms {
        if w > k {
            cnf.add_lits([!l]);
        } else {
            rest.push((w, l));
        }
    }
    if rest.iter().map(|t| t.0).sum::<u64>() <= k {
        return;
    }
    let k = k as usize;
    let n = rest.len();
    // s[i][j-1]: the first i+1 terms sum to at least j (1 <= j <= k)
    let mut prev: Vec<Lit> = Vec::new();
    for (i, &(w, x)) in rest.iter().enumerate() {
        let w = w as usize;
        if i > 0 {
            // overflow: x_i together with prefix >= k + 1 - w exceeds k
            cnf.add_lits([!x, !prev[k - w]]);
        }
        if i + 1 == n {
            break;
        }
        let cur: Vec<Lit> = (0..k).map(|_| alloc.fresh().pos()).collect();
        for &c in &cur[..w] {
            cnf.add_lits([!x, c]);
        }
        if i > 0 {
            for j in 0..k {
                cnf.add_lits([!prev[j], cur[j]]);
            }
            for j in 0..k - w {
                cnf.add_lits([!x, !prev[j], cur[j + w]]);
            }
        }
        prev = cur;
    }
}
