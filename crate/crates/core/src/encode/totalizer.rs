//! Weighted totalizer producing one output literal per attainable sum.
//!
//! Every node owns literals `o_v` for the distinct non-zero subset sums `v`
//! of its leaves. Clauses are emitted in both directions so that in every
//! model `o_v` holds exactly when the node's sum is at least `v`.

use super::VarAlloc;
use crate::model::{CnfFormula, Lit};

/// Outputs of a counter, ascending by value.
pub(crate) type Outputs = Vec<(u64, Lit)>;

pub(crate) fn build(terms: &[(u64, Lit)], alloc: &mut VarAlloc, cnf: &mut CnfFormula) -> Outputs {
    match terms.len() {
        0 => Vec::new(),
        1 => vec![terms[0]],
        n => {
            let (l, r) = terms.split_at(n / 2);
            let left = build(l, alloc, cnf);
            let right = build(r, alloc, cnf);
            merge(&left, &right, alloc, cnf)
        }
    }
}

fn merge(left: &Outputs, right: &Outputs, alloc: &mut VarAlloc, cnf: &mut CnfFormula) -> Outputs {
    // prepend the implicit zero level (always true)
    let lv: Vec<(u64, Option<Lit>)> = std::iter::once((0, None))
        .chain(left.iter().map(|&(v, l)| (v, Some(l))))
        .collect();
    let rv: Vec<(u64, Option<Lit>)> = std::iter::once((0, None))
        .chain(right.iter().map(|&(v, l)| (v, Some(l))))
        .collect();

    let mut sums: Vec<u64> = lv
        .iter()
        .flat_map(|a| rv.iter().map(move |b| a.0 + b.0))
        .filter(|&s| s > 0)
        .collect();
    sums.sort_unstable();
    sums.dedup();
    let out: Outputs = sums.iter().map(|&s| (s, alloc.fresh().pos())).collect();
    let out_lit = |s: u64| -> Lit {
        let i = out.binary_search_by_key(&s, |o| o.0).expect("sum is an output");
        out[i].1
    };

    for (ai, &(a, la)) in lv.iter().enumerate() {
        let next_l = lv.get(ai + 1).and_then(|x| x.1);
        for (bi, &(b, rb)) in rv.iter().enumerate() {
            let s = a + b;
            // left >= a and right >= b  =>  sum >= a + b
            if s > 0 {
                let mut c: Vec<Lit> = Vec::with_capacity(3);
                c.extend(la.map(|l| !l));
                c.extend(rb.map(|l| !l));
                c.push(out_lit(s));
                cnf.add_lits(c);
            }
            // left < next(a) and right < next(b)  =>  sum < (smallest output above a + b)
            let above = out.partition_point(|o| o.0 <= s);
            if let Some(&(_, o)) = out.get(above) {
                let next_r = rv.get(bi + 1).and_then(|x| x.1);
                let mut c: Vec<Lit> = Vec::with_capacity(3);
                c.extend(next_l);
                c.extend(next_r);
                c.push(!o);
                cnf.add_lits(c);
            }
        }
    }
    for w in out.windows(2) {
        cnf.add_lits([!w[1].1, w[0].1]);
    }
    out
}
