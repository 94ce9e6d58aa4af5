//! Exhaustive Pareto front computation for small instances.
//!
//! Feasibility is decided by evaluating the PB constraints directly, never
//! through the CNF encoding, so encoder defects cannot hide engine defects.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::model::{non_dominated, Assignment, MocoInstance, ObjVec};
use crate::Error;

pub const DEFAULT_CAP: usize = 20;
/// Instances up to this many variables also keep the full feasible list.
pub const FEASIBLE_LIST_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub feasible: Option<Vec<(Assignment, ObjVec)>>,
    /// Sorted lexicographically.
    pub img_front: Vec<ObjVec>,
    /// Lexicographically smallest witness of each front vector, aligned
    /// with `img_front`.
    pub arg_front: Vec<Assignment>,
}

/// Best witness per vector within one chunk of the assignment space.
fn scan(instance: &MocoInstance, range: std::ops::Range<u64>) -> BTreeMap<ObjVec, Assignment> {
    let n = instance.n_vars();
    let mut best: BTreeMap<ObjVec, Assignment> = BTreeMap::new();
    for bits in range {
        let a = Assignment::from_bits(bits, n);
        if !instance.is_feasible(&a) {
            continue;
        }
        let y = instance.evaluate(&a);
        match best.get_mut(&y) {
            Some(w) if a < *w => *w = a,
            Some(_) => {}
            None => {
                best.insert(y, a);
            }
        }
    }
    let keep = non_dominated(best.keys().cloned());
    best.retain(|k, _| keep.binary_search(k).is_ok());
    best
}

pub fn exact_front(instance: &MocoInstance, cap: usize) -> Result<OracleResult, Error> {
    let n = instance.n_vars();
    if n > cap {
        return Err(Error::TooManyVariables { n, cap });
    }
    let total = 1u64 << n;
    let chunk = (total / 64).max(1024);
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let parts: Vec<BTreeMap<ObjVec, Assignment>> = starts
        .par_iter()
        .map(|&s| scan(instance, s..(s + chunk).min(total)))
        .collect();

    let mut merged: BTreeMap<ObjVec, Assignment> = BTreeMap::new();
    for part in parts {
        for (y, a) in part {
            match merged.get_mut(&y) {
                Some(w) if a < *w => *w = a,
                Some(_) => {}
                None => {
                    merged.insert(y, a);
                }
            }
        }
    }
    let img_front = non_dominated(merged.keys().cloned());
    let arg_front = img_front.iter().map(|y| merged[y].clone()).collect();

    let feasible = (n <= FEASIBLE_LIST_CAP).then(|| {
        (0..total)
            .map(|bits| Assignment::from_bits(bits, n))
            .filter(|a| instance.is_feasible(a))
            .map(|a| {
                let y = instance.evaluate(&a);
                (a, y)
            })
            .collect()
    });
    Ok(OracleResult {
        feasible,
        img_front,
        arg_front,
    })
}
