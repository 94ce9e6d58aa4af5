//! CNF encoding of an instance: PB constraints plus one unary counter per
//! objective whose order literals `o(i, k)` hold exactly when objective `i`
//! is at least `k`.

mod pb;
mod totalizer;

use std::collections::HashMap;

pub use pb::encode_pb_constraint;

use crate::model::{Assignment, CnfFormula, Lit, MocoInstance, Var};

/// Hands out fresh variable indices above a watermark.
#[derive(Debug, Clone)]
pub struct VarAlloc {
    next: usize,
}

impl VarAlloc {
    pub fn starting_at(next: usize) -> Self {
        VarAlloc { next }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var::new(self.next);
        self.next += 1;
        v
    }

    pub fn watermark(&self) -> usize {
        self.next
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EncoderConfig {
    /// Largest objective upper bound for which the attainable values are
    /// tabulated. Above it, [`EncodedInstance::my_next`] steps by one.
    pub dp_cap: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig { dp_cap: 1_000_000 }
    }
}

/// Working formula: constraint encoding and all objective counters.
///
/// Instance variable `x_j` is solver variable `j`; auxiliary variables come
/// after them.
#[derive(Debug, Clone)]
pub struct EncodedInstance {
    cnf: CnfFormula,
    n_orig: usize,
    counters: Vec<Vec<(u64, Lit)>>,
    upper: Vec<u64>,
    attainable: Vec<Option<Vec<u64>>>,
    order_index: HashMap<Lit, (usize, u64)>,
}

/// Sorted subset sums of `weights` (including 0), or `None` when the weight
/// total exceeds `cap`.
pub fn subset_sums(weights: &[u64], cap: u64) -> Option<Vec<u64>> {
    let total: u64 = weights.iter().sum();
    if total > cap {
        return None;
    }
    let mut reach = vec![false; total as usize + 1];
    reach[0] = true;
    let mut hi = 0usize;
    for &w in weights {
        let w = w as usize;
        for s in (0..=hi).rev() {
            if reach[s] {
                reach[s + w] = true;
            }
        }
        hi += w;
    }
    Some(
        reach
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(s, _)| s as u64)
            .collect(),
    )
}

/// CNF of the instance's constraints and clauses only (no counters).
pub fn encode_constraints(instance: &MocoInstance, alloc: &mut VarAlloc) -> CnfFormula {
    let mut cnf = CnfFormula::with_vars(instance.n_vars());
    for c in instance.constraints() {
        cnf.extend(encode_pb_constraint(c, alloc));
    }
    for c in instance.clauses() {
        cnf.add(c.clone());
    }
    cnf.reserve_vars(alloc.watermark());
    cnf
}

/// Builds the working formula for an instance.
pub fn encode(instance: &MocoInstance, cfg: &EncoderConfig) -> EncodedInstance {
    let n = instance.n_vars();
    let mut alloc = VarAlloc::starting_at(n);
    let mut cnf = encode_constraints(instance, &mut alloc);
    let mut counters = Vec::with_capacity(instance.n_objectives());
    let mut upper = Vec::new();
    let mut attainable = Vec::new();
    let mut order_index = HashMap::new();
    for (i, obj) in instance.objectives().iter().enumerate() {
        let outputs = totalizer::build(obj.terms(), &mut alloc, &mut cnf);
        for &(v, l) in &outputs {
            order_index.insert(l, (i, v));
        }
        counters.push(outputs);
        upper.push(obj.upper_bound());
        let weights: Vec<u64> = obj.terms().iter().map(|t| t.0).collect();
        attainable.push(subset_sums(&weights, cfg.dp_cap));
    }
    cnf.reserve_vars(alloc.watermark());
    EncodedInstance {
        cnf,
        n_orig: n,
        counters,
        upper,
        attainable,
        order_index,
    }
}

impl EncodedInstance {
    pub fn cnf(&self) -> &CnfFormula {
        &self.cnf
    }

    pub fn n_objectives(&self) -> usize {
        self.counters.len()
    }

    pub fn n_orig_vars(&self) -> usize {
        self.n_orig
    }

    pub fn upper_bound(&self, i: usize) -> u64 {
        self.upper[i]
    }

    /// Counter outputs `(value, literal)` of objective `i`, ascending.
    pub fn counter(&self, i: usize) -> &[(u64, Lit)] {
        &self.counters[i]
    }

    /// Tabulated attainable values of objective `i` (including 0), when the
    /// upper bound is under the configured cap.
    pub fn attainable_values(&self, i: usize) -> Option<&[u64]> {
        self.attainable[i].as_deref()
    }

    /// The literal that is true iff objective `i` is at least `k`. Absent for
    /// `k == 0` (vacuous) and `k` above the upper bound.
    pub fn order_var(&self, i: usize, k: u64) -> Option<Lit> {
        if k == 0 || k > self.upper[i] {
            return None;
        }
        let c = &self.counters[i];
        let at = c.partition_point(|o| o.0 < k);
        c.get(at).map(|o| o.1)
    }

    /// Smallest attainable value of objective `i` strictly above `v`.
    pub fn my_next(&self, i: usize, v: u64) -> Option<u64> {
        match &self.attainable[i] {
            Some(vals) => {
                let at = vals.partition_point(|&x| x <= v);
                vals.get(at).copied()
            }
            None => (v < self.upper[i]).then_some(v + 1),
        }
    }

    /// `(objective, value)` of an order literal: the literal means
    /// "objective >= value" and `value` is attainable.
    pub fn order_value(&self, lit: Lit) -> Option<(usize, u64)> {
        self.order_index.get(&lit).copied()
    }

    /// Restricts a solver model to the instance variables.
    pub fn project(&self, model: &[bool]) -> Assignment {
        Assignment::new(model[..self.n_orig].to_vec())
    }
}

#[cfg(test)]
mod tests;
