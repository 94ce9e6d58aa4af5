//! Small random instances for unit tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Lit, MocoInstance, Objective, PbConstraint, Relation, Var};

pub(crate) fn random_instance(seed: u64, n_vars: usize, m: usize) -> MocoInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = MocoInstance::new(n_vars);
    let vars: Vec<usize> = (0..n_vars).collect();
    let n_cons = rng.gen_range(0..=n_vars / 2 + 1);
    for _ in 0..n_cons {
        let k = rng.gen_range(1..=n_vars.min(4));
        let picked: Vec<usize> = vars.choose_multiple(&mut rng, k).copied().collect();
        let terms: Vec<(i64, Lit)> = picked
            .iter()
            .map(|&v| (rng.gen_range(1..=3), Lit::new(Var::new(v), rng.gen_bool(0.7))))
            .collect();
        let total: i64 = terms.iter().map(|t| t.0).sum();
        let (rel, bound) = match rng.gen_range(0..4) {
            0 => (Relation::AtLeast, 1),
            1 => (Relation::AtLeast, rng.gen_range(1..=total)),
            2 => (Relation::AtMost, rng.gen_range(0..total)),
            _ => (Relation::Equal, rng.gen_range(0..=total)),
        };
        inst.add_constraint(PbConstraint::new(terms, rel, bound));
    }
    for _ in 0..m {
        let mut terms: Vec<(i64, Lit)> = Vec::new();
        for v in 0..n_vars {
            if !rng.gen_bool(0.7) {
                continue;
            }
            let w = if rng.gen_bool(0.2) {
                rng.gen_range(10..=14)
            } else {
                rng.gen_range(1..=3)
            };
            terms.push((w, Lit::new(Var::new(v), rng.gen_bool(0.6))));
        }
        inst.add_objective(Objective::new(terms, 0));
    }
    inst
}
