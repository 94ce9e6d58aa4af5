//! Seeded instance generators.

use moco_core::model::{Lit, MocoInstance, Objective, PbConstraint, Relation, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("density must lie in (0, 1], got {0}")]
    Density(f64),
    #[error("element {0} stayed uncovered after {1} draws")]
    Uncoverable(usize, usize),
    #[error("{0} must be positive")]
    Zero(&'static str),
}

/// Draws per element before giving up on covering it.
pub const COVER_RETRIES: usize = 1000;

/// Multi-objective set cover: one variable per set, one covering clause per
/// element, `m` cost objectives with weights uniform in `[1, weight_max]`.
pub fn gen_set_cover(
    n_elements: usize,
    n_sets: usize,
    m: usize,
    density: f64,
    weight_max: u64,
    seed: u64,
) -> Result<MocoInstance, GenError> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenError::Density(density));
    }
    for (v, name) in [(n_sets, "n_sets"), (m, "m"), (weight_max as usize, "weight_max")] {
        if v == 0 {
            return Err(GenError::Zero(name));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = MocoInstance::new(n_sets);
    for e in 0..n_elements {
        let mut covering = Vec::new();
        for _ in 0..COVER_RETRIES {
            covering = (0..n_sets).filter(|_| rng.gen_bool(density)).collect();
            if !covering.is_empty() {
                break;
            }
        }
        if covering.is_empty() {
            return Err(GenError::Uncoverable(e, COVER_RETRIES));
        }
        inst.add_constraint(PbConstraint::clause(covering.into_iter().map(|s| Var::new(s).pos())));
    }
    for _ in 0..m {
        let terms = (0..n_sets)
            .map(|s| (rng.gen_range(1..=weight_max) as i64, Var::new(s).pos()))
            .collect();
        inst.add_objective(Objective::new(terms, 0));
    }
    Ok(inst)
}

/// Random PB instance. Objective weights mix a low band `[1, 3]` with a
/// high band `[30, 40]`, so weight stratification has something to split.
pub fn gen_random_pb(n_vars: usize, m: usize, seed: u64) -> Result<MocoInstance, GenError> {
    if n_vars == 0 {
        return Err(GenError::Zero("n_vars"));
    }
    if m == 0 {
        return Err(GenError::Zero("m"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = MocoInstance::new(n_vars);
    let vars: Vec<usize> = (0..n_vars).collect();
    let n_cons = rng.gen_range(1..=n_vars.div_ceil(2));
    for _ in 0..n_cons {
        let k = rng.gen_range(2.min(n_vars)..=n_vars.min(5));
        let picked: Vec<usize> = vars.choose_multiple(&mut rng, k).copied().collect();
        let terms: Vec<(i64, Lit)> = picked
            .into_iter()
            .map(|v| (rng.gen_range(1..=3), Lit::new(Var::new(v), rng.gen_bool(0.6))))
            .collect();
        let total: i64 = terms.iter().map(|t| t.0).sum();
        let half = (total / 2).max(1);
        let (rel, bound) = if rng.gen_bool(0.5) {
            (Relation::AtLeast, rng.gen_range(1..=half))
        } else {
            (Relation::AtMost, rng.gen_range(half..=total))
        };
        inst.add_constraint(PbConstraint::new(terms, rel, bound));
    }
    for _ in 0..m {
        let mut terms: Vec<(i64, Lit)> = Vec::new();
        for v in 0..n_vars {
            if rng.gen_bool(0.2) {
                continue;
            }
            let w = if rng.gen_bool(0.3) {
                rng.gen_range(30..=40)
            } else {
                rng.gen_range(1..=3)
            };
            terms.push((w, Lit::new(Var::new(v), rng.gen_bool(0.5))));
        }
        if terms.is_empty() {
            terms.push((1, Var::new(rng.gen_range(0..n_vars)).pos()));
        }
        inst.add_objective(Objective::new(terms, 0));
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opb::render_mo_opb;

    #[test]
    fn single_mandatory_set() {
        let inst = gen_set_cover(1, 1, 2, 1.0, 5, 3).unwrap();
        assert_eq!(inst.constraints(), &[PbConstraint::clause([Var::new(0).pos()])]);
        assert_eq!(inst.n_vars(), 1);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = render_mo_opb(&gen_set_cover(6, 8, 2, 0.4, 5, 7).unwrap());
        let b = render_mo_opb(&gen_set_cover(6, 8, 2, 0.4, 5, 7).unwrap());
        assert_eq!(a, b);
        let c = render_mo_opb(&gen_random_pb(10, 3, 4).unwrap());
        assert_eq!(c, render_mo_opb(&gen_random_pb(10, 3, 4).unwrap()));
        assert_ne!(a, render_mo_opb(&gen_set_cover(6, 8, 2, 0.4, 5, 8).unwrap()));
    }

    #[test]
    fn every_element_covered() {
        for seed in 0..50 {
            let inst = gen_set_cover(10, 6, 2, 0.2, 9, seed).unwrap();
            assert_eq!(inst.constraints().len(), 10);
            assert!(inst.constraints().iter().all(|c| !c.terms().is_empty()));
        }
    }

    #[test]
    fn invalid_arguments() {
        assert_eq!(gen_set_cover(3, 3, 2, 0.0, 5, 0), Err(GenError::Density(0.0)));
        assert_eq!(gen_set_cover(3, 3, 2, 1.5, 5, 0), Err(GenError::Density(1.5)));
        assert_eq!(gen_set_cover(3, 0, 2, 0.5, 5, 0), Err(GenError::Zero("n_sets")));
        assert!(gen_random_pb(0, 2, 0).is_err());
    }

    #[test]
    fn tiny_density_eventually_fails() {
        assert!(matches!(
            gen_set_cover(50, 1, 1, 1e-9, 3, 0),
            Err(GenError::Uncoverable(0, COVER_RETRIES))
        ));
    }
}
