use super::*;
use crate::model::{Clause, Objective, PbConstraint, Relation};
use crate::sat::{SolveOutcome, Solver};
use crate::testgen::random_instance;

fn x(i: usize) -> Var {
    Var::new(i)
}

fn unit_objective_instance(weights: &[i64]) -> MocoInstance {
    let mut inst = MocoInstance::new(weights.len());
    inst.add_objective(Objective::new(
        weights.iter().enumerate().map(|(i, &w)| (w, x(i).pos())).collect(),
        0,
    ));
    inst
}

fn assumptions_for(a: &Assignment) -> Vec<Lit> {
    a.values()
        .iter()
        .enumerate()
        .map(|(i, &b)| Lit::new(Var::new(i), b))
        .collect()
}

/// Brute-force subset sums by enumerating every subset.
fn brute_subset_sums(weights: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = (0u64..1 << weights.len())
        .map(|mask| {
            weights
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, w)| w)
                .sum()
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[test]
fn unit_objective_order_var_is_the_literal() {
    let enc = encode(&unit_objective_instance(&[1]), &EncoderConfig::default());
    assert_eq!(enc.order_var(0, 1), Some(x(0).pos()));
    assert_eq!(enc.order_var(0, 0), None);
    assert_eq!(enc.order_var(0, 2), None);
    assert_eq!(enc.my_next(0, 1), None);
    assert_eq!(enc.my_next(0, 0), Some(1));
}

#[test]
fn two_unit_weights() {
    let enc = encode(&unit_objective_instance(&[1, 1]), &EncoderConfig::default());
    let o1 = enc.order_var(0, 1).unwrap();
    let o2 = enc.order_var(0, 2).unwrap();
    assert_ne!(o1, o2);
    // every assignment: o_k <=> f >= k
    for bits in 0..4u64 {
        let a = Assignment::from_bits(bits, 2);
        let f = bits.count_ones() as u64;
        let mut s = Solver::from_cnf(enc.cnf(), 0);
        match s.solve(&assumptions_for(&a)) {
            SolveOutcome::Sat(m) => {
                assert_eq!(o1.eval(m[o1.var().idx()]), f >= 1);
                assert_eq!(o2.eval(m[o2.var().idx()]), f >= 2);
            }
            other => panic!("{other:?}"),
        }
    }
    // o2 -> o1
    let mut s = Solver::from_cnf(enc.cnf(), 0);
    assert!(s.solve(&[o2, !o1]).is_unsat());
}

#[test]
fn equal_weights_share_order_literal() {
    let enc = encode(&unit_objective_instance(&[2, 2]), &EncoderConfig::default());
    assert_eq!(enc.attainable_values(0), Some(&[0, 2, 4][..]));
    assert_eq!(enc.order_var(0, 1), enc.order_var(0, 2));
    assert_eq!(enc.my_next(0, 0), Some(2));
    let o = enc.order_var(0, 2).unwrap();
    assert_eq!(enc.order_value(o), Some((0, 2)));
}

#[test]
fn my_next_skips_unattainable_values() {
    let enc = encode(&unit_objective_instance(&[3, 5]), &EncoderConfig::default());
    assert_eq!(enc.my_next(0, 3), Some(5));
    assert_eq!(enc.my_next(0, 5), Some(8));
    assert_eq!(enc.my_next(0, 8), None);
}

#[test]
fn my_next_falls_back_above_cap() {
    let enc = encode(&unit_objective_instance(&[3, 5]), &EncoderConfig { dp_cap: 4 });
    assert_eq!(enc.attainable_values(0), None);
    assert_eq!(enc.my_next(0, 3), Some(4));
    assert_eq!(enc.my_next(0, 8), None);
    // the order literal for an unattainable k is the next attainable one
    assert_eq!(enc.order_var(0, 4), enc.order_var(0, 5));
}

#[test]
fn constant_objective_has_no_counter() {
    let mut inst = MocoInstance::new(1);
    inst.add_objective(Objective::new(vec![], 3));
    let enc = encode(&inst, &EncoderConfig::default());
    assert!(enc.counter(0).is_empty());
    assert_eq!(enc.order_var(0, 1), None);
    assert_eq!(enc.my_next(0, 0), None);
}

fn projected_models(cnf: &CnfFormula, n: usize) -> Vec<bool> {
    let mut s = Solver::from_cnf(cnf, 0);
    s.ensure_vars(n);
    (0u64..1 << n)
        .map(|bits| s.solve(&assumptions_for(&Assignment::from_bits(bits, n))).is_sat())
        .collect()
}

#[test]
fn pb_clause_shape() {
    let c = PbConstraint::new(vec![(1, x(0).pos()), (1, x(1).pos())], Relation::AtLeast, 1);
    let cnf = encode_pb_constraint(&c, &mut VarAlloc::starting_at(2));
    assert_eq!(cnf.clauses(), &[Clause::new([x(0).pos(), x(1).pos()]).unwrap()]);
}

#[test]
fn pb_at_most_one_by_weights() {
    let c = PbConstraint::new(vec![(2, x(0).pos()), (2, x(1).pos())], Relation::AtMost, 2);
    let cnf = encode_pb_constraint(&c, &mut VarAlloc::starting_at(2));
    assert_eq!(projected_models(&cnf, 2), vec![true, true, true, false]);
}

#[test]
fn pb_trivial_cases() {
    let unsat = PbConstraint::new(vec![(1, x(0).pos())], Relation::AtLeast, 2);
    let cnf = encode_pb_constraint(&unsat, &mut VarAlloc::starting_at(1));
    assert_eq!(cnf.clauses(), &[Clause::empty()]);
    let taut = PbConstraint::new(vec![(1, x(0).pos())], Relation::AtMost, 5);
    assert!(encode_pb_constraint(&taut, &mut VarAlloc::starting_at(1)).is_empty());
    let taut = PbConstraint::new(vec![(1, x(0).pos())], Relation::AtLeast, 0);
    assert!(encode_pb_constraint(&taut, &mut VarAlloc::starting_at(1)).is_empty());
}

#[test]
fn pb_encoding_projection_is_exact() {
    for seed in 0..60 {
        let inst = random_instance(seed, 7, 1);
        for c in inst.constraints() {
            let cnf = encode_pb_constraint(c, &mut VarAlloc::starting_at(7));
            let got = projected_models(&cnf, 7);
            for bits in 0u64..1 << 7 {
                let a = Assignment::from_bits(bits, 7);
                assert_eq!(got[bits as usize], c.is_satisfied(a.values()), "seed {seed}: {c}");
            }
        }
    }
}

/// Exhaustive counter check on one instance: projection faithfulness,
/// `o(i,k) <=> f_i >= k` under every feasible assignment, entailed order
/// implications and `my_next` against brute-force subset sums.
pub(crate) fn check_encoding(inst: &MocoInstance) {
    let n = inst.n_vars();
    let enc = encode(inst, &EncoderConfig::default());
    let mut s = Solver::from_cnf(enc.cnf(), 0);
    for bits in 0u64..1 << n {
        let a = Assignment::from_bits(bits, n);
        let assumps = assumptions_for(&a);
        let feasible = inst.is_feasible(&a);
        assert_eq!(s.solve(&assumps).is_sat(), feasible, "projection mismatch at {a}");
        if !feasible {
            continue;
        }
        let y = inst.evaluate(&a);
        for i in 0..inst.n_objectives() {
            for &(k, o) in enc.counter(i) {
                let mut with = assumps.clone();
                with.push(if y[i] >= k { !o } else { o });
                assert!(s.solve(&with).is_unsat(), "o({i},{k}) wrong at {a}");
            }
        }
    }
    for i in 0..inst.n_objectives() {
        for w in enc.counter(i).windows(2) {
            assert!(s.solve(&[w[1].1, !w[0].1]).is_unsat());
        }
        let weights: Vec<u64> = inst.objectives()[i].terms().iter().map(|t| t.0).collect();
        let sums = brute_subset_sums(&weights);
        let outs: Vec<u64> = enc.counter(i).iter().map(|o| o.0).collect();
        assert_eq!(outs, sums[1..].to_vec());
        for v in 0..=enc.upper_bound(i) + 1 {
            let expect = sums.iter().copied().find(|&s| s > v);
            assert_eq!(enc.my_next(i, v), expect);
        }
    }
}

#[test]
fn counters_exact_on_random_instances() {
    for seed in 0..25 {
        check_encoding(&random_instance(seed, 8, 2));
    }
}

#[test]
fn dp_matches_brute_force() {
    let weights = [3, 5, 5, 11, 1];
    assert_eq!(subset_sums(&weights, 100).unwrap(), brute_subset_sums(&weights));
    assert_eq!(subset_sums(&weights, 10), None);
}
