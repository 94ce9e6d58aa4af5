use super::*;
use crate::encode::EncoderConfig;
use crate::engine::{NoObserver, Stratification};
use crate::hitting::model_assumptions;
use crate::model::{non_dominated, weakly_dominates, Objective, PbConstraint, Var};
use crate::oracle::{exact_front, OracleResult, DEFAULT_CAP};
use crate::testgen::random_instance;

fn complementary() -> MocoInstance {
    let x = Var::new(0);
    let mut inst = MocoInstance::new(1);
    inst.add_objective(Objective::new(vec![(1, x.pos())], 0));
    inst.add_objective(Objective::new(vec![(1, x.neg())], 0));
    inst
}

fn two_unit_objectives() -> MocoInstance {
    let mut inst = MocoInstance::new(2);
    inst.add_objective(Objective::new(vec![(1, Var::new(0).pos())], 0));
    inst.add_objective(Objective::new(vec![(1, Var::new(1).pos())], 0));
    inst
}

fn oracle(inst: &MocoInstance) -> OracleResult {
    exact_front(inst, DEFAULT_CAP).unwrap()
}

#[test]
fn complementary_front() {
    let r = solve(&complementary(), &EngineConfig::default(), &mut NoObserver);
    assert_eq!(r.status, Status::Complete);
    assert_eq!(r.img_front, vec![ObjVec::from([0, 1]), [1, 0].into()]);
}

#[test]
fn infeasible_is_complete_and_empty() {
    let mut inst = complementary();
    inst.add_constraint(PbConstraint::clause([Var::new(0).pos()]));
    inst.add_constraint(PbConstraint::clause([Var::new(0).neg()]));
    let r = solve(&inst, &EngineConfig::default(), &mut NoObserver);
    assert_eq!(r.status, Status::Complete);
    assert!(r.img_front.is_empty());
}

#[test]
fn initial_fence_forces_origin() {
    let inst = two_unit_objectives();
    let st = EngineState::new(&inst, &EngineConfig::default());
    let enc = st.encoding();
    let a = st.fence_assumptions();
    assert_eq!(
        a,
        vec![!enc.order_var(0, 1).unwrap(), !enc.order_var(1, 1).unwrap()]
    );
}

#[test]
fn fence_at_upper_bounds_has_no_assumptions() {
    let inst = two_unit_objectives();
    let mut st = EngineState::new(&inst, &EngineConfig::default());
    st.fence = vec![1, 1];
    assert!(st.fence_assumptions().is_empty());
}

#[test]
fn even_weights_skip_odd_walls() {
    let mut inst = MocoInstance::new(2);
    inst.add_objective(Objective::new(
        vec![(2, Var::new(0).pos()), (2, Var::new(1).pos())],
        0,
    ));
    let mut st = EngineState::new(&inst, &EngineConfig::default());
    let o2 = st.encoding().order_var(0, 2).unwrap();
    assert_eq!(st.fence_assumptions(), vec![!o2]);
    st.bump_fence(&[!o2]);
    assert_eq!(st.fence(), &[2]);
}

#[test]
fn bump_examples() {
    let inst = two_unit_objectives();
    let mut st = EngineState::new(&inst, &EngineConfig::default());
    let o1 = st.encoding().order_var(0, 1).unwrap();
    let o2 = st.encoding().order_var(1, 1).unwrap();
    st.bump_fence(&[!o1]);
    assert_eq!(st.fence(), &[1, 0]);
    let mut st = EngineState::new(&inst, &EngineConfig::default());
    st.bump_fence(&[!o1, !o2]);
    assert_eq!(st.fence(), &[1, 1]);
}

#[test]
fn blocking_clause_examples() {
    let inst = two_unit_objectives();
    let enc = encode(&inst, &EncoderConfig::default());
    let o1 = enc.order_var(0, 1).unwrap();
    let o2 = enc.order_var(1, 1).unwrap();
    assert_eq!(
        blocking_clause(&enc, &[1, 1].into()),
        Clause::new([!o1, !o2]).unwrap()
    );
    assert_eq!(blocking_clause(&enc, &[0, 1].into()), Clause::new([!o2]).unwrap());
    assert!(blocking_clause(&enc, &[0, 0].into()).lits().is_empty());

    // survivors of the (1,1) clause have a zero objective
    let mut s = Solver::from_cnf(enc.cnf(), 0);
    s.add(&blocking_clause(&enc, &[1, 1].into()));
    for bits in 0..4 {
        let x = Assignment::from_bits(bits, 2);
        let sat = s.solve(&model_assumptions(&x)).is_sat();
        let y = inst.evaluate(&x);
        assert_eq!(sat, y[0] == 0 || y[1] == 0);
    }
}

#[test]
fn discovery_order_does_not_matter() {
    for seed in 0..8 {
        let inst = random_instance(seed, 8, 2);
        let a = solve(&inst, &EngineConfig { seed: 1, ..EngineConfig::default() }, &mut NoObserver);
        let b = solve(&inst, &EngineConfig { seed: 99, ..EngineConfig::default() }, &mut NoObserver);
        assert_eq!(a.img_front, b.img_front);
    }
}

#[test]
fn matches_oracle_on_random_instances() {
    for seed in 0..40 {
        let m = 2 + (seed as usize % 2);
        let inst = random_instance(seed, 4 + (seed as usize % 9), m);
        let want = oracle(&inst);
        for bump in [FenceBump::BlockedValue, FenceBump::SingleStep] {
            let cfg = EngineConfig {
                fence_bump: bump,
                ..EngineConfig::default()
            };
            let r = solve(&inst, &cfg, &mut NoObserver);
            assert_eq!(r.status, Status::Complete);
            assert_eq!(r.img_front, want.img_front, "seed {seed}");
            for (x, y) in r.arg_front.iter().zip(&r.img_front) {
                assert!(inst.is_feasible(x));
                assert_eq!(&inst.evaluate(x), y);
            }
        }
    }
}

#[test]
fn single_step_fallback_above_dp_cap() {
    for seed in 0..10 {
        let inst = random_instance(seed, 7, 2);
        let cfg = EngineConfig {
            fence_bump: FenceBump::SingleStep,
            encoder: EncoderConfig { dp_cap: 0 },
            ..EngineConfig::default()
        };
        let r = solve(&inst, &cfg, &mut NoObserver);
        assert_eq!(r.img_front, oracle(&inst).img_front);
    }
}

/// Front of everything the working formula still admits plus the archive.
fn admitted_front(feasible: &[(Assignment, ObjVec)], ev: &Event<'_>) -> Option<Vec<ObjVec>> {
    let Event::InnerStep { archive, staging, solver, .. } = ev else {
        return None;
    };
    let mut s = (*solver).clone();
    let mut vs: Vec<ObjVec> = archive.vectors().chain(staging.vectors()).cloned().collect();
    for (x, y) in feasible {
        if s.solve(&model_assumptions(x)).is_sat() {
            vs.push(y.clone());
        }
    }
    Some(non_dominated(vs))
}

#[test]
fn inner_loop_invariant() {
    for seed in 0..10 {
        let inst = random_instance(seed, 7, 2 + (seed as usize % 2));
        let want = oracle(&inst);
        let feasible = want.feasible.clone().unwrap();
        for strict in [false, true] {
            let mut fronts: Vec<Vec<ObjVec>> = Vec::new();
            let mut obs = |e: &Event<'_>| {
                if let Some(f) = admitted_front(&feasible, e) {
                    fronts.push(f);
                }
            };
            let cfg = EngineConfig {
                anytime_strict: strict,
                ..EngineConfig::default()
            };
            solve(&inst, &cfg, &mut obs);
            assert!(!fronts.is_empty());
            assert!(fronts.iter().all(|f| *f == want.img_front), "seed {seed}");
        }
    }
}

#[test]
fn archive_optimal_at_outer_heads() {
    for seed in 0..20 {
        let inst = random_instance(seed, 9, 2 + (seed as usize % 2));
        let want = oracle(&inst);
        let mut bad = 0;
        let mut fences: Vec<Vec<u64>> = Vec::new();
        let mut obs = |e: &Event<'_>| {
            if let Event::OuterLoopHead { fence, archive } = e {
                let vs: Vec<&ObjVec> = archive.vectors().collect();
                for (k, v) in vs.iter().enumerate() {
                    if want.img_front.binary_search(v).is_err() || vs[..k].contains(v) {
                        bad += 1;
                    }
                }
                fences.push(fence.to_vec());
            }
        };
        let r = solve(&inst, &EngineConfig::default(), &mut obs);
        assert_eq!(bad, 0, "seed {seed}");
        assert!(fences.windows(2).all(|w| weakly_dominates(&w[0], &w[1])));
        // at most one outer iteration per fence position
        let enc = encode(&inst, &EncoderConfig::default());
        let bound: u64 = (0..inst.n_objectives())
            .map(|i| enc.attainable_values(i).unwrap().len() as u64 + 1)
            .product();
        assert!(r.stats.iterations <= bound);
    }
}

#[test]
fn anytime_strict_archive_is_always_optimal() {
    for seed in 0..15 {
        let inst = random_instance(seed, 9, 2);
        let want = oracle(&inst);
        let mut bad = 0;
        let mut obs = |e: &Event<'_>| {
            if let Event::ArchiveChanged { archive } = e {
                bad += archive
                    .vectors()
                    .filter(|v| want.img_front.binary_search(v).is_err())
                    .count();
            }
        };
        let cfg = EngineConfig {
            anytime_strict: true,
            ..EngineConfig::default()
        };
        let r = solve(&inst, &cfg, &mut obs);
        assert_eq!(bad, 0);
        assert_eq!(r.img_front, want.img_front);
    }
}

#[test]
fn interrupted_run_is_partial_and_feasible() {
    let inst = random_instance(3, 10, 2);
    let cfg = EngineConfig {
        limits: Limits::timeout(std::time::Duration::ZERO),
        ..EngineConfig::default()
    };
    let r = solve(&inst, &cfg, &mut NoObserver);
    assert_eq!(r.status, Status::TimeoutPartial);
    assert!(r.arg_front.iter().all(|x| inst.is_feasible(x)));
}

#[test]
fn stratified_matches_oracle() {
    for seed in 0..30 {
        let inst = random_instance(seed, 4 + (seed as usize % 8), 2 + (seed as usize % 2));
        let want = oracle(&inst);
        for strat in [
            Stratification::default(),
            Stratification {
                ratio: 2,
                max_partition: 2,
            },
        ] {
            for strict in [false, true] {
                let cfg = EngineConfig {
                    stratification: strat,
                    anytime_strict: strict,
                    ..EngineConfig::default()
                };
                let r = stratified_solve(&inst, &cfg, &mut NoObserver);
                assert_eq!(r.status, Status::Complete);
                assert_eq!(r.img_front, want.img_front, "seed {seed}");
                assert!(r.arg_front.iter().all(|x| inst.is_feasible(x)));
            }
        }
    }
}

#[test]
fn stratified_round_count() {
    let mut inst = MocoInstance::new(4);
    let w = [100, 100, 1, 1];
    for _ in 0..2 {
        inst.add_objective(Objective::new(
            (0..4).map(|i| (w[i], Var::new(i).neg())).collect(),
            0,
        ));
    }
    let cfg = EngineConfig {
        stratification: Stratification {
            ratio: 10,
            max_partition: 16,
        },
        ..EngineConfig::default()
    };
    let mut rounds = 0;
    let r = stratified_solve(&inst, &cfg, &mut |e: &Event<'_>| {
        if matches!(e, Event::RoundDone { .. }) {
            rounds += 1;
        }
    });
    // RoundDone fires for every round but the last
    assert_eq!(rounds, 1);
    assert_eq!(r.img_front, oracle(&inst).img_front);
}

#[test]
fn objectives_sharing_a_counter_literal() {
    // single-term objectives over the same literal share their counter
    let x = Var::new(0);
    let y = Var::new(1);
    let mut inst = MocoInstance::new(2);
    inst.add_constraint(PbConstraint::clause([x.pos(), y.pos()]));
    inst.add_objective(Objective::new(vec![(1, x.pos())], 0));
    inst.add_objective(Objective::new(vec![(1, x.pos())], 0));
    inst.add_objective(Objective::new(vec![(3, y.pos())], 0));
    let enc = encode(&inst, &EncoderConfig::default());
    assert_eq!(enc.order_var(0, 1), enc.order_var(1, 1));
    for bump in [FenceBump::BlockedValue, FenceBump::SingleStep] {
        let cfg = EngineConfig {
            fence_bump: bump,
            ..EngineConfig::default()
        };
        let r = solve(&inst, &cfg, &mut NoObserver);
        assert_eq!(r.img_front, oracle(&inst).img_front);
        let r = stratified_solve(&inst, &cfg, &mut NoObserver);
        assert_eq!(r.img_front, oracle(&inst).img_front);
    }
}
