//! P-minimal model enumeration.
//!
//! Each outer round takes any model left by the blocking clauses and
//! descends from it: the next model must weakly dominate the current vector
//! and differ from it somewhere. The descent constraints hang off a fresh
//! selector literal that is assumed during the chain and falsified after
//! it. The last model of a chain is Pareto-optimal; it is archived and its
//! dominance cone blocked for good.

use crate::encode::{encode, EncodedInstance};
use crate::engine::{EngineConfig, Event, Observer};
use crate::model::{Archive, Lit, MocoInstance, ObjVec, ParetoResult, SolveStats, Status};
use crate::sat::{SolveOutcome, Solver};
use crate::unsatsat::blocking_clause;

/// Adds `s -> (F <= y and F != y)` and returns `s`.
fn add_descent(solver: &mut Solver, enc: &EncodedInstance, y: &ObjVec) -> Lit {
    let s = solver.new_var().pos();
    for i in 0..y.dim() {
        if let Some(o) = enc.my_next(i, y[i]).and_then(|k| enc.order_var(i, k)) {
            solver.add_clause(&[!s, !o]);
        }
    }
    let mut strict = vec![!s];
    strict.extend((0..y.dim()).filter_map(|i| enc.order_var(i, y[i]).map(|o| !o)));
    solver.add_clause(&strict);
    s
}

pub fn solve(instance: &MocoInstance, cfg: &EngineConfig, obs: &mut dyn Observer) -> ParetoResult {
    let enc = encode(instance, &cfg.encoder);
    let mut solver = Solver::from_cnf(enc.cnf(), cfg.seed);
    solver.set_limits(cfg.limits.clone());
    let mut archive = Archive::new();
    let mut stats = SolveStats::default();

    let partial = |archive: &Archive, stats: SolveStats| {
        ParetoResult::from_archive(archive, Status::TimeoutPartial, stats)
    };

    loop {
        stats.sat_calls += 1;
        let model = match solver.solve(&[]) {
            SolveOutcome::Sat(m) => m,
            SolveOutcome::Unsat(_) => {
                stats.cores += 1;
                return ParetoResult::from_archive(&archive, Status::Complete, stats);
            }
            SolveOutcome::Interrupted => return partial(&archive, stats),
        };
        stats.iterations += 1;
        let mut x = enc.project(&model);
        let mut y = instance.evaluate(&x);
        loop {
            let s = add_descent(&mut solver, &enc, &y);
            stats.sat_calls += 1;
            let out = solver.solve(&[s]);
            solver.add_clause(&[!s]);
            match out {
                SolveOutcome::Sat(m) => {
                    let nx = enc.project(&m);
                    let ny = instance.evaluate(&nx);
                    debug_assert!(crate::model::strictly_dominates(&ny, &y));
                    obs.on_event(&Event::ChainStep { from: &y, to: &ny });
                    x = nx;
                    y = ny;
                }
                SolveOutcome::Unsat(_) => {
                    stats.cores += 1;
                    break;
                }
                SolveOutcome::Interrupted => {
                    // the chain head is feasible, just not proven optimal
                    if archive.insert(x, y).is_inserted() {
                        obs.on_event(&Event::ArchiveChanged { archive: &archive });
                    }
                    return partial(&archive, stats);
                }
            }
        }
        solver.add(&blocking_clause(&enc, &y));
        if archive.insert(x, y).is_inserted() {
            obs.on_event(&Event::ArchiveChanged { archive: &archive });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::NoObserver;
    use crate::model::{strictly_dominates, Objective, PbConstraint, Var};
    use crate::oracle::{exact_front, DEFAULT_CAP};
    use crate::testgen::random_instance;

    #[test]
    fn single_feasible_point() {
        let x = Var::new(0);
        let mut inst = MocoInstance::new(1);
        inst.add_constraint(PbConstraint::clause([x.pos()]));
        inst.add_objective(Objective::new(vec![(2, x.pos())], 0));
        inst.add_objective(Objective::new(vec![(1, x.neg())], 0));
        let mut steps = 0;
        let r = solve(&inst, &EngineConfig::default(), &mut |e: &Event<'_>| {
            if matches!(e, Event::ChainStep { .. }) {
                steps += 1;
            }
        });
        assert_eq!(steps, 0);
        assert_eq!(r.stats.iterations, 1);
        assert_eq!(r.img_front, vec![ObjVec::from([2, 0])]);
    }

    #[test]
    fn complementary_two_rounds() {
        let x = Var::new(0);
        let mut inst = MocoInstance::new(1);
        inst.add_objective(Objective::new(vec![(1, x.pos())], 0));
        inst.add_objective(Objective::new(vec![(1, x.neg())], 0));
        let r = solve(&inst, &EngineConfig::default(), &mut NoObserver);
        assert_eq!(r.stats.iterations, 2);
        assert_eq!(r.img_front, vec![ObjVec::from([0, 1]), [1, 0].into()]);
    }

    #[test]
    fn infeasible_is_empty() {
        let x = Var::new(0);
        let mut inst = MocoInstance::new(1);
        inst.add_constraint(PbConstraint::clause([x.pos()]));
        inst.add_constraint(PbConstraint::clause([x.neg()]));
        inst.add_objective(Objective::new(vec![(1, x.pos())], 0));
        let r = solve(&inst, &EngineConfig::default(), &mut NoObserver);
        assert_eq!(r.status, Status::Complete);
        assert!(r.img_front.is_empty());
    }

    #[test]
    fn chains_descend_and_front_matches_oracle() {
        for seed in 0..30 {
            let inst = random_instance(seed, 9, 1 + (seed as usize % 3));
            let oracle = exact_front(&inst, DEFAULT_CAP).unwrap();
            let mut bad_steps = 0;
            let r = solve(&inst, &EngineConfig::default(), &mut |e: &Event<'_>| {
                if let Event::ChainStep { from, to } = e {
                    if !strictly_dominates(to, from) {
                        bad_steps += 1;
                    }
                }
            });
            assert_eq!(bad_steps, 0);
            assert_eq!(r.img_front, oracle.img_front, "seed {seed}");
            // every archived model is P-minimal
            for (x, y) in r.arg_front.iter().zip(&r.img_front) {
                assert!(inst.is_feasible(x));
                assert!(!oracle
                    .feasible
                    .as_ref()
                    .unwrap()
                    .iter()
                    .any(|(_, v)| strictly_dominates(v, y)));
            }
        }
    }
}
