//! Relaxation engine.
//!
//! Solves the MOCO problem over a relaxed formula `R` that `F` entails,
//! starting from the empty formula. Its front lower-bounds the true front.
//! Each relaxed witness is checked against `F` under the assumptions fixing
//! every variable to the witness value; failing checks yield cores, whose
//! negations tighten `R`. When every witness is feasible the relaxed front
//! is an arg-front of the instance.

use crate::encode::{encode_constraints, VarAlloc};
use crate::engine::{EngineConfig, Event, InnerEngine, NoObserver, Observer};
use crate::model::{
    Archive, Assignment, Clause, Lit, MocoInstance, ParetoResult, SolveStats, Status, Var,
};
use crate::sat::{SolveOutcome, Solver};
use crate::{pminimal, unsatsat};

/// `{ x_i if x assigns true, ~x_i otherwise }`.
pub fn model_assumptions(x: &Assignment) -> Vec<Lit> {
    x.values()
        .iter()
        .enumerate()
        .map(|(i, &b)| Lit::new(Var::new(i), b))
        .collect()
}

/// Feasibility oracle over `F` alone.
pub struct FeasibilityChecker {
    solver: Solver,
}

/// Answer of a feasibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Feasible,
    /// Assumption literals jointly inconsistent with `F`.
    Core(Vec<Lit>),
    Interrupted,
}

impl FeasibilityChecker {
    pub fn new(instance: &MocoInstance, cfg: &EngineConfig) -> Self {
        let mut alloc = VarAlloc::starting_at(instance.n_vars());
        let cnf = encode_constraints(instance, &mut alloc);
        let mut solver = Solver::from_cnf(&cnf, cfg.seed);
        solver.ensure_vars(instance.n_vars());
        solver.set_limits(cfg.limits.clone());
        solver.set_minimize_cores(cfg.minimize_cores);
        FeasibilityChecker { solver }
    }

    pub fn check(&mut self, x: &Assignment) -> Check {
        match self.solver.solve(&model_assumptions(x)) {
            SolveOutcome::Sat(_) => Check::Feasible,
            SolveOutcome::Unsat(core) => Check::Core(core),
            SolveOutcome::Interrupted => Check::Interrupted,
        }
    }
}

/// Cores collected while checking one relaxed front, each with the witness
/// it was derived from. Duplicates are dropped on insertion.
#[derive(Debug, Clone, Default)]
pub struct Diagnosis {
    cores: Vec<Vec<Lit>>,
    witnesses: Vec<Assignment>,
}

impl Diagnosis {
    pub fn add(&mut self, mut core: Vec<Lit>, witness: Assignment) {
        core.sort_unstable();
        core.dedup();
        if !self.cores.contains(&core) {
            self.cores.push(core);
            self.witnesses.push(witness);
        }
    }

    pub fn cores(&self) -> &[Vec<Lit>] {
        &self.cores
    }

    pub fn witnesses(&self) -> &[Assignment] {
        &self.witnesses
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }
}

/// Clause set entailed by the instance formula. It only ever grows.
#[derive(Debug, Clone, Default)]
pub struct RelaxedFormula {
    clauses: Vec<Clause>,
}

impl RelaxedFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Adds `~kappa` for every core and returns the added clauses.
    pub fn tighten(&mut self, diagnosis: &Diagnosis) -> Vec<Clause> {
        assert!(!diagnosis.is_empty(), "nothing to tighten with");
        let added: Vec<Clause> = diagnosis
            .cores()
            .iter()
            .map(|k| Clause::new(k.iter().map(|&l| !l)).expect("cores are consistent"))
            .collect();
        self.clauses.extend(added.iter().cloned());
        added
    }

    pub fn is_satisfied(&self, x: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied(x.values()))
    }
}

fn solve_relaxed(
    instance: &MocoInstance,
    relaxed: &RelaxedFormula,
    cfg: &EngineConfig,
) -> ParetoResult {
    let r = instance.with_formula(vec![], relaxed.clauses().to_vec());
    let mut quiet = NoObserver;
    match cfg.inner {
        InnerEngine::CoreGuided => unsatsat::solve(&r, cfg, &mut quiet),
        InnerEngine::PMinimal => pminimal::solve(&r, cfg, &mut quiet),
    }
}

pub fn solve(instance: &MocoInstance, cfg: &EngineConfig, obs: &mut dyn Observer) -> ParetoResult {
    let mut checker = FeasibilityChecker::new(instance, cfg);
    let mut relaxed = RelaxedFormula::new();
    // feasible points of a relaxed front are already optimal
    let mut confirmed = Archive::new();
    let mut stats = SolveStats::default();
    let mut iteration = 0u64;
    loop {
        if cfg.limits.exhausted() || cfg.max_iterations.is_some_and(|cap| iteration >= cap) {
            return ParetoResult::from_archive(&confirmed, Status::TimeoutPartial, stats);
        }
        iteration += 1;
        stats.iterations += 1;
        let front = solve_relaxed(instance, &relaxed, cfg);
        stats.absorb(&front.stats);
        obs.on_event(&Event::RelaxedFront {
            iteration,
            front: &front,
            relaxed: relaxed.clauses(),
        });
        if front.status != Status::Complete {
            return ParetoResult::from_archive(&confirmed, Status::TimeoutPartial, stats);
        }
        let mut diagnosis = Diagnosis::default();
        for (x, y) in front.arg_front.iter().zip(&front.img_front) {
            stats.sat_calls += 1;
            match checker.check(x) {
                Check::Feasible => {
                    if confirmed.insert(x.clone(), y.clone()).is_inserted() {
                        obs.on_event(&Event::ArchiveChanged {
                            archive: &confirmed,
                        });
                    }
                }
                Check::Core(core) => {
                    stats.cores += 1;
                    diagnosis.add(core, x.clone());
                }
                Check::Interrupted => {
                    return ParetoResult::from_archive(&confirmed, Status::TimeoutPartial, stats);
                }
            }
        }
        if diagnosis.is_empty() {
            return ParetoResult::from_entries(
                front
                    .arg_front
                    .into_iter()
                    .zip(front.img_front)
                    .map(|(assignment, vector)| crate::model::ArchiveEntry { assignment, vector })
                    .collect(),
                Status::Complete,
                stats,
            );
        }
        let added = relaxed.tighten(&diagnosis);
        obs.on_event(&Event::Tightened {
            added: &added,
            witnesses: diagnosis.witnesses(),
        });
    }
}
