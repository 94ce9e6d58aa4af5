//! Core-guided fence engine.
//!
//! A fence `lambda` bounds every objective from above through assumptions
//! `~o(i, next(lambda_i))`. All non-dominated solutions inside the fence are
//! enumerated, each one followed by a clause blocking everything it weakly
//! dominates. When the fenced formula becomes unsatisfiable the core names
//! the walls to move; an empty core means no undominated solution is left.

mod stratified;

pub use stratified::{partition_weights, stratified_solve};

use crate::encode::{encode, EncodedInstance};
use crate::engine::{EngineConfig, Event, FenceBump, Observer};
use crate::limits::Limits;
use crate::model::{
    Archive, Assignment, Clause, Lit, MocoInstance, ObjVec, ParetoResult, SolveStats, Status,
};
use crate::sat::{SolveOutcome, Solver};

/// The clause `OR_i ~o(i, y_i)`: some objective strictly below `y`. It
/// excludes every solution whose vector is weakly dominated by `y`.
/// Zero entries contribute nothing, so the origin yields the empty clause.
pub fn blocking_clause(enc: &EncodedInstance, y: &ObjVec) -> Clause {
    let lits = (0..y.dim()).filter_map(|i| enc.order_var(i, y[i]).map(|o| !o));
    Clause::new(lits).expect("order literals of distinct objectives never clash")
}

pub(crate) struct Interrupted;

/// Working state of one engine run.
pub struct EngineState {
    instance: MocoInstance,
    enc: EncodedInstance,
    solver: Solver,
    fence: Vec<u64>,
    archive: Archive,
    staging: Archive,
    anytime_strict: bool,
    bump: FenceBump,
    stats: SolveStats,
}

impl EngineState {
    pub fn new(instance: &MocoInstance, cfg: &EngineConfig) -> Self {
        let enc = encode(instance, &cfg.encoder);
        let mut solver = Solver::from_cnf(enc.cnf(), cfg.seed);
        solver.set_limits(cfg.limits.clone());
        EngineState {
            instance: instance.clone(),
            fence: vec![0; instance.n_objectives()],
            enc,
            solver,
            archive: Archive::new(),
            staging: Archive::new(),
            anytime_strict: cfg.anytime_strict,
            bump: cfg.fence_bump,
            stats: SolveStats::default(),
        }
    }

    pub fn fence(&self) -> &[u64] {
        &self.fence
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    pub fn encoding(&self) -> &EncodedInstance {
        &self.enc
    }

    /// Adds a known feasible solution: archived and blocked like a found one.
    pub fn seed(&mut self, x: Assignment) {
        let y = self.instance.evaluate(&x);
        self.solver.add(&blocking_clause(&self.enc, &y));
        self.archive.insert(x, y);
    }

    /// Per objective whose next wall exists: the objective, the value the
    /// wall literal stands for and the assumption `~o(i, next(i, lambda_i))`.
    fn fence_walls(&self) -> Vec<(usize, u64, Lit)> {
        (0..self.fence.len())
            .filter_map(|i| {
                let k = self.enc.my_next(i, self.fence[i])?;
                let o = self.enc.order_var(i, k)?;
                let c = self.enc.counter(i);
                let value = c[c.partition_point(|t| t.0 < k)].0;
                Some((i, value, !o))
            })
            .collect()
    }

    /// `{ ~o(i, next(i, lambda_i)) }` over the objectives whose next wall
    /// exists. Any model under these assumptions lies inside the fence.
    pub fn fence_assumptions(&self) -> Vec<Lit> {
        self.fence_walls().into_iter().map(|w| w.2).collect()
    }

    fn notify_inner(&self, obs: &mut dyn Observer) {
        obs.on_event(&Event::InnerStep {
            archive: &self.archive,
            staging: &self.staging,
            solver: &self.solver,
            encoding: &self.enc,
        });
    }

    /// Enumerates every solution inside the current fence that the blocking
    /// clauses still admit, and returns the terminating core.
    pub(crate) fn inner_enumerate(
        &mut self,
        assumptions: &[Lit],
        obs: &mut dyn Observer,
    ) -> Result<Vec<Lit>, Interrupted> {
        self.notify_inner(obs);
        loop {
            self.stats.sat_calls += 1;
            match self.solver.solve(assumptions) {
                SolveOutcome::Sat(model) => {
                    let x = self.enc.project(&model);
                    let y = self.instance.evaluate(&x);
                    debug_assert!(self.instance.is_feasible(&x));
                    debug_assert!(y.iter().zip(&self.fence).all(|(v, l)| v <= l));
                    let block = blocking_clause(&self.enc, &y);
                    if self.anytime_strict {
                        self.staging.insert(x, y);
                    } else if self.archive.insert(x, y).is_inserted() {
                        obs.on_event(&Event::ArchiveChanged {
                            archive: &self.archive,
                        });
                    }
                    self.solver.add(&block);
                    self.notify_inner(obs);
                }
                SolveOutcome::Unsat(core) => {
                    self.stats.cores += 1;
                    if self.anytime_strict && !self.staging.is_empty() {
                        for e in self.staging.drain() {
                            self.archive.insert(e.assignment, e.vector);
                        }
                        obs.on_event(&Event::ArchiveChanged {
                            archive: &self.archive,
                        });
                    }
                    obs.on_event(&Event::InnerDone {
                        archive: &self.archive,
                        core: &core,
                    });
                    return Ok(core);
                }
                SolveOutcome::Interrupted => return Err(Interrupted),
            }
        }
    }

    /// Moves the walls named by a non-empty core. Objectives may share a
    /// counter literal, in which case one core literal names several walls.
    pub fn bump_fence(&mut self, core: &[Lit]) {
        assert!(!core.is_empty(), "an empty core ends the search");
        let mut moved = false;
        for (i, value, a) in self.fence_walls() {
            if !core.contains(&a) {
                continue;
            }
            let target = match self.bump {
                FenceBump::BlockedValue => value,
                FenceBump::SingleStep => self.enc.my_next(i, self.fence[i]).unwrap_or(value),
            };
            debug_assert!(target > self.fence[i]);
            self.fence[i] = target;
            moved = true;
        }
        assert!(moved, "core literals are fence assumptions");
    }

    /// Runs until the search space is exhausted or a limit is hit.
    pub fn run(&mut self, limits: &Limits, obs: &mut dyn Observer) -> Status {
        loop {
            obs.on_event(&Event::OuterLoopHead {
                fence: &self.fence,
                archive: &self.archive,
            });
            if limits.exhausted() {
                return Status::TimeoutPartial;
            }
            self.stats.iterations += 1;
            let assumptions = self.fence_assumptions();
            let core = match self.inner_enumerate(&assumptions, obs) {
                Ok(core) => core,
                Err(Interrupted) => return Status::TimeoutPartial,
            };
            if core.is_empty() {
                return Status::Complete;
            }
            self.bump_fence(&core);
            obs.on_event(&Event::FenceBumped { fence: &self.fence });
        }
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Final report. A partial run reports only the main archive, which in
    /// anytime-strict mode holds proven-optimal entries only.
    pub fn result(&self, status: Status) -> ParetoResult {
        ParetoResult::from_archive(&self.archive, status, self.stats.clone())
    }

    pub fn into_archive(self) -> Archive {
        self.archive
    }
}

/// Runs the fence engine on an instance.
pub fn solve(instance: &MocoInstance, cfg: &EngineConfig, obs: &mut dyn Observer) -> ParetoResult {
    let mut state = EngineState::new(instance, cfg);
    let status = state.run(&cfg.limits, obs);
    state.result(status)
}

#[cfg(test)]
mod tests;
