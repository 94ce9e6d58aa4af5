//! Shared engine configuration, progress events and the dispatcher.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::encode::{EncodedInstance, EncoderConfig};
use crate::limits::Limits;
use crate::model::{Archive, Assignment, Clause, Lit, MocoInstance, ObjVec, ParetoResult};
use crate::sat::Solver;
use crate::{hitting, pminimal, unsatsat, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    CoreGuided,
    CoreGuidedStrat,
    HittingSets,
    PMinimal,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [
        EngineKind::CoreGuided,
        EngineKind::CoreGuidedStrat,
        EngineKind::HittingSets,
        EngineKind::PMinimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::CoreGuided => "core-guided",
            EngineKind::CoreGuidedStrat => "core-guided-strat",
            EngineKind::HittingSets => "hitting-sets",
            EngineKind::PMinimal => "p-minimal",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        EngineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownEngine(s.to_string()))
    }
}

/// How a core literal `~o(i, k)` moves the fence wall of objective `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FenceBump {
    /// Jump to the attainable value the blocking literal stands for.
    #[default]
    BlockedValue,
    /// Advance to the next candidate value of the wall only.
    SingleStep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stratification {
    /// A new partition starts when consecutive distinct weights differ by
    /// more than this factor.
    pub ratio: u64,
    /// ... or when the current partition already holds this many literals.
    pub max_partition: usize,
}

impl Default for Stratification {
    fn default() -> Self {
        Stratification {
            ratio: 8,
            max_partition: 16,
        }
    }
}

/// MOCO solver used by the relaxation engine on relaxed formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerEngine {
    #[default]
    CoreGuided,
    PMinimal,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub anytime_strict: bool,
    pub stratification: Stratification,
    pub fence_bump: FenceBump,
    pub seed: u64,
    pub limits: Limits,
    pub encoder: EncoderConfig,
    /// Minimize cores returned by feasibility checks of the relaxation
    /// engine.
    pub minimize_cores: bool,
    /// Hard cap on relaxation rounds; reaching it yields a partial result.
    pub max_iterations: Option<u64>,
    pub inner: InnerEngine,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            anytime_strict: false,
            stratification: Stratification::default(),
            fence_bump: FenceBump::default(),
            seed: 0,
            limits: Limits::none(),
            encoder: EncoderConfig::default(),
            minimize_cores: true,
            max_iterations: None,
            inner: InnerEngine::default(),
        }
    }
}

/// Progress notifications. Borrowed data is only valid during the call.
#[derive(Debug)]
pub enum Event<'a> {
    /// The reported archive changed (insertions, evictions, transfers).
    ArchiveChanged { archive: &'a Archive },
    /// Head of an outer iteration of the fence engine.
    OuterLoopHead { fence: &'a [u64], archive: &'a Archive },
    /// Before the first and after every inner iteration of the fence
    /// engine; `solver` holds the current working formula.
    InnerStep {
        archive: &'a Archive,
        staging: &'a Archive,
        solver: &'a Solver,
        encoding: &'a EncodedInstance,
    },
    /// The inner enumeration ended with this core.
    InnerDone { archive: &'a Archive, core: &'a [Lit] },
    FenceBumped { fence: &'a [u64] },
    /// A stratification round finished.
    RoundDone { round: usize, archive: &'a Archive },
    /// The relaxation engine solved its current relaxed formula.
    RelaxedFront {
        iteration: u64,
        front: &'a ParetoResult,
        relaxed: &'a [Clause],
    },
    /// Clauses added to the relaxed formula, with the relaxed-front
    /// witness each one was derived from.
    Tightened {
        added: &'a [Clause],
        witnesses: &'a [Assignment],
    },
    /// One descent step of a P-minimal chain.
    ChainStep { from: &'a ObjVec, to: &'a ObjVec },
}

pub trait Observer {
    fn on_event(&mut self, event: &Event<'_>);
}

/// Discards all events.
pub struct NoObserver;

impl Observer for NoObserver {
    fn on_event(&mut self, _: &Event<'_>) {}
}

impl<F: FnMut(&Event<'_>)> Observer for F {
    fn on_event(&mut self, event: &Event<'_>) {
        self(event)
    }
}

/// Runs one engine on an instance.
pub fn solve(
    kind: EngineKind,
    instance: &MocoInstance,
    cfg: &EngineConfig,
    observer: &mut dyn Observer,
) -> Result<ParetoResult, Error> {
    instance.validate()?;
    let start = Instant::now();
    let mut res = match kind {
        EngineKind::CoreGuided => unsatsat::solve(instance, cfg, observer),
        EngineKind::CoreGuidedStrat => unsatsat::stratified_solve(instance, cfg, observer),
        EngineKind::HittingSets => hitting::solve(instance, cfg, observer),
        EngineKind::PMinimal => pminimal::solve(instance, cfg, observer),
    };
    res.stats.wall_time = start.elapsed();
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names_roundtrip() {
        for k in EngineKind::ALL {
            assert_eq!(k.name().parse::<EngineKind>().unwrap(), k);
        }
        assert!("paretomcs".parse::<EngineKind>().is_err());
    }
}
