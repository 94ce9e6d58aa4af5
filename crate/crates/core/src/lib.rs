//! Exact SAT-based solvers for multi-objective combinatorial optimization
//! over pseudo-Boolean instances.
//!
//! The crate provides a core-guided fence engine (with a stratified
//! wrapper), a relaxation engine driven by unsatisfiable cores, a P-minimal
//! enumeration baseline, an exhaustive oracle and hypervolume metrics.

pub mod encode;
pub mod engine;
pub mod hitting;
pub mod limits;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod pminimal;
pub mod sat;
pub mod unsatsat;

#[cfg(test)]
mod testgen;

pub use engine::{solve, EngineConfig, EngineKind, Event, NoObserver, Observer};
pub use limits::Limits;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("clause contains a literal and its negation")]
    Tautology,
    #[error("instance has no objective functions")]
    NoObjectives,
    #[error("instance has {n} variables, oracle cap is {cap}")]
    TooManyVariables { n: usize, cap: usize },
    #[error("unknown engine '{0}'")]
    UnknownEngine(String),
}
