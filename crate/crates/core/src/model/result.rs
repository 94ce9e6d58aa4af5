use std::time::Duration;

use super::{Archive, ArchiveEntry, Assignment, ObjVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// The reported set is an arg-front of the instance.
    Complete,
    /// A resource limit stopped the run; reported solutions are feasible
    /// and mutually non-dominated but possibly not optimal or not all.
    TimeoutPartial,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Complete => "complete",
            Status::TimeoutPartial => "timeout-partial",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub sat_calls: u64,
    /// Unsatisfiable answers, including the final empty core.
    pub cores: u64,
    /// Outer iterations (fence bumps, relaxation rounds, chains).
    pub iterations: u64,
    pub wall_time: Duration,
}

impl SolveStats {
    pub fn absorb(&mut self, other: &SolveStats) {
        self.sat_calls += other.sat_calls;
        self.cores += other.cores;
    }
}

/// Outcome of an engine run. `arg_front[i]` is the witness of `img_front[i]`
/// and both are sorted lexicographically by objective vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoResult {
    pub arg_front: Vec<Assignment>,
    pub img_front: Vec<ObjVec>,
    pub status: Status,
    pub stats: SolveStats,
}

impl ParetoResult {
    pub fn from_archive(archive: &Archive, status: Status, stats: SolveStats) -> Self {
        Self::from_entries(archive.sorted(), status, stats)
    }

    pub fn from_entries(mut entries: Vec<ArchiveEntry>, status: Status, stats: SolveStats) -> Self {
        entries.sort_by(|a, b| a.vector.cmp(&b.vector));
        let (arg_front, img_front) = entries.into_iter().map(|e| (e.assignment, e.vector)).unzip();
        ParetoResult {
            arg_front,
            img_front,
            status,
            stats,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Assignment, &ObjVec)> {
        self.arg_front.iter().zip(&self.img_front)
    }
}
