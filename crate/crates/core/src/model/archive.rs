use super::{weakly_dominates, Assignment, ObjVec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveEntry {
    pub assignment: Assignment,
    pub vector: ObjVec,
}

/// Result of [`Archive::insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The entry was added after evicting this many dominated entries.
    Inserted { evicted: usize },
    /// An existing entry weakly dominates the candidate (ties keep the
    /// first witness).
    Rejected,
}

impl InsertOutcome {
    pub fn is_inserted(self) -> bool {
        matches!(self, InsertOutcome::Inserted { .. })
    }
}

/// Mutually non-dominated set of solutions (the incumbent list).
///
/// No entry weakly dominates another one, so in particular no two entries
/// share an objective vector.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, assignment: Assignment, vector: ObjVec) -> InsertOutcome {
        if self
            .entries
            .iter()
            .any(|e| weakly_dominates(&e.vector, &vector))
        {
            return InsertOutcome::Rejected;
        }
        let before = self.entries.len();
        self.entries.retain(|e| !weakly_dominates(&vector, &e.vector));
        let evicted = before - self.entries.len();
        self.entries.push(ArchiveEntry { assignment, vector });
        InsertOutcome::Inserted { evicted }
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &ObjVec> {
        self.entries.iter().map(|e| &e.vector)
    }

    /// Entries sorted lexicographically by objective vector.
    pub fn sorted(&self) -> Vec<ArchiveEntry> {
        let mut out = self.entries.clone();
        out.sort_by(|a, b| a.vector.cmp(&b.vector));
        out
    }

    pub fn drain(&mut self) -> Vec<ArchiveEntry> {
        std::mem::take(&mut self.entries)
    }
}
