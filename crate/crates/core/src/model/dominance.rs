use std::fmt;
use std::ops::{Deref, Index};

/// A point of the objective space, in normalized (non-negative) units.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ObjVec(Vec<u64>);

impl ObjVec {
    pub fn new(values: Vec<u64>) -> Self {
        ObjVec(values)
    }

    pub fn zeros(m: usize) -> Self {
        ObjVec(vec![0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.0
    }
}

impl Deref for ObjVec {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl Index<usize> for ObjVec {
    type Output = u64;
    fn index(&self, i: usize) -> &u64 {
        &self.0[i]
    }
}

impl From<Vec<u64>> for ObjVec {
    fn from(v: Vec<u64>) -> Self {
        ObjVec(v)
    }
}

impl<const N: usize> From<[u64; N]> for ObjVec {
    fn from(v: [u64; N]) -> Self {
        ObjVec(v.to_vec())
    }
}

impl fmt::Display for ObjVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `a` is pointwise no worse than `b` (minimization).
///
/// Panics when the dimensions differ.
pub fn weakly_dominates(a: &[u64], b: &[u64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors of different dimension");
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// `a` weakly dominates `b` and differs from it.
pub fn strictly_dominates(a: &[u64], b: &[u64]) -> bool {
    weakly_dominates(a, b) && a != b
}

/// Every vector of `upper` is weakly dominated by some vector of `lower`.
pub fn is_lower_bound_set<A, B>(lower: &[A], upper: &[B]) -> bool
where
    A: AsRef<[u64]>,
    B: AsRef<[u64]>,
{
    upper
        .iter()
        .all(|u| lower.iter().any(|l| weakly_dominates(l.as_ref(), u.as_ref())))
}

/// Deduplicated non-dominated subset, sorted lexicographically.
pub fn non_dominated(points: impl IntoIterator<Item = ObjVec>) -> Vec<ObjVec> {
    let mut pts: Vec<ObjVec> = points.into_iter().collect();
    pts.sort();
    pts.dedup();
    // After a lexicographic sort no point can be strictly dominated by a
    // later one, so a single forward pass against the kept set suffices.
    let mut kept: Vec<ObjVec> = Vec::with_capacity(pts.len());
    for p in pts {
        if !kept.iter().any(|k| weakly_dominates(k, &p)) {
            kept.push(p);
        }
    }
    kept
}

impl AsRef<[u64]> for ObjVec {
    fn as_ref(&self) -> &[u64] {
        &self.0
    }
}
