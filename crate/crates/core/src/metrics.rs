//! Hypervolume and reference fronts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{non_dominated, ObjVec};

/// Non-dominated union of several fronts with its normalization box.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReferenceFront {
    pub front: Vec<ObjVec>,
    /// Per-dimension minimum over `front`.
    pub ideal: Vec<u64>,
    /// Per-dimension maximum over `front`, plus one.
    pub reference: Vec<u64>,
}

pub fn reference_front<'a>(fronts: impl IntoIterator<Item = &'a [ObjVec]>) -> ReferenceFront {
    let front = non_dominated(fronts.into_iter().flatten().cloned());
    let Some(first) = front.first() else {
        return ReferenceFront::default();
    };
    let m = first.dim();
    let ideal = (0..m).map(|i| front.iter().map(|y| y[i]).min().unwrap()).collect();
    let reference = (0..m)
        .map(|i| front.iter().map(|y| y[i]).max().unwrap() + 1)
        .collect();
    ReferenceFront {
        front,
        ideal,
        reference,
    }
}

/// Dimensions above which the exact recursion gives way to sampling.
pub const EXACT_MAX_DIM: usize = 4;
pub const MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypervolume {
    pub raw: f64,
    /// `raw` over the volume of the box spanned by the ideal and the
    /// reference point, in `[0, 1]`.
    pub normalized: f64,
    /// False when `raw` is a Monte Carlo estimate.
    pub exact: bool,
}

fn clip(front: &[ObjVec], reference: &[u64]) -> Vec<Vec<f64>> {
    front
        .iter()
        .map(|y| {
            assert_eq!(y.dim(), reference.len(), "dimension mismatch");
            y.iter()
                .zip(reference)
                .map(|(&v, &r)| v.min(r) as f64)
                .collect()
        })
        .collect()
}

/// Exact two-dimensional volume by a sorted sweep.
pub fn hv_sweep_2d(front: &[ObjVec], reference: &[u64]) -> f64 {
    assert_eq!(reference.len(), 2);
    let mut pts = clip(front, reference);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (rx, ry) = (reference[0] as f64, reference[1] as f64);
    let mut best = ry;
    let mut vol = 0.0;
    for p in pts {
        if p[1] < best {
            vol += (rx - p[0]) * (best - p[1]);
            best = p[1];
        }
    }
    vol
}

fn slice_rec(pts: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    let d = reference.len();
    if pts.is_empty() {
        return 0.0;
    }
    if d == 1 {
        let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return (reference[0] - lo).max(0.0);
    }
    pts.sort_by(|a, b| a[d - 1].partial_cmp(&b[d - 1]).unwrap());
    let mut vol = 0.0;
    for k in 0..pts.len() {
        let lower = pts[k][d - 1];
        let upper = pts.get(k + 1).map_or(reference[d - 1], |p| p[d - 1]);
        if upper > lower {
            let mut proj: Vec<Vec<f64>> = pts[..=k].iter().map(|p| p[..d - 1].to_vec()).collect();
            vol += slice_rec(&mut proj, &reference[..d - 1]) * (upper - lower);
        }
    }
    vol
}

/// Exact volume in any dimension by slicing along the last objective.
pub fn hv_recursive(front: &[ObjVec], reference: &[u64]) -> f64 {
    let mut pts = clip(front, reference);
    let r: Vec<f64> = reference.iter().map(|&v| v as f64).collect();
    slice_rec(&mut pts, &r)
}

/// Uniform sampling of the box `[ideal, reference]`. Returns the estimate
/// and its standard error.
pub fn hv_monte_carlo(
    front: &[ObjVec],
    ideal: &[u64],
    reference: &[u64],
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let pts = clip(front, reference);
    let lo: Vec<f64> = ideal.iter().map(|&v| v as f64).collect();
    let hi: Vec<f64> = reference.iter().map(|&v| v as f64).collect();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    if box_vol <= 0.0 || samples == 0 {
        return (0.0, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = vec![0.0; lo.len()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for (j, v) in s.iter_mut().enumerate() {
            *v = rng.gen_range(lo[j]..hi[j]);
        }
        if pts.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p * box_vol, box_vol * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Volume dominated by `front` inside the reference box, normalized by the
/// box spanned by `ideal` and `reference`. Vectors are clipped to the box.
pub fn hypervolume(front: &[ObjVec], ideal: &[u64], reference: &[u64]) -> Hypervolume {
    assert_eq!(ideal.len(), reference.len(), "dimension mismatch");
    let m = reference.len();
    let (raw, exact) = match m {
        2 => (hv_sweep_2d(front, reference), true),
        _ if m <= EXACT_MAX_DIM => (hv_recursive(front, reference), true),
        _ => (hv_monte_carlo(front, ideal, reference, MC_SAMPLES, 0).0, false),
    };
    let box_vol: f64 = ideal
        .iter()
        .zip(reference)
        .map(|(&l, &r)| r.saturating_sub(l) as f64)
        .product();
    let normalized = if box_vol == 0.0 {
        if raw == 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        (raw / box_vol).clamp(0.0, 1.0)
    };
    Hypervolume {
        raw,
        normalized,
        exact,
    }
}

/// Hypervolume of `front` relative to that of the reference front itself
/// under the same box, so an exact front scores 1. An empty reference
/// front scores 1 for an empty front and 0 otherwise.
pub fn relative_hypervolume(front: &[ObjVec], rf: &ReferenceFront) -> f64 {
    if rf.front.is_empty() {
        return if front.is_empty() { 1.0 } else { 0.0 };
    }
    let best = hypervolume(&rf.front, &rf.ideal, &rf.reference).raw;
    let got = hypervolume(front, &rf.ideal, &rf.reference).raw;
    if best == 0.0 {
        return if got == 0.0 { 1.0 } else { 0.0 };
    }
    (got / best).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[u64]) -> ObjVec {
        ObjVec::new(x.to_vec())
    }

    #[test]
    fn reference_front_examples() {
        let a = [v(&[1, 2])];
        let b = [v(&[2, 1])];
        let r = reference_front([&a[..], &b[..]]);
        assert_eq!(r.front, vec![v(&[1, 2]), v(&[2, 1])]);
        assert_eq!(r.ideal, vec![1, 1]);
        assert_eq!(r.reference, vec![3, 3]);

        let c = [v(&[1, 1])];
        let d = [v(&[2, 2])];
        assert_eq!(reference_front([&c[..], &d[..]]).front, vec![v(&[1, 1])]);
        assert_eq!(reference_front([&a[..], &a[..]]).front, a.to_vec());
        assert_eq!(reference_front(std::iter::empty()), ReferenceFront::default());
    }

    #[test]
    fn hypervolume_examples() {
        let h = hypervolume(&[v(&[0, 0])], &[0, 0], &[1, 1]);
        assert_eq!(h.normalized, 1.0);
        let h = hypervolume(&[v(&[1, 1])], &[0, 0], &[1, 1]);
        assert_eq!(h.normalized, 0.0);
        let h = hypervolume(&[v(&[0, 1]), v(&[1, 0])], &[0, 0], &[2, 2]);
        assert_eq!(h.raw, 3.0);
        assert_eq!(h.normalized, 0.75);
        assert_eq!(hv_recursive(&[v(&[0, 1]), v(&[1, 0])], &[2, 2]), 3.0);
    }

    #[test]
    fn degenerate_box() {
        let h = hypervolume(&[v(&[0, 3])], &[0, 3], &[2, 3]);
        assert_eq!((h.raw, h.normalized), (0.0, 0.0));
        let h = hypervolume(&[v(&[0, 3])], &[0, 4], &[2, 4]);
        assert_eq!(h.normalized, 1.0);
    }

    #[test]
    fn clipping() {
        // (5, 0) lies outside the box and contributes nothing
        let h = hypervolume(&[v(&[5, 0]), v(&[1, 1])], &[0, 0], &[2, 2]);
        assert_eq!(h.raw, 1.0);
    }

    #[test]
    fn three_dim_cube_corners() {
        let f = [v(&[0, 1, 1]), v(&[1, 0, 1]), v(&[1, 1, 0])];
        // unit cells with at most one zero coordinate
        assert_eq!(hv_recursive(&f, &[2, 2, 2]), 4.0);
    }

    #[test]
    fn relative_is_one_on_reference() {
        let f = [v(&[0, 3]), v(&[2, 1])];
        let rf = reference_front([&f[..]]);
        assert_eq!(relative_hypervolume(&f, &rf), 1.0);
        assert!(relative_hypervolume(&f[..1], &rf) < 1.0);
        let empty = ReferenceFront::default();
        assert_eq!(relative_hypervolume(&[], &empty), 1.0);
    }

    #[test]
    fn monte_carlo_close_on_small_3d_front() {
        let f = [v(&[0, 2, 3]), v(&[1, 1, 1]), v(&[3, 0, 2])];
        let exact = hv_recursive(&f, &[4, 4, 4]);
        let (est, se) = hv_monte_carlo(&f, &[0, 0, 0], &[4, 4, 4], 200_000, 1);
        assert!((est - exact).abs() <= 3.0 * se, "{est} vs {exact} (se {se})");
    }

    fn front_strategy(m: usize) -> impl Strategy<Value = Vec<ObjVec>> {
        prop::collection::vec(prop::collection::vec(0u64..20, m), 1..12)
            .prop_map(|vs| vs.into_iter().map(ObjVec::new).collect())
    }

    proptest! {
        #[test]
        fn sweep_equals_recursive(f in front_strategy(2)) {
            let a = hv_sweep_2d(&f, &[21, 21]);
            let b = hv_recursive(&f, &[21, 21]);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn adding_a_vector_never_decreases(
            f in front_strategy(3),
            extra in prop::collection::vec(0u64..20, 3),
        ) {
            let r = [21, 21, 21];
            let before = hv_recursive(&f, &r);
            let mut g = f.clone();
            g.push(ObjVec::new(extra.clone()));
            prop_assert!(hv_recursive(&g, &r) >= before);
            // a vector strictly dominating a member strictly increases it
            let dom = ObjVec::new(f[0].iter().map(|&x| x.saturating_sub(1)).collect());
            let fresh = !f.iter().any(|y| crate::model::weakly_dominates(y, &dom));
            if fresh {
                let mut h = f.clone();
                h.push(dom);
                prop_assert!(hv_recursive(&h, &r) > before);
            }
        }
    }
}
