//! Coefficient fields around vertices far out along a path, against the
//! constant pattern of a model operator.

use super::CoeffSource;
use crate::curve::CurveData;
use crate::mop::MultiIndex;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeSet;

/// Lattice path from `(1, 1)` that always takes the step keeping
/// `n1/|n|` closest to `c` (ties go to the second component). Entry `k` is
/// the projection of the path vertex at depth `k`.
pub fn staircase_path(c: f64, length: usize) -> Vec<MultiIndex> {
    let mut n = MultiIndex::new(1, 1);
    let mut out = vec![n];
    for _ in 0..length {
        let off = |m: MultiIndex| (m.n1 as f64 / m.size() as f64 - c).abs();
        let (one, two) = (n.plus(1), n.plus(2));
        n = if off(one) < off(two) { one } else { two };
        out.push(n);
    }
    out
}

/// Vertex as its sequence of child labels from the root.
type TreePath = Vec<u8>;

fn path_to(projections: &[MultiIndex], depth: usize) -> TreePath {
    projections
        .windows(2)
        .take(depth)
        .map(|w| if w[1].n1 > w[0].n1 { 1 } else { 2 })
        .collect()
}

fn projection(path: &[u8]) -> MultiIndex {
    path.iter().fold(MultiIndex::new(1, 1), |n, &i| n.plus(i as usize))
}

/// Vertices within tree distance `radius` of `centre`.
fn ball(centre: &TreePath, radius: usize) -> BTreeSet<TreePath> {
    let mut seen = BTreeSet::from([centre.clone()]);
    let mut frontier = vec![centre.clone()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for v in &frontier {
            let mut around = Vec::with_capacity(3);
            if !v.is_empty() {
                around.push(v[..v.len() - 1].to_vec());
            }
            for i in [1u8, 2] {
                let mut c = v.clone();
                c.push(i);
                around.push(c);
            }
            for u in around {
                if seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Multi-indices whose coefficients `rlimit_check` reads.
pub fn ball_indices(path: &[MultiIndex], radius: usize, schedule: &[usize]) -> Vec<MultiIndex> {
    let mut out = BTreeSet::new();
    for &d in schedule {
        for v in ball(&path_to(path, d), radius) {
            if !v.is_empty() {
                out.insert(projection(&v[..v.len() - 1]));
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RLimitReport {
    pub radius: usize,
    /// `(depth, sup deviation over the ball)` per scheduled depth.
    pub deviations: Vec<(usize, f64)>,
    pub max_deviation: f64,
}

/// For each depth `d` in `schedule`, the largest difference between the
/// coefficients on the ball `B_r(Y_d)` around the `d`-th path vertex and the
/// constants `(A_{c,i}, B_{c,i})` of `target`.
///
/// A non-root vertex `X` of type `i` contributes `|a_{Π(X_p),i} − A_{c,i}|`
/// and `|b_{Π(X_p),i} − B_{c,i}|`; the root has no fixed pattern and is
/// skipped.
pub fn rlimit_check(source: &CoeffSource, target: &CurveData, path: &[MultiIndex], radius: usize, schedule: &[usize]) -> Result<RLimitReport> {
    let a = [target.a1.to_f64(), target.a2.to_f64()];
    let b = [target.b1.to_f64(), target.b2.to_f64()];
    let mut deviations = Vec::with_capacity(schedule.len());
    for &d in schedule {
        if d + 1 > path.len() {
            return Err(Error::Precondition(format!("path of length {} has no vertex at depth {d}", path.len())));
        }
        let mut worst: f64 = 0.0;
        for v in ball(&path_to(path, d), radius) {
            let Some(&i) = v.last() else { continue };
            let i = i as usize;
            let up = projection(&v[..v.len() - 1]);
            worst = worst
                .max((source.a(up, i)? - a[i - 1]).abs())
                .max((source.b(up, i)? - b[i - 1]).abs());
        }
        deviations.push((d, worst));
    }
    let max_deviation = deviations.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(RLimitReport {
        radius,
        deviations,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        let centre = vec![1u8, 2, 2];
        assert_eq!(ball(&centre, 0).len(), 1);
        assert_eq!(ball(&centre, 1).len(), 4);
        assert_eq!(ball(&centre, 2).len(), 10);
        assert_eq!(ball(&Vec::new(), 2).len(), 7);
    }

    #[test]
    fn diagonal_staircase() {
        let p = staircase_path(0.5, 6);
        assert_eq!(p[0], MultiIndex::new(1, 1));
        assert!(p.iter().all(|n| n.n1.abs_diff(n.n2) <= 1));
        assert_eq!(p[6], MultiIndex::new(4, 4));
    }
}
