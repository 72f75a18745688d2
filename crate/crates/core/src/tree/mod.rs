//! Jacobi operators on the rooted binary tree.
//!
//! Vertex `Y ≠ O` is reached from its parent by a step `e_{ι_Y}` in the
//! lattice of multi-indices, so the projection of a vertex is `(1, 1)` plus
//! the steps along its path. The edge from a parent to its child `i` is of
//! type `i`; a non-root vertex then meets two edges of its own type `ι_Y`
//! (its parent edge and one child edge) and one of the other type.
//!
//! Truncations are plain restrictions to the first `D` generations and
//! work in machine precision.

mod mfun;
mod rlimit;
mod source;

pub use mfun::{decoupling_c0, m_closed, m_fixed_point, m_recursion, spectral_density, spectral_mass, DecouplingReport, MFunctionPair};
pub use rlimit::{ball_indices, rlimit_check, staircase_path, RLimitReport};
pub use source::{CoeffSource, SourceKind, SyntheticSource};

use crate::curve::CurveData;
use crate::mop::MultiIndex;
use crate::precision::{sym_eig, EIG_DIM_CAP};
use crate::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;

/// Vertex of the truncated tree. Children of vertex `v` sit at `2v + 1`
/// (type 1) and `2v + 2` (type 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub depth: usize,
    pub parent: Option<usize>,
    /// `ι_Y`; `None` at the root.
    pub iota: Option<usize>,
    pub projection: MultiIndex,
}

#[derive(Clone, Debug)]
pub struct TreeIndex {
    pub depth: usize,
    pub vertices: Vec<Vertex>,
}

impl TreeIndex {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Child `i ∈ {1, 2}` of `v`, if it is inside the truncation.
    pub fn child(&self, v: usize, i: usize) -> Option<usize> {
        let k = 2 * v + i;
        (k < self.vertices.len()).then_some(k)
    }

    /// Neighbours of `v` together with the edge type.
    pub fn neighbours(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(3);
        let x = &self.vertices[v];
        if let (Some(p), Some(t)) = (x.parent, x.iota) {
            out.push((p, t));
        }
        for i in 1..=2 {
            if let Some(c) = self.child(v, i) {
                out.push((c, i));
            }
        }
        out
    }
}

/// All vertices up to generation `depth`: `2^{depth+1} − 1` of them.
pub fn build_tree(depth: usize) -> Result<TreeIndex> {
    let count = (1usize << (depth + 1)) - 1;
    if depth > 20 {
        return Err(Error::Precondition(format!("depth {depth} would allocate {count} vertices")));
    }
    let mut vertices = Vec::with_capacity(count);
    vertices.push(Vertex {
        depth: 0,
        parent: None,
        iota: None,
        projection: MultiIndex::new(1, 1),
    });
    for k in 1..count {
        let parent = (k - 1) / 2;
        let iota = if k % 2 == 1 { 1 } else { 2 };
        let up = &vertices[parent];
        let (depth, projection) = (up.depth + 1, up.projection.plus(iota));
        vertices.push(Vertex {
            depth,
            parent: Some(parent),
            iota: Some(iota),
            projection,
        });
    }
    Ok(TreeIndex { depth, vertices })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum OperatorTag {
    /// Jacobi operator from recurrence coefficients.
    J { kappa: [f64; 2] },
    /// Model operator at mass split `c` with root diagonal `B_{c,l}`.
    L { c: f64, l: usize },
}

/// Finite symmetric section of a tree operator.
#[derive(Clone, Debug)]
pub struct TreeTruncation {
    pub tag: OperatorTag,
    pub depth: usize,
    pub diagonal: Vec<f64>,
    /// `(parent, child, weight)`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl TreeTruncation {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for (i, d) in self.diagonal.iter().enumerate() {
            m[i][i] = *d;
        }
        for &(p, c, w) in &self.edges {
            m[p][c] = w;
            m[c][p] = w;
        }
        m
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.dim() > EIG_DIM_CAP {
            return Err(Error::Shape(format!("truncation of dimension {} exceeds the eigensolver cap", self.dim())));
        }
        Ok(sym_eig(&self.to_dense(), false)?.values)
    }
}

/// Section of `J` built from `source`.
pub fn assemble_j(tree: &TreeIndex, source: &CoeffSource) -> Result<TreeTruncation> {
    let n = tree.len();
    let mut diagonal = vec![0.0; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let kappa = source.kappa;
    let mut root = 0.0;
    for i in 1..=2 {
        if kappa[i - 1] != 0.0 {
            let m = MultiIndex::new(1, 1).minus(i).expect("(1, 1) has both steps");
            root += kappa[i - 1] * source.b(m, i)?;
        }
    }
    diagonal[0] = root;
    for (k, v) in tree.vertices.iter().enumerate().skip(1) {
        let p = v.parent.expect("non-root");
        let iota = v.iota.expect("non-root");
        let up = tree.vertices[p].projection;
        diagonal[k] = source.b(up, iota)?;
        let a = source.a(up, iota)?;
        if a < 0.0 {
            return Err(Error::InternalInconsistency(format!("negative a at {up}, component {iota}")));
        }
        edges.push((p, k, a.sqrt()));
    }
    Ok(TreeTruncation {
        tag: OperatorTag::J { kappa },
        depth: tree.depth,
        diagonal,
        edges,
    })
}

/// Section of `L_c^{(l)}`.
pub fn assemble_l(tree: &TreeIndex, l: usize, curve: &CurveData) -> Result<TreeTruncation> {
    if !(1..=2).contains(&l) {
        return Err(Error::Precondition(format!("root label {l} is not 1 or 2")));
    }
    let a = [curve.a1.to_f64(), curve.a2.to_f64()];
    let b = [curve.b1.to_f64(), curve.b2.to_f64()];
    let mut diagonal = Vec::with_capacity(tree.len());
    let mut edges = Vec::with_capacity(tree.len().saturating_sub(1));
    for (k, v) in tree.vertices.iter().enumerate() {
        match (v.parent, v.iota) {
            (Some(p), Some(t)) => {
                diagonal.push(b[t - 1]);
                edges.push((p, k, a[t - 1].max(0.0).sqrt()));
            }
            _ => diagonal.push(b[l - 1]),
        }
    }
    Ok(TreeTruncation {
        tag: OperatorTag::L { c: curve.c.to_f64(), l },
        depth: tree.depth,
        diagonal,
        edges,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumProbe {
    pub depth: usize,
    pub epsilon: f64,
    #[serde(skip)]
    pub eigenvalues: Vec<f64>,
    /// Share of eigenvalues within `epsilon` of the target set.
    pub inside_fraction: f64,
    /// Largest distance from a point of the target set to the spectrum.
    pub max_coverage_gap: f64,
}

impl SpectrumProbe {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain record serializes")
    }

    /// CSV `index,eigenvalue`.
    pub fn eigenvalues_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (k, x) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "{k},{x:.17e}");
        }
        out
    }
}

const COVERAGE_GRID: usize = 2000;

/// Compares the spectrum of `truncation` with a union of closed intervals
/// (degenerate intervals are points).
pub fn spectrum_probe(truncation: &TreeTruncation, intervals: &[(f64, f64)], epsilon: f64) -> Result<SpectrumProbe> {
    let eigenvalues = truncation.eigenvalues()?;
    Ok(probe_values(truncation.depth, eigenvalues, intervals, epsilon))
}

pub(crate) fn probe_values(depth: usize, eigenvalues: Vec<f64>, intervals: &[(f64, f64)], epsilon: f64) -> SpectrumProbe {
    let dist_to_set = |x: f64| {
        intervals
            .iter()
            .map(|&(a, b)| if x < a { a - x } else if x > b { x - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    };
    let inside = eigenvalues.iter().filter(|&&x| dist_to_set(x) <= epsilon).count();
    let inside_fraction = if eigenvalues.is_empty() { 0.0 } else { inside as f64 / eigenvalues.len() as f64 };
    let nearest = |x: f64| {
        let k = eigenvalues.partition_point(|&e| e < x);
        let mut best = f64::INFINITY;
        if k < eigenvalues.len() {
            best = best.min(eigenvalues[k] - x);
        }
        if k > 0 {
            best = best.min(x - eigenvalues[k - 1]);
        }
        best
    };
    let mut gap: f64 = 0.0;
    for &(a, b) in intervals {
        let steps = if b > a { COVERAGE_GRID } else { 0 };
        for j in 0..=steps {
            let x = if steps == 0 { a } else { a + (b - a) * j as f64 / steps as f64 };
            gap = gap.max(nearest(x));
        }
    }
    SpectrumProbe {
        depth,
        epsilon,
        eigenvalues,
        inside_fraction,
        max_coverage_gap: gap,
    }
}

/// Supports `Δ_{c,1} ∪ Δ_{c,2}` of a curve as machine intervals.
pub fn supports(curve: &CurveData) -> [(f64, f64); 2] {
    let [a1, _, _, b2] = curve.geometry.to_f64();
    [(a1, curve.beta_c1.to_f64()), (curve.alpha_c2.to_f64(), b2)]
}
