use crate::curve::curve;
use crate::mop::{Geometry, MultiIndex, NnrrTable};
use crate::precision::PrecisionContext;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Limit constants `(A_{c,1}, A_{c,2}, B_{c,1}, B_{c,2})` at every ratio
/// `c = n1/|n|` with `1 ≤ |n| ≤ max_size`, rounded to machine precision.
#[derive(Clone, Debug)]
pub struct SyntheticSource {
    pub geometry: Geometry,
    pub max_size: usize,
    constants: BTreeMap<(usize, usize), [f64; 4]>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn reduced(n: MultiIndex) -> (usize, usize) {
    let s = n.size();
    let g = gcd(n.n1, s);
    (n.n1 / g, s / g)
}

impl SyntheticSource {
    pub fn new(geometry: &Geometry, max_size: usize, ctx: &PrecisionContext) -> Result<Self> {
        let mut keys: Vec<(usize, usize)> = (1..=max_size)
            .flat_map(|s| (0..=s).map(move |n1| reduced(MultiIndex::new(n1, s - n1))))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let constants = keys
            .par_iter()
            .map(|&(p, q)| {
                let c = ctx.real(p) / q as u32;
                let d = curve(geometry, &c, ctx)?;
                Ok(((p, q), [d.a1.to_f64(), d.a2.to_f64(), d.b1.to_f64(), d.b2.to_f64()]))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self {
            geometry: geometry.clone(),
            max_size,
            constants,
        })
    }

    /// Constants at `c_n = n1/|n|`.
    pub fn constants(&self, n: MultiIndex) -> Result<[f64; 4]> {
        if n.size() == 0 {
            return Err(Error::Source { n1: 0, n2: 0 });
        }
        self.constants
            .get(&reduced(n))
            .copied()
            .ok_or(Error::Source { n1: n.n1, n2: n.n2 })
    }
}

#[derive(Clone, Debug)]
pub enum SourceKind {
    Computed(NnrrTable),
    Synthetic(SyntheticSource),
}

/// Recurrence coefficients `a_{n,i}`, `b_{n,i}` feeding a tree operator,
/// with the root weighting `κ` (default `e_2`).
#[derive(Clone, Debug)]
pub struct CoeffSource {
    pub kind: SourceKind,
    pub kappa: [f64; 2],
    overrides: BTreeMap<MultiIndex, ([f64; 2], [f64; 2])>,
}

impl CoeffSource {
    pub fn computed(table: NnrrTable) -> Self {
        Self::from_kind(SourceKind::Computed(table))
    }

    pub fn synthetic(source: SyntheticSource) -> Self {
        Self::from_kind(SourceKind::Synthetic(source))
    }

    fn from_kind(kind: SourceKind) -> Self {
        Self {
            kind,
            kappa: [0.0, 1.0],
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_kappa(mut self, kappa: [f64; 2]) -> Result<Self> {
        let norm = kappa[0].hypot(kappa[1]);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("κ must be a unit vector, |κ| = {norm}")));
        }
        self.kappa = kappa;
        Ok(self)
    }

    /// Replaces the coefficients at one index, e.g. to test that finitely
    /// many changes leave the essential spectrum alone.
    pub fn with_override(mut self, n: MultiIndex, a: [f64; 2], b: [f64; 2]) -> Self {
        self.overrides.insert(n, (a, b));
        self
    }

    fn pair(&self, n: MultiIndex) -> Result<([f64; 2], [f64; 2])> {
        if let Some(v) = self.overrides.get(&n) {
            return Ok(*v);
        }
        match &self.kind {
            SourceKind::Computed(t) => {
                let e = t.get(n).ok_or(Error::Source { n1: n.n1, n2: n.n2 })?;
                Ok((e.a.clone().map(|x| x.to_f64()), e.b.clone().map(|x| x.to_f64())))
            }
            SourceKind::Synthetic(s) => {
                let [a1, a2, b1, b2] = s.constants(n)?;
                Ok(([a1, a2], [b1, b2]))
            }
        }
    }

    pub fn a(&self, n: MultiIndex, i: usize) -> Result<f64> {
        Ok(self.pair(n)?.0[i - 1])
    }

    pub fn b(&self, n: MultiIndex, i: usize) -> Result<f64> {
        Ok(self.pair(n)?.1[i - 1])
    }
}
