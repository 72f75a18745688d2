use super::{Geometry, MultiIndex, WeightSpec};
use crate::precision::{gauss_legendre, max_abs, solve_dense, Poly, PrecisionContext, XReal};
use crate::{Error, Result};
use rayon::prelude::*;
use rug::Float;
use std::collections::BTreeMap;

/// `m_k = ∫ x^k dμ` for `k = 0..=k_max`.
///
/// Gauss–Legendre with an exact node count for polynomial densities and
/// `64 + 2 (k_max + deg)` nodes for exponential ones.
pub fn moments(weight: &WeightSpec, geometry: &Geometry, k_max: usize, ctx: &PrecisionContext) -> Result<Vec<XReal>> {
    weight.validate(geometry, ctx)?;
    let density = weight.density_fn(ctx)?;
    let deg = weight.poly_degree();
    let nodes = if weight.is_polynomial() {
        (k_max + deg + 2).div_ceil(2)
    } else {
        64 + 2 * (k_max + deg)
    };
    let rule = gauss_legendre(nodes, ctx);
    let (a, b) = geometry.interval(weight.interval);
    let mut m = vec![ctx.zero(); k_max + 1];
    for (x, w) in rule.mapped(&ctx.round(a), &ctx.round(b)) {
        let mut t = w * density.eval(&x);
        for mk in m.iter_mut() {
            *mk += &t;
            t *= &x;
        }
    }
    Ok(m)
}

/// Monic type II polynomial `P_n` and its relative orthogonality residual.
///
/// Solves for the `|n|` lower coefficients from
/// `Σ_j c_j m^{(i)}_{l+j} = −m^{(i)}_{l+|n|}` for `l < n_i`.
pub fn type2_mop(n: MultiIndex, moments: [&[XReal]; 2], ctx: &PrecisionContext) -> Result<(Poly, XReal)> {
    let size = n.size();
    let bits = ctx.bits();
    if size == 0 {
        return Ok((Poly::constant(ctx.one()), ctx.zero()));
    }
    let need = size + n.n1.max(n.n2);
    if moments.iter().any(|m| m.len() < need) {
        return Err(Error::Precondition(format!("type II solve at {n} needs {need} moments")));
    }
    let mut rows = Vec::with_capacity(size);
    let mut rhs = Vec::with_capacity(size);
    let mut scale = ctx.zero();
    for (i, m) in moments.iter().enumerate() {
        let ni = n.get(i + 1);
        for l in 0..ni {
            rows.push(m[l..l + size].to_vec());
            rhs.push(-m[l + size].clone());
        }
        scale = scale.max(&max_abs(&m[..ni + size], bits));
    }
    let (c, _) = solve_dense(&rows, &rhs, ctx).map_err(|e| normality(n, e))?;
    let mut coeffs = c;
    coeffs.push(ctx.one());
    let p = Poly::new(coeffs, bits);

    let mut worst = ctx.zero();
    for (i, m) in moments.iter().enumerate() {
        for l in 0..n.get(i + 1) {
            let r = pair_with(&p, &m[l..]).abs();
            worst = worst.max(&r);
        }
    }
    let rel = worst / &scale;
    if rel > *ctx.tol() {
        return Err(Error::NormalityFailure {
            n1: n.n1,
            n2: n.n2,
            reason: format!("type II residual {:e} above tolerance", rel.to_f64()),
        });
    }
    Ok((p, rel))
}

/// Type I pair `(A^{(1)}, A^{(2)})`, normalised by `∫ x^{|n|-1} Q_n = 1`,
/// with its relative residual. A component is `None` when `n_i = 0`.
pub fn type1_mop(n: MultiIndex, moments: [&[XReal]; 2], ctx: &PrecisionContext) -> Result<(Option<Poly>, Option<Poly>, XReal)> {
    let size = n.size();
    let bits = ctx.bits();
    if size == 0 {
        return Err(Error::Precondition("type I polynomials need |n| >= 1".into()));
    }
    let need = size + n.n1.max(n.n2) - 1;
    if moments.iter().any(|m| m.len() < need) {
        return Err(Error::Precondition(format!("type I solve at {n} needs {need} moments")));
    }
    let mut rows = Vec::with_capacity(size);
    let mut rhs = Vec::with_capacity(size);
    for l in 0..size {
        let mut row = Vec::with_capacity(size);
        for (i, m) in moments.iter().enumerate() {
            row.extend_from_slice(&m[l..l + n.get(i + 1)]);
        }
        rows.push(row);
        rhs.push(if l + 1 == size { ctx.one() } else { ctx.zero() });
    }
    let scale = moments
        .iter()
        .map(|m| max_abs(&m[..need], bits))
        .fold(ctx.zero(), |a, b| a.max(&b));
    let (x, residual) = solve_dense(&rows, &rhs, ctx).map_err(|e| normality(n, e))?;
    let rel = residual / &scale;
    if rel > *ctx.tol() {
        return Err(Error::NormalityFailure {
            n1: n.n1,
            n2: n.n2,
            reason: format!("type I residual {:e} above tolerance", rel.to_f64()),
        });
    }
    let (x1, x2) = x.split_at(n.n1);
    let a1 = (n.n1 > 0).then(|| Poly::new(x1.to_vec(), bits));
    let a2 = (n.n2 > 0).then(|| Poly::new(x2.to_vec(), bits));
    Ok((a1, a2, rel))
}

fn normality(n: MultiIndex, e: Error) -> Error {
    match e {
        Error::SingularSystem { .. } => Error::NormalityFailure {
            n1: n.n1,
            n2: n.n2,
            reason: e.to_string(),
        },
        other => other,
    }
}

/// `Σ_j p_j m_{j}` over a shifted moment slice, i.e. `∫ p(x) x^l dμ`.
fn pair_with(p: &Poly, m: &[XReal]) -> XReal {
    let mut s = Float::new(p.prec());
    for (c, mk) in p.coeffs().iter().zip(m) {
        s += c * mk;
    }
    s
}

/// Type II polynomial, type I pair and h-integrals at one multi-index.
#[derive(Clone, Debug)]
pub struct MopSolution {
    pub index: MultiIndex,
    pub p_monic: Poly,
    pub a1_poly: Option<Poly>,
    pub a2_poly: Option<Poly>,
    /// `h_{n,i} = ∫ P_n x^{n_i} dμ_i`.
    pub h1: XReal,
    pub h2: XReal,
    /// Largest relative residual of the two solves.
    pub residual: XReal,
}

impl MopSolution {
    pub fn h(&self, i: usize) -> &XReal {
        match i {
            1 => &self.h1,
            _ => &self.h2,
        }
    }

    pub fn a_poly(&self, i: usize) -> Option<&Poly> {
        match i {
            1 => self.a1_poly.as_ref(),
            _ => self.a2_poly.as_ref(),
        }
    }
}

/// A two-interval Angelesco system with precomputed moments.
#[derive(Clone, Debug)]
pub struct AngelescoSystem {
    pub geometry: Geometry,
    pub weights: [WeightSpec; 2],
    pub ctx: PrecisionContext,
    moments: [Vec<XReal>; 2],
}

impl AngelescoSystem {
    /// Prepares moments sufficient for every solve with `|n| ≤ max_size`,
    /// including the shifted integrals used by the recurrence coefficients.
    pub fn new(geometry: Geometry, weights: [WeightSpec; 2], max_size: usize, ctx: &PrecisionContext) -> Result<Self> {
        for (k, w) in weights.iter().enumerate() {
            if w.interval != k + 1 {
                return Err(Error::InvalidWeight(format!(
                    "weight {} is attached to interval {}",
                    k + 1,
                    w.interval
                )));
            }
        }
        let k_max = 2 * max_size + 2;
        let m1 = moments(&weights[0], &geometry, k_max, ctx)?;
        let m2 = moments(&weights[1], &geometry, k_max, ctx)?;
        Ok(Self {
            geometry,
            weights,
            ctx: ctx.clone(),
            moments: [m1, m2],
        })
    }

    /// Reference geometry with unit densities.
    pub fn reference(max_size: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(
            Geometry::reference(ctx),
            [WeightSpec::lebesgue(1), WeightSpec::lebesgue(2)],
            max_size,
            ctx,
        )
    }

    pub fn moments(&self, i: usize) -> &[XReal] {
        &self.moments[i - 1]
    }

    pub fn max_moment_order(&self) -> usize {
        self.moments[0].len() - 1
    }

    fn pair(&self) -> [&[XReal]; 2] {
        [&self.moments[0], &self.moments[1]]
    }

    pub fn type2(&self, n: MultiIndex) -> Result<Poly> {
        Ok(type2_mop(n, self.pair(), &self.ctx)?.0)
    }

    pub fn type1(&self, n: MultiIndex) -> Result<(Option<Poly>, Option<Poly>)> {
        let (a1, a2, _) = type1_mop(n, self.pair(), &self.ctx)?;
        Ok((a1, a2))
    }

    pub fn solve(&self, n: MultiIndex) -> Result<MopSolution> {
        let (p, r2) = type2_mop(n, self.pair(), &self.ctx)?;
        let (a1, a2, r1) = if n.size() == 0 {
            (None, None, self.ctx.zero())
        } else {
            type1_mop(n, self.pair(), &self.ctx)?
        };
        let h1 = pair_with(&p, &self.moments[0][n.n1..]);
        let h2 = pair_with(&p, &self.moments[1][n.n2..]);
        Ok(MopSolution {
            index: n,
            p_monic: p,
            a1_poly: a1,
            a2_poly: a2,
            h1,
            h2,
            residual: r1.max(&r2),
        })
    }

    /// Solves a batch of indices in parallel.
    pub fn solve_many(&self, indices: &[MultiIndex]) -> Result<BTreeMap<MultiIndex, MopSolution>> {
        indices
            .par_iter()
            .map(|&n| self.solve(n).map(|s| (n, s)))
            .collect()
    }

    /// `∫ x^k Q_n` for the type I form `Q_n = A^{(1)} dμ_1 + A^{(2)} dμ_2`.
    pub fn form_moment(&self, sol: &MopSolution, k: usize) -> XReal {
        let mut s = self.ctx.zero();
        for i in 1..=2 {
            if let Some(a) = sol.a_poly(i) {
                s += pair_with(a, &self.moments[i - 1][k..]);
            }
        }
        s
    }
}
