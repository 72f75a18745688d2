use super::{PrecisionContext, XComplex, XReal};
use crate::{Error, Result};
use rug::Float;

/// Gauss–Legendre rule on `[-1, 1]` with ascending nodes.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<XReal>,
    pub weights: Vec<XReal>,
}

/// Legendre `P_m(x)` and `P_{m-1}(x)` by the three-term recurrence.
fn legendre_pair(m: usize, x: &XReal) -> (XReal, XReal) {
    let p = x.prec();
    let mut p0 = Float::with_val(p, 1);
    let mut p1 = x.clone();
    if m == 0 {
        return (p0, Float::new(p));
    }
    for k in 1..m {
        let mut next = Float::with_val(p, x * &p1) * (2 * k + 1) as u32;
        next -= Float::with_val(p, &p0 * k as u32);
        next /= (k + 1) as u32;
        p0 = std::mem::replace(&mut p1, next);
    }
    (p1, p0)
}

fn legendre_f64(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..m {
        let next = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = next;
    }
    (p1, p0)
}

/// Nodes and weights of the `m`-point rule at context precision.
///
/// Newton on the three-term recurrence from Chebyshev-type guesses: a
/// machine-precision pass first, then full-precision polishing.
pub fn gauss_legendre(m: usize, ctx: &PrecisionContext) -> GaussLegendre {
    assert!(m >= 1, "rule needs at least one node");
    let bits = ctx.bits();
    let stop = ctx.eps_pow(bits as i32 - 6);
    let half = m / 2;
    let mut upper: Vec<(XReal, XReal)> = Vec::with_capacity(half);
    for i in 0..half {
        let mut xf = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (pm, pm1) = legendre_f64(m, xf);
            let dp = m as f64 * (xf * pm - pm1) / (xf * xf - 1.0);
            let dx = pm / dp;
            xf -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let mut x = ctx.real(xf);
        let mut dp = ctx.zero();
        for _ in 0..60 {
            let (pm, pm1) = legendre_pair(m, &x);
            let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
            dp = (Float::with_val(bits, &x * &pm) - pm1) * m as u32 / x2m1;
            let dx = Float::with_val(bits, &pm / &dp);
            x -= &dx;
            if dx.abs() <= stop {
                let (pm, pm1) = legendre_pair(m, &x);
                let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
                dp = (Float::with_val(bits, &x * &pm) - pm1) * m as u32 / x2m1;
                break;
            }
        }
        let one_m_x2 = 1u32 - Float::with_val(bits, x.square_ref());
        let w = Float::with_val(bits, 2u32) / (one_m_x2 * Float::with_val(bits, dp.square_ref()));
        upper.push((x, w));
    }

    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (x, w) in upper.iter() {
        nodes.push(-x.clone());
        weights.push(w.clone());
    }
    if m % 2 == 1 {
        let zero = ctx.zero();
        let (_, pm1) = legendre_pair(m, &zero);
        let dp = Float::with_val(bits, &pm1 * m as u32);
        let w = Float::with_val(bits, 2u32) / Float::with_val(bits, dp.square_ref());
        nodes.push(zero);
        weights.push(w);
    }
    for (x, w) in upper.into_iter().rev() {
        nodes.push(x);
        weights.push(w);
    }
    GaussLegendre { nodes, weights }
}

impl GaussLegendre {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights affinely mapped to `[a, b]`.
    pub fn mapped(&self, a: &XReal, b: &XReal) -> Vec<(XReal, XReal)> {
        let p = a.prec();
        let hl = Float::with_val(p, b - a) / 2u32;
        let mid = Float::with_val(p, a + b) / 2u32;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| {
                let mut t = Float::with_val(p, x * &hl);
                t += &mid;
                (t, Float::with_val(p, w * &hl))
            })
            .collect()
    }

    pub fn integrate<F>(&self, mut f: F, a: &XReal, b: &XReal) -> Result<XReal>
    where
        F: FnMut(&XReal) -> XReal,
    {
        let mut acc = Float::new(a.prec());
        for (x, w) in self.mapped(a, b) {
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::Evaluation(x.to_f64().to_string()));
            }
            acc += v * w;
        }
        Ok(acc)
    }

    pub fn integrate_complex<F>(&self, mut f: F, a: &XReal, b: &XReal) -> Result<XComplex>
    where
        F: FnMut(&XReal) -> XComplex,
    {
        let mut acc = XComplex::zero(a.prec());
        for (x, w) in self.mapped(a, b) {
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::Evaluation(x.to_f64().to_string()));
            }
            acc += &v.scale(&w);
        }
        Ok(acc)
    }
}

/// Affine-mapped `m`-point Gauss–Legendre value of `∫_a^b f`.
pub fn integrate<F>(f: F, a: &XReal, b: &XReal, m: usize, ctx: &PrecisionContext) -> Result<XReal>
where
    F: FnMut(&XReal) -> XReal,
{
    gauss_legendre(m, ctx).integrate(f, &ctx.round(a), &ctx.round(b))
}

/// Double-exponential (tanh-sinh) rule on `[-1, 1]`.
///
/// Used where the integrand has algebraic or logarithmic endpoint
/// singularities. Nodes are stored as distances to the nearer endpoint so
/// that points close to an endpoint are not lost to cancellation.
#[derive(Clone, Debug)]
pub struct TanhSinh {
    /// `(distance to the nearer endpoint of [-1,1], weight, on the left half?)`
    points: Vec<(XReal, XReal, bool)>,
}

impl TanhSinh {
    /// Step `h` and a cutoff where weights fall below `2^-bits`.
    pub fn new(h: f64, ctx: &PrecisionContext) -> Self {
        let bits = ctx.bits();
        let h = ctx.real(h);
        let half_pi = ctx.pi() / 2u32;
        let floor = ctx.eps_pow(bits as i32);
        let mut points = Vec::new();
        let mut k: i64 = 0;
        loop {
            let t = Float::with_val(bits, &h * k);
            let (sh, ch) = t.sinh_cosh(Float::new(bits));
            let u = Float::with_val(bits, &half_pi * &sh);
            // 1 - tanh(u) = 2 / (1 + e^{2u})
            let e2u = Float::with_val(bits, &u * 2u32).exp();
            let dist = Float::with_val(bits, 2u32) / (e2u + 1u32);
            let cu = u.cosh();
            let w = Float::with_val(bits, &h * &half_pi) * ch / Float::with_val(bits, cu.square_ref());
            if w < floor || dist < floor {
                break;
            }
            if k == 0 {
                points.push((dist, w, true));
            } else {
                points.push((dist.clone(), w.clone(), true));
                points.push((dist, w, false));
            }
            k += 1;
        }
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_a^b f`, with `f` never evaluated at the endpoints.
    pub fn integrate<F>(&self, mut f: F, a: &XReal, b: &XReal) -> Result<XReal>
    where
        F: FnMut(&XReal) -> XReal,
    {
        let p = a.prec();
        let hl = Float::with_val(p, b - a) / 2u32;
        let mut acc = Float::new(p);
        for (d, w, left) in &self.points {
            let off = Float::with_val(p, d * &hl);
            let x = if *left {
                Float::with_val(p, a + &off)
            } else {
                Float::with_val(p, b - &off)
            };
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::Evaluation(x.to_f64().to_string()));
            }
            acc += v * w;
        }
        Ok(acc * hl)
    }
}
