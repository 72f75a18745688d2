use super::sheets::{h_boundary, Side};
use super::CurveData;
use crate::precision::{gauss_legendre, GaussLegendre, PrecisionContext, TanhSinh, XComplex, XReal};
use crate::{Error, Result};
use rug::Float;

/// Equilibrium measures of a curve: densities, masses, potentials and the
/// two variational constants.
#[derive(Clone, Debug)]
pub struct EquilibriumData {
    pub curve: CurveData,
    pub masses: [XReal; 2],
    pub ell1: XReal,
    pub ell2: XReal,
    ctx: PrecisionContext,
    rule: TanhSinh,
}

const MASS_NODES: usize = 48;
const TANH_SINH_STEP: f64 = 1.0 / 16.0;

impl EquilibriumData {
    /// Support `[α1, β_{c,1}]` or `[α_{c,2}, β2]` (degenerate at `c ∈ {0, 1}`).
    pub fn support(&self, i: usize) -> (XReal, XReal) {
        support(&self.curve, i)
    }

    /// `ω′_i(x) = Im h^{(i)}_+(x)/π` inside the support, zero outside.
    pub fn density(&self, i: usize, x: &XReal) -> Result<XReal> {
        density(&self.curve, i, x, &self.ctx)
    }

    /// `V^{k1 ω1 + k2 ω2}(z) = −Σ k_i ∫ log|z − t| dω_i(t)`.
    pub fn potential(&self, z: &XComplex, k: [f64; 2]) -> Result<XReal> {
        let p = self.ctx.bits();
        let mut total = self.ctx.zero();
        for i in 1..=2 {
            if k[i - 1] == 0.0 {
                continue;
            }
            let (a, b) = self.support(i);
            if a == b {
                continue;
            }
            let f = |t: &XReal| -> XReal {
                let dx = Float::with_val(p, &z.re - t);
                let r2 = dx.square() + Float::with_val(p, z.im.square_ref());
                let logabs = r2.ln() / 2u32;
                let w = self.density(i, t).unwrap_or_else(|_| Float::with_val(p, f64::NAN));
                -(logabs * w)
            };
            let inside = z.im.is_zero() && z.re > a && z.re < b;
            let part = if inside {
                self.rule.integrate(f, &a, &z.re)? + self.rule.integrate(f, &z.re, &b)?
            } else {
                self.rule.integrate(f, &a, &b)?
            };
            total += part * k[i - 1];
        }
        Ok(total)
    }

    /// `V^{ω1 + ω2}(z)`.
    pub fn total_potential(&self, z: &XComplex) -> Result<XReal> {
        self.potential(z, [1.0, 1.0])
    }
}

fn support(curve: &CurveData, i: usize) -> (XReal, XReal) {
    let g = &curve.geometry;
    if i == 1 {
        (g.interval(1).0.clone(), curve.beta_c1.clone())
    } else {
        (curve.alpha_c2.clone(), g.interval(2).1.clone())
    }
}

fn density(curve: &CurveData, i: usize, x: &XReal, ctx: &PrecisionContext) -> Result<XReal> {
    if !(1..=2).contains(&i) {
        return Err(Error::Precondition(format!("component {i} is not 1 or 2")));
    }
    let (a, b) = support(curve, i);
    if !(*x > a && *x < b) {
        return Ok(ctx.zero());
    }
    let h = h_boundary(curve, x, Side::Upper, i, ctx)?;
    let v = h.im / ctx.pi();
    if v < -1e-12 {
        return Err(Error::InternalInconsistency(format!(
            "negative density {:e} at x = {}",
            v.to_f64(),
            x.to_f64()
        )));
    }
    Ok(v)
}

/// `∫ f` over `[a, b]` with `x = a + t²` on the left half and `x = b − t²`
/// on the right, which removes square-root behaviour at both ends.
pub(crate) fn edge_integral<F>(rule: &GaussLegendre, mut f: F, a: &XReal, b: &XReal, p: u32) -> Result<XReal>
where
    F: FnMut(&XReal) -> Result<XReal>,
{
    let m = Float::with_val(p, a + b) / 2u32;
    let reach = Float::with_val(p, &m - a).sqrt();
    let zero = Float::new(p);
    let mut acc = Float::new(p);
    for (t, w) in rule.mapped(&zero, &reach) {
        let t2 = Float::with_val(p, t.square_ref());
        let left = Float::with_val(p, a + &t2);
        let right = Float::with_val(p, b - &t2);
        let jac = Float::with_val(p, &t * 2u32) * &w;
        acc += (f(&left)? + f(&right)?) * jac;
    }
    Ok(acc)
}

/// Densities, masses and variational constants of the equilibrium pair.
pub fn equilibrium(curve: &CurveData, ctx: &PrecisionContext) -> Result<EquilibriumData> {
    let p = ctx.bits();
    let rule = gauss_legendre(MASS_NODES, ctx);
    let mut masses = [ctx.zero(), ctx.zero()];
    for i in 1..=2 {
        let (a, b) = support(curve, i);
        if a < b {
            masses[i - 1] = edge_integral(&rule, |x| density(curve, i, x, ctx), &a, &b, p)?;
        }
    }
    let mut data = EquilibriumData {
        curve: curve.clone(),
        masses,
        ell1: ctx.zero(),
        ell2: ctx.zero(),
        ctx: ctx.clone(),
        rule: TanhSinh::new(TANH_SINH_STEP, ctx),
    };
    let mid = |i: usize| {
        let (a, b) = support(curve, i);
        XComplex::from_real(Float::with_val(p, &a + &b) / 2u32)
    };
    data.ell1 = data.potential(&mid(1), [2.0, 1.0])?;
    data.ell2 = data.potential(&mid(2), [1.0, 2.0])?;
    Ok(data)
}
