//! Root `m`-functions of the model operators, by fixed-point iteration and
//! in closed form from sheet 0 of the surface.

use super::supports;
use crate::curve::{chi_real, chi_eval, curve as solve_curve, edge_integral, CurveData, Side};
use crate::mop::Geometry;
use crate::precision::{find_root, gauss_legendre, sym_eig, PrecisionContext, XComplex, XReal};
use crate::{Error, Result};
use rug::Float;
use serde::Serialize;

/// `m_I(z)` and `m_II(z)`: root `m`-functions of `L_c^{(1)}` and `L_c^{(2)}`.
#[derive(Clone, Debug)]
pub struct MFunctionPair {
    pub m1: XComplex,
    pub m2: XComplex,
    pub iterations: usize,
    /// Largest residual of the two fixed-point equations.
    pub residual: XReal,
}

impl MFunctionPair {
    pub fn get(&self, l: usize) -> &XComplex {
        if l == 1 {
            &self.m1
        } else {
            &self.m2
        }
    }
}

/// Right-hand side `1/(B_l − A_1 m_1 − A_2 m_2 − z)` for both `l`.
fn fixed_point_map(a: &[XReal; 2], b: &[XReal; 2], z: &XComplex, m: &[XComplex; 2]) -> [XComplex; 2] {
    let coupling = &m[0].scale(&a[0]) + &m[1].scale(&a[1]);
    let base = -&(&coupling + z);
    [base.add_real(&b[0]).recip(), base.add_real(&b[1]).recip()]
}

/// Iterates `m_l ← 1/(B_l − A_1 m_1 − A_2 m_2 − z)` from `(0, 0)`.
///
/// Each step maps the upper half-plane into itself, so every iterate is
/// checked to keep `Im m_l > 0`.
pub fn m_fixed_point(a: [XReal; 2], b: [XReal; 2], z: &XComplex, iterations: usize, ctx: &PrecisionContext) -> Result<MFunctionPair> {
    if z.im <= 0 {
        return Err(Error::Domain("the recursion needs Im z > 0".into()));
    }
    let p = ctx.bits();
    let stop = ctx.eps_pow(p as i32 - 16);
    let mut m = [XComplex::zero(p), XComplex::zero(p)];
    for k in 1..=iterations {
        let next = fixed_point_map(&a, &b, z, &m);
        if next.iter().any(|x| x.im <= 0 || !x.is_finite()) {
            return Err(Error::InternalInconsistency(format!("iterate {k} left the upper half-plane")));
        }
        let change = (&next[0] - &m[0]).abs().max(&(&next[1] - &m[1]).abs());
        m = next;
        if change <= stop {
            let check = fixed_point_map(&a, &b, z, &m);
            let residual = (&check[0] - &m[0]).abs().max(&(&check[1] - &m[1]).abs());
            if residual > 1e-12 {
                return Err(Error::Convergence {
                    iterations: k,
                    residual: residual.to_f64(),
                });
            }
            let [m1, m2] = m;
            return Ok(MFunctionPair {
                m1,
                m2,
                iterations: k,
                residual,
            });
        }
    }
    let check = fixed_point_map(&a, &b, z, &m);
    let residual = (&check[0] - &m[0]).abs().max(&(&check[1] - &m[1]).abs());
    Err(Error::Convergence {
        iterations,
        residual: residual.to_f64(),
    })
}

/// Fixed-point iteration with the constants of `curve`.
pub fn m_recursion(curve: &CurveData, z: &XComplex, iterations: usize, ctx: &PrecisionContext) -> Result<MFunctionPair> {
    let r = |x: &XReal| ctx.round(x);
    m_fixed_point([r(&curve.a1), r(&curve.a2)], [r(&curve.b1), r(&curve.b2)], z, iterations, ctx)
}

/// `m_l(z) = −1/(χ^{(0)}(z) − B_{c,l})`. Real points inside a support need
/// a side.
pub fn m_closed(curve: &CurveData, l: usize, z: &XComplex, side: Option<Side>, ctx: &PrecisionContext) -> Result<XComplex> {
    if !(1..=2).contains(&l) {
        return Err(Error::Precondition(format!("root label {l} is not 1 or 2")));
    }
    let chi = if z.im.is_zero() {
        let inside = supports(curve).iter().any(|&(a, b)| {
            let x = z.re.to_f64();
            a < b && x > a && x < b
        });
        match (inside, side) {
            (true, None) => return Err(Error::Domain(format!("x = {} lies on a support; pass a side", z.re.to_f64()))),
            (_, s) => chi_real(curve, &z.re, s.unwrap_or(Side::Upper), ctx)?,
        }
    } else {
        chi_eval(curve, z, ctx)?
    };
    let b = if l == 1 { &curve.b1 } else { &curve.b2 };
    let den = chi[0].add_real(&-ctx.round(b));
    if den.abs().is_zero() {
        return Err(Error::InternalInconsistency("m-function pole off the supports".into()));
    }
    Ok(-den.recip())
}

/// Density `Im m_{l,+}(x)/π` of the root spectral measure.
pub fn spectral_density(curve: &CurveData, l: usize, x: &XReal, ctx: &PrecisionContext) -> Result<XReal> {
    let inside = supports(curve).iter().any(|&(a, b)| {
        let v = x.to_f64();
        a < b && v > a && v < b
    });
    if !inside {
        return Ok(ctx.zero());
    }
    let m = m_closed(curve, l, &XComplex::from_real(x.clone()), Some(Side::Upper), ctx)?;
    Ok(m.im / ctx.pi())
}

const MASS_NODES: usize = 48;

/// Total mass of the root spectral measure of `L_c^{(l)}` over both supports.
pub fn spectral_mass(curve: &CurveData, l: usize, ctx: &PrecisionContext) -> Result<XReal> {
    let rule = gauss_legendre(MASS_NODES, ctx);
    let p = ctx.bits();
    let ends = [
        (curve.geometry.interval(1).0.clone(), curve.beta_c1.clone()),
        (curve.alpha_c2.clone(), curve.geometry.interval(2).1.clone()),
    ];
    let mut total = ctx.zero();
    for (a, b) in ends {
        if a < b {
            total += edge_integral(&rule, |x| spectral_density(curve, l, x, ctx), &a, &b, p)?;
        }
    }
    Ok(total)
}

/// Findings for the decoupled operator at `c = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct DecouplingReport {
    /// `m̂_1(α1)`.
    pub m1_at_alpha1: f64,
    /// `A_{0,2} m̂_1(α1) + α1 − B_{0,1}`.
    pub pole_identity_residual: f64,
    /// Root of `A_{0,2} m̂_1(x) + x − B_{0,1}` left of the second interval.
    pub pole: f64,
    /// `[B_{0,2} − 2√A_{0,2}, B_{0,2} + 2√A_{0,2}]`.
    pub band: (f64, f64),
    pub depth: usize,
    /// Eigenvalues of the truncated half-line block with first diagonal
    /// entry `B_{0,1}`.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues farther than `tolerance` from the band.
    pub isolated: Vec<f64>,
    pub tolerance: f64,
}

/// `m̂_1(z) = (B − z + √((z−B)² − 4A))/(2A)`, the root branch decaying at
/// infinity.
fn half_line_m(a: &XReal, b: &XReal, z: &XComplex) -> XComplex {
    let p = z.prec();
    let r = Float::with_val(p, a.sqrt_ref()) * 2u32;
    let lo = Float::with_val(p, b - &r);
    let hi = Float::with_val(p, b + &r);
    let w = &z.add_real(&-lo).sqrt() * &z.add_real(&-hi).sqrt();
    let num = (&w - z).add_real(b);
    num.scale(&Float::with_val(p, a * 2u32).recip())
}

/// Checks the `c = 0` decoupling: the isolated pole of the second block
/// sits at `α1`, and a half-line truncation of depth `depth` shows one
/// eigenvalue there with the rest on the band.
pub fn decoupling_c0(geometry: &Geometry, depth: usize, tolerance: f64, ctx: &PrecisionContext) -> Result<DecouplingReport> {
    let p = ctx.bits();
    let c0 = solve_curve(geometry, &ctx.zero(), ctx)?;
    let (a, b1, b2) = (ctx.round(&c0.a2), ctx.round(&c0.b1), ctx.round(&c0.b2));
    let alpha1 = geometry.interval(1).0.clone();
    let alpha2 = geometry.interval(2).0.clone();
    let pole_fn = |x: &XReal| -> XReal {
        let m = half_line_m(&a, &b2, &XComplex::from_real(x.clone()));
        Float::with_val(p, &a * &m.re) + x - &b1
    };
    let m_at = half_line_m(&a, &b2, &XComplex::from_real(alpha1.clone())).re;
    let residual = pole_fn(&alpha1);
    let reach = Float::with_val(p, &alpha2 - &alpha1) * 10u32;
    let lo = Float::with_val(p, &alpha1 - &reach);
    let pole = find_root(pole_fn, &lo, &alpha2, &ctx.ulp_guard(), ctx)?;
    let r = Float::with_val(p, a.sqrt_ref()) * 2u32;
    let band = (Float::with_val(p, &b2 - &r).to_f64(), Float::with_val(p, &b2 + &r).to_f64());
    let n = depth + 1;
    let mut m = vec![vec![0.0; n]; n];
    let off = a.to_f64().sqrt();
    for k in 0..n {
        m[k][k] = if k == 0 { b1.to_f64() } else { b2.to_f64() };
        if k + 1 < n {
            m[k][k + 1] = off;
            m[k + 1][k] = off;
        }
    }
    let eigenvalues = sym_eig(&m, false)?.values;
    let isolated = eigenvalues
        .iter()
        .copied()
        .filter(|&x| x < band.0 - tolerance || x > band.1 + tolerance)
        .collect();
    Ok(DecouplingReport {
        m1_at_alpha1: m_at.to_f64(),
        pole_identity_residual: residual.to_f64(),
        pole: pole.to_f64(),
        band,
        depth,
        eigenvalues,
        isolated,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_fixed_point() {
        let ctx = PrecisionContext::new(128).unwrap();
        let zero = || ctx.zero();
        let pair = m_fixed_point([zero(), zero()], [zero(), zero()], &ctx.complex(0.0, 1.0), 10, &ctx).unwrap();
        assert!((&pair.m1 - &ctx.complex(0.0, 1.0)).abs() < 1e-30);
        assert_eq!(pair.iterations, 2);
    }

    #[test]
    fn lower_half_plane_is_rejected() {
        let ctx = PrecisionContext::new(128).unwrap();
        let zero = || ctx.zero();
        let err = m_fixed_point([zero(), zero()], [zero(), zero()], &ctx.complex(0.0, -1.0), 10, &ctx).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
