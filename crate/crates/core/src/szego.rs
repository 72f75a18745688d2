//! Single-interval conformal maps and Szegő functions, and the predictor
//! for type II polynomials along marginal sequences `n1 ≪ n2`.
//!
//! For an interval `[α, β]` with midpoint `m` and half-length `h`:
//!
//! * `w(z) = √((z−α)(z−β))`, the branch with `w(z)/z → 1`;
//! * `φ(z) = (z − m + w(z))/2`, mapping the complement of the interval
//!   onto `|φ| > h/2`, with `z − m = φ + (h/2)²/φ`.
//!
//! The Szegő function of a density `μ′` is split as `S = F·exp(E)`. Here
//! `F = (φ/(π h w))^{1/2}` is the exact factor for the weight `2π|w_+|` and
//! `E` the Cauchy integral of `log μ′`. `E` is taken in the angle variable
//! `x = m + h cos θ`, with the value at `z` subtracted from the integrand so
//! that it stays bounded as `z` approaches the cut.

use crate::curve::Side;
use crate::mop::{AngelescoSystem, Density, Geometry, MultiIndex, WeightSpec};
use crate::precision::{PrecisionContext, XComplex, XReal};
use crate::{Error, Result};
use rug::Float;
use std::fmt::Write as _;

/// Default number of angle nodes; high-degree or near-singular densities
/// may need more (see [`SzegoFunction::with_nodes`]).
pub const DEFAULT_NODES: usize = 128;

/// Value of a Szegő function together with its value at infinity.
#[derive(Clone, Debug)]
pub struct SzegoEval {
    pub interval: usize,
    pub value: XComplex,
    pub at_infinity: XComplex,
}

impl SzegoEval {
    /// `S(z)/S(∞)`.
    pub fn normalized(&self) -> XComplex {
        &self.value / &self.at_infinity
    }
}

/// `x ± i0`, carried as a signed zero imaginary part.
pub fn on_side(x: &XReal, side: Side) -> XComplex {
    let p = x.prec();
    let im = match side {
        Side::Upper => Float::new(p),
        Side::Lower => -Float::new(p),
    };
    XComplex::new(x.clone(), im)
}

fn on_cut(geometry: &Geometry, i: usize, z: &XComplex) -> bool {
    let (a, b) = geometry.interval(i);
    z.im.is_zero() && z.re > *a && z.re < *b
}

fn check_index(i: usize) -> Result<()> {
    if (1..=2).contains(&i) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("interval index {i} is not 1 or 2")))
    }
}

/// `w_i(z)`. On the open cut the sign of the zero imaginary part of `z`
/// picks the boundary value (`+0` gives `w_+ = i|w|`).
pub fn w_map(geometry: &Geometry, i: usize, z: &XComplex) -> XComplex {
    let (a, b) = geometry.interval(i);
    let p = z.prec();
    let za = z.add_real(&Float::with_val(p, -a));
    let zb = z.add_real(&Float::with_val(p, -b));
    // Product of principal roots: continuous off the cut and ~z at infinity.
    &za.sqrt() * &zb.sqrt()
}

/// `φ_i(z)`, same boundary convention as [`w_map`].
pub fn phi_map(geometry: &Geometry, i: usize, z: &XComplex) -> XComplex {
    let p = z.prec();
    let w = w_map(geometry, i, z);
    let shifted = z.add_real(&-geometry.midpoint(i));
    (&shifted + &w).scale(&Float::with_val(p, 0.5))
}

/// `((β_i − α_i)/4)²`, the squared radius of the image circle.
pub fn phi_radius_sq(geometry: &Geometry, i: usize) -> XReal {
    let h = geometry.half_length(i);
    Float::with_val(h.prec(), h.square_ref()) / 4u32
}

/// Szegő function of `μ′_i` on interval `i`, prepared for repeated
/// evaluation.
#[derive(Clone, Debug)]
pub struct SzegoFunction {
    geometry: Geometry,
    interval: usize,
    density: Density,
    nodes: usize,
    ctx: PrecisionContext,
}

impl SzegoFunction {
    pub fn new(geometry: &Geometry, weight: &WeightSpec, ctx: &PrecisionContext) -> Result<Self> {
        check_index(weight.interval)?;
        weight.validate(geometry, ctx)?;
        Ok(Self {
            geometry: geometry.clone(),
            interval: weight.interval,
            density: weight.density_fn(ctx)?,
            nodes: DEFAULT_NODES,
            ctx: ctx.clone(),
        })
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes.max(8);
        self
    }

    /// Midpoint-rule nodes `x_k = m + h cos θ_k`, `θ_k = (k + ½)π/M`, which
    /// integrate `∫_0^π f(cos θ) dθ` spectrally for analytic `f`.
    fn nodes(&self) -> Vec<XReal> {
        let p = self.ctx.bits();
        let m = self.geometry.midpoint(self.interval);
        let h = self.geometry.half_length(self.interval);
        let pi = self.ctx.pi();
        (0..self.nodes)
            .map(|k| {
                let theta = Float::with_val(p, &pi * (2 * k + 1) as u32) / (2 * self.nodes) as u32;
                Float::with_val(p, &m + theta.cos() * &h)
            })
            .collect()
    }

    fn weight_step(&self) -> XReal {
        self.ctx.pi() / self.nodes as u32
    }

    /// `g'(x)` by a complex step, used only when a node hits `x` exactly.
    fn log_density_slope(&self, x: &XReal) -> XReal {
        let p = self.ctx.bits();
        let eps = self.ctx.eps_pow(p as i32 / 2);
        let probe = XComplex::new(x.clone(), eps.clone());
        self.density.log_eval_complex(&probe).im / eps
    }

    /// `∫_0^π (g(x(θ)) − G)/(z − x(θ)) dθ` with `g = log μ′`.
    fn divided_integral(&self, z: &XComplex, anchor: &XComplex) -> XComplex {
        let p = self.ctx.bits();
        let mut acc = XComplex::zero(p);
        for x in self.nodes() {
            let num = XComplex::from_real(self.density.log_eval(&x)) - anchor;
            let den = z.add_real(&-x.clone());
            let term = if den.re.is_zero() && den.im.is_zero() {
                // Removable point of the divided difference on the cut.
                XComplex::from_real(-self.log_density_slope(&x))
            } else {
                &num / &den
            };
            acc += &term;
        }
        acc.scale(&self.weight_step())
    }

    /// `S(∞) = (π h)^{−1/2} exp(−(1/2π) ∫_0^π g dθ)`.
    pub fn at_infinity(&self) -> XComplex {
        let p = self.ctx.bits();
        let mut mean = self.ctx.zero();
        for x in self.nodes() {
            mean += self.density.log_eval(&x);
        }
        mean *= self.weight_step();
        let pi = self.ctx.pi();
        let h = self.geometry.half_length(self.interval);
        let e = -(mean / Float::with_val(p, &pi * 2u32));
        let f = Float::with_val(p, &pi * &h).recip().sqrt();
        XComplex::from_real(f * e.exp())
    }

    /// `S(z)`; on the open cut a side is required.
    pub fn eval(&self, z: &XComplex, side: Option<Side>) -> Result<SzegoEval> {
        let p = self.ctx.bits();
        let i = self.interval;
        let z = resolve_side(&self.geometry, i, z, side)?;
        let (a, b) = self.geometry.interval(i);
        if z.im.is_zero() && (z.re == *a || z.re == *b) {
            return Err(Error::Domain(format!("z = {} is an endpoint of interval {i}", z.re.to_f64())));
        }
        if !z.is_finite() {
            return Err(Error::Domain("z must be finite; use at_infinity".into()));
        }
        let w = w_map(&self.geometry, i, &z);
        let phi = phi_map(&self.geometry, i, &z);
        let pi = self.ctx.pi();
        let h = self.geometry.half_length(i);
        let f = (&phi / &w.scale(&Float::with_val(p, &pi * &h))).sqrt();
        // Subtracting g(z) only matters close to the cut; far away it would
        // just cancel against a large value of g.
        let dist = distance_to_interval(&z, a, b);
        let near = dist <= Float::with_val(p, b - a);
        let anchor = if near {
            self.density.log_eval_complex(&z)
        } else {
            XComplex::zero(p)
        };
        let integral = self.divided_integral(&z, &anchor);
        let two_pi = Float::with_val(p, &pi * 2u32);
        let e = -(&w * &integral).scale(&two_pi.recip()) - anchor.scale(&Float::with_val(p, 0.5));
        let value = &f * &e.exp();
        if value.abs().is_zero() || !value.is_finite() {
            return Err(Error::Evaluation(format!("Szegő function at {:?}", z.to_f64())));
        }
        Ok(SzegoEval {
            interval: i,
            value,
            at_infinity: self.at_infinity(),
        })
    }

    /// `μ′(x)`; exposed so callers can check the boundary identity.
    pub fn density(&self, x: &XReal) -> XReal {
        self.density.eval(x)
    }
}

fn distance_to_interval(z: &XComplex, a: &XReal, b: &XReal) -> XReal {
    let p = z.prec();
    let dx = if z.re < *a {
        Float::with_val(p, a - &z.re)
    } else if z.re > *b {
        Float::with_val(p, &z.re - b)
    } else {
        Float::new(p)
    };
    dx.hypot(&z.im)
}

/// One-shot `S_{ρ_i}(z)` for the density of `weight` on interval `weight.interval`.
pub fn szego_rho(geometry: &Geometry, weight: &WeightSpec, z: &XComplex, side: Option<Side>, ctx: &PrecisionContext) -> Result<SzegoEval> {
    SzegoFunction::new(geometry, weight, ctx)?.eval(z, side)
}

/// `S(z; x0) = φ_2(z)φ_2(x0)/(φ_2(z)φ_2(x0) − A)` with `A = ((β2−α2)/4)²`.
///
/// This is the square root of the defining expression taken with
/// `S(∞; x0) = 1`: since `z − x0 = (φ(z) − φ(x0))(1 − A/(φ(z)φ(x0)))`, the
/// radicand is a perfect square, and `|A/(φ(z)φ(x0))| < 1` keeps the root
/// away from zero.
pub fn s_x0(geometry: &Geometry, z: &XComplex, x0: &XReal, side: Option<Side>) -> Result<XComplex> {
    if geometry.contains(2, x0) {
        return Err(Error::Domain(format!("x0 = {} lies in the second interval", x0.to_f64())));
    }
    let z = resolve_side(geometry, 2, z, side)?;
    let u0 = phi_map(geometry, 2, &XComplex::from_real(x0.clone()));
    let prod = &phi_map(geometry, 2, &z) * &u0;
    let den = prod.add_real(&-phi_radius_sq(geometry, 2));
    Ok(&prod / &den)
}

fn resolve_side(geometry: &Geometry, i: usize, z: &XComplex, side: Option<Side>) -> Result<XComplex> {
    if on_cut(geometry, i, z) {
        match side {
            Some(s) => Ok(on_side(&z.re, s)),
            None => Err(Error::Domain(format!("z = {:?} lies on cut {i}; pass a side", z.to_f64()))),
        }
    } else {
        Ok(z.clone())
    }
}

/// Marginal predictor
/// `(S_{ρ2}(z)/S_{ρ2}(∞)) · S(z; α1)^{n1} · (z − α1)^{n1} · φ_2(z)^{n2}`,
/// normalised so that it behaves like `z^{|n|}` at infinity.
pub struct MarginalPredictor {
    geometry: Geometry,
    szego: SzegoFunction,
}

impl MarginalPredictor {
    pub fn new(geometry: &Geometry, weight2: &WeightSpec, ctx: &PrecisionContext) -> Result<Self> {
        if weight2.interval != 2 {
            return Err(Error::InvalidWeight(format!("predictor weight sits on interval {}", weight2.interval)));
        }
        Ok(Self {
            geometry: geometry.clone(),
            szego: SzegoFunction::new(geometry, weight2, ctx)?,
        })
    }

    pub fn eval(&self, n: MultiIndex, z: &XComplex) -> Result<XComplex> {
        let g = &self.geometry;
        let alpha1 = g.interval(1).0.clone();
        if z.im.is_zero() && (g.contains(2, &z.re) || z.re == alpha1) {
            return Err(Error::Domain(format!("z = {} is on the limiting zero set", z.re.to_f64())));
        }
        let s = self.szego.eval(z, None)?.normalized();
        let s0 = s_x0(g, z, &alpha1, None)?;
        let lin = z.add_real(&-alpha1);
        let phi = phi_map(g, 2, z);
        let k1 = n.n1 as i64;
        Ok(&(&s * &(&s0 * &lin).powi(k1)) * &phi.powi(n.n2 as i64))
    }
}

/// One-shot predictor for `weight2` on the second interval.
pub fn marginal_predict(geometry: &Geometry, n: MultiIndex, z: &XComplex, weight2: &WeightSpec, ctx: &PrecisionContext) -> Result<XComplex> {
    MarginalPredictor::new(geometry, weight2, ctx)?.eval(n, z)
}

/// `P_n(z)` against its predicted value.
#[derive(Clone, Debug)]
pub struct RatioRow {
    pub n: MultiIndex,
    pub z: XComplex,
    pub ratio: XComplex,
    /// `|ratio − 1|`.
    pub abs_err: f64,
}

/// Ratios `P_n(z)/prediction` for every `(n, z)` pair.
pub fn ratio_report(system: &AngelescoSystem, indices: &[MultiIndex], points: &[XComplex]) -> Result<Vec<RatioRow>> {
    let predictor = MarginalPredictor::new(&system.geometry, &system.weights[1], &system.ctx)?;
    let mut rows = Vec::with_capacity(indices.len() * points.len());
    for &n in indices {
        let p = system.type2(n)?;
        for z in points {
            let ratio = &p.eval_complex(z) / &predictor.eval(n, z)?;
            let abs_err = ratio.add_real(&-system.ctx.one()).abs().to_f64();
            rows.push(RatioRow {
                n,
                z: z.clone(),
                ratio,
                abs_err,
            });
        }
    }
    Ok(rows)
}

/// CSV `n1,n2,z_re,z_im,ratio_re,ratio_im,abs_err`.
pub fn ratio_csv(rows: &[RatioRow]) -> String {
    let mut out = String::from("n1,n2,z_re,z_im,ratio_re,ratio_im,abs_err\n");
    for r in rows {
        let (zr, zi) = r.z.to_f64();
        let (rr, ri) = r.ratio.to_f64();
        let _ = writeln!(out, "{},{},{zr:e},{zi:e},{rr:.17e},{ri:.17e},{:e}", r.n.n1, r.n.n2, r.abs_err);
    }
    out
}

/// `lim_{z→∞} (P_{n+e_i}(z)/P_n(z) − z)`, i.e. the difference of the
/// subleading coefficients. Along marginal sequences this tends to `−B_i`
/// of the collapsed (`c = 0`) surface.
pub fn subleading_shift(system: &AngelescoSystem, n: MultiIndex, i: usize) -> Result<XReal> {
    check_index(i)?;
    let size = n.size();
    let next = system.type2(n.plus(i))?;
    let here = system.type2(n)?;
    let lower = if size == 0 { system.ctx.zero() } else { here.coeff(size - 1) };
    Ok(Float::with_val(system.ctx.bits(), next.coeff(size) - lower))
}
