//! Independent cross-checks on the endpoint `β_{c,1}`: an algebraic route
//! through a discriminant condition and a discrete-charge energy minimiser.

use crate::mop::Geometry;
use crate::precision::{real_roots_in, Poly, PrecisionContext, XReal};
use crate::{Error, Result};
use rug::Float;
use serde::Serialize;

/// One real solution `(d, β, r)` of the discriminant system, where `r` is
/// the double root of `4K³(z−d)³ − 27(c−c²)²(z−α1)(z−α2)(z−β2)` and `β` its
/// simple root.
#[derive(Clone, Debug)]
pub struct DiscriminantRoot {
    pub d: XReal,
    pub beta: XReal,
    pub double_root: XReal,
}

fn sub(p: u32, a: &XReal, b: &XReal) -> XReal {
    Float::with_val(p, a - b)
}

/// Cubic `4K³(z−d)³ − 27s²Π(z)` as a polynomial in `z`.
pub fn discriminant_cubic(geometry: &Geometry, c: &XReal, d: &XReal, ctx: &PrecisionContext) -> Poly {
    let p = ctx.bits();
    let (k, s) = k_and_s(c, p);
    let [a1, _, a2, b2] = geometry.points().map(|x| ctx.round(x));
    let pi = Poly::from_roots(&[a1, a2, b2], p);
    let shifted = Poly::from_roots(&[d.clone(), d.clone(), d.clone()], p);
    let k3 = Float::with_val(p, k.square_ref()) * &k * 4u32;
    let s2 = Float::with_val(p, s.square_ref()) * 27u32;
    shifted.scale(&k3).sub(&pi.scale(&s2))
}

fn k_and_s(c: &XReal, p: u32) -> (XReal, XReal) {
    let c2 = Float::with_val(p, c.square_ref());
    let k = Float::with_val(p, &c2 - c) + 1u32;
    let s = Float::with_val(p, c - &c2);
    (k, s)
}

/// All real solutions with `α1 < d < β`, including virtual ones with
/// `β ≥ β1`.
pub fn discriminant_roots(geometry: &Geometry, c: &XReal, ctx: &PrecisionContext) -> Result<Vec<DiscriminantRoot>> {
    if !(*c > 0 && *c < 1) {
        return Err(Error::Precondition(format!("c = {} outside (0, 1)", c.to_f64())));
    }
    let p = ctx.bits();
    let (k, s) = k_and_s(c, p);
    let [a1, _, a2, b2] = geometry.points().map(|x| ctx.round(x));
    let pi = Poly::from_roots(&[a1.clone(), a2.clone(), b2.clone()], p);
    let dpi = pi.derivative();
    let k3 = Float::with_val(p, k.square_ref()) * &k;
    let s2 = Float::with_val(p, s.square_ref());
    // 4K³Π(r)² = s²Π′(r)³ eliminates d from the double-root conditions.
    let sextic = pi.mul(&pi).scale(&Float::with_val(p, &k3 * 4u32)).sub(&dpi.mul(&dpi).mul(&dpi).scale(&s2));
    let lead = sextic.lead();
    let bound = sextic
        .coeffs()
        .iter()
        .map(|x| Float::with_val(p, x / &lead).abs())
        .fold(ctx.zero(), |m, x| m.max(&x))
        + 1u32;
    let cubic_lead = Float::with_val(p, &k3 * 4u32) - Float::with_val(p, &s2 * 27u32);
    if cubic_lead.is_zero() {
        return Err(Error::Regime("degenerate leading coefficient at c = 1/2".into()));
    }
    let e1 = Float::with_val(p, &a1 + &a2) + &b2;
    let mut out = Vec::new();
    for root in real_roots_in(&sextic, &-bound.clone(), &bound, ctx) {
        let r = root.value;
        let slope = dpi.eval(&r);
        if slope.is_zero() {
            continue;
        }
        let d = sub(p, &r, &(pi.eval(&r) * 3u32 / &slope));
        let c2 = Float::with_val(p, &s2 * &e1) * 27u32 - Float::with_val(p, &k3 * &d) * 12u32;
        let beta = -(c2 / &cubic_lead) - Float::with_val(p, &r * 2u32);
        if d > a1 && beta > d {
            out.push(DiscriminantRoot { d, beta, double_root: r });
        }
    }
    Ok(out)
}

/// `(d_c, β_{c,1})` from the discriminant route, for `0 < c < c*`.
///
/// Fails with [`Error::Regime`] when no solution has its simple root
/// inside the first interval, which is what happens once `c ≥ c*`.
pub fn dc_oracle(geometry: &Geometry, c: &XReal, ctx: &PrecisionContext) -> Result<(XReal, XReal)> {
    let beta1 = geometry.interval(1).1;
    let found = discriminant_roots(geometry, c, ctx)?
        .into_iter()
        .filter(|r| r.beta < *beta1)
        .min_by(|x, y| x.beta.partial_cmp(&y.beta).expect("finite roots"));
    let Some(root) = found else {
        return Err(Error::Regime(format!("no admissible d_c at c = {}; c is not below c*", c.to_f64())));
    };
    let cubic = discriminant_cubic(geometry, c, &root.d, ctx);
    let scale = cubic.eval_scale(&root.double_root);
    let tol = Float::with_val(ctx.bits(), ctx.tol() * &scale);
    if cubic.eval(&root.double_root).abs() > tol || cubic.derivative().eval(&root.double_root).abs() > tol {
        return Err(Error::InternalInconsistency("double-root certificate failed".into()));
    }
    Ok((root.d, root.beta))
}

/// Result of the discrete-charge energy minimisation.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyEstimate {
    pub beta_c1: f64,
    pub alpha_c2: f64,
    pub energy: f64,
    /// Expected accuracy of the endpoints, of order `1/N`.
    pub tolerance: f64,
    /// Energy after every accepted step.
    pub history: Vec<f64>,
    /// Final charge positions on each interval, ascending.
    pub positions: [Vec<f64>; 2],
}

struct Charges {
    x: Vec<f64>,
    q: Vec<f64>,
    kind: Vec<u8>,
}

impl Charges {
    fn weight(&self, i: usize, j: usize) -> f64 {
        let k = if self.kind[i] == self.kind[j] { 4.0 } else { 2.0 };
        k * self.q[i] * self.q[j]
    }

    fn energy(&self, x: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let d = (x[i] - x[j]).abs();
                if d == 0.0 {
                    return f64::INFINITY;
                }
                e -= self.weight(i, j) * d.ln();
            }
        }
        e
    }

    /// Gradient and Hessian diagonal.
    fn derivatives(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = x.len();
        let mut g = vec![0.0; n];
        let mut h = vec![0.0; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weight(i, j);
                let d = x[i] - x[j];
                g[i] -= w / d;
                g[j] += w / d;
                let c = w / (d * d);
                h[i] += c;
                h[j] += c;
            }
        }
        (g, h)
    }
}

/// Soft-edge position from the two outermost charges. Near a square-root
/// edge the extreme charges of a log-gas sit at distances proportional to
/// the first zeros of the Airy function.
fn soft_edge(outer: f64, next: f64) -> f64 {
    const AIRY: [f64; 2] = [2.338107410459767, 4.087949444130971];
    (AIRY[1] * outer - AIRY[0] * next) / (AIRY[1] - AIRY[0])
}

/// Minimises the discrete two-type logarithmic energy with `round(cN)`
/// charges on the first interval and the rest on the second.
///
/// Projected gradient descent with a diagonal-Hessian preconditioner and
/// Armijo backtracking. An edge is reported at the interval end when the
/// outermost charge is pinned there, otherwise by soft-edge extrapolation.
/// Descent stops early once no step decreases the energy.
pub fn energy_oracle(geometry: &Geometry, c: f64, n_particles: usize, iterations: usize, _ctx: &PrecisionContext) -> Result<EnergyEstimate> {
    if n_particles < 50 {
        return Err(Error::Precondition("energy oracle needs at least 50 charges".into()));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Precondition(format!("c = {c} outside [0, 1]")));
    }
    let [a1, b1, a2, b2] = geometry.to_f64();
    let mut n1 = (c * n_particles as f64).round() as usize;
    if c > 0.0 {
        n1 = n1.max(1);
    }
    if c < 1.0 {
        n1 = n1.min(n_particles - 1);
    }
    let n2 = n_particles - n1;
    let mut charges = Charges {
        x: Vec::with_capacity(n_particles),
        q: Vec::with_capacity(n_particles),
        kind: Vec::with_capacity(n_particles),
    };
    for (n, lo, hi, mass, kind) in [(n1, a1, b1, c, 0u8), (n2, a2, b2, 1.0 - c, 1u8)] {
        for k in 0..n {
            let t = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            charges.x.push(lo + (hi - lo) * (1.0 - t.cos()) / 2.0);
            charges.q.push(mass / n as f64);
            charges.kind.push(kind);
        }
    }
    let bounds: Vec<(f64, f64)> = charges.kind.iter().map(|&k| if k == 0 { (a1, b1) } else { (a2, b2) }).collect();
    let mut x = charges.x.clone();
    let mut e = charges.energy(&x);
    let mut history = vec![e];
    for _ in 0..iterations {
        let (g, h) = charges.derivatives(&x);
        let mut lambda = 1.0;
        let mut moved = false;
        while lambda > 1e-12 {
            let trial: Vec<f64> = (0..x.len())
                .map(|i| (x[i] - lambda * g[i] / h[i]).clamp(bounds[i].0, bounds[i].1))
                .collect();
            let decrease: f64 = (0..x.len()).map(|i| g[i] * (x[i] - trial[i])).sum();
            let et = charges.energy(&trial);
            if et.is_finite() && et <= e - 1e-4 * decrease && et < e {
                x = trial;
                e = et;
                moved = true;
                break;
            }
            lambda /= 2.0;
        }
        if !moved {
            break;
        }
        history.push(e);
    }
    let first: Vec<f64> = sorted(&x, &charges.kind, 0);
    let second: Vec<f64> = sorted(&x, &charges.kind, 1);
    let pinned = 1e-12;
    let beta_c1 = match first.as_slice() {
        [] => a1,
        [.., top] if b1 - top <= pinned => b1,
        [.., next, top] => soft_edge(*top, *next).min(b1),
        [top] => *top,
    };
    let alpha_c2 = match second.as_slice() {
        [] => b2,
        [bottom, ..] if bottom - a2 <= pinned => a2,
        [bottom, next, ..] => soft_edge(*bottom, *next).max(a2),
        [bottom] => *bottom,
    };
    Ok(EnergyEstimate {
        beta_c1,
        alpha_c2,
        energy: e,
        tolerance: 1.0 / n_particles as f64,
        history,
        positions: [first, second],
    })
}

fn sorted(x: &[f64], kind: &[u8], which: u8) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().zip(kind).filter(|(_, &k)| k == which).map(|(&v, _)| v).collect();
    v.sort_by(f64::total_cmp);
    v
}
