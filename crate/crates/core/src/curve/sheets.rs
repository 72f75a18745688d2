//! Branches of the sheet map and of the functions built from it.
//!
//! Sheet 0 carries the point at infinity with `χ(z) = z + O(1/z)`; sheet
//! `i` is glued to sheet 0 along the support of the `i`-th measure and has
//! `χ(z) → B_i` at infinity.

use super::{CurveData, InverseMap};
use crate::precision::{find_root, PrecisionContext, XComplex, XReal};
use crate::{Error, Result};
use rug::Float;

/// Which boundary value to take on a cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

fn cubic_eval(c: &[XComplex; 3], w: &XComplex) -> (XComplex, XComplex) {
    let w2 = w * w;
    let v = &(&(&w2 * w) + &(&c[2] * &w2)) + &(&(&c[1] * w) + &c[0]);
    let d = &(&w2.scale(&Float::with_val(w.prec(), 3u32)) + &(&c[2] * w).scale(&Float::with_val(w.prec(), 2u32))) + &c[1];
    (v, d)
}

/// Newton on the monic cubic until the correction is below `stop`.
fn polish(c: &[XComplex; 3], w: XComplex, stop: &XReal, max_iter: usize) -> Option<(XComplex, XReal)> {
    let mut w = w;
    let mut moved = Float::new(w.prec());
    for _ in 0..max_iter {
        let (v, d) = cubic_eval(c, &w);
        let step = &v / &d;
        if !step.is_finite() {
            return None;
        }
        let size = step.abs();
        w = &w - &step;
        moved += &size;
        if size <= *stop {
            return Some((w, moved));
        }
    }
    None
}

/// Real root of `R(w) = x` on a monotone piece of `R`.
///
/// `lo`/`hi` are finite piece ends; `None` stands for a pole or infinity
/// on that side, which is approached until the sign of `R − x` flips.
fn piece_root(map: &InverseMap, x: &XReal, lo: Bound, hi: Bound, ctx: &PrecisionContext) -> Result<XReal> {
    let p = ctx.bits();
    let g = |w: &XReal| Float::with_val(p, map.eval(w) - x);
    let resolve = |b: &Bound, other: &XReal, toward_low: bool| -> Result<XReal> {
        match b {
            Bound::At(v) => Ok(v.clone()),
            Bound::Pole(pole) => {
                let mut delta = Float::with_val(p, other - pole).abs() / 2u32;
                let target_sign = g(other).is_sign_negative();
                for _ in 0..4 * p {
                    let w = if toward_low {
                        Float::with_val(p, pole + &delta)
                    } else {
                        Float::with_val(p, pole - &delta)
                    };
                    if g(&w).is_sign_negative() != target_sign {
                        return Ok(w);
                    }
                    delta /= 4u32;
                }
                Err(Error::Evaluation("no sign change next to a pole".into()))
            }
            Bound::Infinite => {
                let mut span = Float::with_val(p, x.abs_ref()) + 1u32;
                let target_sign = g(other).is_sign_negative();
                for _ in 0..4 * p {
                    let w = if toward_low {
                        Float::with_val(p, other - &span)
                    } else {
                        Float::with_val(p, other + &span)
                    };
                    if g(&w).is_sign_negative() != target_sign {
                        return Ok(w);
                    }
                    span *= 2u32;
                }
                Err(Error::Evaluation("no sign change towards infinity".into()))
            }
        }
    };
    let (a, b) = match (&lo, &hi) {
        (Bound::At(a), _) => {
            let b = resolve(&hi, a, false)?;
            (a.clone(), b)
        }
        (_, Bound::At(b)) => (resolve(&lo, b, true)?, b.clone()),
        _ => return Err(Error::Evaluation("piece without a finite end".into())),
    };
    find_root(g, &a, &b, &ctx.ulp_guard(), ctx)
}

enum Bound {
    At(XReal),
    Pole(XReal),
    Infinite,
}

/// Sheet values at a real point. On a cut the complex pair is split by
/// `side`: from above, sheet 0 takes the root in the upper half-plane.
pub fn chi_real(curve: &CurveData, x: &XReal, side: Side, ctx: &PrecisionContext) -> Result<[XComplex; 3]> {
    let p = ctx.bits();
    if let Some(k) = curve.collapsed_sheet {
        return collapsed_values(curve, &XComplex::from_real(ctx.round(x)), side, k, ctx);
    }
    let map = curve.inverse_map();
    let [w1, w2, w3, w4] = curve.w_crit.clone();
    let alpha1 = curve.geometry.interval(1).0.clone();
    let beta2 = curve.geometry.interval(2).1.clone();
    let at = |v: &XReal| Bound::At(v.clone());
    let pole = |v: &XReal| Bound::Pole(v.clone());
    let real = |v: XReal| XComplex::from_real(v);
    let root = |lo: Bound, hi: Bound| piece_root(&map, x, lo, hi, ctx);
    if *x < alpha1 {
        return Ok([
            real(root(Bound::Infinite, at(&w1))?),
            real(root(at(&w1), pole(&map.b1))?),
            real(root(at(&w3), pole(&map.b2))?),
        ]);
    }
    if *x > curve.beta_c1 && *x < curve.alpha_c2 {
        return Ok([
            real(root(at(&w2), at(&w3))?),
            real(root(pole(&map.b1), at(&w2))?),
            real(root(at(&w3), pole(&map.b2))?),
        ]);
    }
    if *x > beta2 {
        return Ok([
            real(root(at(&w4), Bound::Infinite)?),
            real(root(pole(&map.b1), at(&w2))?),
            real(root(pole(&map.b2), at(&w4))?),
        ]);
    }
    // On a cut: one real root, deflate to a conjugate pair.
    let on_first = *x <= curve.beta_c1;
    let r = if on_first {
        root(at(&w3), pole(&map.b2))?
    } else {
        root(pole(&map.b1), at(&w2))?
    };
    let c = map.cubic(&XComplex::from_real(ctx.round(x)));
    let pc = Float::with_val(p, &c[2].re + &r);
    let qc = Float::with_val(p, &c[1].re + Float::with_val(p, &r * &pc));
    let disc = Float::with_val(p, qc.clone() * 4u32) - Float::with_val(p, pc.square_ref());
    let half_re = -Float::with_val(p, &pc / 2u32);
    let half_im = Float::with_val(p, disc.max(&ctx.zero()).sqrt() / 2u32);
    let up = XComplex::new(half_re.clone(), half_im.clone());
    let down = XComplex::new(half_re, -half_im);
    let (zero_val, partner) = match side {
        Side::Upper => (up, down),
        Side::Lower => (down, up),
    };
    Ok(if on_first {
        [zero_val, partner, real(r)]
    } else {
        [zero_val, real(r), partner]
    })
}

/// Values when one sheet has collapsed to the point `B_k` (`c ∈ {0, 1}`):
/// the other two come from a quadratic with its cut on the surviving interval.
fn collapsed_values(curve: &CurveData, z: &XComplex, side: Side, k: usize, ctx: &PrecisionContext) -> Result<[XComplex; 3]> {
    let p = ctx.bits();
    let (a, b, pole_fixed) = if k == 1 {
        (&curve.a2, &curve.b2, &curve.b1)
    } else {
        (&curve.a1, &curve.b1, &curve.b2)
    };
    let root_a = Float::with_val(p, a.sqrt_ref()) * 2u32;
    let lo = Float::with_val(p, b - &root_a);
    let hi = Float::with_val(p, b + &root_a);
    // sqrt(z − lo)·sqrt(z − hi) ~ z at infinity, cut on [lo, hi]; the
    // lower half-plane and lower boundary follow by conjugation.
    let lower = z.im < 0 || (z.im.is_zero() && side == Side::Lower);
    let zz = XComplex::new(z.re.clone(), Float::with_val(p, z.im.abs_ref()));
    let s = &zz.add_real(&-lo.clone()).sqrt() * &zz.add_real(&-hi.clone()).sqrt();
    let sum = zz.add_real(b);
    let half = Float::with_val(p, 0.5);
    let mut outer = (&sum + &s).scale(&half);
    let mut inner = (&sum - &s).scale(&half);
    if lower {
        outer = outer.conj();
        inner = inner.conj();
    }
    let fixed = XComplex::from_real(pole_fixed.clone());
    Ok(if k == 1 { [outer, fixed, inner] } else { [outer, inner, fixed] })
}

/// The three sheet values `χ^{(k)}(z)`, `k = 0, 1, 2`.
///
/// Real points off the cuts are labelled by the monotone pieces of `R`;
/// on a cut the upper boundary values are returned. Off the axis the
/// roots are continued along a segment from a real anchor to the right of
/// the second interval, which never meets a cut.
pub fn chi_eval(curve: &CurveData, z: &XComplex, ctx: &PrecisionContext) -> Result<[XComplex; 3]> {
    if z.im.is_zero() {
        return chi_real(curve, &z.re, Side::Upper, ctx);
    }
    if let Some(k) = curve.collapsed_sheet {
        return collapsed_values(curve, z, Side::Upper, k, ctx);
    }
    if z.im < 0 {
        return Ok(chi_eval(curve, &z.conj(), ctx)?.map(|w| w.conj()));
    }
    let p = ctx.bits();
    let map = curve.inverse_map();
    let beta2 = curve.geometry.interval(2).1;
    let anchor = Float::with_val(p, beta2 + 1u32).max(&z.re);
    // Rise well above the axis before moving across, so the path keeps its
    // distance from every branch point until the final descent.
    let height = Float::with_val(p, z.im.abs_ref()).max(&ctx.one());
    let waypoints = [
        XComplex::from_real(anchor.clone()),
        XComplex::new(anchor, height.clone()),
        XComplex::new(z.re.clone(), height),
        z.clone(),
    ];
    let mut roots = chi_real(curve, &waypoints[0].re, Side::Upper, ctx)?;
    let mut dt = 0.125f64;
    for leg in waypoints.windows(2) {
        roots = continue_roots(&map, roots, &leg[0], &leg[1], &mut dt, ctx)?;
    }
    let coeffs = map.cubic(z);
    let fine = ctx.ulp_guard();
    let mut out = Vec::with_capacity(3);
    for w in &roots {
        let scale = Float::with_val(p, w.abs()) + 1u32;
        let stop = Float::with_val(p, &fine * &scale);
        match polish(&coeffs, w.clone(), &stop, 60) {
            Some((wn, _)) => out.push(wn),
            None => out.push(w.clone()),
        }
    }
    // Sheet 0 is the only branch mapping the upper half-plane upward.
    if !(out[0].im > 0 && out[1].im < 0 && out[2].im < 0) {
        let (re, im) = z.to_f64();
        return Err(Error::Classification {
            at: format!("{re}+{im}i"),
            suggested_step: dt / 2.0,
        });
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Tracks the three roots along the segment `from → to`.
fn continue_roots(
    map: &InverseMap,
    mut roots: [XComplex; 3],
    from: &XComplex,
    to: &XComplex,
    dt: &mut f64,
    ctx: &PrecisionContext,
) -> Result<[XComplex; 3]> {
    let p = ctx.bits();
    let delta = to - from;
    if delta.abs().is_zero() {
        return Ok(roots);
    }
    let loose = ctx.eps_pow(100.min(p as i32 / 2));
    let mut t = 0.0f64;
    let mut prev_z = from.clone();
    while t < 1.0 {
        let next = (t + *dt).min(1.0);
        let zn = if next == 1.0 { to.clone() } else { from + &delta.scale(&ctx.real(next)) };
        let dz = &zn - &prev_z;
        let coeffs = map.cubic(&zn);
        let sep = min_separation(&roots);
        let limit = Float::with_val(p, &sep / 4u32);
        let mut moved = Vec::with_capacity(3);
        for w in &roots {
            let pred = w + &(&dz / &map.d1_complex(w));
            match polish(&coeffs, pred.clone(), &loose, 12) {
                Some((wn, _)) if (&wn - &pred).abs() < limit => moved.push(wn),
                _ => break,
            }
        }
        if moved.len() == 3 && min_separation_slice(&moved) > limit {
            roots = [moved[0].clone(), moved[1].clone(), moved[2].clone()];
            prev_z = zn;
            t = next;
            *dt = (*dt * 2.0).min(0.25);
        } else {
            *dt /= 2.0;
            if *dt < 1e-14 {
                let (re, im) = prev_z.to_f64();
                return Err(Error::Classification {
                    at: format!("{re}+{im}i"),
                    suggested_step: *dt,
                });
            }
        }
    }
    Ok(roots)
}

fn min_separation(r: &[XComplex; 3]) -> XReal {
    min_separation_slice(r)
}

fn min_separation_slice(r: &[XComplex]) -> XReal {
    let a = (&r[0] - &r[1]).abs();
    let b = (&r[0] - &r[2]).abs();
    let c = (&r[1] - &r[2]).abs();
    a.min(&b).min(&c)
}

impl CurveData {
    /// `h(w) = (w−B1)(w−B2)(w−w_*)/∏_j(w−w_j)` with the factor that
    /// cancels against `w_*` removed in the pushed regimes.
    pub fn h_of_w(&self, w: &XComplex) -> XComplex {
        let num = &(w.add_real(&-self.b1.clone())) * &(w.add_real(&-self.b2.clone()));
        let mut den = XComplex::from_real(Float::with_val(w.prec(), 1u32));
        let cancel = match self.regime {
            super::Regime::PushedLeft => Some(1),
            super::Regime::PushedRight => Some(2),
            super::Regime::Middle => None,
        };
        let mut num = num;
        if cancel.is_none() {
            num = &num * &w.add_real(&-self.w_star.clone());
        }
        for (j, wj) in self.w_crit.iter().enumerate() {
            if Some(j) != cancel {
                den = &den * &w.add_real(&-wj.clone());
            }
        }
        &num / &den
    }
}

/// `h^{(k)}(z) = h(χ^{(k)}(z))`; vanishes identically on a collapsed sheet.
pub fn h_branch(curve: &CurveData, z: &XComplex, sheet: usize, ctx: &PrecisionContext) -> Result<XComplex> {
    check_sheet(sheet)?;
    if curve.collapsed_sheet == Some(sheet) {
        return Ok(XComplex::zero(ctx.bits()));
    }
    let w = chi_eval(curve, z, ctx)?;
    Ok(curve.h_of_w(&w[sheet]))
}

/// Boundary value of `h^{(k)}` at a real point.
pub fn h_boundary(curve: &CurveData, x: &XReal, side: Side, sheet: usize, ctx: &PrecisionContext) -> Result<XComplex> {
    check_sheet(sheet)?;
    if curve.collapsed_sheet == Some(sheet) {
        return Ok(XComplex::zero(ctx.bits()));
    }
    let w = chi_real(curve, x, side, ctx)?;
    Ok(curve.h_of_w(&w[sheet]))
}

/// `Υ_i = A_i/(χ − B_i)` on the given sheet.
pub fn upsilon(curve: &CurveData, i: usize, z: &XComplex, sheet: usize, ctx: &PrecisionContext) -> Result<XComplex> {
    check_sheet(sheet)?;
    if !(1..=2).contains(&i) {
        return Err(Error::Precondition(format!("component {i} is not 1 or 2")));
    }
    if curve.collapsed_sheet == Some(sheet) && curve.collapsed_sheet == Some(i) {
        return Err(Error::Domain(format!("sheet {sheet} has collapsed at c = {}", curve.c.to_f64())));
    }
    let w = chi_eval(curve, z, ctx)?;
    let (a, b) = if i == 1 { (&curve.a1, &curve.b1) } else { (&curve.a2, &curve.b2) };
    Ok(w[sheet].add_real(&-b.clone()).recip().scale(a))
}

fn check_sheet(sheet: usize) -> Result<()> {
    if sheet > 2 {
        return Err(Error::Precondition(format!("sheet {sheet} is not 0, 1 or 2")));
    }
    Ok(())
}
