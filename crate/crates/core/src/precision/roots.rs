use super::{PrecisionContext, XReal};
use crate::{Error, Result};
use rug::Float;

#[derive(PartialEq)]
enum Side {
    None,
    Lo,
    Hi,
}

/// Bracketed root of `f` on `[lo, hi]`.
///
/// Illinois-modified regula falsi with a bisection fallback whenever the
/// bracket fails to halve over two consecutive steps. Stops when `|f| ≤ tol`
/// or when the bracket is narrower than `tol · max(1, |x|)`.
pub fn find_root<F>(mut f: F, lo: &XReal, hi: &XReal, tol: &XReal, ctx: &PrecisionContext) -> Result<XReal>
where
    F: FnMut(&XReal) -> XReal,
{
    let bits = ctx.bits();
    let mut lo = ctx.round(lo);
    let mut hi = ctx.round(hi);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut flo = checked(f(&lo), &lo)?;
    let mut fhi = checked(f(&hi), &hi)?;
    if flo.is_zero() {
        return Ok(lo);
    }
    if fhi.is_zero() {
        return Ok(hi);
    }
    if flo.is_sign_negative() == fhi.is_sign_negative() {
        return Err(Error::Bracket {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
        });
    }

    let mut side = Side::None;
    let mut width = Float::with_val(bits, &hi - &lo);
    let mut slow = 0;
    let mut x = Float::with_val(bits, &lo + &hi) / 2u32;
    for _ in 0..8 * bits as usize {
        x = if slow >= 2 {
            slow = 0;
            Float::with_val(bits, &lo + &hi) / 2u32
        } else {
            let num = Float::with_val(bits, &lo * &fhi) - Float::with_val(bits, &hi * &flo);
            let den = Float::with_val(bits, &fhi - &flo);
            let cand = num / den;
            if cand.is_finite() && cand > lo && cand < hi {
                cand
            } else {
                Float::with_val(bits, &lo + &hi) / 2u32
            }
        };
        let fx = checked(f(&x), &x)?;
        if Float::with_val(bits, fx.abs_ref()) <= *tol {
            return Ok(x);
        }
        if fx.is_sign_negative() == flo.is_sign_negative() {
            lo = x.clone();
            flo = fx;
            if side == Side::Lo {
                fhi /= 2u32;
            }
            side = Side::Lo;
        } else {
            hi = x.clone();
            fhi = fx;
            if side == Side::Hi {
                flo /= 2u32;
            }
            side = Side::Hi;
        }
        let new_width = Float::with_val(bits, &hi - &lo);
        let mag = Float::with_val(bits, x.abs_ref()).max(&ctx.one());
        if new_width <= Float::with_val(bits, tol * &mag) {
            return Ok(x);
        }
        if new_width > Float::with_val(bits, &width / 2u32) {
            slow += 1;
        } else {
            slow = 0;
        }
        width = new_width;
    }
    Ok(x)
}

fn checked(v: XReal, at: &XReal) -> Result<XReal> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(at.to_f64().to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let ctx = PrecisionContext::new(256).unwrap();
        let tol = ctx.ulp_guard();
        let r = find_root(
            |x| Float::with_val(256, x * x) - 2u32,
            &ctx.real(1),
            &ctx.real(2),
            &tol,
            &ctx,
        )
        .unwrap();
        let err = Float::with_val(256, &r - ctx.real(2).sqrt()).abs();
        assert!(err < 1e-70);
    }

    #[test]
    fn identity_and_cosine() {
        let ctx = PrecisionContext::new(256).unwrap();
        let tol = ctx.ulp_guard();
        let r = find_root(|x| x.clone(), &ctx.real(-1), &ctx.real(1), &tol, &ctx).unwrap();
        assert!(r.to_f64().abs() < 1e-70);
        let r = find_root(|x| x.clone().cos(), &ctx.real(1), &ctx.real(2), &tol, &ctx).unwrap();
        let err = Float::with_val(256, &r - ctx.pi() / 2u32).abs();
        assert!(err < 1e-70);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        let ctx = PrecisionContext::new(128).unwrap();
        let tol = ctx.tol().clone();
        let e = find_root(|x| Float::with_val(128, x * x) + 1u32, &ctx.real(-1), &ctx.real(1), &tol, &ctx);
        assert!(matches!(e, Err(Error::Bracket { .. })));
    }
}
