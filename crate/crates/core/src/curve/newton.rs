use crate::precision::{max_abs, solve_dense, PrecisionContext, XReal};
use crate::{Error, Result};
use rug::Float;

/// Residual vector and Jacobian at a point.
pub(crate) type Linearization = (Vec<XReal>, Vec<Vec<XReal>>);

/// Damped Newton iteration.
///
/// Steps are halved until the max-norm residual decreases; evaluation
/// errors at a trial point (parameters leaving their admissible range)
/// count as a rejected step. Converges once the residual is within a few
/// ulps of `scale`, and accepts a stalled iterate only if its residual is
/// below `ctx.tol() · scale`.
pub(crate) fn damped_newton<F>(x0: Vec<XReal>, mut system: F, scale: &XReal, ctx: &PrecisionContext) -> Result<(Vec<XReal>, XReal)>
where
    F: FnMut(&[XReal]) -> Result<Linearization>,
{
    let bits = ctx.bits();
    let done = Float::with_val(bits, ctx.eps_pow(bits as i32 - 24) * scale);
    let accept = Float::with_val(bits, ctx.tol() * scale);
    let mut x = x0;
    let (mut f, mut jac) = system(&x)?;
    let mut norm = max_abs(&f, bits);
    for _ in 0..200 {
        if norm <= done {
            return Ok((x, norm));
        }
        let rhs: Vec<XReal> = f.iter().map(|v| -v.clone()).collect();
        let (dx, _) = solve_dense(&jac, &rhs, ctx).map_err(|e| Error::SolveFailure(format!("Newton step: {e}")))?;
        let mut lambda = ctx.one();
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<XReal> = x.iter().zip(&dx).map(|(xi, di)| Float::with_val(bits, di * &lambda) + xi).collect();
            if let Ok((ft, jt)) = system(&trial) {
                let nt = max_abs(&ft, bits);
                if nt < norm {
                    accepted = Some((trial, ft, jt, nt));
                    break;
                }
            }
            lambda /= 2u32;
        }
        match accepted {
            Some((xt, ft, jt, nt)) => {
                x = xt;
                f = ft;
                jac = jt;
                norm = nt;
            }
            None if norm <= accept => return Ok((x, norm)),
            None => {
                return Err(Error::SolveFailure(format!(
                    "Newton stalled with residual {:e}",
                    norm.to_f64()
                )))
            }
        }
    }
    if norm <= accept {
        Ok((x, norm))
    } else {
        Err(Error::SolveFailure(format!("Newton did not converge (residual {:e})", norm.to_f64())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_polynomial_system() {
        let ctx = PrecisionContext::new(256).unwrap();
        // x² + y² = 4, x·y = 1.
        let sys = |v: &[XReal]| -> Result<Linearization> {
            let (x, y) = (&v[0], &v[1]);
            let f0 = Float::with_val(256, x * x) + Float::with_val(256, y * y) - 4u32;
            let f1 = Float::with_val(256, x * y) - 1u32;
            let jac = vec![
                vec![Float::with_val(256, x * 2u32), Float::with_val(256, y * 2u32)],
                vec![y.clone(), x.clone()],
            ];
            Ok((vec![f0, f1], jac))
        };
        let (x, r) = damped_newton(vec![ctx.real(2.0), ctx.real(0.3)], sys, &ctx.one(), &ctx).unwrap();
        assert!(r < 1e-70);
        let want = (ctx.real(2u32) + ctx.real(3u32).sqrt()).sqrt();
        assert!((x[0].clone() - want).abs() < 1e-70);
    }
}
