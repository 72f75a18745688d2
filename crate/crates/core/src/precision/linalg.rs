use super::{PrecisionContext, XReal};
use crate::{Error, Result};
use rug::Float;

/// Solves `A x = b` by Gaussian elimination with scaled partial pivoting.
///
/// Returns the solution and `max |A x − b|` recomputed from the original
/// matrix. A pivot whose size relative to its row scale drops below the
/// context tolerance is reported as [`Error::SingularSystem`].
pub fn solve_dense(a: &[Vec<XReal>], b: &[XReal], ctx: &PrecisionContext) -> Result<(Vec<XReal>, XReal)> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Shape(format!("expected a square system of size {n}")));
    }
    let bits = ctx.bits();
    let mut m: Vec<Vec<XReal>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r: Vec<XReal> = row.iter().map(|x| ctx.round(x)).collect();
            r.push(ctx.round(bi));
            r
        })
        .collect();
    let scale: Vec<XReal> = a.iter().map(|row| super::max_abs(row, bits)).collect();
    if let Some(i) = scale.iter().position(|s| s.is_zero()) {
        return Err(Error::SingularSystem { column: i, pivot: 0.0 });
    }
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut best = k;
        let mut best_val = ctx.zero();
        for i in k..n {
            let v = Float::with_val(bits, m[i][k].abs_ref()) / &scale[perm[i]];
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        if best_val <= *ctx.tol() {
            return Err(Error::SingularSystem {
                column: k,
                pivot: best_val.to_f64(),
            });
        }
        m.swap(k, best);
        perm.swap(k, best);
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let factor = Float::with_val(bits, &row[k] / &pivot_row[k]);
            for j in k + 1..=n {
                row[j] -= &factor * &pivot_row[j];
            }
            row[k] = Float::new(bits);
        }
    }

    let mut x = vec![ctx.zero(); n];
    for i in (0..n).rev() {
        let mut s = m[i][n].clone();
        for j in i + 1..n {
            s -= &m[i][j] * &x[j];
        }
        x[i] = s / &m[i][i];
    }

    let mut residual = ctx.zero();
    for (row, bi) in a.iter().zip(b) {
        let mut r = -ctx.round(bi);
        for (aij, xj) in row.iter().zip(&x) {
            r += aij * xj;
        }
        let r = r.abs();
        if r > residual {
            residual = r;
        }
    }
    Ok((x, residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(ctx: &PrecisionContext, rows: &[&[f64]]) -> Vec<Vec<XReal>> {
        rows.iter().map(|r| r.iter().map(|&x| ctx.real(x)).collect()).collect()
    }

    #[test]
    fn identity_and_diagonal() {
        let ctx = PrecisionContext::new(128).unwrap();
        let (x, res) = solve_dense(&mat(&ctx, &[&[1.0, 0.0], &[0.0, 1.0]]), &[ctx.real(1), ctx.real(2)], &ctx).unwrap();
        assert_eq!((x[0].to_f64(), x[1].to_f64()), (1.0, 2.0));
        assert!(res.is_zero());
        let (x, _) = solve_dense(&mat(&ctx, &[&[2.0, 0.0], &[0.0, 4.0]]), &[ctx.real(2), ctx.real(4)], &ctx).unwrap();
        assert_eq!((x[0].to_f64(), x[1].to_f64()), (1.0, 1.0));
    }

    #[test]
    fn hilbert_eight_recovers_ones() {
        let ctx = PrecisionContext::new(256).unwrap();
        let n = 8;
        let a: Vec<Vec<XReal>> = (0..n)
            .map(|i| (0..n).map(|j| ctx.one() / (i + j + 1) as u32).collect())
            .collect();
        let b: Vec<XReal> = a.iter().map(|r| r.iter().fold(ctx.zero(), |s, x| s + x)).collect();
        let (x, res) = solve_dense(&a, &b, &ctx).unwrap();
        for xi in &x {
            assert!(Float::with_val(256, xi - 1u32).abs() < 1e-40);
        }
        assert!(res < 1e-70);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let ctx = PrecisionContext::new(128).unwrap();
        let a = mat(&ctx, &[&[1.0, 2.0], &[2.0, 4.0]]);
        let e = solve_dense(&a, &[ctx.one(), ctx.one()], &ctx);
        assert!(matches!(e, Err(Error::SingularSystem { column: 1, .. })));
    }

    #[test]
    fn non_square_is_a_shape_error() {
        let ctx = PrecisionContext::new(128).unwrap();
        let a = vec![vec![ctx.one(), ctx.one()]];
        assert!(matches!(solve_dense(&a, &[ctx.one()], &ctx), Err(Error::Shape(_))));
    }
}
