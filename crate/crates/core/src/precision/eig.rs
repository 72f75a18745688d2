use crate::{Error, Result};

/// Largest dimension accepted by [`sym_eig`].
pub const EIG_DIM_CAP: usize = 5000;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[k]` belongs to `values[k]`, when requested.
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Eigenvalues (and optionally eigenvectors) of a dense symmetric matrix
/// given by rows.
///
/// Householder reduction to tridiagonal form followed by implicit-shift QL.
pub fn sym_eig(s: &[Vec<f64>], want_vectors: bool) -> Result<SymEigen> {
    let n = s.len();
    if n > EIG_DIM_CAP {
        return Err(Error::Shape(format!("dimension {n} exceeds the cap {EIG_DIM_CAP}")));
    }
    if s.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("matrix is not square".into()));
    }
    let big = s
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if !big.is_finite() {
        return Err(Error::Shape("non-finite entry".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if (s[i][j] - s[j][i]).abs() > 1e-12 * big {
                return Err(Error::Shape(format!("asymmetric at ({i}, {j})")));
            }
        }
    }
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }

    let mut a: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(0.5 * (s[i][j] + s[j][i]));
        }
    }
    let (mut d, mut e, mut z) = tridiagonalize(a, n, want_vectors);
    tql(&mut d, &mut e, z.as_mut(), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        order
            .iter()
            .map(|&k| (0..n).map(|r| z[r * n + k]).collect())
            .collect()
    });
    Ok(SymEigen { values, vectors })
}

/// Householder reduction of a full row-major symmetric matrix.
///
/// Returns diagonal `d`, off-diagonal `e` (`e[k]` couples `k` and `k+1`,
/// `e[n-1] = 0`) and, if requested, the orthogonal factor `Q` (row-major)
/// with `A = Q T Qᵀ`.
fn tridiagonalize(mut a: Vec<f64>, n: usize, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<Vec<f64>>) {
    let mut e = vec![0.0; n];
    let mut reflectors: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<f64> = a[k * n + k + 1..k * n + n].to_vec();
        let sigma = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sigma == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let alpha = if x[0] > 0.0 { -sigma } else { sigma };
        let mut v = x;
        v[0] -= alpha;
        // alpha has the opposite sign of x[0], so v ≠ 0 here.
        let vtv: f64 = v.iter().map(|t| t * t).sum();
        let tau = 2.0 / vtv;
        e[k] = alpha;

        // p = τ T v on the trailing block T = A[k+1.., k+1..].
        let base = k + 1;
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + n];
            p[i] = tau * row.iter().zip(&v).map(|(r, vi)| r * vi).sum::<f64>();
        }
        let kk = 0.5 * tau * v.iter().zip(&p[..m]).map(|(vi, pi)| vi * pi).sum::<f64>();
        for i in 0..m {
            p[i] -= kk * v[i];
        }
        for i in 0..m {
            let (vi, qi) = (v[i], p[i]);
            let row = &mut a[(base + i) * n + base..(base + i) * n + n];
            for ((r, vj), qj) in row.iter_mut().zip(&v).zip(&p[..m]) {
                *r -= vi * qj + qi * vj;
            }
        }
        // Row/column k now hold (alpha, 0, ..., 0) off the diagonal.
        a[k * n + base] = alpha;
        a[base * n + k] = alpha;
        for j in base + 1..n {
            a[k * n + j] = 0.0;
            a[j * n + k] = 0.0;
        }
        if want_q {
            reflectors.push((base, v, tau));
        }
    }
    if n >= 2 {
        e[n - 2] = a[(n - 2) * n + n - 1];
    }
    let d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();

    let q = want_q.then(|| {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        let mut w = vec![0.0; n];
        for (base, v, tau) in reflectors.iter().rev() {
            w.iter_mut().for_each(|x| *x = 0.0);
            for (i, vi) in v.iter().enumerate() {
                let row = &q[(base + i) * n..(base + i + 1) * n];
                for (wj, rj) in w.iter_mut().zip(row) {
                    *wj += vi * rj;
                }
            }
            for (i, vi) in v.iter().enumerate() {
                let row = &mut q[(base + i) * n..(base + i + 1) * n];
                for (rj, wj) in row.iter_mut().zip(&w) {
                    *rj -= tau * vi * wj;
                }
            }
        }
        q
    });
    (d, e, q)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating the
/// rotations into `z` (row-major, columns are eigenvectors) when given.
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<f64>>, n: usize) -> Result<()> {
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Shape(format!("QL iteration stalled at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zi1 = z[k * n + i + 1];
                        let zi = z[k * n + i];
                        z[k * n + i + 1] = s * zi + c * zi1;
                        z[k * n + i] = c * zi - s * zi1;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_sorted() {
        let s = vec![vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]];
        assert_eq!(sym_eig(&s, false).unwrap().values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix() {
        let v = sym_eig(&[vec![0.0, 1.0], vec![1.0, 0.0]], false).unwrap().values;
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn free_path_closed_form() {
        let n = 40;
        let mut s = vec![vec![0.0; n]; n];
        for i in 0..n - 1 {
            s[i][i + 1] = 1.0;
            s[i + 1][i] = 1.0;
        }
        let v = sym_eig(&s, false).unwrap().values;
        let mut want: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in v.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn vectors_diagonalize() {
        let s = vec![
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ];
        let eig = sym_eig(&s, true).unwrap();
        let vecs = eig.vectors.unwrap();
        for (lam, v) in eig.values.iter().zip(&vecs) {
            for i in 0..4 {
                let sv: f64 = (0..4).map(|j| s[i][j] * v[j]).sum();
                assert!((sv - lam * v[i]).abs() < 1e-12);
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = (0..4).map(|k| vecs[i][k] * vecs[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymmetry_is_rejected() {
        let s = vec![vec![1.0, 2.0], vec![2.1, 1.0]];
        assert!(matches!(sym_eig(&s, false), Err(Error::Shape(_))));
    }

    #[test]
    fn oversize_is_rejected() {
        let s = vec![vec![0.0; 1]; EIG_DIM_CAP + 1];
        assert!(matches!(sym_eig(&s, false), Err(Error::Shape(_))));
    }
}
