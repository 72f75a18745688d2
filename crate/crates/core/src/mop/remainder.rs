use super::{AngelescoSystem, MopSolution, MultiIndex};
use crate::precision::{gauss_legendre, Poly, XComplex, XReal};
use crate::{Error, Result};

impl AngelescoSystem {
    fn cauchy(&self, poly: &Poly, i: usize, z: &XComplex) -> Result<XComplex> {
        let (a, b) = self.geometry.interval(i);
        if z.is_real() && self.geometry.contains(i, &z.re) {
            return Err(Error::Domain(format!("z = {} lies on interval {i}", z.re.to_f64())));
        }
        let density = self.weights[i - 1].density_fn(&self.ctx)?;
        let deg = poly.degree().unwrap_or(0) + density.degree();
        let rule = gauss_legendre(64 + 2 * deg, &self.ctx);
        rule.integrate_complex(
            |x| {
                let num = poly.eval(x) * density.eval(x);
                let den = z.add_real(&-x.clone());
                den.recip().scale(&num)
            },
            a,
            b,
        )
    }

    /// `R_n^{(i)}(z) = ∫ P_n(x)/(z−x) dμ_i(x)` for `z` off `Δ_i`.
    pub fn remainder_eval(&self, sol: &MopSolution, i: usize, z: &XComplex) -> Result<XComplex> {
        self.cauchy(&sol.p_monic, i, z)
    }

    /// `L_n(z) = ∫ Q_n(x)/(z−x)` for `z` off both intervals.
    pub fn linear_form_eval(&self, sol: &MopSolution, z: &XComplex) -> Result<XComplex> {
        for i in 1..=2 {
            if z.is_real() && self.geometry.contains(i, &z.re) {
                return Err(Error::Domain(format!("z = {} lies on interval {i}", z.re.to_f64())));
            }
        }
        let mut acc = XComplex::zero(self.ctx.bits());
        for i in 1..=2 {
            if let Some(a) = sol.a_poly(i) {
                acc += &self.cauchy(a, i, z)?;
            }
        }
        Ok(acc)
    }

    /// Least-squares slope of `log|f(z)|` against `log|z|` over real probes.
    pub fn decay_slope<F>(&self, probes: &[f64], mut f: F) -> Result<f64>
    where
        F: FnMut(&XComplex) -> Result<XComplex>,
    {
        let mut pts = Vec::with_capacity(probes.len());
        for &x in probes {
            let z = self.ctx.complex(x, 0.0);
            let v: XReal = f(&z)?.abs();
            pts.push((x.abs().ln(), v.ln().to_f64()));
        }
        Ok(least_squares_slope(&pts))
    }

    pub fn remainder_slope(&self, n: MultiIndex, i: usize, probes: &[f64]) -> Result<f64> {
        let sol = self.solve(n)?;
        self.decay_slope(probes, |z| self.remainder_eval(&sol, i, z))
    }

    pub fn linear_form_slope(&self, n: MultiIndex, probes: &[f64]) -> Result<f64> {
        let sol = self.solve(n)?;
        self.decay_slope(probes, |z| self.linear_form_eval(&sol, z))
    }
}

/// Ordinary least-squares slope of `(x, y)` points.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;

    fn sys() -> AngelescoSystem {
        AngelescoSystem::reference(6, &PrecisionContext::new(256).unwrap()).unwrap()
    }

    #[test]
    fn total_mass_at_infinity() {
        let s = sys();
        let sol = s.solve(MultiIndex::new(0, 0)).unwrap();
        let z = s.ctx.complex(1e12, 0.0);
        let r = s.remainder_eval(&sol, 2, &z).unwrap();
        let zr = &r * &z;
        assert!((zr.re.to_f64() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn conjugate_symmetry() {
        let s = sys();
        let sol = s.solve(MultiIndex::new(2, 1)).unwrap();
        let z = s.ctx.complex(0.3, 0.8);
        let r = s.remainder_eval(&sol, 1, &z).unwrap();
        let rc = s.remainder_eval(&sol, 1, &z.conj()).unwrap();
        assert!((&r.conj() - &rc).abs() < 1e-70);
        let l = s.linear_form_eval(&sol, &z).unwrap();
        let lc = s.linear_form_eval(&sol, &z.conj()).unwrap();
        assert!((&l.conj() - &lc).abs() < 1e-70);
    }

    #[test]
    fn points_on_the_interval_are_rejected() {
        let s = sys();
        let sol = s.solve(MultiIndex::new(1, 1)).unwrap();
        let z = s.ctx.complex(-1.5, 0.0);
        assert!(matches!(s.remainder_eval(&sol, 1, &z), Err(Error::Domain(_))));
        assert!(s.remainder_eval(&sol, 2, &z).is_ok());
        assert!(matches!(s.linear_form_eval(&sol, &z), Err(Error::Domain(_))));
    }

    #[test]
    fn first_linear_form_decays_like_one_over_z() {
        let s = sys();
        let slope = s.linear_form_slope(MultiIndex::new(1, 0), &[1e3, 2e3, 4e3]).unwrap();
        assert!((slope + 1.0).abs() < 1e-3);
    }

    #[test]
    fn remainder_slope_at_moderate_z_is_frozen() {
        // Finite-z slope over {10, 20, 40} for (2,2) on the first interval;
        // the interval offset keeps it visibly above the asymptotic −3.
        let s = sys();
        let slope = s.remainder_slope(MultiIndex::new(2, 2), 1, &[10.0, 20.0, 40.0]).unwrap();
        assert!((slope + 2.77633).abs() < 1e-4, "slope {slope}");
    }
}
