use crate::precision::{find_root, PrecisionContext, XComplex, XReal};
use crate::{Error, Result};
use rug::Float;

/// `R(w) = w + A1/(w − B1) + A2/(w − B2)`, the inverse of the sheet-0 map.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseMap {
    pub a1: XReal,
    pub a2: XReal,
    pub b1: XReal,
    pub b2: XReal,
}

impl InverseMap {
    pub fn new(a1: XReal, a2: XReal, b1: XReal, b2: XReal) -> Self {
        Self { a1, a2, b1, b2 }
    }

    pub fn from_params(p: &[XReal]) -> Self {
        Self::new(p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone())
    }

    pub fn params(&self) -> [XReal; 4] {
        [self.a1.clone(), self.a2.clone(), self.b1.clone(), self.b2.clone()]
    }

    fn prec(&self) -> u32 {
        self.b1.prec()
    }

    fn offsets(&self, w: &XReal) -> (XReal, XReal) {
        let p = self.prec();
        (Float::with_val(p, w - &self.b1), Float::with_val(p, w - &self.b2))
    }

    pub fn eval(&self, w: &XReal) -> XReal {
        let (u1, u2) = self.offsets(w);
        Float::with_val(self.prec(), &self.a1 / u1) + Float::with_val(self.prec(), &self.a2 / u2) + w
    }

    /// `R′(w)`.
    pub fn d1(&self, w: &XReal) -> XReal {
        let p = self.prec();
        let (u1, u2) = self.offsets(w);
        let t1 = Float::with_val(p, &self.a1 / u1.square());
        let t2 = Float::with_val(p, &self.a2 / u2.square());
        Float::with_val(p, 1u32) - t1 - t2
    }

    /// `R″(w)`.
    pub fn d2(&self, w: &XReal) -> XReal {
        let p = self.prec();
        let (u1, u2) = self.offsets(w);
        let c1 = Float::with_val(p, u1.square_ref()) * &u1;
        let c2 = Float::with_val(p, u2.square_ref()) * &u2;
        let t1 = Float::with_val(p, &self.a1 / &c1);
        let t2 = Float::with_val(p, &self.a2 / &c2);
        (t1 + t2) * 2u32
    }

    pub fn eval_complex(&self, w: &XComplex) -> XComplex {
        let u1 = w.add_real(&Float::with_val(self.prec(), -&self.b1));
        let u2 = w.add_real(&Float::with_val(self.prec(), -&self.b2));
        w + &(u1.recip().scale(&self.a1) + u2.recip().scale(&self.a2))
    }

    pub fn d1_complex(&self, w: &XComplex) -> XComplex {
        let p = self.prec();
        let u1 = w.add_real(&Float::with_val(p, -&self.b1));
        let u2 = w.add_real(&Float::with_val(p, -&self.b2));
        let t = &(&u1 * &u1).recip().scale(&self.a1) + &(&u2 * &u2).recip().scale(&self.a2);
        (-t).add_real(&Float::with_val(p, 1u32))
    }

    /// `∂R/∂(A1, A2, B1, B2)` at `w`.
    pub fn param_gradient(&self, w: &XReal) -> [XReal; 4] {
        let p = self.prec();
        let (u1, u2) = self.offsets(w);
        let r1 = Float::with_val(p, u1.recip_ref());
        let r2 = Float::with_val(p, u2.recip_ref());
        let g3 = Float::with_val(p, r1.square_ref()) * &self.a1;
        let g4 = Float::with_val(p, r2.square_ref()) * &self.a2;
        [r1, r2, g3, g4]
    }

    /// `∂R′/∂(A1, A2, B1, B2)` at `w`.
    pub fn d1_param_gradient(&self, w: &XReal) -> [XReal; 4] {
        let p = self.prec();
        let (u1, u2) = self.offsets(w);
        let s1 = Float::with_val(p, u1.square_ref());
        let s2 = Float::with_val(p, u2.square_ref());
        let g1 = -Float::with_val(p, s1.recip_ref());
        let g2 = -Float::with_val(p, s2.recip_ref());
        let g3 = -Float::with_val(p, &self.a1 * 2u32) / (s1 * u1);
        let g4 = -Float::with_val(p, &self.a2 * 2u32) / (s2 * u2);
        [g1, g2, g3, g4]
    }

    /// Monic coefficients `[c0, c1, c2]` of
    /// `(w − z)(w − B1)(w − B2) + A1(w − B2) + A2(w − B1)`.
    pub fn cubic(&self, z: &XComplex) -> [XComplex; 3] {
        let p = self.prec();
        let sum_b = Float::with_val(p, &self.b1 + &self.b2);
        let prod_b = Float::with_val(p, &self.b1 * &self.b2);
        let c2 = -z.add_real(&sum_b);
        let c1 = z
            .scale(&sum_b)
            .add_real(&(Float::with_val(p, &prod_b + &self.a1) + &self.a2));
        let tail = Float::with_val(p, &self.a1 * &self.b2) + Float::with_val(p, &self.a2 * &self.b1);
        let c0 = -z.scale(&prod_b).add_real(&tail);
        [c0, c1, c2]
    }

    /// Ordered critical points `w1 < B1 < w2 ≤ w3 < B2 < w4`.
    ///
    /// Each root of `R′` is bracketed between a pole, where `R′ → −∞`, and a
    /// point where `R′` is provably positive.
    pub fn critical_points(&self, ctx: &PrecisionContext) -> Result<[XReal; 4]> {
        if !(self.a1 > 0 && self.a2 > 0 && self.b1 < self.b2) {
            return Err(Error::SolveFailure(format!(
                "inverse map parameters out of range: A = ({:e}, {:e}), B = ({}, {})",
                self.a1.to_f64(),
                self.a2.to_f64(),
                self.b1.to_f64(),
                self.b2.to_f64()
            )));
        }
        let p = ctx.bits();
        let tol = ctx.ulp_guard();
        let far = Float::with_val(p, &self.a1 + &self.a2).sqrt() * 2u32;
        let near1 = Float::with_val(p, self.a1.sqrt_ref()) / 2u32;
        let near2 = Float::with_val(p, self.a2.sqrt_ref()) / 2u32;
        let mid = Float::with_val(p, &self.b1 + &self.b2) / 2u32;
        if self.d1(&mid) <= 0 {
            return Err(Error::SolveFailure("inverse map has no real critical points between its poles".into()));
        }
        let f = |w: &XReal| self.d1(w);
        let w1 = find_root(
            f,
            &Float::with_val(p, &self.b1 - &far),
            &Float::with_val(p, &self.b1 - &near1),
            &tol,
            ctx,
        )?;
        let w2 = find_root(f, &Float::with_val(p, &self.b1 + &near1), &mid, &tol, ctx)?;
        let w3 = find_root(f, &mid, &Float::with_val(p, &self.b2 - &near2), &tol, ctx)?;
        let w4 = find_root(
            f,
            &Float::with_val(p, &self.b2 + &near2),
            &Float::with_val(p, &self.b2 + &far),
            &tol,
            ctx,
        )?;
        Ok([w1, w2, w3, w4])
    }

    /// Mirror image under `x ↦ −x`: poles and residues swap places.
    pub fn mirror(&self) -> Self {
        Self::new(self.a2.clone(), self.a1.clone(), -self.b2.clone(), -self.b1.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(ctx: &PrecisionContext) -> InverseMap {
        InverseMap::new(ctx.real(0.06), ctx.real(0.05), ctx.real(-1.4), ctx.real(1.5))
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let ctx = PrecisionContext::new(256).unwrap();
        let m = map(&ctx);
        let w = ctx.real(0.3);
        // Rounding (~1e-77/h) and truncation (~h²) both stay near 1e-50.
        let h = ctx.real(1e-25);
        let fd = (m.eval(&Float::with_val(256, &w + &h)) - m.eval(&Float::with_val(256, &w - &h))) / (h.clone() * 2u32);
        assert!((fd - m.d1(&w)).abs() < 1e-40);
        let fd2 = (m.d1(&Float::with_val(256, &w + &h)) - m.d1(&Float::with_val(256, &w - &h))) / (h * 2u32);
        assert!((fd2 - m.d2(&w)).abs() < 1e-40);
    }

    #[test]
    fn critical_points_are_ordered_zeros_of_the_derivative() {
        let ctx = PrecisionContext::new(256).unwrap();
        let m = map(&ctx);
        let w = m.critical_points(&ctx).unwrap();
        assert!(w[0] < m.b1 && m.b1 < w[1] && w[1] < w[2] && w[2] < m.b2 && m.b2 < w[3]);
        for x in &w {
            assert!(m.d1(x).abs() < 1e-60);
        }
    }

    #[test]
    fn cubic_vanishes_at_preimages() {
        let ctx = PrecisionContext::new(256).unwrap();
        let m = map(&ctx);
        let w = ctx.complex(0.2, 0.7);
        let z = m.eval_complex(&w);
        let [c0, c1, c2] = m.cubic(&z);
        let v = &(&(&(&w * &w) * &w) + &(&c2 * &(&w * &w))) + &(&(&c1 * &w) + &c0);
        assert!(v.abs() < 1e-60);
    }

    #[test]
    fn merged_poles_have_no_critical_gap() {
        let ctx = PrecisionContext::new(256).unwrap();
        let m = InverseMap::new(ctx.real(1.0), ctx.real(1.0), ctx.real(-0.1), ctx.real(0.1));
        assert!(matches!(m.critical_points(&ctx), Err(Error::SolveFailure(_))));
    }
}
