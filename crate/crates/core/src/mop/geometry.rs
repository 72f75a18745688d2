use crate::precision::{real_roots_in, Poly, PrecisionContext, XComplex, XReal};
use crate::{Error, Result};
use rug::Float;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Two disjoint real intervals `[α1, β1]` and `[α2, β2]` with `β1 < α2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub alpha1: XReal,
    pub beta1: XReal,
    pub alpha2: XReal,
    pub beta2: XReal,
}

impl Geometry {
    pub fn new(alpha1: XReal, beta1: XReal, alpha2: XReal, beta2: XReal) -> Result<Self> {
        let all_finite = [&alpha1, &beta1, &alpha2, &beta2].iter().all(|x| x.is_finite());
        if !all_finite || !(alpha1 < beta1 && beta1 < alpha2 && alpha2 < beta2) {
            return Err(Error::InvalidGeometry(format!(
                "endpoints must satisfy a1 < b1 < a2 < b2, got ({}, {}, {}, {})",
                alpha1.to_f64(),
                beta1.to_f64(),
                alpha2.to_f64(),
                beta2.to_f64()
            )));
        }
        Ok(Self { alpha1, beta1, alpha2, beta2 })
    }

    /// Parses four decimal endpoints at context precision.
    pub fn parse(points: [&str; 4], ctx: &PrecisionContext) -> Result<Self> {
        Self::new(
            ctx.parse(points[0])?,
            ctx.parse(points[1])?,
            ctx.parse(points[2])?,
            ctx.parse(points[3])?,
        )
    }

    pub fn from_f64(points: [f64; 4], ctx: &PrecisionContext) -> Result<Self> {
        Self::new(ctx.real(points[0]), ctx.real(points[1]), ctx.real(points[2]), ctx.real(points[3]))
    }

    /// Reference geometry `[-2, -1] ∪ [1, 2]`.
    pub fn reference(ctx: &PrecisionContext) -> Self {
        Self::from_f64([-2.0, -1.0, 1.0, 2.0], ctx).expect("reference geometry is ordered")
    }

    pub fn prec(&self) -> u32 {
        self.alpha1.prec()
    }

    /// Endpoints of interval `i ∈ {1, 2}`.
    pub fn interval(&self, i: usize) -> (&XReal, &XReal) {
        match i {
            1 => (&self.alpha1, &self.beta1),
            2 => (&self.alpha2, &self.beta2),
            _ => panic!("interval index must be 1 or 2, got {i}"),
        }
    }

    pub fn points(&self) -> [&XReal; 4] {
        [&self.alpha1, &self.beta1, &self.alpha2, &self.beta2]
    }

    pub fn midpoint(&self, i: usize) -> XReal {
        let (a, b) = self.interval(i);
        Float::with_val(a.prec(), a + b) / 2u32
    }

    pub fn half_length(&self, i: usize) -> XReal {
        let (a, b) = self.interval(i);
        Float::with_val(a.prec(), b - a) / 2u32
    }

    /// Closed-interval membership.
    pub fn contains(&self, i: usize, x: &XReal) -> bool {
        let (a, b) = self.interval(i);
        a <= x && x <= b
    }

    /// Image under `x ↦ −x` (the intervals swap roles).
    pub fn mirror(&self) -> Self {
        Self {
            alpha1: -self.beta2.clone(),
            beta1: -self.alpha2.clone(),
            alpha2: -self.beta1.clone(),
            beta2: -self.alpha1.clone(),
        }
    }

    /// True when the geometry is invariant under `x ↦ −x`.
    pub fn is_symmetric(&self) -> bool {
        Float::with_val(self.prec(), &self.alpha1 + &self.beta2).is_zero()
            && Float::with_val(self.prec(), &self.beta1 + &self.alpha2).is_zero()
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.points().map(|x| x.to_f64())
    }
}

/// Shape of a density on its interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coeffs", rename_all = "snake_case")]
pub enum WeightKind {
    /// Density identically one.
    Constant,
    /// Density `p(x)` with ascending decimal coefficients; must stay positive.
    PositivePoly(Vec<String>),
    /// Density `exp(q(x))` with ascending decimal coefficients.
    ExpPoly(Vec<String>),
}

/// Analytic positive density of the measure attached to one interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub interval: usize,
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Constant => write!(f, "const"),
            WeightKind::PositivePoly(c) => write!(f, "poly:{}", c.join(",")),
            WeightKind::ExpPoly(c) => write!(f, "exppoly:{}", c.join(",")),
        }
    }
}

impl WeightSpec {
    pub fn lebesgue(interval: usize) -> Self {
        Self {
            kind: WeightKind::Constant,
            interval,
        }
    }

    pub fn poly(interval: usize, coeffs: &[&str]) -> Self {
        Self {
            kind: WeightKind::PositivePoly(coeffs.iter().map(|s| s.to_string()).collect()),
            interval,
        }
    }

    pub fn exp_poly(interval: usize, coeffs: &[&str]) -> Self {
        Self {
            kind: WeightKind::ExpPoly(coeffs.iter().map(|s| s.to_string()).collect()),
            interval,
        }
    }

    /// Parses `const`, `poly:c0,c1,...` or `exppoly:c0,c1,...`.
    pub fn parse(s: &str, interval: usize) -> Result<Self> {
        let s = s.trim();
        let coeffs = |body: &str| -> Result<Vec<String>> {
            let c: Vec<String> = body.split(',').map(|t| t.trim().to_string()).collect();
            if c.iter().any(|t| t.is_empty() || rug::Float::parse(t).is_err() && !t.contains('/')) {
                return Err(Error::Parse(format!("bad coefficient list {body:?}")));
            }
            Ok(c)
        };
        let kind = if s == "const" {
            WeightKind::Constant
        } else if let Some(body) = s.strip_prefix("poly:") {
            WeightKind::PositivePoly(coeffs(body)?)
        } else if let Some(body) = s.strip_prefix("exppoly:") {
            WeightKind::ExpPoly(coeffs(body)?)
        } else {
            return Err(Error::Parse(format!("unknown weight descriptor {s:?}")));
        };
        Ok(Self { kind, interval })
    }

    /// Polynomial part (`p` for `PositivePoly`, `q` for `ExpPoly`).
    pub fn poly_part(&self, ctx: &PrecisionContext) -> Result<Option<Poly>> {
        let parse = |c: &[String]| -> Result<Poly> {
            let v = c.iter().map(|s| ctx.parse(s)).collect::<Result<Vec<_>>>()?;
            Ok(Poly::new(v, ctx.bits()))
        };
        Ok(match &self.kind {
            WeightKind::Constant => None,
            WeightKind::PositivePoly(c) | WeightKind::ExpPoly(c) => Some(parse(c)?),
        })
    }

    pub fn poly_degree(&self) -> usize {
        match &self.kind {
            WeightKind::Constant => 0,
            WeightKind::PositivePoly(c) | WeightKind::ExpPoly(c) => c.len().saturating_sub(1),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        !matches!(self.kind, WeightKind::ExpPoly(_))
    }

    /// Checks that the density is positive on a neighbourhood of its
    /// interval (margin 1% of the length on each side).
    pub fn validate(&self, geometry: &Geometry, ctx: &PrecisionContext) -> Result<()> {
        if !(1..=2).contains(&self.interval) {
            return Err(Error::InvalidWeight(format!("interval index {} not in {{1, 2}}", self.interval)));
        }
        let Some(p) = self.poly_part(ctx)? else {
            return Ok(());
        };
        if let WeightKind::PositivePoly(_) = self.kind {
            let (a, b) = geometry.interval(self.interval);
            let margin = Float::with_val(ctx.bits(), b - a) / 100u32;
            let lo = Float::with_val(ctx.bits(), a - &margin);
            let hi = Float::with_val(ctx.bits(), b + &margin);
            if p.is_zero() || !real_roots_in(&p, &lo, &hi, ctx).is_empty() || p.eval(&lo) <= 0 {
                return Err(Error::InvalidWeight(format!(
                    "polynomial density {self} is not positive near interval {}",
                    self.interval
                )));
            }
        }
        Ok(())
    }

    /// Density evaluator at context precision.
    pub fn density_fn(&self, ctx: &PrecisionContext) -> Result<Density> {
        Ok(Density {
            kind: match &self.kind {
                WeightKind::Constant => DensityKind::One,
                WeightKind::PositivePoly(_) => DensityKind::Poly(self.poly_part(ctx)?.expect("poly")),
                WeightKind::ExpPoly(_) => DensityKind::Exp(self.poly_part(ctx)?.expect("poly")),
            },
            prec: ctx.bits(),
        })
    }
}

#[derive(Clone, Debug)]
enum DensityKind {
    One,
    Poly(Poly),
    Exp(Poly),
}

/// Parsed density, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Density {
    kind: DensityKind,
    prec: u32,
}

impl Density {
    pub fn eval(&self, x: &XReal) -> XReal {
        match &self.kind {
            DensityKind::One => Float::with_val(self.prec, 1),
            DensityKind::Poly(p) => p.eval(x),
            DensityKind::Exp(q) => q.eval(x).exp(),
        }
    }

    /// `log μ'(x)` for real `x` in the interval.
    pub fn log_eval(&self, x: &XReal) -> XReal {
        match &self.kind {
            DensityKind::One => Float::new(self.prec),
            DensityKind::Poly(p) => p.eval(x).ln(),
            DensityKind::Exp(q) => q.eval(x),
        }
    }

    /// A holomorphic branch of `log μ'` near the interval.
    pub fn log_eval_complex(&self, z: &XComplex) -> XComplex {
        match &self.kind {
            DensityKind::One => XComplex::zero(self.prec),
            DensityKind::Poly(p) => p.eval_complex(z).ln(),
            DensityKind::Exp(q) => q.eval_complex(z),
        }
    }

    /// Polynomial degree of the evaluator (0 for the unit density).
    pub fn degree(&self) -> usize {
        match &self.kind {
            DensityKind::One => 0,
            DensityKind::Poly(p) | DensityKind::Exp(p) => p.degree().unwrap_or(0),
        }
    }
}

/// Multi-index `(n1, n2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub n1: usize,
    pub n2: usize,
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n1, self.n2)
    }
}

impl MultiIndex {
    pub const fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }

    pub fn size(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn get(&self, i: usize) -> usize {
        match i {
            1 => self.n1,
            2 => self.n2,
            _ => panic!("component index must be 1 or 2, got {i}"),
        }
    }

    /// `n + e_i`.
    pub fn plus(&self, i: usize) -> Self {
        match i {
            1 => Self::new(self.n1 + 1, self.n2),
            2 => Self::new(self.n1, self.n2 + 1),
            _ => panic!("component index must be 1 or 2, got {i}"),
        }
    }

    /// `n − e_i`, if it stays nonnegative.
    pub fn minus(&self, i: usize) -> Option<Self> {
        match i {
            1 => self.n1.checked_sub(1).map(|n1| Self::new(n1, self.n2)),
            2 => self.n2.checked_sub(1).map(|n2| Self::new(self.n1, n2)),
            _ => panic!("component index must be 1 or 2, got {i}"),
        }
    }

    /// `n1 / |n|` (undefined at the origin).
    pub fn ratio(&self) -> Option<f64> {
        (self.size() > 0).then(|| self.n1 as f64 / self.size() as f64)
    }

    /// `1 / min(n1, n2)` when both components are positive.
    pub fn epsilon(&self) -> Option<f64> {
        let m = self.n1.min(self.n2);
        (m > 0).then(|| 1.0 / m as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_enforced() {
        let ctx = PrecisionContext::new(128).unwrap();
        assert!(Geometry::from_f64([-2.0, -1.0, 1.0, 2.0], &ctx).is_ok());
        assert!(matches!(
            Geometry::from_f64([-2.0, 1.5, 1.0, 2.0], &ctx),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(Geometry::reference(&ctx).is_symmetric());
        assert_eq!(Geometry::reference(&ctx).mirror(), Geometry::reference(&ctx));
    }

    #[test]
    fn weight_descriptors_round_trip() {
        for s in ["const", "poly:1,0.5", "exppoly:0,-0.25,0.125"] {
            assert_eq!(WeightSpec::parse(s, 1).unwrap().to_string(), s);
        }
        assert!(WeightSpec::parse("gauss", 1).is_err());
        assert!(WeightSpec::parse("poly:1,x", 1).is_err());
    }

    #[test]
    fn polynomial_weight_must_stay_positive() {
        let ctx = PrecisionContext::new(128).unwrap();
        let g = Geometry::reference(&ctx);
        assert!(WeightSpec::poly(2, &["3", "-1"]).validate(&g, &ctx).is_ok());
        // 1.5 - x vanishes inside [1, 2].
        assert!(matches!(
            WeightSpec::poly(2, &["1.5", "-1"]).validate(&g, &ctx),
            Err(Error::InvalidWeight(_))
        ));
        // 2.01 - x vanishes inside the margin only.
        assert!(WeightSpec::poly(2, &["2.005", "-1"]).validate(&g, &ctx).is_err());
        assert!(WeightSpec::poly(1, &["-1"]).validate(&g, &ctx).is_err());
    }

    #[test]
    fn multi_index_arithmetic() {
        let n = MultiIndex::new(2, 3);
        assert_eq!(n.size(), 5);
        assert_eq!(n.plus(1), MultiIndex::new(3, 3));
        assert_eq!(MultiIndex::new(0, 3).minus(1), None);
        assert_eq!(n.ratio(), Some(0.4));
        assert_eq!(n.epsilon(), Some(0.5));
        assert_eq!(MultiIndex::new(0, 3).epsilon(), None);
    }
}
