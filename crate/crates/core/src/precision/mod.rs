//! Extended-precision kernel.
//!
//! Reals are MPFR floats (correctly rounded at the context precision);
//! complex numbers are a thin pair of them. Everything created under one
//! [`PrecisionContext`] shares a mantissa width, so results are
//! bit-reproducible for a fixed width.

mod complex;
mod eig;
mod linalg;
mod poly;
mod quad;
mod roots;

pub use complex::XComplex;
pub use eig::{sym_eig, SymEigen, EIG_DIM_CAP};
pub use linalg::solve_dense;
pub use poly::{real_roots_in, Poly, RealRoot};
pub use quad::{gauss_legendre, integrate, GaussLegendre, TanhSinh};
pub use roots::find_root;

use crate::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};

/// Extended-precision real.
pub type XReal = Float;

pub const DEFAULT_BITS: u32 = 512;
pub const MIN_BITS: u32 = 128;

/// Working precision plus the tolerance used for solver acceptance.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionContext {
    bits: u32,
    tol: XReal,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(DEFAULT_BITS).expect("default width is valid")
    }
}

impl PrecisionContext {
    /// Context with tolerance `2^(-bits/2)`.
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::Precision(bits));
        }
        let tol = Float::with_val(bits, Float::i_exp(1, -((bits / 2) as i32)));
        Ok(Self { bits, tol })
    }

    pub fn with_tolerance(mut self, tol: XReal) -> Self {
        self.tol = Float::with_val(self.bits, tol);
        self
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tol(&self) -> &XReal {
        &self.tol
    }

    /// `tol^(1/2)`, the looser threshold used for multiplicity decisions.
    pub fn sqrt_tol(&self) -> XReal {
        self.tol.clone().sqrt()
    }

    /// `2^(-e)` at this precision.
    pub fn eps_pow(&self, e: i32) -> XReal {
        Float::with_val(self.bits, Float::i_exp(1, -e))
    }

    /// Smallest spacing resolved at this precision, with a few guard bits.
    pub fn ulp_guard(&self) -> XReal {
        self.eps_pow(self.bits as i32 - 8)
    }

    pub fn real<T>(&self, v: T) -> XReal
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn zero(&self) -> XReal {
        Float::new(self.bits)
    }

    pub fn one(&self) -> XReal {
        self.real(1)
    }

    pub fn pi(&self) -> XReal {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// Parses a decimal (or `p/q` rational) string at full precision.
    pub fn parse(&self, s: &str) -> Result<XReal> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = self.parse(p)?;
            let q = self.parse(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(p / q);
        }
        let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.bits, parsed))
    }

    /// Rounds a value of any precision to this context.
    pub fn round(&self, x: &XReal) -> XReal {
        Float::with_val(self.bits, x)
    }

    pub fn complex(&self, re: f64, im: f64) -> XComplex {
        XComplex::new(self.real(re), self.real(im))
    }
}

/// Decimal rendering with `digits` significant digits (deterministic).
pub fn to_decimal(x: &XReal, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    // MPFR emits "d.ddde<exp>"; keep exponent notation but drop "e0".
    match s.split_once('e') {
        Some((mant, "0")) => mant.to_string(),
        _ => s,
    }
}

/// Largest absolute value in a slice (zero for an empty slice).
pub fn max_abs(values: &[XReal], prec: u32) -> XReal {
    let mut m = Float::new(prec);
    for v in values {
        let a = Float::with_val(prec, v.abs_ref());
        if a > m {
            m = a;
        }
    }
    m
}

/// Integer power helper that keeps the precision of `x`.
pub fn powi(x: &XReal, k: u32) -> XReal {
    Float::with_val(x.prec(), x.pow(k))
}

/// True when `x` is finite (neither NaN nor infinite).
pub fn finite(x: &XReal) -> bool {
    x.is_finite()
}
