use super::XReal;
use rug::Float;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Extended-precision complex scalar as a pair of MPFR floats.
///
/// Products and quotients are computed from correctly rounded real
/// operations, so each component carries a few ulps of error at most.
#[derive(Clone, PartialEq)]
pub struct XComplex {
    pub re: XReal,
    pub im: XReal,
}

impl fmt::Debug for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {:+}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl XComplex {
    pub fn new(re: XReal, im: XReal) -> Self {
        let prec = re.prec().max(im.prec());
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(re: XReal) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_real(Float::new(prec))
    }

    pub fn with_val(prec: u32, re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> XReal {
        let p = self.prec();
        let mut n = Float::with_val(p, self.re.square_ref());
        n += Float::with_val(p, self.im.square_ref());
        n
    }

    pub fn abs(&self) -> XReal {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> XReal {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, k: &XReal) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    pub fn add_real(&self, k: &XReal) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re + k),
            im: self.im.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self {
            re: Float::with_val(self.prec(), &self.re / &n),
            im: -Float::with_val(self.prec(), &self.im / &n),
        }
    }

    /// Principal square root (branch cut on the negative real axis; the sign
    /// of a zero imaginary part selects the side).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.re.is_zero() && self.im.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        if !self.re.is_sign_negative() {
            let t = Float::with_val(p, &r + &self.re) / 2u32;
            let t = t.sqrt();
            let im = Float::with_val(p, &self.im / &t) / 2u32;
            Self { re: t, im }
        } else {
            let t = Float::with_val(p, &r - &self.re) / 2u32;
            let t = t.sqrt();
            let re = Float::with_val(p, self.im.abs_ref()) / &t / 2u32;
            let im = if self.im.is_sign_negative() { -t } else { t };
            Self { re, im }
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Self {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        Self {
            re: Float::with_val(p, &m * &c),
            im: m * s,
        }
    }

    pub fn powi(&self, k: i64) -> Self {
        let p = self.prec();
        let mut base = if k < 0 { self.recip() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::from_real(Float::with_val(p, 1));
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a> Add<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn add(self, o: &XComplex) -> XComplex {
        let p = self.prec();
        XComplex {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }
}

impl<'a> Sub<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn sub(self, o: &XComplex) -> XComplex {
        let p = self.prec();
        XComplex {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }
}

impl<'a> Mul<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn mul(self, o: &XComplex) -> XComplex {
        let p = self.prec();
        let mut re = Float::with_val(p, &self.re * &o.re);
        re -= &self.im * &o.im;
        let mut im = Float::with_val(p, &self.re * &o.im);
        im += &self.im * &o.re;
        XComplex { re, im }
    }
}

impl<'a> Div<&'a XComplex> for &'a XComplex {
    type Output = XComplex;
    fn div(self, o: &XComplex) -> XComplex {
        let p = self.prec();
        let n = o.norm_sqr();
        let mut re = Float::with_val(p, &self.re * &o.re);
        re += &self.im * &o.im;
        let mut im = Float::with_val(p, &self.im * &o.re);
        im -= &self.re * &o.im;
        XComplex {
            re: re / &n,
            im: im / &n,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, o: XComplex) -> XComplex {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, o: &XComplex) -> XComplex {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<XComplex> for &'a XComplex {
            type Output = XComplex;
            fn $m(self, o: XComplex) -> XComplex {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        -self.clone()
    }
}

impl AddAssign<&XComplex> for XComplex {
    fn add_assign(&mut self, o: &XComplex) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&XComplex> for XComplex {
    fn sub_assign(&mut self, o: &XComplex) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&XComplex> for XComplex {
    fn mul_assign(&mut self, o: &XComplex) {
        *self = &*self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> XComplex {
        XComplex::with_val(256, re, im)
    }

    fn close(a: &XComplex, b: &XComplex, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol
    }

    #[test]
    fn field_operations_round_trip() {
        let a = c(1.5, -2.0);
        let b = c(-0.25, 3.0);
        let q = &(&a * &b) / &b;
        assert!(close(&q, &a, 1e-70));
        assert!(close(&(&(&a + &b) - &b), &a, 1e-70));
        assert!(close(&(&a * &a.recip()), &c(1.0, 0.0), 1e-70));
    }

    #[test]
    fn sqrt_is_principal_and_sided() {
        let s = c(-4.0, 0.0).sqrt();
        assert!(close(&s, &c(0.0, 2.0), 1e-70));
        let s = XComplex::new(Float::with_val(256, -4), -Float::new(256)).sqrt();
        assert!(close(&s, &c(0.0, -2.0), 1e-70));
        let z = c(0.3, -0.7);
        let r = z.sqrt();
        assert!(r.re > 0);
        assert!(close(&(&r * &r), &z, 1e-70));
    }

    #[test]
    fn exp_inverts_ln() {
        let z = c(-1.25, 0.4);
        assert!(close(&z.ln().exp(), &z, 1e-70));
    }

    #[test]
    fn integer_powers_agree_with_products() {
        let z = c(0.9, 0.2);
        let p = z.powi(5);
        let q = &(&(&(&z * &z) * &z) * &z) * &z;
        assert!(close(&p, &q, 1e-70));
        assert!(close(&(&z.powi(-3) * &z.powi(3)), &c(1.0, 0.0), 1e-70));
    }
}
