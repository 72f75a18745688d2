use super::{find_root, PrecisionContext, XComplex, XReal};
use rug::Float;

/// Dense polynomial with ascending coefficients.
///
/// Exact trailing zeros are trimmed on construction so that the leading
/// coefficient is nonzero unless the polynomial is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<XReal>,
    prec: u32,
}

/// A distinct real root with its detected multiplicity.
#[derive(Clone, Debug)]
pub struct RealRoot {
    pub value: XReal,
    pub multiplicity: usize,
}

impl RealRoot {
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<XReal>, prec: u32) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        for c in coeffs.iter_mut() {
            if c.prec() != prec {
                *c = Float::with_val(prec, &*c);
            }
        }
        Self { coeffs, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self { coeffs: Vec::new(), prec }
    }

    pub fn constant(v: XReal) -> Self {
        let p = v.prec();
        Self::new(vec![v], p)
    }

    pub fn from_f64(prec: u32, coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Float::with_val(prec, c)).collect(), prec)
    }

    /// `x^k`.
    pub fn monomial(k: usize, prec: u32) -> Self {
        let mut c = vec![Float::new(prec); k + 1];
        c[k] = Float::with_val(prec, 1);
        Self { coeffs: c, prec }
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[XReal], prec: u32) -> Self {
        let mut p = Self::constant(Float::with_val(prec, 1));
        for r in roots {
            let lin = Self::new(vec![-Float::with_val(prec, r), Float::with_val(prec, 1)], prec);
            p = p.mul(&lin);
        }
        p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[XReal] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> XReal {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Float::new(self.prec))
    }

    pub fn lead(&self) -> XReal {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| Float::new(self.prec))
    }

    pub fn eval(&self, x: &XReal) -> XReal {
        let mut acc = Float::new(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &XComplex) -> XComplex {
        let mut acc = XComplex::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = &acc * z;
            acc.re += c;
        }
        acc
    }

    /// `Σ |c_k| |x|^k`, the natural size of an evaluation at `x`.
    pub fn eval_scale(&self, x: &XReal) -> XReal {
        let ax = Float::with_val(self.prec, x.abs_ref());
        let mut acc = Float::new(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= &ax;
            acc += Float::with_val(self.prec, c.abs_ref());
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> XReal {
        super::max_abs(&self.coeffs, self.prec)
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Float::with_val(self.prec, c * k as u32))
            .collect();
        Self::new(c, self.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|k| Float::with_val(self.prec, self.coeff(k) + o.coeff(k)))
            .collect();
        Self::new(c, self.prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|k| Float::with_val(self.prec, self.coeff(k) - o.coeff(k)))
            .collect();
        Self::new(c, self.prec)
    }

    pub fn scale(&self, k: &XReal) -> Self {
        let c = self
            .coeffs
            .iter()
            .map(|c| Float::with_val(self.prec, c * k))
            .collect();
        Self::new(c, self.prec)
    }

    /// `x · p(x)`.
    pub fn shift_up(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(Float::new(self.prec));
        c.extend(self.coeffs.iter().cloned());
        Self::new(c, self.prec)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.prec);
        }
        let mut c = vec![Float::new(self.prec); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c, self.prec)
    }

    /// Euclidean division; `d` must be nonzero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Self::zero(self.prec), Self::zero(self.prec));
        };
        if nd < dd {
            return (Self::zero(self.prec), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![Float::new(self.prec); nd - dd + 1];
        let lead = d.lead();
        for k in (0..=nd - dd).rev() {
            let t = Float::with_val(self.prec, &r[k + dd] / &lead);
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &t * dc;
            }
            r[k + dd] = Float::new(self.prec);
            q[k] = t;
        }
        r.truncate(dd);
        (Self::new(q, self.prec), Self::new(r, self.prec))
    }

    /// Drops leading coefficients below `rel · max|c|`.
    fn trimmed(&self, rel: &XReal) -> Self {
        let thr = Float::with_val(self.prec, &self.max_abs_coeff() * rel);
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| Float::with_val(self.prec, x.abs_ref()) <= thr) {
            c.pop();
        }
        Self::new(c, self.prec)
    }

    /// Rescaled by a positive factor so that the largest coefficient is 1.
    fn normalized(&self) -> Self {
        let m = self.max_abs_coeff();
        if m.is_zero() {
            return self.clone();
        }
        let inv = Float::with_val(self.prec, 1) / m;
        self.scale(&inv)
    }
}

struct Sturm {
    chain: Vec<Poly>,
}

impl Sturm {
    fn new(p: &Poly, ctx: &PrecisionContext) -> Self {
        let tol = ctx.tol();
        let mut chain = vec![p.normalized(), p.derivative().normalized()];
        loop {
            let n = chain.len();
            if chain[n - 1].degree().unwrap_or(0) == 0 {
                break;
            }
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
            // A remainder that is pure rounding noise ends the chain: the last
            // member is then the (numerical) gcd of p and p'.
            let scale = chain[n - 2].max_abs_coeff();
            let noise = Float::with_val(ctx.bits(), &scale * tol);
            if r.is_zero() || r.max_abs_coeff() <= noise {
                break;
            }
            let r = r.trimmed(tol);
            chain.push(r.scale(&Float::with_val(ctx.bits(), -1)).normalized());
        }
        Self { chain }
    }

    fn sign_changes(&self, x: &XReal) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for q in &self.chain {
            let v = q.eval(x);
            let s = if v.is_zero() {
                0
            } else if v.is_sign_negative() {
                -1
            } else {
                1
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &XReal, b: &XReal) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}

fn midpoint(a: &XReal, b: &XReal) -> XReal {
    Float::with_val(a.prec(), a + b) / 2u32
}

/// Distinct real roots of `p` in `(lo, hi]`, ascending, each refined to the
/// context tolerance and tagged with a multiplicity.
///
/// Roots are isolated by Sturm counting. Odd-multiplicity roots are refined
/// on a sign change of `p`; even ones (no sign change) by Sturm bisection.
/// Multiplicity counts how many successive derivatives vanish, relative to
/// their evaluation scale, below `tol^(1/2)`.
pub fn real_roots_in(p: &Poly, lo: &XReal, hi: &XReal, ctx: &PrecisionContext) -> Vec<RealRoot> {
    let bits = ctx.bits();
    let p = Poly::new(p.coeffs().to_vec(), bits);
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 || lo >= hi {
        return Vec::new();
    }
    let sturm = Sturm::new(&p, ctx);
    let lo = ctx.round(lo);
    let hi = ctx.round(hi);
    let width_floor = {
        let span = Float::with_val(bits, &hi - &lo);
        let mag = Float::with_val(bits, lo.abs_ref()).max(&Float::with_val(bits, hi.abs_ref()));
        let mag = mag.max(&ctx.one());
        Float::with_val(bits, &ctx.ulp_guard() * &mag).min(&span)
    };

    let mut isolated: Vec<(XReal, XReal)> = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), sturm.count(&lo, &hi))];
    while let Some((a, b, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        let width = Float::with_val(bits, &b - &a);
        if n == 1 || width <= width_floor {
            isolated.push((a, b));
            continue;
        }
        let m = midpoint(&a, &b);
        let nl = sturm.count(&a, &m);
        stack.push((m.clone(), b, n.saturating_sub(nl)));
        stack.push((a, m, nl));
    }
    isolated.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));

    let tol = Float::with_val(bits, ctx.ulp_guard());
    let mut roots = Vec::with_capacity(isolated.len());
    for (a, b) in isolated {
        let fa = p.eval(&a);
        let fb = p.eval(&b);
        let value = if fb.is_zero() {
            b.clone()
        } else if !fa.is_zero() && fa.is_sign_negative() != fb.is_sign_negative() {
            find_root(|x| p.eval(x), &a, &b, &tol, ctx).unwrap_or_else(|_| midpoint(&a, &b))
        } else {
            sturm_bisect(&sturm, a, b, &width_floor)
        };
        roots.push(RealRoot {
            multiplicity: multiplicity(&p, &value, ctx),
            value,
        });
    }
    roots
}

fn sturm_bisect(sturm: &Sturm, mut a: XReal, mut b: XReal, floor: &XReal) -> XReal {
    let bits = a.prec();
    for _ in 0..4 * bits {
        if Float::with_val(bits, &b - &a) <= *floor {
            break;
        }
        let m = midpoint(&a, &b);
        if sturm.count(&a, &m) > 0 {
            b = m;
        } else {
            a = m;
        }
    }
    midpoint(&a, &b)
}

fn multiplicity(p: &Poly, r: &XReal, ctx: &PrecisionContext) -> usize {
    let thr = ctx.sqrt_tol();
    let deg = p.degree().unwrap_or(0);
    let mut k = 1;
    let mut d = p.derivative();
    while k < deg {
        let v = Float::with_val(ctx.bits(), d.eval(r).abs_ref());
        let s = d.eval_scale(r);
        if s.is_zero() || v > Float::with_val(ctx.bits(), &thr * &s) {
            break;
        }
        k += 1;
        d = d.derivative();
    }
    k
}
