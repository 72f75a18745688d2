use super::{Geometry, MultiIndex};
use crate::precision::{real_roots_in, Poly, PrecisionContext, XReal};
use crate::{Error, Result};

/// Zeros of a type II polynomial, split by interval and checked against
/// the expected counts `(n1, n2)`.
pub fn zeros(p: &Poly, n: MultiIndex, geometry: &Geometry, ctx: &PrecisionContext) -> Result<[Vec<XReal>; 2]> {
    let mut out: [Vec<XReal>; 2] = [Vec::new(), Vec::new()];
    for i in 1..=2 {
        let (a, b) = geometry.interval(i);
        let roots = real_roots_in(p, a, b, ctx);
        let count: usize = roots.iter().map(|r| r.multiplicity).sum();
        if count != n.get(i) || roots.iter().any(|r| !r.is_simple()) {
            return Err(Error::ZeroLocationFailure {
                interval: i,
                expected: n.get(i),
                found: count,
            });
        }
        out[i - 1] = roots.into_iter().map(|r| r.value).collect();
    }
    Ok(out)
}

/// Strict interlacing of two ascending lists whose lengths differ by at
/// most one: merged, no two consecutive points come from the same list.
pub fn interlace(x: &[XReal], y: &[XReal]) -> bool {
    if x.len().abs_diff(y.len()) > 1 {
        return false;
    }
    let mut merged: Vec<(&XReal, u8)> = x.iter().map(|v| (v, 0)).chain(y.iter().map(|v| (v, 1))).collect();
    merged.sort_by(|a, b| a.0.partial_cmp(b.0).expect("finite zeros"));
    merged.windows(2).all(|w| w[0].1 != w[1].1 && w[0].0 < w[1].0)
}
