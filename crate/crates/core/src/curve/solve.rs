use super::newton::{damped_newton, Linearization};
use super::oracle::dc_oracle;
use super::{CurveData, InverseMap, Regime, Thresholds};
use crate::mop::Geometry;
use crate::precision::{PrecisionContext, XReal};
use crate::{Error, Result};
use rug::Float;

/// A solved four-branch-point surface.
#[derive(Clone, Debug)]
pub struct ChiSolution {
    pub map: InverseMap,
    pub w_crit: [XReal; 4],
    /// Max-norm of `R(w_j) − branch_point_j`.
    pub residual: XReal,
}

fn sub(p: u32, a: &XReal, b: &XReal) -> XReal {
    Float::with_val(p, a - b)
}

fn residual_scale(points: &[XReal], ctx: &PrecisionContext) -> XReal {
    points.iter().fold(ctx.one(), |m, x| m.max(&Float::with_val(ctx.bits(), x.abs_ref())))
}

/// Seed with `A_i = (len_i/4)²` and `B_i` at the interval midpoints.
pub fn default_seed(points: &[XReal; 4], ctx: &PrecisionContext) -> InverseMap {
    let p = ctx.bits();
    let quarter_sq = |a: &XReal, b: &XReal| (sub(p, b, a) / 4u32).square();
    let mid = |a: &XReal, b: &XReal| Float::with_val(p, a + b) / 2u32;
    InverseMap::new(
        quarter_sq(&points[0], &points[1]),
        quarter_sq(&points[2], &points[3]),
        mid(&points[0], &points[1]),
        mid(&points[2], &points[3]),
    )
}

fn is_symmetric(points: &[XReal; 4]) -> bool {
    Float::with_val(points[0].prec(), &points[0] + &points[3]).is_zero()
        && Float::with_val(points[1].prec(), &points[1] + &points[2]).is_zero()
}

/// Newton on the four critical-value equations from a given seed.
fn newton_surface(points: &[XReal; 4], seed: &InverseMap, ctx: &PrecisionContext) -> Result<ChiSolution> {
    let p = ctx.bits();
    let scale = residual_scale(points, ctx);
    if is_symmetric(points) {
        // A1 = A2 = A, B2 = −B1 = B; only the right-hand equations remain.
        let a = Float::with_val(p, &seed.a1 + &seed.a2) / 2u32;
        let b = sub(p, &seed.b2, &seed.b1) / 2u32;
        let expand = |x: &[XReal]| InverseMap::new(x[0].clone(), x[0].clone(), -x[1].clone(), x[1].clone());
        let system = |x: &[XReal]| -> Result<Linearization> {
            let map = expand(x);
            let w = map.critical_points(ctx)?;
            let mut f = Vec::with_capacity(2);
            let mut jac = Vec::with_capacity(2);
            for j in 2..4 {
                f.push(sub(p, &map.eval(&w[j]), &points[j]));
                let g = map.param_gradient(&w[j]);
                jac.push(vec![Float::with_val(p, &g[0] + &g[1]), sub(p, &g[3], &g[2])]);
            }
            Ok((f, jac))
        };
        let (x, _) = damped_newton(vec![a, b], system, &scale, ctx)?;
        return finish(expand(&x), points, ctx);
    }
    let system = |x: &[XReal]| -> Result<Linearization> {
        let map = InverseMap::from_params(x);
        let w = map.critical_points(ctx)?;
        let f = (0..4).map(|j| sub(p, &map.eval(&w[j]), &points[j])).collect();
        let jac = w.iter().map(|wj| map.param_gradient(wj).to_vec()).collect();
        Ok((f, jac))
    };
    let (x, _) = damped_newton(seed.params().to_vec(), system, &scale, ctx)?;
    finish(InverseMap::from_params(&x), points, ctx)
}

fn finish(map: InverseMap, points: &[XReal; 4], ctx: &PrecisionContext) -> Result<ChiSolution> {
    let w_crit = map.critical_points(ctx)?;
    let residual = (0..4)
        .map(|j| sub(ctx.bits(), &map.eval(&w_crit[j]), &points[j]).abs())
        .fold(ctx.zero(), |m, r| m.max(&r));
    Ok(ChiSolution { map, w_crit, residual })
}

/// Inverse map whose critical values are the four given branch points.
///
/// Newton from `seed` (or the default midpoint seed); on failure, the
/// branch points are slid from a symmetric configuration with the same
/// hull to the target, re-seeding at every step.
pub fn chi_solve(branch_points: &[XReal; 4], ctx: &PrecisionContext, seed: Option<&InverseMap>) -> Result<ChiSolution> {
    if !(branch_points[0] < branch_points[1] && branch_points[1] < branch_points[2] && branch_points[2] < branch_points[3]) {
        return Err(Error::SolveFailure("branch points are not strictly increasing".into()));
    }
    let points: [XReal; 4] = branch_points.clone().map(|x| ctx.round(&x));
    let first = seed.cloned().unwrap_or_else(|| default_seed(&points, ctx));
    match newton_surface(&points, &first, ctx) {
        Ok(s) => Ok(s),
        Err(_) => homotopy(&points, ctx),
    }
}

fn homotopy(target: &[XReal; 4], ctx: &PrecisionContext) -> Result<ChiSolution> {
    let p = ctx.bits();
    let centre = Float::with_val(p, &target[0] + &target[3]) / 2u32;
    let half = sub(p, &target[3], &target[0]) / 2u32;
    let third = Float::with_val(p, &half / 3u32);
    let easy = [
        sub(p, &centre, &half),
        sub(p, &centre, &third),
        Float::with_val(p, &centre + &third),
        Float::with_val(p, &centre + &half),
    ];
    let mut sol = newton_surface(&easy, &default_seed(&easy, ctx), ctx)?;
    let mut s = 0.0f64;
    let mut ds = 0.25f64;
    while s < 1.0 {
        let next = (s + ds).min(1.0);
        let t = ctx.real(next);
        let pts: [XReal; 4] = std::array::from_fn(|j| Float::with_val(p, &t * sub(p, &target[j], &easy[j])) + &easy[j]);
        let pts = if next == 1.0 { target.clone() } else { pts };
        match newton_surface(&pts, &sol.map, ctx) {
            Ok(found) => {
                sol = found;
                s = next;
                ds = (ds * 2.0).min(0.5);
            }
            Err(_) => {
                ds /= 2.0;
                if ds < 1e-6 {
                    return Err(Error::SolveFailure(format!("homotopy stalled at parameter {s}")));
                }
            }
        }
    }
    Ok(sol)
}

/// `c(w_*) = −A1(B1 − B2)(B1 − w_*)/∏_j(B1 − w_j)`: the first-sheet mass
/// carried by a surface whose distinguished zero sits over `w_*`.
pub fn mass_for_zero(map: &InverseMap, w_crit: &[XReal; 4], w_star: &XReal) -> XReal {
    let p = map.b1.prec();
    let mut den = Float::with_val(p, 1u32);
    for w in w_crit {
        den *= sub(p, &map.b1, w);
    }
    let num = Float::with_val(p, &map.a1 * sub(p, &map.b1, &map.b2)) * sub(p, &map.b1, w_star);
    -(num / den)
}

fn geometry_points(g: &Geometry) -> [XReal; 4] {
    g.points().map(|x| x.clone())
}

fn thresholds_from(full: &ChiSolution) -> Result<Thresholds> {
    let c_star = mass_for_zero(&full.map, &full.w_crit, &full.w_crit[1]);
    let c_dstar = mass_for_zero(&full.map, &full.w_crit, &full.w_crit[2]);
    if !(c_star > 0 && c_star < c_dstar && c_dstar < 1) {
        return Err(Error::SolveFailure(format!(
            "thresholds out of order: c* = {}, c** = {}",
            c_star.to_f64(),
            c_dstar.to_f64()
        )));
    }
    Ok(Thresholds { c_star, c_dstar })
}

/// Thresholds `c* < c**` separating the three regimes.
pub fn critical_thresholds(geometry: &Geometry, ctx: &PrecisionContext) -> Result<Thresholds> {
    thresholds_from(&chi_solve(&geometry_points(geometry), ctx, None)?)
}

/// Limit constants at `c = 0`: the first measure collapses onto `α1`.
fn collapsed_left(geometry: &Geometry, thresholds: Thresholds, ctx: &PrecisionContext) -> CurveData {
    let p = ctx.bits();
    let [a1, _, a2, b2] = geometry.points().map(|x| ctx.round(x));
    let big_a2 = (sub(p, &b2, &a2) / 4u32).square();
    let big_b2 = Float::with_val(p, &a2 + &b2) / 2u32;
    let root = Float::with_val(p, sub(p, &a2, &a1) * sub(p, &b2, &a1)).sqrt();
    let big_b1 = (Float::with_val(p, &a1 + &big_b2) - &root) / 2u32;
    let s = Float::with_val(p, big_a2.sqrt_ref());
    CurveData {
        geometry: geometry.clone(),
        c: ctx.zero(),
        regime: Regime::PushedLeft,
        beta_c1: a1.clone(),
        alpha_c2: a2,
        a1: ctx.zero(),
        a2: big_a2,
        b1: big_b1.clone(),
        w_crit: [big_b1.clone(), big_b1.clone(), sub(p, &big_b2, &s), Float::with_val(p, &big_b2 + &s)],
        b2: big_b2,
        w_star: big_b1,
        z_c: a1.clone(),
        d_c: Some(a1),
        k: ctx.one(),
        solve_residual: ctx.zero(),
        thresholds,
        collapsed_sheet: Some(1),
    }
}

/// Image of a curve under `x ↦ −x`, `c ↦ 1 − c`.
fn mirrored(d: CurveData, geometry: &Geometry, ctx: &PrecisionContext) -> CurveData {
    let p = ctx.bits();
    let map = d.inverse_map().mirror();
    let [w1, w2, w3, w4] = d.w_crit;
    CurveData {
        geometry: geometry.clone(),
        c: Float::with_val(p, 1u32) - d.c,
        regime: match d.regime {
            Regime::PushedLeft => Regime::PushedRight,
            Regime::Middle => Regime::Middle,
            Regime::PushedRight => Regime::PushedLeft,
        },
        beta_c1: -d.alpha_c2,
        alpha_c2: -d.beta_c1,
        a1: map.a1,
        a2: map.a2,
        b1: map.b1,
        b2: map.b2,
        w_crit: [-w4, -w3, -w2, -w1],
        w_star: -d.w_star,
        z_c: -d.z_c,
        d_c: None,
        k: d.k,
        solve_residual: d.solve_residual,
        thresholds: Thresholds {
            c_star: Float::with_val(p, 1u32) - d.thresholds.c_dstar,
            c_dstar: Float::with_val(p, 1u32) - d.thresholds.c_star,
        },
        collapsed_sheet: d.collapsed_sheet.map(|s| 3 - s),
    }
}

/// Joint Newton for `(A1, A2, B1, B2, β_{c,1})` at one `c < c*`.
fn newton_left(points: &[XReal; 4], c: &XReal, x0: Vec<XReal>, ctx: &PrecisionContext) -> Result<(Vec<XReal>, XReal)> {
    let p = ctx.bits();
    let scale = residual_scale(points, ctx);
    let system = |x: &[XReal]| -> Result<Linearization> {
        let map = InverseMap::from_params(&x[..4]);
        let w = map.critical_points(ctx)?;
        let targets = [&points[0], &x[4], &points[2], &points[3]];
        let mut f = Vec::with_capacity(5);
        let mut jac = Vec::with_capacity(5);
        for j in 0..4 {
            f.push(sub(p, &map.eval(&w[j]), targets[j]));
            let mut row = map.param_gradient(&w[j]).to_vec();
            row.push(if j == 1 { ctx.real(-1) } else { ctx.zero() });
            jac.push(row);
        }
        // Mass equation with the distinguished zero on w2: T/c + 1 = 0.
        let others = [0usize, 2, 3];
        let inv: Vec<XReal> = others.iter().map(|&j| sub(p, &map.b1, &w[j]).recip()).collect();
        let b12 = sub(p, &map.b1, &map.b2);
        let mut t = Float::with_val(p, &map.a1 * &b12);
        for v in &inv {
            t *= v;
        }
        f.push(Float::with_val(p, &t / c) + 1u32);
        let mut grad = [
            Float::with_val(p, &t / &map.a1),
            ctx.zero(),
            Float::with_val(p, b12.recip_ref()) - inv.iter().fold(ctx.zero(), |s, v| s + v),
            -Float::with_val(p, &t / &b12),
        ];
        grad[2] *= &t;
        for (k, &j) in others.iter().enumerate() {
            let dr = map.d1_param_gradient(&w[j]);
            let curv = map.d2(&w[j]);
            let factor = Float::with_val(p, &t * &inv[k]);
            for q in 0..4 {
                let dw = -Float::with_val(p, &dr[q] / &curv);
                grad[q] += Float::with_val(p, &factor * &dw);
            }
        }
        let mut row: Vec<XReal> = grad.into_iter().map(|g| g / c).collect();
        row.push(ctx.zero());
        jac.push(row);
        Ok((f, jac))
    };
    damped_newton(x0, system, &scale, ctx)
}

/// Regime `c < c*` by continuation in `c` from the collapsed-interval limit.
fn pushed_left(geometry: &Geometry, c: &XReal, thresholds: Thresholds, ctx: &PrecisionContext) -> Result<CurveData> {
    let p = ctx.bits();
    let points = geometry_points(geometry);
    let limit = collapsed_left(geometry, thresholds.clone(), ctx);
    let gap = Float::with_val(p, sub(p, &points[2], &points[0]) * sub(p, &points[3], &points[0])).sqrt();
    let seed = |c: &XReal| {
        let spread = Float::with_val(p, c * &gap);
        vec![
            Float::with_val(p, spread.square_ref()),
            limit.a2.clone(),
            limit.b1.clone(),
            limit.b2.clone(),
            Float::with_val(p, &spread * 4u32) + &points[0],
        ]
    };
    let first = ctx.real(0.01).min(c);
    let (mut x, mut residual) = newton_left(&points, &first, seed(&first), ctx)?;
    let mut cur = first;
    let mut step = 0.05f64;
    while cur < *c {
        let next = Float::with_val(p, &cur + step).min(c);
        match newton_left(&points, &next, x.clone(), ctx) {
            Ok((xn, rn)) => {
                x = xn;
                residual = rn;
                cur = next;
            }
            Err(e) => {
                step /= 2.0;
                if step < 1e-8 {
                    return Err(e);
                }
            }
        }
    }
    let map = InverseMap::from_params(&x[..4]);
    let w_crit = map.critical_points(ctx)?;
    let beta = x[4].clone();
    if !(beta > points[0] && beta < points[1]) {
        return Err(Error::InternalInconsistency(format!(
            "pushed-left endpoint {} outside the first interval",
            beta.to_f64()
        )));
    }
    let d_c = dc_oracle(geometry, c, ctx).ok().map(|(d, _)| d);
    Ok(CurveData {
        geometry: geometry.clone(),
        c: ctx.round(c),
        regime: Regime::PushedLeft,
        beta_c1: beta.clone(),
        alpha_c2: points[2].clone(),
        a1: map.a1,
        a2: map.a2,
        b1: map.b1,
        b2: map.b2,
        w_star: w_crit[1].clone(),
        w_crit,
        z_c: beta,
        d_c,
        k: k_of(c, p),
        solve_residual: residual,
        thresholds,
        collapsed_sheet: None,
    })
}

fn k_of(c: &XReal, p: u32) -> XReal {
    Float::with_val(p, c.square_ref()) - c + 1u32
}

fn middle(geometry: &Geometry, c: &XReal, full: ChiSolution, thresholds: Thresholds, ctx: &PrecisionContext) -> Result<CurveData> {
    let p = ctx.bits();
    let [a1, b1, a2, b2] = geometry.points().map(|x| ctx.round(x));
    let map = full.map;
    let (w_star, z_c) = if *c == thresholds.c_star {
        (full.w_crit[1].clone(), b1.clone())
    } else if *c == thresholds.c_dstar {
        (full.w_crit[2].clone(), a2.clone())
    } else {
        let mut prod = Float::with_val(p, 1u32);
        for w in &full.w_crit {
            prod *= sub(p, &map.b1, w);
        }
        let den = Float::with_val(p, &map.a1 * sub(p, &map.b1, &map.b2));
        let w_star = Float::with_val(p, c * prod) / den + &map.b1;
        let z = map.eval(&w_star);
        (w_star, z)
    };
    let slack = Float::with_val(p, ctx.tol() * residual_scale(&[a1.clone(), b2.clone()], ctx));
    if z_c < Float::with_val(p, &b1 - &slack) || z_c > Float::with_val(p, &a2 + &slack) {
        return Err(Error::InternalInconsistency(format!("z_c = {} outside the gap", z_c.to_f64())));
    }
    Ok(CurveData {
        geometry: geometry.clone(),
        c: ctx.round(c),
        regime: Regime::Middle,
        beta_c1: b1,
        alpha_c2: a2,
        a1: map.a1,
        a2: map.a2,
        b1: map.b1,
        b2: map.b2,
        w_crit: full.w_crit,
        w_star,
        z_c,
        d_c: None,
        k: k_of(c, p),
        solve_residual: full.residual,
        thresholds,
        collapsed_sheet: None,
    })
}

/// Constants of the three-sheeted surface at mass split `c ∈ [0, 1]`.
pub fn curve(geometry: &Geometry, c: &XReal, ctx: &PrecisionContext) -> Result<CurveData> {
    if !(*c >= 0 && *c <= 1) {
        return Err(Error::Precondition(format!("c = {} outside [0, 1]", c.to_f64())));
    }
    let full = chi_solve(&geometry_points(geometry), ctx, None)?;
    let thresholds = thresholds_from(&full)?;
    let mirror = geometry.mirror();
    let p = ctx.bits();
    let flip = |t: &Thresholds| Thresholds {
        c_star: Float::with_val(p, 1u32) - &t.c_dstar,
        c_dstar: Float::with_val(p, 1u32) - &t.c_star,
    };
    if c.is_zero() {
        return Ok(collapsed_left(geometry, thresholds, ctx));
    }
    if *c == 1 {
        let left = collapsed_left(&mirror, flip(&thresholds), ctx);
        return Ok(mirrored(left, geometry, ctx));
    }
    if *c < thresholds.c_star {
        pushed_left(geometry, c, thresholds, ctx)
    } else if *c > thresholds.c_dstar {
        let cm = Float::with_val(p, 1u32) - c;
        let left = pushed_left(&mirror, &cm, flip(&thresholds), ctx)?;
        Ok(mirrored(left, geometry, ctx))
    } else {
        middle(geometry, c, full, thresholds, ctx)
    }
}
