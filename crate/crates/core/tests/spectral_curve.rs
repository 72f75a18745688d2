//! Spectral-curve checks on the reference geometry `[-2,-1] ∪ [1,2]`.
//!
//! Frozen constants were produced by an independent double-precision
//! solve of the same critical-value system (and, for the pushed regime,
//! of the discriminant sextic), then refined at high precision.

use angelesco::curve::{
    chi_eval, chi_real, chi_solve, critical_thresholds, curve, dc_oracle, discriminant_roots, energy_oracle,
    equilibrium, h_branch, upsilon, Regime, Side,
};
use angelesco::mop::Geometry;
use angelesco::precision::{PrecisionContext, XComplex, XReal};
use angelesco::Error;
use rug::Float;

fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

fn g0(ctx: &PrecisionContext) -> Geometry {
    Geometry::reference(ctx)
}

fn diff(a: &XReal, b: &XReal) -> f64 {
    Float::with_val(a.prec(), a - b).abs().to_f64()
}

fn near(x: &XReal, want: &str, tol: f64) -> bool {
    let w = Float::with_val(x.prec(), Float::parse(want).unwrap());
    diff(x, &w) <= tol
}

const A_FULL: &str = "0.0629565962740410615341082701846858341419714046987496457744843";
const B_FULL: &str = "1.47855454395549510899070632440530556849031572705520250774401";
const C_STAR: &str = "0.0852176522670594699413524606145144717337221852713395781125785";

#[test]
fn full_surface_constants() {
    let ctx = ctx(512);
    let pts = g0(&ctx).points().map(|x| x.clone());
    let s = chi_solve(&pts, &ctx, None).unwrap();
    assert!(near(&s.map.a1, A_FULL, 1e-55));
    assert!(near(&s.map.a2, A_FULL, 1e-55));
    assert!(near(&s.map.b2, B_FULL, 1e-55));
    assert!(near(&-s.map.b1.clone(), B_FULL, 1e-55));
    assert!(near(&s.w_crit[3], "1.730236705143477296", 1e-17));
    assert!(near(&s.w_crit[2], "1.226556649986134952", 1e-17));
    assert!(s.residual < 1e-128);
}

#[test]
fn asymmetric_solve_reproduces_branch_points() {
    let ctx = ctx(256);
    let pts = [-2.5, -0.4, 0.3, 3.0].map(|x| ctx.real(x));
    let s = chi_solve(&pts, &ctx, None).unwrap();
    for j in 0..4 {
        assert!(diff(&s.map.eval(&s.w_crit[j]), &pts[j]) < 1e-64);
    }
    assert!(s.map.b1 < s.map.b2);
    let big = ctx.real(1e30);
    assert!(diff(&s.map.eval(&big), &big) < 1e-29);
}

#[test]
fn collapsing_interval_matches_limit_constants() {
    let ctx = ctx(256);
    let pts = [-2.0, -1.99, 1.0, 2.0].map(|x| ctx.real(x));
    let s = chi_solve(&pts, &ctx, None).unwrap();
    assert!((s.map.a2.to_f64() / 0.0625 - 1.0).abs() < 0.02);
    assert!((s.map.b2.to_f64() / 1.5 - 1.0).abs() < 0.02);
    assert!((s.map.b1.to_f64() / -1.9820508 - 1.0).abs() < 0.02);
    assert!(s.map.a1 > 0 && s.map.a1 < 1e-4);
}

#[test]
fn thresholds_on_the_reference_geometry() {
    let ctx = ctx(512);
    let t = critical_thresholds(&g0(&ctx), &ctx).unwrap();
    assert!(near(&t.c_star, C_STAR, 1e-55));
    let sum = Float::with_val(512, &t.c_star + &t.c_dstar);
    assert!(diff(&sum, &ctx.one()) < 1e-100);
}

#[test]
fn threshold_matches_where_the_discriminant_endpoint_reaches_the_gap() {
    let ctx = ctx(256);
    let g = g0(&ctx);
    let beta = |c: f64| -> f64 {
        let roots = discriminant_roots(&g, &ctx.real(c), &ctx).unwrap();
        roots.iter().map(|r| r.beta.to_f64()).fold(f64::INFINITY, f64::min)
    };
    let (mut lo, mut hi) = (0.05, 0.12);
    for _ in 0..60 {
        let mid = (lo + hi) / 2.0;
        if beta(mid) < -1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - 0.08521765226705947).abs() < 1e-6);
}

#[test]
fn middle_regime_is_independent_of_c() {
    let ctx = ctx(256);
    let g = g0(&ctx);
    let a = curve(&g, &ctx.real(0.45), &ctx).unwrap();
    let b = curve(&g, &ctx.real(0.55), &ctx).unwrap();
    assert_eq!(a.regime, Regime::Middle);
    for (x, y) in [(&a.a1, &b.a1), (&a.a2, &b.a2), (&a.b1, &b.b1), (&a.b2, &b.b2)] {
        assert!(diff(x, y) < 1e-10);
    }
    let half = curve(&g, &ctx.real(0.5), &ctx).unwrap();
    assert!(half.z_c.to_f64().abs() < 1e-60);
    assert!(diff(&half.a1, &half.a2) < 1e-60);
}

#[test]
fn z_c_increases_with_c() {
    let ctx = ctx(256);
    let g = g0(&ctx);
    let zs: Vec<f64> = [0.2, 0.35, 0.5, 0.65, 0.8]
        .iter()
        .map(|&c| curve(&g, &ctx.real(c), &ctx).unwrap().z_c.to_f64())
        .collect();
    assert!(zs.windows(2).all(|w| w[0] < w[1]), "{zs:?}");
}

#[test]
fn pushed_left_endpoint_law() {
    let ctx = ctx(256);
    let g = g0(&ctx);
    let d = curve(&g, &ctx.real(1e-3), &ctx).unwrap();
    assert_eq!(d.regime, Regime::PushedLeft);
    let gap = d.beta_c1.to_f64() + 2.0;
    assert!((gap / 0.013856 - 1.0).abs() < 0.05, "gap {gap}");
    assert!((d.a2.to_f64() / 0.0625 - 1.0).abs() < 0.01);
    assert!((d.b2.to_f64() / 1.5 - 1.0).abs() < 0.01);
    assert!((d.b1.to_f64() / -1.9820508 - 1.0).abs() < 0.01);
    assert!(d.a1 > 0 && d.a1 < 1e-4);
    assert_eq!(d.z_c, d.beta_c1);
}

#[test]
fn collapsed_limits_are_exact() {
    let ctx = ctx(256);
    let g = g0(&ctx);
    let d = curve(&g, &ctx.zero(), &ctx).unwrap();
    assert!(d.a1.is_zero());
    assert_eq!(d.a2, 0.0625);
    assert_eq!(d.b2, 1.5);
    let b01 = Float::with_val(256, 12).sqrt() * -1i32 + -0.5f64;
    assert!(diff(&d.b1, &(b01 / 2u32)) < 1e-70);
    assert_eq!(d.beta_c1, -2.0);
    let e = curve(&g, &ctx.one(), &ctx).unwrap();
    assert_eq!(e.regime, Regime::PushedRight);
    assert!(e.a2.is_zero());
    assert_eq!(e.a1, 0.0625);
    assert!(diff(&e.b2, &-d.b1.clone()) < 1e-70);
    assert_eq!(e.alpha_c2, 2.0);
}

#[test]
fn pushed_right_mirrors_pushed_left() {
    let ctx = ctx(256);
    let g = g0(&ctx);
    let l = curve(&g, &ctx.parse("0.03").unwrap(), &ctx).unwrap();
    let r = curve(&g, &ctx.parse("0.97").unwrap(), &ctx).unwrap();
    assert_eq!(r.regime, Regime::PushedRight);
    assert!(diff(&l.beta_c1, &-r.alpha_c2.clone()) < 1e-60);
    assert!(diff(&l.a1, &r.a2) < 1e-60);
    assert!(diff(&l.b1, &-r.b2.clone()) < 1e-60);
}

#[test]
fn discriminant_route_agrees_with_joint_newton() {
    let ctx = ctx(512);
    let g = g0(&ctx);
    for (c, want) in [(0.02, "-1.73377678567378"), (0.05, "-1.37249319964295")] {
        let c = ctx.real(c);
        let (d, beta) = dc_oracle(&g, &c, &ctx).unwrap();
        assert!(near(&beta, want, 1e-13));
        let cd = curve(&g, &c, &ctx).unwrap();
        assert!(diff(&beta, &cd.beta_c1) < 1e-128);
        assert!(d > -2.0 && d < beta);
        // Endpoint bracket 4c/(1−c)·(α2−β1) < β − α1 < 4c/(1−c)·(β2−α1).
        let cf = c.to_f64();
        let gap = beta.to_f64() + 2.0;
        assert!(gap > 4.0 * cf / (1.0 - cf) * 2.0 && gap < 4.0 * cf / (1.0 - cf) * 4.0);
    }
    let virt = dc_oracle(&g, &ctx.real(0.1), &ctx);
    assert!(matches!(virt, Err(Error::Regime(_))));
}

#[test]
fn sheet_values_at_large_z() {
    let ctx = ctx(256);
    let d = curve(&g0(&ctx), &ctx.real(0.3), &ctx).unwrap();
    let z = ctx.complex(1e8, 0.0);
    let w = chi_eval(&d, &z, &ctx).unwrap();
    assert!(diff(&w[0].re, &z.re) < 1.0);
    for (k, (a, b)) in [(1, (&d.a1, &d.b1)), (2, (&d.a2, &d.b2))] {
        let want = Float::with_val(256, a / &z.re) + b;
        assert!(diff(&w[k].re, &want) < 1e-15);
    }
    let half = curve(&g0(&ctx), &ctx.real(0.5), &ctx).unwrap();
    let w = chi_eval(&half, &ctx.complex(0.0, 0.0), &ctx).unwrap();
    assert!(w[0].abs() < 1e-60);
}

#[test]
fn continuation_agrees_with_real_labels_near_the_axis() {
    let ctx = ctx(256);
    let d = curve(&g0(&ctx), &ctx.real(0.03), &ctx).unwrap();
    for x in [-3.0, -1.5, 0.2, 1.6, 2.7] {
        let up = chi_eval(&d, &ctx.complex(x, 1e-20), &ctx).unwrap();
        let on = chi_real(&d, &ctx.real(x), Side::Upper, &ctx).unwrap();
        for k in 0..3 {
            assert!((&up[k] - &on[k]).abs() < 1e-15, "x = {x}, sheet {k}");
        }
    }
}

#[test]
fn h_branches_sum_to_zero_and_carry_masses() {
    let ctx = ctx(256);
    for c in [0.03, 0.3, 0.5, 0.95] {
        let d = curve(&g0(&ctx), &ctx.real(c), &ctx).unwrap();
        let z = ctx.complex(0.4, 0.9);
        let s = (0..3).fold(XComplex::zero(256), |acc, k| &acc + &h_branch(&d, &z, k, &ctx).unwrap());
        assert!(s.abs() < 1e-60, "c = {c}");
        let big = ctx.complex(1e6, 0.0);
        let m1 = &h_branch(&d, &big, 1, &ctx).unwrap() * &big;
        let m2 = &h_branch(&d, &big, 2, &ctx).unwrap() * &big;
        let m0 = &h_branch(&d, &big, 0, &ctx).unwrap() * &big;
        assert!((m1.re.to_f64() + c).abs() < 1e-4);
        assert!((m2.re.to_f64() + 1.0 - c).abs() < 1e-4);
        assert!((m0.re.to_f64() - 1.0).abs() < 1e-4);
        if d.regime == Regime::Middle {
            // In the pushed regimes the zero over z_c cancels a pole.
            let zc = XComplex::from_real(d.z_c.clone());
            assert!(h_branch(&d, &zc, 0, &ctx).unwrap().abs() < 1e-40);
        }
    }
}

#[test]
fn upsilon_product_and_conjugation() {
    let ctx = ctx(256);
    let d = curve(&g0(&ctx), &ctx.real(0.3), &ctx).unwrap();
    let want = Float::with_val(256, d.a1.square_ref()) / Float::with_val(256, &d.b2 - &d.b1);
    for (x, y) in [(0.3, 0.5), (-2.5, 1.0), (3.0, -0.2)] {
        let z = ctx.complex(x, y);
        let prod = (0..3).fold(XComplex::from_real(ctx.one()), |acc, k| &acc * &upsilon(&d, 1, &z, k, &ctx).unwrap());
        assert!(diff(&prod.abs(), &want) < 1e-60);
        for k in 0..3 {
            let a = upsilon(&d, 2, &z, k, &ctx).unwrap();
            let b = upsilon(&d, 2, &z.conj(), k, &ctx).unwrap();
            assert!((&a.conj() - &b).abs() < 1e-60);
        }
    }
    let big = ctx.complex(1e8, 0.0);
    let u = upsilon(&d, 1, &big, 1, &ctx).unwrap();
    assert!((u.re.to_f64() - 1e8).abs() < 10.0);
}

#[test]
fn equilibrium_masses_and_flatness() {
    let ctx = ctx(256);
    let d = curve(&g0(&ctx), &ctx.real(0.3), &ctx).unwrap();
    let eq = equilibrium(&d, &ctx).unwrap();
    assert!((eq.masses[0].to_f64() - 0.3).abs() < 1e-8);
    assert!((eq.masses[1].to_f64() - 0.7).abs() < 1e-8);
    for x in [-1.9, -1.7, -1.5, -1.3, -1.1] {
        let v = eq.potential(&ctx.complex(x, 0.0), [2.0, 1.0]).unwrap();
        assert!((v.to_f64() - eq.ell1.to_f64()).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn pushed_equilibrium_is_flat_on_the_shrunken_support() {
    let ctx = ctx(256);
    let d = curve(&g0(&ctx), &ctx.real(0.05), &ctx).unwrap();
    let eq = equilibrium(&d, &ctx).unwrap();
    assert!((eq.masses[0].to_f64() - 0.05).abs() < 1e-8);
    let (a, b) = eq.support(1);
    for k in 1..=5 {
        let x = a.to_f64() + (b.to_f64() - a.to_f64()) * k as f64 / 6.0;
        let v = eq.potential(&ctx.complex(x, 0.0), [2.0, 1.0]).unwrap();
        assert!((v.to_f64() - eq.ell1.to_f64()).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn small_mass_recovers_single_interval_constant() {
    let ctx = ctx(256);
    let d = curve(&g0(&ctx), &ctx.real(1e-3), &ctx).unwrap();
    let eq = equilibrium(&d, &ctx).unwrap();
    let two_log4 = 2.0 * 4f64.ln();
    assert!((eq.ell2.to_f64() - two_log4).abs() < 0.02, "ell2 = {}", eq.ell2.to_f64());
}

#[test]
fn energy_minimiser_tracks_the_endpoint() {
    let ctx = ctx(256);
    let g = g0(&ctx);
    let est = energy_oracle(&g, 0.05, 400, 3000, &ctx).unwrap();
    assert!(est.history.windows(2).all(|w| w[1] <= w[0]));
    assert!((est.beta_c1 + 1.37249319964295).abs() < 0.02, "beta {}", est.beta_c1);
    assert_eq!(est.alpha_c2, 1.0);
    let mid = energy_oracle(&g, 0.5, 100, 500, &ctx).unwrap();
    assert!((mid.beta_c1 + 1.0).abs() < 1e-9 && (mid.alpha_c2 - 1.0).abs() < 1e-9);
}
