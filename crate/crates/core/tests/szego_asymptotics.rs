use angelesco::curve::Side;
use angelesco::mop::{AngelescoSystem, Geometry, MultiIndex, WeightSpec};
use angelesco::precision::{PrecisionContext, XComplex, XReal};
use angelesco::szego::{
    marginal_predict, on_side, phi_map, ratio_csv, ratio_report, s_x0, subleading_shift, szego_rho, w_map, SzegoFunction,
};
use angelesco::Error;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(256).unwrap()
}

fn close(a: &XComplex, b: &XComplex, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// `S_+ S_− ρ w_+` with `ρ = −2πi μ′`.
fn boundary_product(s: &SzegoFunction, g: &Geometry, x: f64, ctx: &PrecisionContext) -> XComplex {
    let x: XReal = ctx.real(x);
    let z = XComplex::from_real(x.clone());
    let up = s.eval(&z, Some(Side::Upper)).unwrap().value;
    let lo = s.eval(&z, Some(Side::Lower)).unwrap().value;
    let rho = XComplex::new(ctx.zero(), -(s.density(&x) * ctx.pi() * 2u32));
    let w = w_map(g, 2, &on_side(&x, Side::Upper));
    &(&(&up * &lo) * &rho) * &w
}

#[test]
fn conformal_map_branches() {
    let ctx = ctx();
    let g = Geometry::reference(&ctx);
    let w = w_map(&g, 2, &ctx.complex(-2.0, 0.0));
    assert!(close(&w, &ctx.complex(-12f64.sqrt(), 0.0), 1e-15));
    for x in [1.0, 1.25, 1.5, 1.9, 2.0] {
        for side in [Side::Upper, Side::Lower] {
            let phi = phi_map(&g, 2, &on_side(&ctx.real(x), side));
            assert!((phi.abs().to_f64() - 0.25).abs() < 1e-60, "x = {x}");
        }
    }
    let big = ctx.complex(1e12, 3e11);
    let drift = phi_map(&g, 2, &big).add_real(&ctx.real(1.5)) - big;
    assert!(drift.abs() < 1e-10);
    for (re, im) in [(0.0, 0.5), (-3.0, -0.1), (1.5, 1e-6), (5.0, 0.0)] {
        let phi = phi_map(&g, 2, &ctx.complex(re, im));
        assert!(phi.abs() > 0.25);
    }
}

#[test]
fn boundary_values_satisfy_the_product_identity() {
    let ctx = ctx();
    let g = Geometry::reference(&ctx);
    let one = ctx.complex(1.0, 0.0);
    for weight in [
        WeightSpec::lebesgue(2),
        WeightSpec::exp_poly(2, &["0.3", "-0.5", "0.25"]),
        WeightSpec::poly(2, &["1", "0.5", "-0.1"]),
    ] {
        let s = SzegoFunction::new(&g, &weight, &ctx).unwrap();
        for x in [1.05, 1.3, 1.5, 1.71, 1.98] {
            let prod = boundary_product(&s, &g, x, &ctx);
            assert!(close(&prod, &one, 1e-8), "{weight} at {x}: {:?}", prod.to_f64());
        }
    }
}

#[test]
fn szego_function_symmetries() {
    let ctx = ctx();
    let g = Geometry::reference(&ctx);
    let s = SzegoFunction::new(&g, &WeightSpec::lebesgue(2), &ctx).unwrap();
    for x in [2.01, 3.0, 40.0] {
        let v = s.eval(&ctx.complex(x, 0.0), None).unwrap().value;
        assert!(v.im.is_zero() && v.re > 0, "x = {x}");
    }
    let weighted = SzegoFunction::new(&g, &WeightSpec::poly(2, &["1", "0.5", "-0.1"]), &ctx).unwrap();
    for (re, im) in [(0.3, 0.4), (1.5, 0.01), (-4.0, 2.0), (1.99, -0.2)] {
        let z = ctx.complex(re, im);
        let a = weighted.eval(&z, None).unwrap().value;
        let b = weighted.eval(&z.conj(), None).unwrap().value;
        assert!(close(&b, &a.conj(), 1e-60));
        assert!(a.abs() > 1e-3);
    }
    let far = weighted.eval(&ctx.complex(1e30, 0.0), None).unwrap();
    assert!(close(&far.value, &far.at_infinity, 1e-20));
}

#[test]
fn evaluations_near_the_cut_match_boundary_values() {
    let ctx = ctx();
    let g = Geometry::reference(&ctx);
    let s = SzegoFunction::new(&g, &WeightSpec::exp_poly(2, &["0.3", "-0.5", "0.25"]), &ctx).unwrap();
    for x in [1.2, 1.5, 1.8] {
        let edge = s.eval(&ctx.complex(x, 0.0), Some(Side::Upper)).unwrap().value;
        let near = s.eval(&ctx.complex(x, 1e-9), None).unwrap().value;
        assert!(close(&edge, &near, 1e-7), "x = {x}");
        let below = s.eval(&ctx.complex(x, -1e-9), None).unwrap().value;
        let lower = s.eval(&ctx.complex(x, 0.0), Some(Side::Lower)).unwrap().value;
        assert!(close(&below, &lower, 1e-7));
    }
    let err = s.eval(&ctx.complex(1.5, 0.0), None).unwrap_err();
    assert!(matches!(err, Error::Domain(_)));
}

#[test]
fn doubling_the_nodes_is_stable() {
    let ctx = ctx();
    let g = Geometry::reference(&ctx);
    let w = WeightSpec::poly(2, &["3", "-1"]);
    let coarse = SzegoFunction::new(&g, &w, &ctx).unwrap();
    let fine = coarse.clone().with_nodes(2 * angelesco::szego::DEFAULT_NODES);
    for (re, im) in [(0.0, 0.0), (1.5, 0.05), (2.5, 0.0), (1.1, -1.0), (-1.0, 3.0)] {
        let z = ctx.complex(re, im);
        let a = coarse.eval(&z, None).unwrap().value;
        let b = fine.eval(&z, None).unwrap().value;
        assert!(close(&a, &b, 1e-10), "z = ({re}, {im})");
    }
}

#[test]
fn one_point_szego_function() {
    let ctx = ctx();
    let g = Geometry::reference(&ctx);
    let x0 = ctx.real(-2);
    let phi0 = phi_map(&g, 2, &XComplex::from_real(x0.clone())).re;
    for x in [1.1, 1.5, 1.93] {
        for side in [Side::Upper, Side::Lower] {
            let s = s_x0(&g, &ctx.complex(x, 0.0), &x0, Some(side)).unwrap();
            let lhs = s.norm_sqr() * (ctx.real(x) - &x0) + &phi0;
            assert!(lhs.abs() < 1e-10, "x = {x}");
        }
    }
    let alpha1 = g.interval(1).0.clone();
    let far = s_x0(&g, &ctx.complex(1e40, 1e39), &alpha1, None).unwrap();
    assert!(close(&far, &ctx.complex(1.0, 0.0), 1e-30));
    let z = ctx.complex(0.4, 0.9);
    let a = s_x0(&g, &z, &alpha1, None).unwrap();
    let b = s_x0(&g, &z.conj(), &alpha1, None).unwrap();
    assert!(close(&b, &a.conj(), 1e-60));
    // Square of the closed form against the defining radicand.
    let phi = phi_map(&g, 2, &z);
    let phi_a = phi_map(&g, 2, &XComplex::from_real(alpha1.clone()));
    let a0 = ctx.real(1) / 16u32;
    let radicand = &(&(&phi - &phi_a) / &(&phi_a * &phi).add_real(&-a0)) * &(&(&phi_a * &phi) / &z.add_real(&-alpha1));
    assert!(close(&(&a * &a), &radicand, 1e-60));
    assert!(matches!(s_x0(&g, &z, &ctx.real(1.5), None), Err(Error::Domain(_))));
}

#[test]
fn predictor_reduces_to_one_interval_formula() {
    let ctx = ctx();
    let g = Geometry::reference(&ctx);
    let w = WeightSpec::poly(2, &["1", "0.5"]);
    let z = ctx.complex(0.5, 0.75);
    let got = marginal_predict(&g, MultiIndex::new(0, 7), &z, &w, &ctx).unwrap();
    let s = szego_rho(&g, &w, &z, None, &ctx).unwrap().normalized();
    let want = &s * &phi_map(&g, 2, &z).powi(7);
    assert!(close(&got, &want, 1e-60));
    let far = ctx.complex(1e25, 0.0);
    let big = marginal_predict(&g, MultiIndex::new(2, 5), &far, &w, &ctx).unwrap();
    let monic = &big / &far.powi(7);
    assert!(close(&monic, &ctx.complex(1.0, 0.0), 1e-20));
    for bad in [ctx.complex(1.5, 0.0), ctx.complex(-2.0, 0.0)] {
        let got = marginal_predict(&g, MultiIndex::new(1, 3), &bad, &w, &ctx);
        assert!(matches!(got, Err(Error::Domain(_))), "{got:?}");
    }
}

#[test]
fn marginal_ratio_improves_with_degree() {
    let ctx = PrecisionContext::new(512).unwrap();
    let system = AngelescoSystem::reference(42, &ctx).unwrap();
    let z = ctx.complex(4.0, 0.0);
    let indices: Vec<_> = [10, 20, 40].map(|k| MultiIndex::new(1, k)).to_vec();
    let rows = ratio_report(&system, &indices, &[z]).unwrap();
    // Frozen from an independent evaluation of the monic polynomials.
    let expected = [0.044745186, 0.026315195, 0.013852660];
    for (row, want) in rows.iter().zip(expected) {
        assert!((row.abs_err - want).abs() < 1e-8, "{}: {}", row.n, row.abs_err);
    }
    assert!(rows.windows(2).all(|w| w[1].abs_err < w[0].abs_err));
    let csv = ratio_csv(&rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n1,n2,z_re,z_im,ratio_re,ratio_im,abs_err"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn subleading_shift_tracks_the_collapsed_constant() {
    let ctx = PrecisionContext::new(512).unwrap();
    let system = AngelescoSystem::reference(24, &ctx).unwrap();
    let shifts: Vec<f64> = [5, 10, 20]
        .iter()
        .map(|&k| subleading_shift(&system, MultiIndex::new(1, k), 2).unwrap().to_f64())
        .collect();
    // −B_2 = −1.5 at c = 0: the second shift converges to it quickly.
    assert!((shifts[2] + 1.5).abs() < 0.01);
    assert!(shifts.windows(2).all(|w| (w[1] + 1.5).abs() < (w[0] + 1.5).abs()));
}
