//! Integration checks for the MOP engine on the reference geometry and on
//! an asymmetric exponential-weight system.
//!
//! Frozen values come from an exact rational-arithmetic solve of the same
//! moment systems (the reference moments are rational).

use angelesco::mop::{
    interlace, nnrr_entries, recurrence_residual, recurrence_residual_relative, zeros, AngelescoSystem, Geometry,
    MultiIndex, WeightSpec,
};
use angelesco::precision::{PrecisionContext, XReal};
use rug::Float;

fn ctx512() -> PrecisionContext {
    PrecisionContext::new(512).unwrap()
}

fn close(x: &XReal, want: &str, tol: f64) -> bool {
    let w = Float::with_val(x.prec(), Float::parse(want).unwrap());
    Float::with_val(x.prec(), x - &w).abs() <= tol
}

fn skewed_system(max_size: usize, ctx: &PrecisionContext) -> AngelescoSystem {
    let g = Geometry::from_f64([-3.0, -0.5, 0.25, 1.75], ctx).unwrap();
    AngelescoSystem::new(
        g,
        [WeightSpec::exp_poly(1, &["0.3", "-0.5", "0.25"]), WeightSpec::exp_poly(2, &["0", "1.2"])],
        max_size,
        ctx,
    )
    .unwrap()
}

#[test]
fn exact_low_order_coefficients() {
    let ctx = ctx512();
    let sys = AngelescoSystem::reference(12, &ctx).unwrap();
    let idx = [MultiIndex::new(1, 1), MultiIndex::new(2, 1), MultiIndex::new(4, 4), MultiIndex::new(3, 5)];
    let (t, sols) = nnrr_entries(&sys, &idx).unwrap();

    let e = t.get(MultiIndex::new(1, 1)).unwrap();
    assert!(close(&e.a[0], "0.083333333333333333333333333333333333", 1e-35));
    assert!(close(&e.b[0], "-1.4666666666666666666666666666666667", 1e-33));

    let e = t.get(MultiIndex::new(2, 1)).unwrap();
    assert!(close(&e.a[0], "0.0674074074074074074074074074074", 1e-30));
    assert!(close(&e.a[1], "0.0814814814814814814814814814815", 1e-30));
    assert!(close(&e.b[0], "-1.47210884353741496598639455782", 1e-29));

    let e = t.get(MultiIndex::new(4, 4)).unwrap();
    assert!(close(&e.a[1], "0.0640104929370412077107107821547", 1e-30));
    assert!(close(&e.b[1], "1.47766084371360354514098716551", 1e-29));

    let e = t.get(MultiIndex::new(3, 5)).unwrap();
    assert!(close(&e.a[0], "0.0650149902076166679196392370295", 1e-30));
    assert!(close(&e.a[1], "0.0636212885620346356969570680368", 1e-30));
    assert!(close(&e.b[0], "-1.47679169167314018417425553013", 1e-29));
    assert!(close(&e.b[1], "1.47759367524682494330417699029", 1e-29));

    // P_(2,2) = x^4 - 24/5 x^2 + 5.
    let p = &sols[&MultiIndex::new(2, 2)].p_monic;
    assert!(close(&p.coeff(0), "5", 1e-100));
    assert!(close(&p.coeff(2), "-4.8", 1e-100));
    assert!(p.coeff(1).to_f64().abs() < 1e-100 && p.coeff(3).to_f64().abs() < 1e-100);
}

#[test]
fn perfectness_on_both_systems() {
    let ctx = ctx512();
    let grid: Vec<MultiIndex> = (0..=12)
        .flat_map(|a| (0..=12).map(move |b| MultiIndex::new(a, b)))
        .filter(|n| n.size() > 0)
        .collect();
    for sys in [AngelescoSystem::reference(24, &ctx).unwrap(), skewed_system(24, &ctx)] {
        let sols = sys.solve_many(&grid).unwrap();
        for (n, s) in &sols {
            assert!(s.residual < 1e-80, "residual at {n}: {:e}", s.residual.to_f64());
            assert_eq!(s.p_monic.degree(), Some(n.size()));
            for i in 1..=2 {
                match s.a_poly(i) {
                    Some(a) => assert!(a.degree().unwrap() < n.get(i)),
                    None => assert_eq!(n.get(i), 0),
                }
            }
        }
    }
}

#[test]
fn positivity_and_route_agreement_on_full_grid() {
    let ctx = ctx512();
    for sys in [AngelescoSystem::reference(13, &ctx).unwrap(), skewed_system(13, &ctx)] {
        let grid: Vec<MultiIndex> = (0..=6)
            .flat_map(|a| (0..=6).map(move |b| MultiIndex::new(a, b)))
            .collect();
        let (t, _) = nnrr_entries(&sys, &grid).unwrap();
        for (n, e) in &t.entries {
            for i in 1..=2 {
                if n.get(i) >= 1 {
                    assert!(e.a[i - 1] > 0, "a_{{{n},{i}}} not positive");
                } else {
                    assert!(e.a[i - 1].is_zero());
                }
                assert!(e.b[i - 1].is_finite());
                assert!(e.b_discrepancy[i - 1] < 1e-60, "b routes at {n}");
            }
        }
    }
}

#[test]
fn recurrence_holds_on_small_indices() {
    let ctx = ctx512();
    let sys = AngelescoSystem::reference(12, &ctx).unwrap();
    let n = MultiIndex::new(1, 1);
    let (t, sols) = nnrr_entries(&sys, &[n, MultiIndex::new(0, 3)]).unwrap();
    assert!(recurrence_residual(&t, &sols, n, 1).unwrap() < 1e-100);
    let m = MultiIndex::new(0, 3);
    assert!(recurrence_residual(&t, &sols, m, 2).unwrap() < *ctx.tol());
}

#[test]
fn recurrence_sweep_on_skewed_system() {
    let ctx = ctx512();
    let sys = skewed_system(21, &ctx);
    let grid: Vec<MultiIndex> = (0..=10)
        .flat_map(|a| (0..=10).map(move |b| MultiIndex::new(a, b)))
        .collect();
    let (t, sols) = nnrr_entries(&sys, &grid).unwrap();
    for &n in &grid {
        for j in 1..=2 {
            let r = recurrence_residual_relative(&t, &sols, n, j).unwrap();
            let bound = Float::with_val(512, ctx.tol() * (n.size().max(1) as u32));
            assert!(r <= bound, "residual at {n}, j = {j}: {:e}", r.to_f64());
        }
    }
}

#[test]
fn zeros_split_and_interlace() {
    let ctx = ctx512();
    let sys = AngelescoSystem::reference(14, &ctx).unwrap();
    let mut pairs = Vec::new();
    for n1 in 0..=6 {
        for n2 in 0..=6 {
            for j in 1..=2 {
                pairs.push((MultiIndex::new(n1, n2), j));
            }
        }
    }
    let mut idx: Vec<MultiIndex> = pairs.iter().flat_map(|(n, j)| [*n, n.plus(*j)]).collect();
    idx.sort();
    idx.dedup();
    let sols = sys.solve_many(&idx).unwrap();
    for (n, j) in pairs {
        let m = n.plus(j);
        let zn = zeros(&sols[&n].p_monic, n, &sys.geometry, &ctx).unwrap();
        let zm = zeros(&sols[&m].p_monic, m, &sys.geometry, &ctx).unwrap();
        for i in 0..2 {
            assert!(interlace(&zn[i], &zm[i]), "{n} vs {m} on interval {}", i + 1);
        }
    }
}

#[test]
fn marginal_zero_drifts_to_left_endpoint() {
    let ctx = ctx512();
    let sys = AngelescoSystem::reference(34, &ctx).unwrap();
    let mut last = f64::INFINITY;
    let mut first = None;
    for k in 8..=32 {
        let n = MultiIndex::new(2, k);
        let z = zeros(&sys.type2(n).unwrap(), n, &sys.geometry, &ctx).unwrap();
        let top = z[0][1].to_f64();
        assert!(top < last, "largest first-interval zero rose at k = {k}");
        assert!(top > -2.0);
        first.get_or_insert(top);
        last = top;
    }
    // The approach is slow (about -1.67 at k = 32) but steady.
    assert!(first.unwrap() - last > 0.05);
}

#[test]
fn linear_form_slope_matches_total_degree() {
    let ctx = ctx512();
    let sys = AngelescoSystem::reference(6, &ctx).unwrap();
    let n = MultiIndex::new(2, 2);
    let s = sys.linear_form_slope(n, &[10.0, 20.0, 40.0]).unwrap();
    // Symmetry kills the z^{-5} term, so the slope is already close to −4.
    assert!((s + 4.0).abs() < 0.05, "slope {s}");
    let s = sys.remainder_slope(n, 1, &[1e3, 2e3, 4e3]).unwrap();
    assert!((s + 3.0).abs() < 0.05, "slope {s}");
}

#[test]
fn solution_json_has_decimal_coefficients() {
    let ctx = PrecisionContext::new(256).unwrap();
    let sys = AngelescoSystem::reference(4, &ctx).unwrap();
    let js = sys.solve(MultiIndex::new(1, 0)).unwrap().to_json(20);
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    assert_eq!(v["p_monic"][0], "1.5000000000000000000");
    assert_eq!(v["a1_poly"][0], "1.0000000000000000000");
    assert!(v["a2_poly"].is_null());
}
