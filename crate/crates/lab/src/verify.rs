//! Verification suites with a JSON verdict.

use crate::commands::{coefficient_errors, emit, ray_indices};
use crate::config::{RunConfig, Setup};
use angelesco::curve::{curve, equilibrium, CurveData};
use angelesco::mop::{nnrr_entries, AngelescoSystem, MultiIndex};
use angelesco::szego::{ratio_report, subleading_shift};
use angelesco::tree::{
    assemble_j, assemble_l, build_tree, m_closed, m_recursion, spectral_density, spectral_mass, spectrum_probe, supports,
    CoeffSource, SyntheticSource,
};
use anyhow::{bail, Context};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Recurrence coefficients along a ray approach the curve constants.
    Limits,
    /// Marginal ray `(1, k)`: predictor ratio and the limits of `b`.
    Marginal,
    /// Truncated tree spectra against the supports.
    Spectrum,
    /// Fixed-point against closed-form `m`-functions, spectral masses.
    Mfun,
    /// Equilibrium masses `(c, 1 − c)`.
    Equilibrium,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub threshold: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub suite: Suite,
    pub pass: bool,
    pub config: RunConfig,
    pub checks: Vec<Check>,
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

/// `value ≤ threshold` (or `<` when `strict`).
fn at_most(name: impl Into<String>, value: f64, threshold: f64, strict: bool) -> Check {
    let pass = if strict { value < threshold } else { value <= threshold };
    Check {
        name: name.into(),
        value: sci(value),
        threshold: sci(threshold),
        pass,
    }
}

fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value: sci(value),
        threshold: sci(threshold),
        pass: value >= threshold,
    }
}

const STREAMS: [&str; 4] = ["a1", "a2", "b1", "b2"];

fn limits(setup: &Setup) -> anyhow::Result<Vec<Check>> {
    let n_max = setup.config.n_max.unwrap_or(24);
    let ray = setup.config.ray.unwrap_or([1, 1]);
    if setup.config.offset.is_some_and(|o| o != [0, 0]) {
        bail!("the limits suite follows rays through the origin; drop --offset");
    }
    let rows = ray_indices(ray, [0, 0], n_max);
    let last = rows.last().map(|r| r.0).unwrap_or(0);
    if last <= 12 {
        bail!("the limits suite compares k = 8, 12 and a later k; --nmax {n_max} is too small");
    }
    let pick = |k: usize| rows[k - 1].1;
    let wanted = [pick(8), pick(12), pick(last)];
    let system = AngelescoSystem::new(setup.geometry.clone(), setup.weights.clone(), wanted[2].size() + 1, &setup.ctx)?;
    let (table, _) = nnrr_entries(&system, &wanted)?;
    let c = setup.ctx.real(ray[0]) / (ray[0] + ray[1]) as u32;
    let target = curve(&setup.geometry, &c, &setup.ctx)?;
    let err = |n| coefficient_errors(&table, n, &target);
    let (e8, e12, e_last) = (err(wanted[0])?, err(wanted[1])?, err(wanted[2])?);
    let mut checks = Vec::new();
    for (s, name) in STREAMS.iter().enumerate() {
        checks.push(at_most(format!("{name} error at k = {last} below k = 8"), e_last[s], e8[s], true));
        checks.push(at_most(format!("{name} error at k = {last} within 0.6 of k = 12"), e_last[s], 0.6 * e12[s], false));
    }
    Ok(checks)
}

fn marginal(setup: &Setup) -> anyhow::Result<Vec<Check>> {
    let k = setup.config.n_max.unwrap_or(40);
    if k <= 10 {
        bail!("the marginal suite compares k = 10 with a larger --nmax, got {k}");
    }
    let z = setup.z_or(["4", "0"])?;
    let (early, late) = (MultiIndex::new(1, 10), MultiIndex::new(1, k));
    let system = AngelescoSystem::new(setup.geometry.clone(), setup.weights.clone(), late.size() + 1, &setup.ctx)?;
    let rows = ratio_report(&system, &[early, late], &[z])?;
    let mut checks = vec![at_most(
        format!("|P/prediction - 1| at k = {k} below k = 10"),
        rows[1].abs_err,
        rows[0].abs_err,
        true,
    )];
    let collapsed = curve(&setup.geometry, &setup.ctx.zero(), &setup.ctx)?;
    for (i, b) in [(1, &collapsed.b1), (2, &collapsed.b2)] {
        let estimate = -subleading_shift(&system, late, i)?.to_f64();
        checks.push(at_most(
            format!("b{i} limit estimate {estimate:.6} against {:.6}", b.to_f64()),
            (estimate - b.to_f64()).abs(),
            0.05,
            false,
        ));
    }
    Ok(checks)
}

fn spectrum(setup: &Setup) -> anyhow::Result<Vec<Check>> {
    let depth = setup.config.depth.unwrap_or(10);
    if !(3..=11).contains(&depth) {
        bail!("--depth must lie in 3..=11, got {depth}");
    }
    let c = setup.c_or("0.5")?;
    let cd = curve(&setup.geometry, &c, &setup.ctx)?;
    let target = supports(&cd);
    let synthetic = SyntheticSource::new(&setup.geometry, depth + 2, &setup.ctx)?;
    let j_source = CoeffSource::synthetic(synthetic);
    let mut checks = Vec::new();
    for op in ["L1", "J"] {
        let probe = |d: usize| -> anyhow::Result<_> {
            let tree = build_tree(d)?;
            let t = if op == "L1" { assemble_l(&tree, 1, &cd)? } else { assemble_j(&tree, &j_source)? };
            Ok(spectrum_probe(&t, &target, 0.1)?)
        };
        let (shallow, deep) = (probe(depth - 2)?, probe(depth)?);
        checks.push(at_least(format!("{op} inside fraction at depth {depth}"), deep.inside_fraction, 0.9));
        checks.push(at_most(format!("{op} coverage gap at depth {depth}"), deep.max_coverage_gap, 0.05, false));
        checks.push(at_least(
            format!("{op} inside fraction does not drop from depth {}", depth - 2),
            deep.inside_fraction,
            shallow.inside_fraction,
        ));
        checks.push(at_most(
            format!("{op} coverage gap shrinks from depth {}", depth - 2),
            deep.max_coverage_gap,
            shallow.max_coverage_gap,
            true,
        ));
    }
    Ok(checks)
}

/// Twenty points spread over `[−3, 3] × [0.1, 0.9]`.
pub fn upper_grid(setup: &Setup) -> Vec<angelesco::precision::XComplex> {
    (0..20)
        .map(|k| setup.ctx.complex(-3.0 + 6.0 * k as f64 / 19.0, 0.1 + 0.4 * (k % 3) as f64))
        .collect()
}

fn mfun(setup: &Setup) -> anyhow::Result<Vec<Check>> {
    let c = setup.c_or("0.4")?;
    let cd: CurveData = curve(&setup.geometry, &c, &setup.ctx)?;
    let mut worst: f64 = 0.0;
    for z in upper_grid(setup) {
        let pair = m_recursion(&cd, &z, 100_000, &setup.ctx)?;
        for l in 1..=2 {
            let closed = m_closed(&cd, l, &z, None, &setup.ctx)?;
            worst = worst.max((&closed - pair.get(l)).abs().to_f64());
        }
    }
    let mut checks = vec![at_most("max |recursion - closed form|", worst, 1e-10, false)];
    let [a1, _, _, b2] = setup.geometry.to_f64();
    for l in 1..=2 {
        let mass = spectral_mass(&cd, l, &setup.ctx)?.to_f64();
        checks.push(at_most(format!("|mass - 1| for root {l}"), (mass - 1.0).abs(), 1e-6, false));
        let mut lowest = f64::INFINITY;
        for k in 0..=200 {
            let x = setup.ctx.real(a1 + (b2 - a1) * k as f64 / 200.0);
            lowest = lowest.min(spectral_density(&cd, l, &x, &setup.ctx)?.to_f64());
        }
        checks.push(at_least(format!("min density for root {l}"), lowest, 0.0));
    }
    Ok(checks)
}

fn equilibrium_suite(setup: &Setup) -> anyhow::Result<Vec<Check>> {
    let c = setup.c_or("0.5")?;
    let cd = curve(&setup.geometry, &c, &setup.ctx)?;
    let eq = equilibrium(&cd, &setup.ctx)?;
    let c = c.to_f64();
    Ok(vec![
        at_most("|mass 1 - c|", (eq.masses[0].to_f64() - c).abs(), 1e-8, false),
        at_most("|mass 2 - (1 - c)|", (eq.masses[1].to_f64() - (1.0 - c)).abs(), 1e-8, false),
    ])
}

pub fn run_suite(setup: &Setup, suite: Suite) -> anyhow::Result<Verdict> {
    let checks = match suite {
        Suite::Limits => limits(setup),
        Suite::Marginal => marginal(setup),
        Suite::Spectrum => spectrum(setup),
        Suite::Mfun => mfun(setup),
        Suite::Equilibrium => equilibrium_suite(setup),
    }
    .with_context(|| format!("suite {suite:?} could not run"))?;
    Ok(Verdict {
        suite,
        pass: checks.iter().all(|c| c.pass),
        config: setup.config.clone(),
        checks,
    })
}

/// Runs the suite, writes the verdict and reports whether it passed.
pub fn cmd_verify(setup: &Setup, suite: Suite) -> anyhow::Result<bool> {
    let verdict = run_suite(setup, suite)?;
    let mut json = serde_json::to_string_pretty(&verdict)?;
    json.push('\n');
    emit(setup.config.out.as_deref(), &json)?;
    Ok(verdict.pass)
}
