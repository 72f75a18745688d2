//! `constants` and `nnrr`.

use crate::cache;
use crate::config::Setup;
use angelesco::curve::{curve, CurveData};
use angelesco::mop::{MultiIndex, NnrrTable};
use angelesco::precision::XReal;
use anyhow::{bail, Context};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_constants(setup: &Setup) -> anyhow::Result<()> {
    let Some(c) = &setup.config.c else {
        bail!("constants needs --c");
    };
    let c = setup.ctx.parse(c)?;
    let data = curve(&setup.geometry, &c, &setup.ctx)?;
    let mut json = data.to_json(setup.digits());
    json.push('\n');
    emit(setup.config.out.as_deref(), &json)
}

/// Indices `k·ray + offset` with both components at most `n_max`.
pub fn ray_indices(ray: [usize; 2], offset: [usize; 2], n_max: usize) -> Vec<(usize, MultiIndex)> {
    (1..)
        .map(|k| (k, MultiIndex::new(ray[0] * k + offset[0], ray[1] * k + offset[1])))
        .take_while(|(_, n)| n.n1 <= n_max && n.n2 <= n_max)
        .collect()
}

/// `[|a1 − A1|, |a2 − A2|, |b1 − B1|, |b2 − B2|]` at one index.
pub fn coefficient_errors(table: &NnrrTable, n: MultiIndex, target: &CurveData) -> anyhow::Result<[f64; 4]> {
    let e = table.get(n).with_context(|| format!("table has no entry at {n}"))?;
    let diff = |x: &XReal, y: &XReal| {
        let mut d = x.clone();
        d -= y;
        d.abs().to_f64()
    };
    Ok([
        diff(&e.a[0], &target.a1),
        diff(&e.a[1], &target.a2),
        diff(&e.b[0], &target.b1),
        diff(&e.b[1], &target.b2),
    ])
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Error streams against the constants at `c_n = n1/|n|` along a ray.
pub fn ray_errors(setup: &Setup, table: &NnrrTable, rows: &[(usize, MultiIndex)]) -> anyhow::Result<String> {
    let mut curves: BTreeMap<(usize, usize), CurveData> = BTreeMap::new();
    let mut out = String::from("k,n1,n2,c,err_a1,err_a2,err_b1,err_b2\n");
    for &(k, n) in rows {
        let s = n.size();
        let g = gcd(n.n1, s);
        let key = (n.n1 / g, s / g);
        if let std::collections::btree_map::Entry::Vacant(e) = curves.entry(key) {
            let c = setup.ctx.real(key.0) / key.1 as u32;
            e.insert(curve(&setup.geometry, &c, &setup.ctx)?);
        }
        let err = coefficient_errors(table, n, &curves[&key])?;
        let _ = writeln!(
            out,
            "{k},{},{},{:.12},{:.6e},{:.6e},{:.6e},{:.6e}",
            n.n1,
            n.n2,
            key.0 as f64 / key.1 as f64,
            err[0],
            err[1],
            err[2],
            err[3]
        );
    }
    Ok(out)
}

/// Full table plus the error streams along `--ray` (default the diagonal).
/// With `--out PATH` the streams go to the sibling `*.errors.csv`; on stdout
/// they follow the table after a blank line.
pub fn cmd_nnrr(setup: &Setup) -> anyhow::Result<()> {
    let n_max = setup.config.n_max.unwrap_or(12);
    if n_max < 2 {
        bail!("nnrr needs --nmax of at least 2, got {n_max}");
    }
    let (table, cached) = cache::load_or_compute(setup, n_max)
        .context("computing the recurrence table failed; a larger --bits may help")?;
    if cached {
        eprintln!("recurrence table loaded from cache");
    }
    let rows = ray_indices(setup.config.ray.unwrap_or([1, 1]), setup.config.offset.unwrap_or([0, 0]), n_max);
    let errors = ray_errors(setup, &table, &rows)?;
    let csv = table.to_csv(setup.digits());
    match &setup.config.out {
        Some(p) => {
            emit(Some(p), &csv)?;
            emit(Some(&p.with_extension("errors.csv")), &errors)
        }
        None => emit(None, &format!("{csv}\n{errors}")),
    }
}
