//! On-disk cache of recurrence tables, enabled by `ANGELESCO_CACHE_DIR`.

use crate::config::Setup;
use angelesco::mop::{nnrr_entries, nnrr_table, AngelescoSystem, MultiIndex, NnrrTable};
use angelesco::precision::XReal;
use anyhow::Context;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::PathBuf;

pub const CACHE_ENV: &str = "ANGELESCO_CACHE_DIR";

/// Small index recomputed on every cache hit.
const SPOT_CHECK: MultiIndex = MultiIndex { n1: 2, n2: 1 };

/// Where the table for this setup lives; `None` when caching is off.
pub fn table_path(setup: &Setup, n_max: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty())?;
    let cfg = &setup.config;
    let key = format!(
        "geometry={};weight1={};weight2={};bits={};n_max={n_max}",
        cfg.geometry.join(","),
        cfg.weights[0],
        cfg.weights[1],
        cfg.bits
    );
    let digest = Sha256::digest(key.as_bytes());
    let hex: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
    Some(PathBuf::from(dir).join(format!("nnrr-{hex}.csv")))
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial table.
fn write_atomic(path: &PathBuf, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().context("cache path has no directory")?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// A cached table is trusted only if one small entry recomputes to the
/// stored digits.
fn spot_check(setup: &Setup, table: &NnrrTable) -> anyhow::Result<bool> {
    let Some(stored) = table.get(SPOT_CHECK) else {
        return Ok(false);
    };
    let system = AngelescoSystem::new(setup.geometry.clone(), setup.weights.clone(), SPOT_CHECK.size() + 1, &setup.ctx)?;
    let (fresh, _) = nnrr_entries(&system, &[SPOT_CHECK])?;
    let fresh = fresh.get(SPOT_CHECK).context("spot-check entry missing")?;
    let tol = setup.ctx.real(10f64.powi(-(setup.digits() as i32 - 8)));
    let close = |x: &XReal, y: &XReal| {
        let mut d = x.clone();
        d -= y;
        d.abs() <= tol.clone() * x.to_f64().abs().max(1.0)
    };
    Ok((0..2).all(|i| close(&stored.a[i], &fresh.a[i]) && close(&stored.b[i], &fresh.b[i])))
}

/// Full table for `n1, n2 ≤ n_max`, through the cache when enabled.
/// Returns the table and whether it came from the cache.
pub fn load_or_compute(setup: &Setup, n_max: usize) -> anyhow::Result<(NnrrTable, bool)> {
    let path = table_path(setup, n_max);
    if let Some(p) = path.as_ref().filter(|p| p.exists()) {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        if let Ok(table) = NnrrTable::from_csv(&text, &setup.ctx) {
            if table.len() == (n_max + 1) * (n_max + 1) && spot_check(setup, &table)? {
                return Ok((table, true));
            }
        }
    }
    let table = nnrr_table(&setup.geometry, &setup.weights, n_max, &setup.ctx)?;
    if let Some(p) = path {
        write_atomic(&p, &table.to_csv(setup.digits()))?;
    }
    Ok((table, false))
}
