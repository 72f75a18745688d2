//! Run configuration shared by every subcommand.

use angelesco::mop::{Geometry, WeightSpec};
use angelesco::precision::{PrecisionContext, XComplex, DEFAULT_BITS};
use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Flags accepted by every subcommand. Anything left unset falls back to the
/// `--config` file, then to the built-in defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// JSON run configuration; explicit flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Interval endpoints `a1,b1,a2,b2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub geom: Option<String>,
    /// Density on the first interval: `const`, `poly:c0,c1,...` or `exppoly:c0,...`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub weight1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub weight2: Option<String>,
    /// Mantissa bits of the extended-precision arithmetic.
    #[arg(long, global = true)]
    pub bits: Option<u32>,
    /// Mass split `c ∈ [0, 1]`, as a decimal.
    #[arg(long, global = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Truncation depth of tree operators.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Ray direction `p,q`: indices `k·(p, q) + offset`.
    #[arg(long, global = true)]
    pub ray: Option<String>,
    #[arg(long, global = true)]
    pub offset: Option<String>,
    /// Probe point `re` or `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Fully resolved configuration, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub geometry: [String; 4],
    pub weights: [WeightSpec; 2],
    pub bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<[String; 2]>,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: ["-2", "-1", "1", "2"].map(String::from),
            weights: [WeightSpec::lebesgue(1), WeightSpec::lebesgue(2)],
            bits: DEFAULT_BITS,
            c: None,
            n_max: None,
            depth: None,
            ray: None,
            offset: None,
            z: None,
            out: None,
        }
    }
}

/// Validated numeric setup derived from a [`RunConfig`].
#[derive(Clone, Debug)]
pub struct Setup {
    pub config: RunConfig,
    pub ctx: PrecisionContext,
    pub geometry: Geometry,
    pub weights: [WeightSpec; 2],
}

fn split_list(s: &str, len: usize, what: &str) -> anyhow::Result<Vec<String>> {
    let parts: Vec<String> = s.split(',').map(|t| t.trim().to_string()).collect();
    if parts.len() != len || parts.iter().any(String::is_empty) {
        bail!("{what} expects {len} comma-separated values, got {s:?}");
    }
    Ok(parts)
}

fn pair(s: &str, what: &str) -> anyhow::Result<[usize; 2]> {
    let p = split_list(s, 2, what)?;
    let n = |t: &str| t.parse::<usize>().with_context(|| format!("{what}: {t:?} is not a count"));
    Ok([n(&p[0])?, n(&p[1])?])
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Base configuration (file or defaults) overridden by explicit flags.
    pub fn from_args(args: &RunArgs) -> anyhow::Result<Self> {
        let mut cfg = match &args.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(g) = &args.geom {
            let p = split_list(g, 4, "--geom")?;
            cfg.geometry = [p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()];
        }
        if let Some(w) = &args.weight1 {
            cfg.weights[0] = WeightSpec::parse(w, 1)?;
        }
        if let Some(w) = &args.weight2 {
            cfg.weights[1] = WeightSpec::parse(w, 2)?;
        }
        if let Some(b) = args.bits {
            cfg.bits = b;
        }
        if let Some(c) = &args.c {
            cfg.c = Some(c.trim().to_string());
        }
        cfg.n_max = args.nmax.or(cfg.n_max);
        cfg.depth = args.depth.or(cfg.depth);
        if let Some(r) = &args.ray {
            cfg.ray = Some(pair(r, "--ray")?);
        }
        if let Some(o) = &args.offset {
            cfg.offset = Some(pair(o, "--offset")?);
        }
        if let Some(z) = &args.z {
            let p: Vec<&str> = z.split(',').map(str::trim).collect();
            cfg.z = match p.as_slice() {
                [re] => Some([re.to_string(), "0".into()]),
                [re, im] => Some([re.to_string(), im.to_string()]),
                _ => bail!("--z expects `re` or `re,im`, got {z:?}"),
            };
        }
        if args.out.is_some() {
            cfg.out = args.out.clone();
        }
        Ok(cfg)
    }

    /// Checks precision, geometry and weights before any command runs.
    pub fn validate(&self) -> anyhow::Result<Setup> {
        let ctx = PrecisionContext::new(self.bits)?;
        let points = [0, 1, 2, 3].map(|k| self.geometry[k].as_str());
        let geometry = Geometry::parse(points, &ctx)?;
        for (k, w) in self.weights.iter().enumerate() {
            if w.interval != k + 1 {
                bail!("weight {} is attached to interval {}", k + 1, w.interval);
            }
            w.validate(&geometry, &ctx)?;
        }
        if let Some(c) = &self.c {
            let v = ctx.parse(c)?;
            if !(0..=1).contains(&v) {
                bail!("c = {c} lies outside [0, 1]");
            }
        }
        if let Some([p, q]) = self.ray {
            if p + q == 0 {
                bail!("ray direction must be nonzero");
            }
        }
        Ok(Setup {
            config: self.clone(),
            ctx,
            geometry,
            weights: self.weights.clone(),
        })
    }
}

impl Setup {
    /// Significant decimal digits carried by the mantissa.
    pub fn digits(&self) -> usize {
        (self.ctx.bits() as f64 * std::f64::consts::LOG10_2).floor() as usize
    }

    pub fn c_or(&self, default: &str) -> anyhow::Result<angelesco::precision::XReal> {
        Ok(self.ctx.parse(self.config.c.as_deref().unwrap_or(default))?)
    }

    pub fn z_or(&self, default: [&str; 2]) -> anyhow::Result<XComplex> {
        let [re, im] = match &self.config.z {
            Some([re, im]) => [re.as_str(), im.as_str()],
            None => default,
        };
        Ok(XComplex::new(self.ctx.parse(re)?, self.ctx.parse(im)?))
    }
}
