//! Plumbing shared by the subcommands: space/pool loading with input
//! digests, per-space tolerance profiles, scale-schedule parsing, and CSV
//! emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use curvature_core::convexity::DefectValue;
use curvature_core::pretangent::{curated_pool, PoolSpec};
use curvature_core::spaces::{make_oracle, BuiltinOracle, SpaceSpec};
use curvature_core::{defaults, infinitesimal::ScaleSchedule};

use crate::manifest::file_digest;

pub fn load_space(
    spec_str: &str,
    digests: &mut BTreeMap<String, String>,
) -> Result<(SpaceSpec, BuiltinOracle)> {
    let spec: SpaceSpec = spec_str.parse().with_context(|| format!("parsing `{spec_str}`"))?;
    if let SpaceSpec::Cloud { path } = &spec {
        digests.insert(
            path.display().to_string(),
            file_digest(path).with_context(|| format!("reading {}", path.display()))?,
        );
    }
    let oracle = make_oracle(&spec)?;
    Ok((spec, oracle))
}

/// Load a pool file, or fall back to the curated pool for the space.
/// Returns the pool and a description of where it came from.
pub fn load_pool(
    pool: Option<&PathBuf>,
    spec: &SpaceSpec,
    digests: &mut BTreeMap<String, String>,
) -> Result<(PoolSpec, String)> {
    match pool {
        Some(path) => {
            digests.insert(path.display().to_string(), file_digest(path)?);
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let spec: PoolSpec = serde_json::from_str(&text)
                .with_context(|| format!("parsing pool {}", path.display()))?;
            Ok((spec, path.display().to_string()))
        }
        None => Ok((curated_pool(spec), "builtin:curated".to_string())),
    }
}

/// Tolerances resolved for one space: exact-geometry oracles run tight,
/// the curved models absorb their quadratic finite-scale bias.
#[derive(Clone, Copy, Debug)]
pub struct ToleranceProfile {
    pub tau_pass: f64,
    pub eps_liminf: f64,
    pub tau_stab: f64,
    pub tau_unstab: f64,
    pub tau_zero: f64,
    pub eps_mid: f64,
    pub eps_bus: f64,
}

pub fn tolerance_profile(oracle: &BuiltinOracle) -> ToleranceProfile {
    let curved = oracle.is_curved_model();
    let analytic = oracle.has_analytic_midpoint();
    ToleranceProfile {
        tau_pass: if curved { defaults::TAU_PASS_CURVED } else { defaults::TAU_PASS },
        eps_liminf: if curved { defaults::EPS_LIMINF_CURVED } else { defaults::EPS_LIMINF_EXACT },
        tau_stab: if curved { defaults::TAU_STAB_CURVED } else { defaults::TAU_STAB },
        tau_unstab: if curved { defaults::TAU_UNSTAB_CURVED } else { defaults::TAU_UNSTAB },
        tau_zero: if curved { defaults::TAU_STAB_CURVED } else { defaults::TAU_ZERO },
        eps_mid: if analytic { defaults::EPS_MID_ANALYTIC } else { defaults::EPS_MID_SEARCH },
        eps_bus: if analytic { defaults::EPS_BUS_ANALYTIC } else { defaults::EPS_BUS_SEARCH },
    }
}

/// Parse `--scales`: either `geometric:<start>,<ratio>,<count>` or an
/// explicit comma-separated decreasing list.
pub fn parse_schedule(text: &str, samples: usize) -> Result<ScaleSchedule> {
    if let Some(rest) = text.strip_prefix("geometric:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            bail!("geometric schedule wants start,ratio,count — got `{rest}`");
        }
        let start: f64 = parts[0].parse().context("geometric start")?;
        let ratio: f64 = parts[1].parse().context("geometric ratio")?;
        let count: usize = parts[2].parse().context("geometric count")?;
        Ok(ScaleSchedule::geometric(start, ratio, count, samples)?)
    } else {
        let radii = text
            .split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("scale `{s}`")))
            .collect::<Result<Vec<f64>>>()?;
        Ok(ScaleSchedule::new(radii, samples)?)
    }
}

/// Fixed-header CSV of per-scale minima: `scale,min_defect`.
pub fn write_scale_csv(path: &Path, scales: &[f64], minima: &[f64]) -> Result<()> {
    let mut text = String::from("scale,min_defect\n");
    for (s, m) in scales.iter().zip(minima) {
        text.push_str(&format!("{s},{m}\n"));
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Fixed-header CSV of a defect profile: `index,defect` (1-based indices,
/// `inf` for the degenerate sentinel).
pub fn write_profile_csv(path: &Path, profile: &[DefectValue]) -> Result<()> {
    let mut text = String::from("index,defect\n");
    for (i, v) in profile.iter().enumerate() {
        match v {
            DefectValue::Finite(x) => text.push_str(&format!("{},{}\n", i + 1, x)),
            DefectValue::Infinite => text.push_str(&format!("{},inf\n", i + 1)),
        }
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Format a float the way it will appear in JSON (shortest round-trip).
pub fn fnum(v: f64) -> String {
    format!("{v}")
}
