//! `validate` — metric-axiom checks: exhaustive on a finite-space JSON
//! file, spot-checked on samples for a built-in oracle.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use curvature_core::metric::{spot_check, validate_metric, FiniteMetricSpace};
use curvature_core::{defaults, rng::derive_rng};
use serde_json::json;

use crate::common::{fnum, load_space};
use crate::manifest::file_digest;
use crate::CommandOutput;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Finite-space JSON file: {"labels": [...], "dist": [[...], ...]}.
    #[arg(long, conflicts_with = "space")]
    pub input: Option<PathBuf>,

    /// Space specifier to spot-check (e.g. euclidean:2, hyperbolic).
    #[arg(long)]
    pub space: Option<String>,

    /// Axiom tolerance (absolute for files, relative for spot checks).
    #[arg(long)]
    pub tol: Option<f64>,

    /// Ball radius for oracle spot checks.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    /// Random triples for oracle spot checks.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

pub fn run(args: &ValidateArgs, seed: u64) -> Result<CommandOutput> {
    let mut digests = BTreeMap::new();
    let mut flags = BTreeMap::new();

    match (&args.input, &args.space) {
        (Some(path), None) => {
            let tol = args.tol.unwrap_or(defaults::TAU_METRIC);
            digests.insert(path.display().to_string(), file_digest(path)?);
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let space: FiniteMetricSpace = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let report = validate_metric(&space, tol);
            flags.insert("input".into(), path.display().to_string());
            flags.insert("tol".into(), fnum(tol));
            let exit = i32::from(!report.pass);
            Ok(CommandOutput {
                report: json!({
                    "report_kind": "validation",
                    "points": space.len(),
                    "validation": report,
                }),
                flags,
                digests,
                exit,
            })
        }
        (None, Some(spec_str)) => {
            let tol = args.tol.unwrap_or(1e-12);
            let (_, oracle) = load_space(spec_str, &mut digests)?;
            let mut rng = derive_rng(seed, "validate.spot", 0);
            let report = spot_check(&oracle, args.scale, args.samples, tol, &mut rng);
            flags.insert("space".into(), spec_str.clone());
            flags.insert("tol".into(), fnum(tol));
            flags.insert("scale".into(), fnum(args.scale));
            flags.insert("samples".into(), args.samples.to_string());
            let exit = i32::from(!report.pass);
            Ok(CommandOutput {
                report: json!({
                    "report_kind": "spot_check",
                    "space": spec_str,
                    "spot_check": report,
                }),
                flags,
                digests,
                exit,
            })
        }
        _ => bail!("validate needs exactly one of --input <file.json> or --space <spec>"),
    }
}
