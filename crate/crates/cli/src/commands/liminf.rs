//! `liminf` — estimate the liminf of a normalized functional (A1/A2/A3)
//! along a shrinking scale schedule.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use curvature_core::infinitesimal::{estimate_liminf, NormalizedFunctional};
use curvature_core::defaults;
use serde_json::json;

use crate::common::{fnum, load_space, parse_schedule, tolerance_profile, write_scale_csv};
use crate::CommandOutput;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AFunctional {
    A1,
    A2,
    A3,
}

impl From<AFunctional> for NormalizedFunctional {
    fn from(f: AFunctional) -> Self {
        match f {
            AFunctional::A1 => NormalizedFunctional::A1,
            AFunctional::A2 => NormalizedFunctional::A2,
            AFunctional::A3 => NormalizedFunctional::A3,
        }
    }
}

#[derive(Debug, Args)]
pub struct LiminfArgs {
    #[arg(long)]
    pub space: String,

    #[arg(long, value_enum)]
    pub functional: AFunctional,

    /// Explicit decreasing list "t1,t2,..." or "geometric:start,ratio,K".
    #[arg(long, default_value = "geometric:0.5,0.5,8")]
    pub scales: String,

    /// Sampled points per scale (probe points come on top).
    #[arg(long, default_value_t = 48)]
    pub samples: usize,

    /// Verdict tolerance on the tail infimum.
    #[arg(long)]
    pub eps: Option<f64>,

    /// Max ordered-quadruple evaluations per scale.
    #[arg(long)]
    pub budget: Option<usize>,

    /// Write a scale,min_defect CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn run(args: &LiminfArgs, seed: u64) -> Result<CommandOutput> {
    let mut digests = BTreeMap::new();
    let (_, oracle) = load_space(&args.space, &mut digests)?;
    let functional: NormalizedFunctional = args.functional.into();
    let eps = args.eps.unwrap_or_else(|| tolerance_profile(&oracle).eps_liminf);
    let budget = args.budget.unwrap_or(defaults::QUADRUPLE_EVAL_BUDGET);
    let schedule = parse_schedule(&args.scales, args.samples)?;

    let estimate = estimate_liminf(functional, &oracle, &schedule, seed, eps, budget);

    if let Some(path) = &args.csv {
        write_scale_csv(path, &estimate.scales, &estimate.per_scale_min)?;
    }

    let mut flags = BTreeMap::new();
    flags.insert("space".into(), args.space.clone());
    flags.insert("functional".into(), functional.name().to_lowercase());
    flags.insert("scales".into(), args.scales.clone());
    flags.insert("samples".into(), args.samples.to_string());
    flags.insert("eps".into(), fnum(eps));
    flags.insert("budget".into(), budget.to_string());

    let exit = i32::from(!estimate.verdict.passed());
    Ok(CommandOutput {
        report: json!({
            "report_kind": "liminf",
            "space": args.space,
            "estimate": estimate,
        }),
        flags,
        digests,
        exit,
    })
}
