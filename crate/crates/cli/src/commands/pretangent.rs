//! `pretangent` — build the quotient approximation from a sequence pool,
//! run the three curvature scans on it, and optionally spot-check the
//! subsequence-restriction isometry.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use curvature_core::pretangent::{
    analyze_pretangent, construct_pretangent, estimate_mutual_limit, even_positions,
    odd_positions, realize_pool, restrict_to_subsequence, StabilityParams,
};
use curvature_core::{defaults, MetricOracle};
use serde_json::json;

use crate::common::{fnum, load_pool, load_space, tolerance_profile};
use crate::CommandOutput;

#[derive(Debug, Args)]
pub struct PretangentArgs {
    #[arg(long)]
    pub space: String,

    /// Pool JSON; omitted: the curated pool for the space.
    #[arg(long)]
    pub pool: Option<PathBuf>,

    /// Window length standing in for the infinite sequences.
    #[arg(long)]
    pub window: Option<usize>,

    /// Spot-check the restriction isometry: `even`, `odd`, or 0-based
    /// comma-separated positions.
    #[arg(long)]
    pub restrict: Option<String>,

    #[arg(long)]
    pub tau_stab: Option<f64>,

    #[arg(long)]
    pub tau_unstab: Option<f64>,

    #[arg(long)]
    pub tau_zero: Option<f64>,

    /// Pass tolerance for the quotient scans.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn run(args: &PretangentArgs, _seed: u64) -> Result<CommandOutput> {
    let mut digests = BTreeMap::new();
    let (spec, oracle) = load_space(&args.space, &mut digests)?;
    let profile = tolerance_profile(&oracle);
    let window = args.window.unwrap_or(defaults::WINDOW);
    let params = StabilityParams {
        tail_fraction: defaults::TAIL_FRACTION,
        tau_stab: args.tau_stab.unwrap_or(profile.tau_stab),
        tau_unstab: args.tau_unstab.unwrap_or(profile.tau_unstab),
    };
    let tau_zero = args.tau_zero.unwrap_or(profile.tau_zero);
    let tol = args.tol.unwrap_or(profile.tau_pass);

    let (pool_spec, pool_source) = load_pool(args.pool.as_ref(), &spec, &mut digests)?;
    let (r, sequences) = realize_pool(&oracle, &pool_spec, window)?;
    let build = construct_pretangent(&oracle, sequences, &r, &params, tau_zero)?;
    let verdicts = analyze_pretangent(&build.approximation, tol);

    // Restriction spot-check: stable pairs must keep their limits within
    // 2 * tau_stab after passing to the subsequence.
    let restrict_check = match &args.restrict {
        None => None,
        Some(kind) => {
            let indices: Vec<usize> = match kind.as_str() {
                "even" => even_positions(window),
                "odd" => odd_positions(window),
                other => {
                    let parsed: std::result::Result<Vec<usize>, _> =
                        other.split(',').map(|s| s.trim().parse::<usize>()).collect();
                    match parsed {
                        Ok(v) => v,
                        Err(_) => bail!("--restrict wants even, odd, or comma-separated positions"),
                    }
                }
            };
            let accepted = &build.selection.accepted;
            let mut max_shift: f64 = 0.0;
            for (slot_a, &ia) in accepted.iter().enumerate() {
                for &ib in accepted.iter().skip(slot_a + 1) {
                    let (xa, ra) = restrict_to_subsequence(&build.pool[ia], &r, &indices)?;
                    let (xb, _) = restrict_to_subsequence(&build.pool[ib], &r, &indices)?;
                    let before =
                        estimate_mutual_limit(&oracle, &build.pool[ia], &build.pool[ib], &r, &params)?;
                    let after = estimate_mutual_limit(&oracle, &xa, &xb, &ra, &params)?;
                    max_shift = max_shift.max((before.limit - after.limit).abs());
                }
            }
            let pass = max_shift <= 2.0 * params.tau_stab;
            Some(json!({
                "indices": kind,
                "max_limit_shift": max_shift,
                "tolerance": 2.0 * params.tau_stab,
                "pass": pass,
            }))
        }
    };

    let mut flags = BTreeMap::new();
    flags.insert("space".into(), args.space.clone());
    flags.insert("pool".into(), pool_source);
    flags.insert("window".into(), window.to_string());
    flags.insert("tau_stab".into(), fnum(params.tau_stab));
    flags.insert("tau_unstab".into(), fnum(params.tau_unstab));
    flags.insert("tau_zero".into(), fnum(tau_zero));
    flags.insert("tol".into(), fnum(tol));
    if let Some(kind) = &args.restrict {
        flags.insert("restrict".into(), kind.clone());
    }

    let restrict_pass =
        restrict_check.as_ref().map(|c| c["pass"].as_bool().unwrap_or(false)).unwrap_or(true);
    let exit = i32::from(!(verdicts.all_passed() && restrict_pass));

    let p = oracle.base_point();
    let report = json!({
        "report_kind": "pretangent",
        "space": args.space,
        "window": window,
        "base_point": p,
        "pool_order": build.pool_labels,
        "selection": build.selection,
        "approximation": build.approximation,
        "curvature_verdicts": verdicts,
        "restrict_check": restrict_check,
    });
    Ok(CommandOutput { report, flags, digests, exit })
}
