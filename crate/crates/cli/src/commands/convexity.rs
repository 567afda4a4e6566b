//! `convexity` — evidence for midpoint convexity (pairwise midpoint
//! search) or Busemann convexity at the base point (certified midpoints
//! against third sequences) over a sequence pool.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use curvature_core::convexity::{
    busemann_defect_profile, search_infinitesimal_midpoint, DefectValue,
};
use curvature_core::pretangent::{realize_pool, PointSequence};
use curvature_core::rng::fnv1a64;
use curvature_core::spaces::CarrierPoint;
use curvature_core::{defaults, four_point::Verdict, Error, MetricOracle};
use serde_json::json;

use crate::common::{fnum, load_pool, load_space, tolerance_profile, write_profile_csv};
use crate::CommandOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvexityMode {
    Midpoint,
    Busemann,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[arg(long)]
    pub space: String,

    #[arg(long, value_enum)]
    pub mode: ConvexityMode,

    /// Pool JSON; omitted: the curated pool for the space.
    #[arg(long)]
    pub pool: Option<PathBuf>,

    #[arg(long)]
    pub window: Option<usize>,

    /// Midpoint-search candidates per index.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,

    #[arg(long)]
    pub eps_mid: Option<f64>,

    #[arg(long)]
    pub eps_bus: Option<f64>,

    /// Write the worst profile as an index,defect CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn pair_seed(seed: u64, a: &str, b: &str) -> u64 {
    seed ^ fnv1a64(format!("{a}|{b}").as_bytes())
}

pub fn run(args: &ConvexityArgs, seed: u64) -> Result<CommandOutput> {
    let mut digests = BTreeMap::new();
    let (spec, oracle) = load_space(&args.space, &mut digests)?;
    let profile = tolerance_profile(&oracle);
    let window = args.window.unwrap_or(defaults::WINDOW);
    let eps_mid = args.eps_mid.unwrap_or(profile.eps_mid);
    let eps_bus = args.eps_bus.unwrap_or(profile.eps_bus);

    let (pool_spec, pool_source) = load_pool(args.pool.as_ref(), &spec, &mut digests)?;
    let (_r, sequences) = realize_pool(&oracle, &pool_spec, window)?;
    // Sequences constant at the base point add nothing here.
    let base = oracle.base_point();
    let sequences: Vec<PointSequence<CarrierPoint>> = sequences
        .into_iter()
        .filter(|s| s.points.iter().any(|q| oracle.distance(q, &base) != 0.0))
        .collect();
    if sequences.len() < 2 {
        bail!("convexity needs at least two non-trivial pool sequences");
    }

    let mut flags = BTreeMap::new();
    flags.insert("space".into(), args.space.clone());
    flags.insert("mode".into(), format!("{:?}", args.mode).to_lowercase());
    flags.insert("pool".into(), pool_source);
    flags.insert("window".into(), window.to_string());
    flags.insert("budget".into(), args.budget.to_string());
    flags.insert("eps_mid".into(), fnum(eps_mid));
    if args.mode == ConvexityMode::Busemann {
        flags.insert("eps_bus".into(), fnum(eps_bus));
    }

    let mut entries = Vec::new();
    let mut worst_profile: Option<(f64, Vec<DefectValue>)> = None;
    let mut all_pass = true;
    let consider = |tail: DefectValue, profile: &[DefectValue], worst: &mut Option<(f64, Vec<DefectValue>)>| {
        let key = match tail {
            DefectValue::Finite(v) => v,
            DefectValue::Infinite => f64::INFINITY,
        };
        if worst.as_ref().map(|(w, _)| key > *w).unwrap_or(true) {
            *worst = Some((key, profile.to_vec()));
        }
    };

    match args.mode {
        ConvexityMode::Midpoint => {
            for i in 0..sequences.len() {
                for j in (i + 1)..sequences.len() {
                    let (x, y) = (&sequences[i], &sequences[j]);
                    let out = search_infinitesimal_midpoint(
                        &oracle,
                        x,
                        y,
                        args.budget,
                        pair_seed(seed, &x.label, &y.label),
                        eps_mid,
                        defaults::TAIL_FRACTION,
                    )?;
                    all_pass &= out.verdict.passed();
                    consider(out.tail_max, &out.profile, &mut worst_profile);
                    entries.push(json!({
                        "pair": [x.label, y.label],
                        "tail_max": out.tail_max,
                        "verdict": out.verdict,
                        "used_analytic_hint": out.used_analytic_hint,
                        "profile": out.profile,
                    }));
                }
            }
        }
        ConvexityMode::Busemann => {
            for i in 0..sequences.len() {
                for j in (i + 1)..sequences.len() {
                    let (x0, x1) = (&sequences[i], &sequences[j]);
                    let mid = search_infinitesimal_midpoint(
                        &oracle,
                        x0,
                        x1,
                        args.budget,
                        pair_seed(seed, &x0.label, &x1.label),
                        eps_mid,
                        defaults::TAIL_FRACTION,
                    )?;
                    if !mid.verdict.passed() {
                        all_pass = false;
                        entries.push(json!({
                            "pair": [x0.label, x1.label],
                            "midpoint_certified": false,
                            "midpoint_tail": mid.tail_max,
                            "verdict": Verdict::Fail,
                        }));
                        continue;
                    }
                    let m = PointSequence::new(
                        format!("mid({},{})", x0.label, x1.label),
                        mid.midpoints.clone(),
                    );
                    for (k, y) in sequences.iter().enumerate() {
                        if k == i || k == j {
                            continue;
                        }
                        let out = match busemann_defect_profile(
                            &oracle,
                            x0,
                            x1,
                            y,
                            &m,
                            eps_mid,
                            eps_bus,
                            defaults::TAIL_FRACTION,
                        ) {
                            Ok(out) => out,
                            Err(Error::Precondition(msg)) => bail!("midpoint certification raced: {msg}"),
                            Err(e) => return Err(e.into()),
                        };
                        all_pass &= out.verdict.passed();
                        consider(out.tail_max, &out.profile, &mut worst_profile);
                        entries.push(json!({
                            "pair": [x0.label, x1.label],
                            "midpoint_certified": true,
                            "against": y.label,
                            "tail_max": out.tail_max,
                            "verdict": out.verdict,
                            "profile": out.profile,
                        }));
                    }
                }
            }
        }
    }

    if let Some(path) = &args.csv {
        if let Some((_, profile)) = &worst_profile {
            write_profile_csv(path, profile)?;
        }
    }

    let verdict = Verdict::from_pass(all_pass);
    let report = json!({
        "report_kind": "convexity",
        "space": args.space,
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "epsilon_mid": eps_mid,
        "epsilon_bus": if args.mode == ConvexityMode::Busemann { Some(eps_bus) } else { None },
        "entries": entries,
        "verdict": verdict,
    });
    Ok(CommandOutput { report, flags, digests, exit: i32::from(!all_pass) })
}
