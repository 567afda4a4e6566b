//! `theorem` — end-to-end workflows: evaluate infinitesimal hypotheses at
//! the base point, independently build the pretangent approximation, check
//! the predicted conclusion on it, and report agreement.
//!
//! * `t3`: midpoint convexity + liminf A1 >= 0 => quotient passes the
//!   quadrilateral scan (nonpositive curvature).
//! * `t5`: midpoint convexity + liminf A2 >= 0 => quotient passes the
//!   Lebedeva–Petrunin scan (nonnegative curvature).
//! * `t8`: Busemann convexity at the base point => quotient passes the
//!   finite midpoint inequality check.
//! * `t10`: Busemann at the point + liminf A3 >= 0 <=> quotient passes the
//!   quadrilateral scan (equivalence; Ptolemy and finite-Busemann scans are
//!   reported as supporting evidence).
//!
//! For the one-directional workflows a failed hypothesis leaves the
//! implication vacuous; the conclusion is still checked and reported
//! separately. Exit code 1 flags any failed verdict or a broken relation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use curvature_core::convexity::{
    busemann_defect_profile, check_finite_busemann, search_infinitesimal_midpoint,
};
use curvature_core::four_point::Verdict;
use curvature_core::infinitesimal::{estimate_liminf, NormalizedFunctional};
use curvature_core::pretangent::{
    analyze_pretangent, construct_pretangent, realize_pool, PointSequence, StabilityParams,
};
use curvature_core::rng::fnv1a64;
use curvature_core::spaces::CarrierPoint;
use curvature_core::{defaults, BuiltinOracle, MetricOracle};
use serde_json::json;

use crate::common::{fnum, load_pool, load_space, parse_schedule, tolerance_profile};
use crate::CommandOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremId {
    T3,
    T5,
    T8,
    T10,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[arg(long)]
    pub space: String,

    #[arg(long, value_enum)]
    pub id: TheoremId,

    /// Pool JSON; omitted: the curated pool for the space.
    #[arg(long)]
    pub pool: Option<PathBuf>,

    #[arg(long, default_value_t = 256)]
    pub window: usize,

    #[arg(long, default_value = "geometric:0.5,0.5,8")]
    pub scales: String,

    #[arg(long, default_value_t = 48)]
    pub samples: usize,

    /// Midpoint-search candidates per index.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,

    #[arg(long)]
    pub eps: Option<f64>,

    #[arg(long)]
    pub tol: Option<f64>,
}

fn pair_seed(seed: u64, a: &str, b: &str) -> u64 {
    seed ^ fnv1a64(format!("{a}|{b}").as_bytes())
}

struct Evidence {
    entries: Vec<serde_json::Value>,
    pass: bool,
}

/// Midpoint-convexity evidence over all pairs of nontrivial pool sequences.
fn midpoint_evidence(
    oracle: &BuiltinOracle,
    sequences: &[PointSequence<CarrierPoint>],
    budget: usize,
    seed: u64,
    eps_mid: f64,
) -> Result<Evidence> {
    let mut entries = Vec::new();
    let mut pass = true;
    for i in 0..sequences.len() {
        for j in (i + 1)..sequences.len() {
            let (x, y) = (&sequences[i], &sequences[j]);
            let out = search_infinitesimal_midpoint(
                oracle,
                x,
                y,
                budget,
                pair_seed(seed, &x.label, &y.label),
                eps_mid,
                defaults::TAIL_FRACTION,
            )?;
            pass &= out.verdict.passed();
            entries.push(json!({
                "pair": [x.label, y.label],
                "tail_max": out.tail_max,
                "verdict": out.verdict,
            }));
        }
    }
    Ok(Evidence { entries, pass })
}

/// Busemann-at-the-point evidence: certified midpoints of each pair tested
/// against every third sequence.
fn busemann_evidence(
    oracle: &BuiltinOracle,
    sequences: &[PointSequence<CarrierPoint>],
    budget: usize,
    seed: u64,
    eps_mid: f64,
    eps_bus: f64,
) -> Result<Evidence> {
    let mut entries = Vec::new();
    let mut pass = true;
    for i in 0..sequences.len() {
        for j in (i + 1)..sequences.len() {
            let (x0, x1) = (&sequences[i], &sequences[j]);
            let mid = search_infinitesimal_midpoint(
                oracle,
                x0,
                x1,
                budget,
                pair_seed(seed, &x0.label, &x1.label),
                eps_mid,
                defaults::TAIL_FRACTION,
            )?;
            if !mid.verdict.passed() {
                pass = false;
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
                let out = busemann_defect_profile(
                    oracle,
                    x0,
                    x1,
                    y,
                    &m,
                    eps_mid,
                    eps_bus,
                    defaults::TAIL_FRACTION,
                )?;
                pass &= out.verdict.passed();
                entries.push(json!({
                    "pair": [x0.label, x1.label],
                    "against": y.label,
                    "tail_max": out.tail_max,
                    "verdict": out.verdict,
                }));
            }
        }
    }
    Ok(Evidence { entries, pass })
}

pub fn run(args: &TheoremArgs, seed: u64) -> Result<CommandOutput> {
    let mut digests = BTreeMap::new();
    let (spec, oracle) = load_space(&args.space, &mut digests)?;
    let profile = tolerance_profile(&oracle);
    let eps = args.eps.unwrap_or(profile.eps_liminf);
    let tol = args.tol.unwrap_or(profile.tau_pass);
    let params = StabilityParams {
        tail_fraction: defaults::TAIL_FRACTION,
        tau_stab: profile.tau_stab,
        tau_unstab: profile.tau_unstab,
    };

    let (pool_spec, pool_source) = load_pool(args.pool.as_ref(), &spec, &mut digests)?;
    let (r, sequences) = realize_pool(&oracle, &pool_spec, args.window)?;
    let base = oracle.base_point();
    let nontrivial: Vec<PointSequence<CarrierPoint>> = sequences
        .iter()
        .filter(|s| s.points.iter().any(|q| oracle.distance(q, &base) != 0.0))
        .cloned()
        .collect();

    // Hypotheses.
    let schedule = parse_schedule(&args.scales, args.samples)?;
    let liminf_functional = match args.id {
        TheoremId::T3 => Some(NormalizedFunctional::A1),
        TheoremId::T5 => Some(NormalizedFunctional::A2),
        TheoremId::T8 => None,
        TheoremId::T10 => Some(NormalizedFunctional::A3),
    };
    let liminf = liminf_functional.map(|f| {
        estimate_liminf(f, &oracle, &schedule, seed, eps, defaults::QUADRUPLE_EVAL_BUDGET)
    });

    let convexity = match args.id {
        TheoremId::T3 | TheoremId::T5 => {
            midpoint_evidence(&oracle, &nontrivial, args.budget, seed, profile.eps_mid)?
        }
        TheoremId::T8 | TheoremId::T10 => busemann_evidence(
            &oracle,
            &nontrivial,
            args.budget,
            seed,
            profile.eps_mid,
            profile.eps_bus,
        )?,
    };
    let liminf_pass = liminf.as_ref().map(|e| e.verdict.passed()).unwrap_or(true);
    let hypotheses_pass = convexity.pass && liminf_pass;

    // Conclusion on the independently built pretangent approximation.
    let build = construct_pretangent(&oracle, sequences, &r, &params, profile.tau_zero)?;
    let verdicts = analyze_pretangent(&build.approximation, tol);
    let finite_busemann = check_finite_busemann(&build.approximation.quotient, tol);

    let (conclusion_pass, conclusion_json) = match args.id {
        TheoremId::T3 => (
            verdicts.quadrilateral.verdict.passed(),
            json!({ "quadrilateral_scan": verdicts.quadrilateral }),
        ),
        TheoremId::T5 => (
            verdicts.lebedeva_petrunin.verdict.passed(),
            json!({ "lebedeva_petrunin_scan": verdicts.lebedeva_petrunin }),
        ),
        TheoremId::T8 => (
            finite_busemann.verdict.passed(),
            json!({ "finite_busemann": finite_busemann }),
        ),
        TheoremId::T10 => (
            verdicts.quadrilateral.verdict.passed(),
            json!({
                "quadrilateral_scan": verdicts.quadrilateral,
                "supporting_ptolemy_scan": verdicts.ptolemy,
                "supporting_finite_busemann": finite_busemann,
            }),
        ),
    };

    let relation = match args.id {
        TheoremId::T10 => "equivalence",
        _ => "implication",
    };
    let agreement = match args.id {
        TheoremId::T10 => hypotheses_pass == conclusion_pass,
        _ => !(hypotheses_pass && !conclusion_pass),
    };
    let counterexample = if agreement {
        None
    } else {
        Some(match args.id {
            TheoremId::T10 => format!(
                "equivalence broken: hypotheses {} but conclusion {}",
                if hypotheses_pass { "pass" } else { "fail" },
                if conclusion_pass { "passes" } else { "fails" }
            ),
            _ => "hypotheses pass but the conclusion fails on the quotient".to_string(),
        })
    };

    let theorem_name = format!("{:?}", args.id).to_lowercase();
    let mut flags = BTreeMap::new();
    flags.insert("space".into(), args.space.clone());
    flags.insert("id".into(), theorem_name.clone());
    flags.insert("pool".into(), pool_source);
    flags.insert("window".into(), args.window.to_string());
    flags.insert("scales".into(), args.scales.clone());
    flags.insert("samples".into(), args.samples.to_string());
    flags.insert("budget".into(), args.budget.to_string());
    flags.insert("eps".into(), fnum(eps));
    flags.insert("tol".into(), fnum(tol));

    let all_pass = hypotheses_pass && conclusion_pass && agreement;
    let report = json!({
        "report_kind": "theorem",
        "theorem": theorem_name,
        "space": args.space,
        "relation": relation,
        "hypotheses": {
            "convexity_kind": match args.id {
                TheoremId::T3 | TheoremId::T5 => "midpoint",
                _ => "busemann",
            },
            "convexity_entries": convexity.entries,
            "convexity_pass": convexity.pass,
            "liminf": liminf,
            "liminf_pass": liminf_pass,
            "pass": hypotheses_pass,
        },
        "conclusion": {
            "quotient_points": build.approximation.quotient.len(),
            "detail": conclusion_json,
            "pass": conclusion_pass,
        },
        "agreement": agreement,
        "counterexample": counterexample,
    });
    Ok(CommandOutput { report, flags, digests, exit: i32::from(!all_pass) })
}
