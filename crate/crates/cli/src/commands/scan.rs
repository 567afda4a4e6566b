//! `scan` — minimize one four-point defect over a finite space (exhaustive)
//! or a sampled ball of an oracle.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use curvature_core::four_point::{scan_finite, scan_sampled, FunctionalKind};
use curvature_core::{defaults, rng::derive_rng};
use serde_json::json;

use crate::common::{fnum, load_space, tolerance_profile};
use crate::CommandOutput;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScanFunctional {
    Quad,
    Lp,
    Ptolemy,
}

impl From<ScanFunctional> for FunctionalKind {
    fn from(f: ScanFunctional) -> Self {
        match f {
            ScanFunctional::Quad => FunctionalKind::Quadrilateral,
            ScanFunctional::Lp => FunctionalKind::LebedevaPetrunin,
            ScanFunctional::Ptolemy => FunctionalKind::Ptolemy,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Space specifier: `euclidean:<d>`, `l1`, `linf`, `hyperbolic`,
    /// `sphere:<r>`, `tripod:<a>,<b>,<c>`, `snowflake:<alpha>`,
    /// `cloud:<path.json>`.
    #[arg(long)]
    pub space: String,

    #[arg(long, value_enum)]
    pub functional: ScanFunctional,

    /// Ball radius for sampled scans.
    #[arg(long)]
    pub scale: Option<f64>,

    /// Random draws for a sampled scan; omit to scan a cloud exhaustively.
    #[arg(long)]
    pub samples: Option<usize>,

    /// Pass tolerance on the minimum defect.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Max ordered-quadruple evaluations before subset truncation.
    #[arg(long)]
    pub budget: Option<usize>,
}

pub fn run(args: &ScanArgs, seed: u64) -> Result<CommandOutput> {
    let mut digests = BTreeMap::new();
    let (_, oracle) = load_space(&args.space, &mut digests)?;
    let functional: FunctionalKind = args.functional.into();
    let tol = args.tol.unwrap_or_else(|| tolerance_profile(&oracle).tau_pass);
    let budget = args.budget.unwrap_or(defaults::QUADRUPLE_EVAL_BUDGET);

    let mut flags = BTreeMap::new();
    flags.insert("space".into(), args.space.clone());
    flags.insert("functional".into(), functional.cli_name().to_string());
    flags.insert("tol".into(), fnum(tol));

    let (scan_report, witness_points) = match args.samples {
        None => {
            let Some((space, _)) = oracle.cloud_space() else {
                bail!("exhaustive scans need a finite space (cloud:<path>); give --samples for a sampled scan");
            };
            (scan_finite(space, functional, tol), None)
        }
        Some(m) => {
            let scale = args.scale.unwrap_or(1.0);
            flags.insert("scale".into(), fnum(scale));
            flags.insert("samples".into(), m.to_string());
            flags.insert("budget".into(), budget.to_string());
            let mut rng = derive_rng(seed, "scan.sample", 0);
            let scan = scan_sampled(&oracle, scale, m, functional, tol, budget, &mut rng)?;
            let points: Option<Vec<_>> = scan
                .report
                .witness
                .map(|w| w.iter().map(|&i| scan.points[i].clone()).collect());
            (scan.report, points)
        }
    };

    let exit = i32::from(!scan_report.verdict.passed());
    let report = json!({
        "report_kind": "scan",
        "space": args.space,
        "scan": scan_report,
        "witness_points": witness_points,
    });
    Ok(CommandOutput { report, flags, digests, exit })
}
