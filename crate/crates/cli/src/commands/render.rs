//! `render` — stable human-readable text for a report JSON, plus CSV
//! extracts of scale and defect profiles.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::Value;

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Report JSON produced by any analysis subcommand.
    #[arg(long)]
    pub report: PathBuf,

    /// Directory for CSV extracts (scale,min_defect and index,defect).
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

fn verdict_text(v: &Value) -> &str {
    match v.as_str() {
        Some("pass") => "PASS",
        Some("fail") => "FAIL",
        Some("vacuous") => "vacuous pass",
        _ => "?",
    }
}

fn num(v: &Value) -> String {
    match v {
        Value::Number(n) => n.to_string(),
        Value::Null => "n/a".to_string(),
        other => other.to_string(),
    }
}

fn render_scan(out: &mut String, scan: &Value, label: &str) {
    let verdict = verdict_text(&scan["verdict"]);
    let functional = scan["functional"].as_str().unwrap_or("?");
    writeln!(
        out,
        "{label} {functional}: {verdict} (min_defect {}, {} quadruples)",
        num(&scan["min_defect"]),
        num(&scan["quadruples_examined"]),
    )
    .unwrap();
    if let Some(w) = scan["witness"].as_array() {
        let idx: Vec<String> = w.iter().map(num).collect();
        writeln!(out, "  witness indices: [{}]", idx.join(", ")).unwrap();
    }
}

fn tail_max_text(v: &Value) -> String {
    if v.as_str() == Some("infinite") {
        "inf".to_string()
    } else if let Some(f) = v.get("finite") {
        num(f)
    } else {
        num(v)
    }
}

fn write_csv(dir: &Option<PathBuf>, name: &str, header: &str, rows: &[String]) -> Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn profile_rows(profile: &Value) -> Vec<String> {
    profile
        .as_array()
        .map(|arr| {
            arr.iter()
                .enumerate()
                .map(|(i, v)| format!("{},{}", i + 1, tail_max_text(v)))
                .collect()
        })
        .unwrap_or_default()
}

pub fn run(args: &RenderArgs) -> Result<(String, i32)> {
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading {}", args.report.display()))?;
    let envelope: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.report.display()))?;
    let report = &envelope["report"];
    let kind = report["report_kind"]
        .as_str()
        .ok_or_else(|| anyhow::anyhow!("missing report_kind"))?;

    let mut out = String::new();
    writeln!(
        out,
        "command: {} (seed {}, schema v{})",
        envelope["manifest"]["command"].as_str().unwrap_or("?"),
        num(&envelope["manifest"]["seed"]),
        num(&envelope["schema_version"]),
    )
    .unwrap();

    match kind {
        "validation" => {
            let pass = report["validation"]["pass"].as_bool().unwrap_or(false);
            let violations = report["validation"]["violations"].as_array().map(|a| a.len());
            writeln!(
                out,
                "metric validation over {} points: {} ({} violations)",
                num(&report["points"]),
                if pass { "PASS" } else { "FAIL" },
                violations.unwrap_or(0),
            )
            .unwrap();
            if let Some(vs) = report["validation"]["violations"].as_array() {
                for v in vs.iter().take(5) {
                    writeln!(out, "  {v}").unwrap();
                }
            }
        }
        "spot_check" => {
            let pass = report["spot_check"]["pass"].as_bool().unwrap_or(false);
            writeln!(
                out,
                "oracle spot check on {}: {} (worst triangle excess {}, ball overshoot {})",
                report["space"].as_str().unwrap_or("?"),
                if pass { "PASS" } else { "FAIL" },
                num(&report["spot_check"]["max_triangle_excess_rel"]),
                num(&report["spot_check"]["max_ball_overshoot_rel"]),
            )
            .unwrap();
        }
        "scan" => {
            render_scan(&mut out, &report["scan"], "scan");
        }
        "liminf" => {
            let est = &report["estimate"];
            writeln!(
                out,
                "liminf {} on {}: {} (tail_inf {}, eps {})",
                est["functional"].as_str().unwrap_or("?"),
                report["space"].as_str().unwrap_or("?"),
                verdict_text(&est["verdict"]),
                num(&est["tail_inf"]),
                num(&est["epsilon"]),
            )
            .unwrap();
            let scales = est["scales"].as_array().cloned().unwrap_or_default();
            let minima = est["per_scale_min"].as_array().cloned().unwrap_or_default();
            let mut rows = Vec::new();
            for (s, m) in scales.iter().zip(&minima) {
                writeln!(out, "  scale {}: min {}", num(s), num(m)).unwrap();
                rows.push(format!("{},{}", num(s), num(m)));
            }
            write_csv(&args.csv_dir, "liminf_profile.csv", "scale,min_defect", &rows)?;
        }
        "pretangent" => {
            let quotient = &report["approximation"]["quotient"];
            let labels = quotient["labels"].as_array().map(|a| a.len()).unwrap_or(0);
            writeln!(out, "pretangent quotient: {labels} classes").unwrap();
            writeln!(
                out,
                "  base class present: {}",
                report["approximation"]["contains_base_class"].as_bool().unwrap_or(false),
            )
            .unwrap();
            for key in ["quadrilateral", "lebedeva_petrunin", "ptolemy"] {
                render_scan(&mut out, &report["curvature_verdicts"][key], "conclusion scan");
            }
            if !report["restrict_check"].is_null() {
                let rc = &report["restrict_check"];
                writeln!(
                    out,
                    "restriction check ({}): {} (max limit shift {})",
                    rc["indices"].as_str().unwrap_or("?"),
                    if rc["pass"].as_bool().unwrap_or(false) { "PASS" } else { "FAIL" },
                    num(&rc["max_limit_shift"]),
                )
                .unwrap();
            }
        }
        "convexity" => {
            writeln!(
                out,
                "convexity ({} mode) on {}: {}",
                report["mode"].as_str().unwrap_or("?"),
                report["space"].as_str().unwrap_or("?"),
                verdict_text(&report["verdict"]),
            )
            .unwrap();
            let mut worst: Option<(f64, Vec<String>)> = None;
            if let Some(entries) = report["entries"].as_array() {
                for e in entries {
                    let pair = e["pair"]
                        .as_array()
                        .map(|a| {
                            a.iter().map(|v| v.as_str().unwrap_or("?")).collect::<Vec<_>>().join(",")
                        })
                        .unwrap_or_default();
                    let against = e["against"].as_str().map(|y| format!(" vs {y}")).unwrap_or_default();
                    writeln!(
                        out,
                        "  pair ({pair}){against}: {} (tail {})",
                        verdict_text(&e["verdict"]),
                        tail_max_text(&e["tail_max"]),
                    )
                    .unwrap();
                    let key = e["tail_max"].get("finite").and_then(Value::as_f64).unwrap_or(f64::INFINITY);
                    if worst.as_ref().map(|(w, _)| key > *w).unwrap_or(true) {
                        worst = Some((key, profile_rows(&e["profile"])));
                    }
                }
            }
            if let Some((_, rows)) = worst {
                if !rows.is_empty() {
                    write_csv(&args.csv_dir, "defect_profile.csv", "index,defect", &rows)?;
                }
            }
        }
        "theorem" => {
            writeln!(
                out,
                "theorem {} on {} ({})",
                report["theorem"].as_str().unwrap_or("?"),
                report["space"].as_str().unwrap_or("?"),
                report["relation"].as_str().unwrap_or("?"),
            )
            .unwrap();
            let hyp = &report["hypotheses"];
            writeln!(
                out,
                "hypothesis convexity ({}): {}",
                hyp["convexity_kind"].as_str().unwrap_or("?"),
                if hyp["convexity_pass"].as_bool().unwrap_or(false) { "PASS" } else { "FAIL" },
            )
            .unwrap();
            if !hyp["liminf"].is_null() {
                writeln!(
                    out,
                    "hypothesis liminf {}: {} (tail_inf {})",
                    hyp["liminf"]["functional"].as_str().unwrap_or("?"),
                    verdict_text(&hyp["liminf"]["verdict"]),
                    num(&hyp["liminf"]["tail_inf"]),
                )
                .unwrap();
                let scales = hyp["liminf"]["scales"].as_array().cloned().unwrap_or_default();
                let minima = hyp["liminf"]["per_scale_min"].as_array().cloned().unwrap_or_default();
                let rows: Vec<String> = scales
                    .iter()
                    .zip(&minima)
                    .map(|(s, m)| format!("{},{}", num(s), num(m)))
                    .collect();
                write_csv(&args.csv_dir, "liminf_profile.csv", "scale,min_defect", &rows)?;
            }
            let concl = &report["conclusion"];
            writeln!(
                out,
                "conclusion on the {}-point quotient: {}",
                num(&concl["quotient_points"]),
                if concl["pass"].as_bool().unwrap_or(false) { "PASS" } else { "FAIL" },
            )
            .unwrap();
            for (key, value) in concl["detail"].as_object().into_iter().flatten() {
                if let Some(v) = value.get("verdict") {
                    writeln!(out, "  {key}: {}", verdict_text(v)).unwrap();
                }
            }
            writeln!(
                out,
                "relation: {}",
                if report["agreement"].as_bool().unwrap_or(false) {
                    "agreement"
                } else {
                    "DISAGREEMENT"
                },
            )
            .unwrap();
            if let Some(c) = report["counterexample"].as_str() {
                writeln!(out, "counterexample: {c}").unwrap();
            }
        }
        other => bail!("unknown report_kind `{other}`"),
    }

    Ok((out, 0))
}
