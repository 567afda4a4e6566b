//! curvature-lab: a workbench for curvature-sign analysis of metric spaces.
//!
//! One binary, seven subcommands: `validate`, `scan`, `liminf`,
//! `pretangent`, `convexity`, `theorem`, `render`. Every analysis emits a
//! JSON report wrapped in a manifest envelope; given the same manifest the
//! bytes are identical apart from the `duration_ms` line, for any
//! `--threads` value.
//!
//! Exit codes: 0 — all verdicts pass/agree; 1 — a violation, failed
//! verdict, or disagreement was found; 2 — input error.

mod commands;
mod common;
mod manifest;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::manifest::{manifest, Envelope, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "curvature-lab", version, about = "Curvature-sign analysis of metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed; subcommand-internal streams derive from it by fixed
    /// labels.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = library default). Reports are byte-identical
    /// for any value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write the JSON report (or rendered text) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check metric axioms on a finite space file or spot-check an oracle.
    Validate(commands::validate::ValidateArgs),
    /// Minimize a four-point defect over a space or a sampled ball.
    Scan(commands::scan::ScanArgs),
    /// Estimate the liminf of a normalized functional at the base point.
    Liminf(commands::liminf::LiminfArgs),
    /// Build and analyze a pretangent approximation from a sequence pool.
    Pretangent(commands::pretangent::PretangentArgs),
    /// Midpoint- or Busemann-convexity evidence at the base point.
    Convexity(commands::convexity::ConvexityArgs),
    /// Run a hypothesis/conclusion workflow end to end.
    Theorem(commands::theorem::TheoremArgs),
    /// Render a report JSON as text and CSV extracts.
    Render(commands::render::RenderArgs),
}

/// What an analysis subcommand hands back for enveloping.
pub struct CommandOutput {
    pub report: serde_json::Value,
    pub flags: BTreeMap<String, String>,
    pub digests: BTreeMap<String, String>,
    /// 0 = pass, 1 = violation found.
    pub exit: i32,
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn run(cli: &Cli, started: Instant) -> anyhow::Result<i32> {
    let (name, outcome) = match &cli.command {
        Command::Render(args) => {
            let (text, exit) = commands::render::run(args)?;
            emit(&cli.out, text.trim_end())?;
            return Ok(exit);
        }
        Command::Validate(args) => ("validate", commands::validate::run(args, cli.seed)?),
        Command::Scan(args) => ("scan", commands::scan::run(args, cli.seed)?),
        Command::Liminf(args) => ("liminf", commands::liminf::run(args, cli.seed)?),
        Command::Pretangent(args) => ("pretangent", commands::pretangent::run(args, cli.seed)?),
        Command::Convexity(args) => ("convexity", commands::convexity::run(args, cli.seed)?),
        Command::Theorem(args) => ("theorem", commands::theorem::run(args, cli.seed)?),
    };

    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        manifest: manifest(name, cli.seed, outcome.flags, outcome.digests),
        duration_ms: started.elapsed().as_millis(),
        report: outcome.report,
    };
    let text = serde_json::to_string_pretty(&envelope)?;
    emit(&cli.out, &text)?;
    Ok(outcome.exit)
}

fn main() {
    let started = Instant::now();
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore the error when a pool already exists (tests set one up).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(&cli, started) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            // Certificate failures are findings (exit 1); everything else
            // on this path is an input problem (exit 2).
            let code = match err.downcast_ref::<curvature_core::Error>() {
                Some(e) if !e.is_input_error() => 1,
                _ => 2,
            };
            std::process::exit(code);
        }
    }
}
