//! Command-line front end for the bistair verification suites.

pub mod commands;
pub mod config;
pub mod export;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use bistair::io::{parse_function_spec, write_report_csv};
use bistair::report::SuiteReport;
use bistair::EnergyBreakdown;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{CommonArgs, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "bistair",
    version,
    about = "Verification suites for staircase and bi-staircase minimizers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One-dimensional calibration: equalities, grid inequalities, telescopic trials.
    #[command(name = "verify-1d")]
    Verify1d(CommonArgs),
    /// Two-dimensional calibration, minimality chain and slicing.
    #[command(name = "verify-2d")]
    Verify2d(CommonArgs),
    /// Plot-ready curve samples, jump sets, field slices and heatmaps.
    Export(CommonArgs),
    /// Energy of one function spec, or of two and their difference.
    Energy {
        /// JSON function spec files.
        #[arg(required = true, num_args = 1..=2)]
        specs: Vec<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Randomized and exhaustive competitor searches.
    Stress(CommonArgs),
    /// Report-only scan of the pairwise field bound over theta.
    #[command(name = "scan-theta")]
    ScanTheta(CommonArgs),
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Serialize)]
struct NamedEnergy {
    spec: PathBuf,
    energy: EnergyBreakdown,
}

#[derive(Serialize)]
struct EnergyOutput {
    functions: Vec<NamedEnergy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    difference: Option<EnergyBreakdown>,
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match cfg.destination() {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            let f = std::fs::File::create(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            Box::new(std::io::BufWriter::new(f))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_report(cfg: &RunConfig, report: &SuiteReport) -> Result<()> {
    let mut out = sink(cfg)?;
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        Format::Csv => write_report_csv(&mut out, report)?,
    }
    out.flush()?;
    Ok(())
}

fn summarize(report: &SuiteReport) {
    let failures = report.failures();
    eprintln!(
        "{}: {}",
        report.suite,
        if report.pass { "PASS" } else { "FAIL" }
    );
    for f in failures {
        eprintln!("  failed: {f}");
    }
}

fn energy(cfg: &RunConfig, specs: &[PathBuf]) -> Result<()> {
    let theta = cfg.theta[0];
    let (p1, p2) = (cfg.params_1d(theta)?, cfg.params_2d(theta)?);
    let mut functions = Vec::new();
    for path in specs {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec = parse_function_spec(&text).map_err(|e| match e {
            bistair::Error::Schema {
                path: field,
                line,
                column,
                message,
            } => {
                anyhow::anyhow!(
                    "{}:{line}:{column}: at `{field}`: {message}",
                    path.display()
                )
            }
            other => anyhow::Error::new(other).context(path.display().to_string()),
        })?;
        let energy = spec
            .energy(&p1, &p2)
            .with_context(|| format!("evaluating {}", path.display()))?;
        functions.push(NamedEnergy {
            spec: path.clone(),
            energy,
        });
    }
    let difference = match &functions[..] {
        [a, b] => Some(EnergyBreakdown::new(
            b.energy.jump_term - a.energy.jump_term,
            b.energy.fidelity_term - a.energy.fidelity_term,
        )),
        _ => None,
    };
    let mut out = sink(cfg)?;
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut out,
                &EnergyOutput {
                    functions,
                    difference,
                },
            )?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "spec,jump_term,fidelity_term,total")?;
            let rows = functions
                .iter()
                .map(|f| (f.spec.display().to_string(), f.energy))
                .chain(difference.map(|d| ("difference".to_string(), d)));
            for (name, e) in rows {
                writeln!(
                    out,
                    "{name},{:.16e},{:.16e},{:.16e}",
                    e.jump_term, e.fidelity_term, e.total
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn init_pool(cfg: &RunConfig) {
    if let Some(j) = cfg.jobs {
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global();
    }
}

/// Runs one parsed command line. Errors are configuration or I/O problems;
/// failed checks come back as [`Status::Fail`].
pub fn run(cli: Cli) -> Result<Status> {
    let (name, args) = match &cli.command {
        Command::Verify1d(a) => ("verify-1d", a),
        Command::Verify2d(a) => ("verify-2d", a),
        Command::Export(a) => ("export", a),
        Command::Energy { common, .. } => ("energy", common),
        Command::Stress(a) => ("stress", a),
        Command::ScanTheta(a) => ("scan-theta", a),
    };
    let cfg = RunConfig::resolve(name, args)?;
    init_pool(&cfg);
    let report = match &cli.command {
        Command::Verify1d(_) => commands::verify_1d(&cfg)?,
        Command::Verify2d(_) => commands::verify_2d(&cfg)?,
        Command::Stress(_) => commands::stress(&cfg)?,
        Command::ScanTheta(_) => commands::scan_theta(&cfg)?,
        Command::Export(_) => {
            let index = export::export(&cfg, commands::manifest(&cfg))?;
            eprintln!(
                "export: wrote {} files to {}",
                index.files.len(),
                cfg.directory().display()
            );
            return Ok(Status::Pass);
        }
        Command::Energy { specs, .. } => {
            energy(&cfg, specs)?;
            return Ok(Status::Pass);
        }
    };
    emit_report(&cfg, &report)?;
    summarize(&report);
    Ok(if report.pass {
        Status::Pass
    } else {
        Status::Fail
    })
}
