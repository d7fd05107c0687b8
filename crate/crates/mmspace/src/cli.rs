//! Command line interface.
//!
//! Exit codes: 0 when everything holds, 1 when a report row fails or a space
//! is not metric, 2 on configuration or I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmspace_core::coupling::{box_distance, gh_distance};
use mmspace_core::lipschitz::{enumerate_family, FamilyKind, RangeLimit, SearchOptions};
use mmspace_core::metrics::{partial_diameter_witness, prokhorov};
use mmspace_core::obsdiam::{obsdiam, obsdiam_exhaustive, obsdiam_realline, ObsDiamQuery, Variant};
use serde_json::json;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::io::{FamilyDump, SpaceFile};
use crate::output::write_files;
use crate::scenarios::run_scenario;

#[derive(Parser, Debug)]
#[command(name = "mmspace", version, about = "Exact invariants of finite metric measure spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute one invariant and print it as JSON.
    Compute(ComputeArgs),
    /// Run a named scenario and write its report.
    Scenario(ScenarioArgs),
    /// Check a space file against the metric axioms.
    Validate {
        file: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariant {
    Obsdiam,
    PartialDiameter,
    Prokhorov,
    Box,
    Gh,
    Family,
    Realline,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    pub invariant: Invariant,
    #[arg(long)]
    pub space: PathBuf,
    /// Screen (obsdiam, family) or second space (prokhorov, box, gh).
    #[arg(long)]
    pub screen: Option<PathBuf>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// plain, delta or tilde_delta.
    #[arg(long, default_value = "plain")]
    pub variant: String,
    /// Restrict images to the open ball of this radius around the screen's
    /// basepoint.
    #[arg(long)]
    pub range: Option<f64>,
    /// Segment half-length for realline.
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    /// Grid mesh for realline.
    #[arg(long, default_value_t = 0.05)]
    pub h: f64,
    /// Use full enumeration instead of branch and bound.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = mmspace_core::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = mmspace_core::DEFAULT_MAX_NODES)]
    pub max_nodes: u64,
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    pub name: String,
    /// JSON config overriding the scenario's presets.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut std::io::stdout()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<ExitCode> {
    match cli.command {
        Command::Compute(a) => {
            let v = compute(&a)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))
                .map_err(crate::error::io_err("<stdout>"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scenario(a) => {
            let scenario: Scenario = a.name.parse()?;
            let mut cfg = match &a.config {
                Some(p) => ScenarioConfig::read(p)?,
                None => ScenarioConfig::preset(scenario),
            };
            if cfg.scenario != scenario {
                return Err(CliError::Config(format!(
                    "config is for '{}', not '{}'",
                    cfg.scenario, scenario
                )));
            }
            if a.csv.is_some() {
                cfg.output.csv = a.csv;
            }
            if a.json.is_some() {
                cfg.output.json = a.json;
            }
            let report = run_scenario(&cfg)?;
            write_files(&cfg, &report)?;
            let s = report.summary();
            writeln!(
                out,
                "{}: {} rows, {} holds, {} fails, {} excluded-near-breakpoint, {} indeterminate",
                cfg.scenario,
                report.rows.len(),
                s.holds,
                s.fails,
                s.excluded_near_breakpoint,
                s.indeterminate
            )
            .map_err(crate::error::io_err("<stdout>"))?;
            Ok(if report.any_fails() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Validate { file } => {
            let f = SpaceFile::read(&file)?;
            let v = f.validate()?;
            let ok = v.is_pass();
            let msg = match v {
                mmspace_core::Validation::Pass => "ok".to_string(),
                mmspace_core::Validation::Fail(why) => why.to_string(),
            };
            if let Some(mu) = &f.mu {
                mmspace_core::ProbabilityWeights::new(mu.clone())?;
            }
            writeln!(out, "{}: {msg}", file.display()).map_err(crate::error::io_err("<stdout>"))?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn need<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| CliError::Config(format!("--screen is required ({what})")))
}

fn kappa(a: &ComputeArgs) -> Result<f64> {
    a.kappa.ok_or_else(|| CliError::Config("--kappa is required".into()))
}

fn compute(a: &ComputeArgs) -> Result<serde_json::Value> {
    let opts = SearchOptions {
        tol: a.tol,
        max_nodes: a.max_nodes,
    };
    let xf = SpaceFile::read(&a.space)?;
    Ok(match a.invariant {
        Invariant::Obsdiam => {
            let x = xf.mm()?;
            let yf = SpaceFile::read(need(&a.screen, "screen")?)?;
            let y = yf.metric()?;
            let variant = Variant::parse(&a.variant)
                .ok_or_else(|| CliError::Config(format!("unknown variant '{}'", a.variant)))?;
            let mut q = ObsDiamQuery::new(&x, &y, kappa(a)?, a.delta, variant)?;
            if let Some(radius) = a.range {
                q = q.with_range(RangeLimit {
                    basepoint: yf.basepoint.unwrap_or(0),
                    radius,
                })?;
            }
            let r = if a.exhaustive {
                obsdiam_exhaustive(&q, opts)?
            } else {
                obsdiam(&q, opts)?
            };
            json!({"invariant": "obsdiam", "variant": variant.as_str(), "kappa": q.kappa,
                   "delta": q.delta, "value": r.value, "witness": r.witness, "nodes": r.nodes})
        }
        Invariant::PartialDiameter => {
            let x = xf.mm()?;
            let (v, set) = partial_diameter_witness(&x.space, &x.mu, kappa(a)?, a.tol)?;
            json!({"invariant": "partial_diameter", "kappa": a.kappa, "value": v, "set": set})
        }
        Invariant::Prokhorov => {
            let x = xf.mm()?;
            let other = SpaceFile::read(need(&a.screen, "second measure")?)?.mm()?;
            if other.space != x.space {
                return Err(CliError::Config(
                    "prokhorov needs two measures on the same metric space".into(),
                ));
            }
            json!({"invariant": "prokhorov", "value": prokhorov(&x.space, &x.mu, &other.mu)?})
        }
        Invariant::Box => {
            let x = xf.mm()?;
            let y = SpaceFile::read(need(&a.screen, "second space")?)?.mm()?;
            let r = box_distance(&x, &y)?;
            json!({"invariant": "box", "value": r.value, "threshold": r.threshold,
                   "set": r.set.pairs(), "coupling": r.coupling.xi()})
        }
        Invariant::Gh => {
            let x = xf.metric()?;
            let y = SpaceFile::read(need(&a.screen, "second space")?)?.metric()?;
            let r = gh_distance(&x, &y)?;
            json!({"invariant": "gh", "value": r.value, "correspondence": r.correspondence.pairs()})
        }
        Invariant::Family => {
            let x = xf.mm()?;
            let y = SpaceFile::read(need(&a.screen, "screen")?)?.metric()?;
            let kind = match Variant::parse(&a.variant) {
                Some(Variant::TildeDelta) => FamilyKind::AlmostLipschitz,
                Some(_) => FamilyKind::Lipschitz,
                None => return Err(CliError::Config(format!("unknown variant '{}'", a.variant))),
            };
            let f = enumerate_family(&x, &y, a.delta, kind, None, opts)?;
            serde_json::to_value(FamilyDump::new(&f)).expect("json")
        }
        Invariant::Realline => {
            let x = xf.mm()?;
            let e = obsdiam_realline(&x, kappa(a)?, a.r, a.h, opts)?;
            serde_json::to_value(&e).expect("json")
        }
    })
}
