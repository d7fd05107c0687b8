//! CSV and JSON report writers. Both list the rows in report order with the
//! columns `scenario, n, kappa, delta, variant, value, lower, upper, verdict,
//! witness`; the JSON file also echoes the config and the verdict counts.

use std::fs;
use std::io::Write;
use std::path::Path;

use mmspace_core::report::{ExperimentReport, Summary};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{io_err, json_err, Result};

pub const CSV_HEADER: [&str; 10] = [
    "scenario", "n", "kappa", "delta", "variant", "value", "lower", "upper", "verdict", "witness",
];

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.scenario.clone(),
            r.n.to_string(),
            num(r.kappa),
            num(r.delta),
            r.variant.clone(),
            num(Some(r.value)),
            num(r.lower),
            num(r.upper),
            r.verdict.as_str().to_string(),
            r.witness.clone(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a ScenarioConfig,
    summary: Summary,
    rows: &'a [mmspace_core::report::ReportRow],
}

pub fn to_json(config: &ScenarioConfig, report: &ExperimentReport) -> String {
    let doc = JsonReport {
        config,
        summary: report.summary(),
        rows: &report.rows,
    };
    serde_json::to_string_pretty(&doc).expect("report is serializable")
}

pub fn write_files(config: &ScenarioConfig, report: &ExperimentReport) -> Result<()> {
    if let Some(p) = &config.output.csv {
        let f = fs::File::create(p).map_err(io_err(p))?;
        write_csv(report, f)?;
    }
    if let Some(p) = &config.output.json {
        fs::write(p, to_json(config, report) + "\n").map_err(io_err(p))?;
    }
    Ok(())
}

/// Reads back a JSON report written by [`write_files`] (for tooling/tests).
pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(json_err(path))
}
