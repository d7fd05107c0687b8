//! Scenario configuration. A config file is JSON naming a scenario and
//! overriding any of its preset parameters:
//!
//! ```json
//! { "scenario": "ray-scale", "n": [1, 2], "kappas": [0.25], "seed": 7 }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, json_err, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    CountableScreen,
    RayScale,
    FiniteCat0,
    Circle,
    BoxPerturbation,
    DoublingGap,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::CountableScreen,
        Scenario::RayScale,
        Scenario::FiniteCat0,
        Scenario::Circle,
        Scenario::BoxPerturbation,
        Scenario::DoublingGap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::CountableScreen => "countable-screen",
            Scenario::RayScale => "ray-scale",
            Scenario::FiniteCat0 => "finite-cat0",
            Scenario::Circle => "circle",
            Scenario::BoxPerturbation => "box-perturbation",
            Scenario::DoublingGap => "doubling-gap",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown scenario '{s}'")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

/// Fully resolved parameters of one scenario run. Fields a scenario does not
/// use are ignored by it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Grid points of the source space.
    pub m: usize,
    /// Scale indices of a sequence.
    pub n: Vec<u64>,
    /// Truncation / screen size.
    pub k: usize,
    /// Radius.
    pub r: f64,
    /// Mesh.
    pub h: f64,
    pub kappas: Vec<f64>,
    /// Decreasing error schedule.
    pub deltas: Vec<f64>,
    /// Perturbation sizes.
    pub eps: Vec<f64>,
    /// Number of random instances.
    pub instances: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_nodes: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

/// The same fields, all optional, as read from a file.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Scenario,
    m: Option<usize>,
    n: Option<Vec<u64>>,
    k: Option<usize>,
    r: Option<f64>,
    h: Option<f64>,
    kappas: Option<Vec<f64>>,
    deltas: Option<Vec<f64>>,
    eps: Option<Vec<f64>>,
    instances: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    max_nodes: Option<u64>,
    output: Option<OutputPaths>,
}

fn grid(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|i| i as f64 / 10.0).collect()
}

impl ScenarioConfig {
    pub fn preset(scenario: Scenario) -> Self {
        let base = ScenarioConfig {
            scenario,
            m: 4,
            n: vec![1],
            k: 10,
            r: 1.0,
            h: 0.25,
            kappas: vec![0.25],
            deltas: vec![0.2],
            eps: vec![],
            instances: 1,
            seed: 1,
            tol: mmspace_core::DEFAULT_TOL,
            max_nodes: mmspace_core::DEFAULT_MAX_NODES,
            output: OutputPaths::default(),
        };
        match scenario {
            Scenario::CountableScreen => base,
            Scenario::RayScale => ScenarioConfig {
                m: 10,
                n: vec![1, 2, 4, 8],
                r: 4.0,
                ..base
            },
            Scenario::FiniteCat0 => ScenarioConfig {
                kappas: grid(1, 9),
                deltas: vec![0.1, 0.01, 0.001],
                ..base
            },
            Scenario::Circle => ScenarioConfig {
                n: vec![1, 2, 3, 4],
                k: 16,
                kappas: vec![0.2, 0.4, 0.6],
                ..base
            },
            Scenario::BoxPerturbation => ScenarioConfig {
                kappas: vec![0.2, 0.5],
                eps: vec![0.01, 0.05],
                instances: 50,
                ..base
            },
            Scenario::DoublingGap => ScenarioConfig {
                m: 16,
                instances: 100,
                ..base
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let p = Self::preset(raw.scenario);
        let c = ScenarioConfig {
            scenario: raw.scenario,
            m: raw.m.unwrap_or(p.m),
            n: raw.n.unwrap_or(p.n),
            k: raw.k.unwrap_or(p.k),
            r: raw.r.unwrap_or(p.r),
            h: raw.h.unwrap_or(p.h),
            kappas: raw.kappas.unwrap_or(p.kappas),
            deltas: raw.deltas.unwrap_or(p.deltas),
            eps: raw.eps.unwrap_or(p.eps),
            instances: raw.instances.unwrap_or(p.instances),
            seed: raw.seed.unwrap_or(p.seed),
            tol: raw.tol.unwrap_or(p.tol),
            max_nodes: raw.max_nodes.unwrap_or(p.max_nodes),
            output: raw.output.unwrap_or(p.output),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        // surface syntax errors with the path, semantic ones as config errors
        serde_json::from_str::<serde_json::Value>(&text).map_err(json_err(path))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.m == 0 || self.k == 0 || self.instances == 0 {
            return bad("sizes must be positive");
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return bad("n must be a non-empty list of positive integers");
        }
        if !(self.h > 0.0 && self.h.is_finite()) || !(self.r > 0.0 && self.r.is_finite()) {
            return bad("h and r must be positive");
        }
        if self.kappas.is_empty() || self.kappas.iter().any(|&k| !(k > 0.0 && k < 1.0)) {
            return bad("kappas must lie in (0, 1)");
        }
        if self.deltas.is_empty()
            || self.deltas.iter().any(|&d| d.is_nan() || d <= 0.0)
            || self.deltas.windows(2).any(|w| w[1] >= w[0])
        {
            return bad("deltas must be positive and strictly decreasing");
        }
        if self.eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("eps values must be positive");
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_nodes == 0 {
            return bad("tol and max_nodes must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for s in Scenario::ALL {
            ScenarioConfig::preset(s).validate().unwrap();
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
    }

    #[test]
    fn overrides_and_rejections() {
        let c = ScenarioConfig::from_json(r#"{"scenario": "ray-scale", "n": [2]}"#).unwrap();
        assert_eq!(c.n, vec![2]);
        assert_eq!(c.m, 10);
        for bad in [
            r#"{"scenario": "nope"}"#,
            r#"{"scenario": "circle", "kappas": [1.0]}"#,
            r#"{"scenario": "circle", "deltas": [0.1, 0.2]}"#,
            r#"{"scenario": "circle", "bogus": 1}"#,
            r#"{"scenario": "circle", "m": 0}"#,
        ] {
            assert!(ScenarioConfig::from_json(bad).is_err(), "{bad}");
        }
    }
}
