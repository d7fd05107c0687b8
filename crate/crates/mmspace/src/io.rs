//! JSON file format for spaces.
//!
//! ```json
//! { "labels": ["a", "b"], "dist": [[0, 1], [1, 0]], "mu": [0.5, 0.5], "basepoint": 0 }
//! ```
//!
//! `labels` defaults to `p0, p1, ...`; `mu` defaults to uniform weights and is
//! ignored where only a metric space is needed (screens).

use std::fs;
use std::path::Path;

use mmspace_core::lipschitz::MapFamily;
use mmspace_core::{validate, FiniteMMSpace, FiniteMetricSpace, PointedMetricSpace, ProbabilityWeights, Validation};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, json_err, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<usize>,
}

impl SpaceFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(json_err(path))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(json_err(path))?;
        fs::write(path, text + "\n").map_err(io_err(path))
    }

    fn labels(&self) -> Vec<String> {
        if self.labels.is_empty() {
            (0..self.dist.len()).map(|i| format!("p{i}")).collect()
        } else {
            self.labels.clone()
        }
    }

    /// Metric axioms check without building the space.
    pub fn validate(&self) -> Result<Validation> {
        Ok(validate(self.labels().len(), &self.dist)?)
    }

    pub fn metric(&self) -> Result<FiniteMetricSpace> {
        Ok(FiniteMetricSpace::new(self.labels(), self.dist.clone())?)
    }

    pub fn mm(&self) -> Result<FiniteMMSpace> {
        let space = self.metric()?;
        Ok(match &self.mu {
            Some(w) => FiniteMMSpace::new(space, ProbabilityWeights::new(w.clone())?)?,
            None => FiniteMMSpace::uniform(space)?,
        })
    }

    pub fn pointed(&self) -> Result<PointedMetricSpace> {
        Ok(PointedMetricSpace::new(self.metric()?, self.basepoint.unwrap_or(0))?)
    }

    pub fn from_metric(space: &FiniteMetricSpace) -> Self {
        SpaceFile {
            labels: space.labels().to_vec(),
            dist: space.to_matrix(),
            mu: None,
            basepoint: None,
        }
    }

    pub fn from_mm(x: &FiniteMMSpace) -> Self {
        SpaceFile {
            mu: Some(x.mu.as_slice().to_vec()),
            ..Self::from_metric(&x.space)
        }
    }
}

/// Serializable listing of a map family, one assignment per map, images
/// given by label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDump {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub maps: Vec<Vec<usize>>,
}

impl FamilyDump {
    pub fn new(f: &MapFamily<'_>) -> Self {
        FamilyDump {
            source: f.source().labels().to_vec(),
            target: f.target().labels().to_vec(),
            maps: f.assignments().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x = mmspace_core::generators::grid_interval(3).unwrap();
        let f = SpaceFile::from_mm(&x);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.json");
        f.write(&p).unwrap();
        let g = SpaceFile::read(&p).unwrap();
        assert_eq!(g.mm().unwrap(), x);
    }

    #[test]
    fn defaults_and_validation() {
        let f: SpaceFile = serde_json::from_str(r#"{"dist": [[0, 1], [1, 0]]}"#).unwrap();
        let x = f.mm().unwrap();
        assert_eq!(x.space.labels(), ["p0", "p1"]);
        assert_eq!(x.mu.as_slice(), [0.5, 0.5]);
        let bad: SpaceFile =
            serde_json::from_str(r#"{"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}"#).unwrap();
        assert!(!bad.validate().unwrap().is_pass());
        assert!(bad.metric().is_err());
        let ragged: SpaceFile = serde_json::from_str(r#"{"dist": [[0, 1], [1]]}"#).unwrap();
        assert!(ragged.validate().is_err());
    }
}
