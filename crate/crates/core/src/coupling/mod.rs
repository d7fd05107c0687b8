//! Couplings, correspondences and the distances built on them: box distance,
//! epsilon-mm isomorphisms, Gromov-Hausdorff distance, approximation maps and
//! pointed GH conditions.

mod boxd;
mod gh;
mod mm_iso;

pub use boxd::{box_distance, box_distance_bounds, BoxBounds, BoxResult, BOX_EXACT_MAX_CELLS};
pub use gh::{
    approx_map_check, approx_map_search, gh_distance, gh_distance_oracle, pgh_check,
    ApproxReport, GhResult, PghReport, GH_EXACT_MAX_CELLS, GH_ORACLE_MAX_POINTS,
};
pub use mm_iso::{
    mm_iso_check, mm_iso_epsilon, mm_iso_search, MmIsoReport, MmIsoWitness,
};

use alloc::vec::Vec;

use crate::space::{FiniteMetricSpace, ProbabilityWeights};
use crate::{Error, Result, AXIOM_TOL};

/// Result of a bounded search: budget exhaustion is reported separately from
/// a completed search that found nothing.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SearchOutcome<T> {
    Found(T),
    NotFound,
    Indeterminate,
}

impl<T> SearchOutcome<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

/// A joint measure on `X x Y` with prescribed marginals.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coupling {
    xi: Vec<Vec<f64>>,
}

impl Coupling {
    /// Accepts `xi` when entries are non-negative and both marginals match
    /// within `1e-12`.
    pub fn new(xi: Vec<Vec<f64>>, mu: &ProbabilityWeights, nu: &ProbabilityWeights) -> Result<Self> {
        if xi.len() != mu.len() {
            return Err(Error::SpaceMismatch(mu.len(), xi.len()));
        }
        for (i, row) in xi.iter().enumerate() {
            if row.len() != nu.len() {
                return Err(Error::SpaceMismatch(nu.len(), row.len()));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidEntry { i, j, value: v });
                }
            }
            let s: f64 = row.iter().sum();
            if libm::fabs(s - mu.get(i)) > AXIOM_TOL {
                return Err(Error::InvalidParameter {
                    name: "coupling",
                    reason: "first marginal does not match",
                });
            }
        }
        for j in 0..nu.len() {
            let s: f64 = xi.iter().map(|r| r[j]).sum();
            if libm::fabs(s - nu.get(j)) > AXIOM_TOL {
                return Err(Error::InvalidParameter {
                    name: "coupling",
                    reason: "second marginal does not match",
                });
            }
        }
        Ok(Coupling { xi })
    }

    /// The product measure `mu (x) nu`.
    pub fn product(mu: &ProbabilityWeights, nu: &ProbabilityWeights) -> Self {
        Coupling {
            xi: mu
                .as_slice()
                .iter()
                .map(|&a| nu.as_slice().iter().map(|&b| a * b).collect())
                .collect(),
        }
    }

    /// Completes a sub-coupling `plan` (row sums `<= mu`, column sums `<= nu`)
    /// by spreading the leftover masses proportionally.
    pub(crate) fn complete(
        mut plan: Vec<Vec<f64>>,
        mu: &ProbabilityWeights,
        nu: &ProbabilityWeights,
    ) -> Result<Self> {
        let rows: Vec<f64> = (0..mu.len())
            .map(|i| (mu.get(i) - plan[i].iter().sum::<f64>()).max(0.0))
            .collect();
        let cols: Vec<f64> = (0..nu.len())
            .map(|j| (nu.get(j) - plan.iter().map(|r| r[j]).sum::<f64>()).max(0.0))
            .collect();
        let left: f64 = rows.iter().sum();
        if left > 0.0 {
            for (i, r) in rows.iter().enumerate() {
                for (j, c) in cols.iter().enumerate() {
                    plan[i][j] += r * c / left;
                }
            }
        }
        Coupling::new(plan, mu, nu)
    }

    pub fn xi(&self) -> &[Vec<f64>] {
        &self.xi
    }

    /// `xi(S)`
    pub fn mass_on(&self, s: &CorrespondenceSet) -> f64 {
        s.pairs.iter().map(|&(i, j)| self.xi[i][j]).sum()
    }
}

/// A set of index pairs in `X x Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrespondenceSet {
    pairs: Vec<(usize, usize)>,
}

impl CorrespondenceSet {
    pub fn new(x_len: usize, y_len: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        for &(i, j) in &pairs {
            if i >= x_len {
                return Err(Error::IndexOutOfRange { index: i, len: x_len });
            }
            if j >= y_len {
                return Err(Error::IndexOutOfRange { index: j, len: y_len });
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(CorrespondenceSet { pairs })
    }

    /// Graph `{(x, f(x))}` of an assignment.
    pub fn graph(assignment: &[usize]) -> Self {
        CorrespondenceSet {
            pairs: assignment.iter().copied().enumerate().collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Whether both projections are onto.
    pub fn is_correspondence(&self, x_len: usize, y_len: usize) -> bool {
        let mut sx = alloc::vec![false; x_len];
        let mut sy = alloc::vec![false; y_len];
        for &(i, j) in &self.pairs {
            sx[i] = true;
            sy[j] = true;
        }
        sx.into_iter().chain(sy).all(|b| b)
    }
}

/// `dis(S)`: the largest `|d_X(x1, x2) - d_Y(y1, y2)|` over pairs of pairs
/// in `S`. The empty set has distortion 0.
pub fn distortion(s: &CorrespondenceSet, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let p = &s.pairs;
    let mut worst: f64 = 0.0;
    for (k, &(a, b)) in p.iter().enumerate() {
        for &(c, e) in &p[k + 1..] {
            worst = worst.max(libm::fabs(x.d(a, c) - y.d(b, e)));
        }
    }
    worst
}
