//! Distances and size functionals on measures, maps and subsets.

mod partial_diameter;
mod prokhorov;

pub use partial_diameter::{
    partial_diameter, partial_diameter_oracle, partial_diameter_witness, PartialDiameterQuery,
    ORACLE_MAX_POINTS,
};
pub(crate) use partial_diameter::min_diameter_for_mass;
pub use prokhorov::{prokhorov, prokhorov_oracle, PROKHOROV_ORACLE_MAX_POINTS};

use alloc::vec::Vec;

use crate::space::{FiniteMetricSpace, ProbabilityWeights};
use crate::{Error, Result};

/// Ky Fan distance between two maps `f, g: X -> Y` given as assignment
/// vectors: the least `eps >= 0` with `mu({z : d_Y(f(z), g(z)) > eps}) <= eps`.
pub fn ky_fan(
    target: &FiniteMetricSpace,
    mu: &ProbabilityWeights,
    f: &[usize],
    g: &[usize],
) -> Result<f64> {
    if f.len() != mu.len() || g.len() != mu.len() {
        return Err(Error::SpaceMismatch(f.len(), g.len()));
    }
    for &y in f.iter().chain(g) {
        target.check_index(y)?;
    }
    let disc: Vec<(f64, f64)> = f
        .iter()
        .zip(g)
        .enumerate()
        .map(|(z, (&a, &b))| (target.d(a, b), mu.get(z)))
        .collect();
    Ok(ky_fan_from_discrepancies(&disc))
}

/// `disc` holds `(discrepancy, mass)` per source point.
pub(crate) fn ky_fan_from_discrepancies(disc: &[(f64, f64)]) -> f64 {
    // The exceeding mass E(c) is a right-continuous step function, so the
    // optimum is min over critical c of max(c, E(c)).
    let mut crit: Vec<f64> = disc.iter().map(|&(c, _)| c).collect();
    crit.push(0.0);
    crit.sort_by(f64::total_cmp);
    crit.dedup();
    crit.iter()
        .map(|&c| {
            let exceed: f64 = disc.iter().filter(|&&(d, _)| d > c).map(|&(_, m)| m).sum();
            c.max(exceed)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between two non-empty subsets of one space.
pub fn hausdorff_subsets(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("subset"));
    }
    for &i in a.iter().chain(b) {
        space.check_index(i)?;
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&x| to.iter().map(|&y| space.d(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}
