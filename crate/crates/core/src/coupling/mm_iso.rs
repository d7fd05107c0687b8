use alloc::vec::Vec;

use super::SearchOutcome;
use crate::bitset::BitSet;
use crate::lipschitz::{for_each_assignment, ConflictGraph, PointMap, EXACT_COVER_MAX_POINTS};
use crate::metrics::prokhorov;
use crate::space::{FiniteMMSpace, ProbabilityWeights};
use crate::{Error, Result};

/// Per-condition outcome of an epsilon-mm isomorphism check.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MmIsoReport {
    pub epsilon: f64,
    /// `mu_X` of the non-exceptional set.
    pub mass: f64,
    pub mass_ok: bool,
    /// Distortion of the map on the non-exceptional set.
    pub distortion: f64,
    pub distortion_ok: bool,
    /// Prokhorov distance between the push-forward and `mu_Y`.
    pub prokhorov: f64,
    pub prokhorov_ok: bool,
}

impl MmIsoReport {
    pub fn pass(&self) -> bool {
        self.mass_ok && self.distortion_ok && self.prokhorov_ok
    }
}

/// A map with its non-exceptional set and the `epsilon` it certifies.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MmIsoWitness {
    pub assignment: Vec<usize>,
    pub non_exceptional: Vec<usize>,
    pub epsilon: f64,
}

fn check_measures(f: &PointMap<'_>, mu_x: &ProbabilityWeights, mu_y: &ProbabilityWeights) -> Result<()> {
    if mu_x.len() != f.source().len() {
        return Err(Error::WeightLength {
            expected: f.source().len(),
            got: mu_x.len(),
        });
    }
    if mu_y.len() != f.target().len() {
        return Err(Error::WeightLength {
            expected: f.target().len(),
            got: mu_y.len(),
        });
    }
    Ok(())
}

/// Evaluates the three conditions: `mu_X(X~) >= 1 - eps`, distortion `<= eps`
/// on `X~`, and `d_P(f_# mu_X, mu_Y) <= eps` (each up to `tol`).
pub fn mm_iso_check(
    f: &PointMap<'_>,
    mu_x: &ProbabilityWeights,
    mu_y: &ProbabilityWeights,
    non_exceptional: &[usize],
    epsilon: f64,
    tol: f64,
) -> Result<MmIsoReport> {
    check_measures(f, mu_x, mu_y)?;
    for &i in non_exceptional {
        f.source().check_index(i)?;
    }
    let mut set = non_exceptional.to_vec();
    set.sort_unstable();
    set.dedup();
    let mass = mu_x.mass(&set);
    let distortion = f.distortion_on(&set);
    let push = f.pushforward(mu_x)?;
    let p = prokhorov(f.target(), &push, mu_y)?;
    Ok(MmIsoReport {
        epsilon,
        mass,
        mass_ok: mass >= 1.0 - epsilon - tol,
        distortion,
        distortion_ok: distortion <= epsilon + tol,
        prokhorov: p,
        prokhorov_ok: p <= epsilon + tol,
    })
}

/// Least `eps` for which `f` is an `eps`-mm isomorphism, with a
/// non-exceptional set attaining it.
///
/// The distortion part is a step function of `eps` (the conflict graph of
/// pairs distorted by more than `eps` changes only at pair distortions), so
/// the least feasible value is `min_c max(c, cover(c))` over critical `c`,
/// `cover(c)` the least mass of a vertex cover of the conflict graph at `c`.
pub fn mm_iso_epsilon(
    f: &PointMap<'_>,
    mu_x: &ProbabilityWeights,
    mu_y: &ProbabilityWeights,
) -> Result<(f64, Vec<usize>)> {
    check_measures(f, mu_x, mu_y)?;
    let n = f.source().len();
    let p = prokhorov(f.target(), &f.pushforward(mu_x)?, mu_y)?;
    let dis = |a: usize, b: usize| libm::fabs(f.pair_defect(a, b));
    let mut crit = alloc::vec![0.0];
    for a in 0..n {
        for b in a + 1..n {
            crit.push(dis(a, b));
        }
    }
    crit.sort_by(f64::total_cmp);
    crit.dedup();
    let mut best: Option<(f64, BitSet)> = None;
    for &c in &crit {
        if best.as_ref().is_some_and(|b| c >= b.0) {
            break;
        }
        let g = ConflictGraph::build(n, |a, b| dis(a, b) > c);
        let (mass, cover) = if g.has_edges() {
            if n > EXACT_COVER_MAX_POINTS {
                return Err(Error::TooLarge {
                    what: "mm-isomorphism epsilon",
                    size: n,
                    limit: EXACT_COVER_MAX_POINTS,
                });
            }
            g.min_cover(mu_x.as_slice(), f64::INFINITY)
                .expect("unbounded budget")
        } else {
            (0.0, BitSet::new(n))
        };
        let v = c.max(mass);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, cover));
        }
    }
    let (eps, cover) = best.expect("0 is always a critical value");
    let mut keep = BitSet::full(n);
    keep.difference_with(&cover);
    Ok((eps.max(p), keep.to_vec()))
}

/// Searches all maps `X -> Y` for an `epsilon`-mm isomorphism. More than
/// `max_maps` candidate maps gives [`SearchOutcome::Indeterminate`].
pub fn mm_iso_search(
    x: &FiniteMMSpace,
    y: &FiniteMMSpace,
    epsilon: f64,
    tol: f64,
    max_maps: u64,
) -> Result<SearchOutcome<MmIsoWitness>> {
    let mut found: Option<MmIsoWitness> = None;
    let mut err: Option<Error> = None;
    let res = for_each_assignment(x.len(), y.len(), max_maps, |a| {
        if found.is_some() || err.is_some() {
            return;
        }
        let f = PointMap {
            source: &x.space,
            target: &y.space,
            assignment: a.to_vec(),
        };
        match mm_iso_epsilon(&f, &x.mu, &y.mu) {
            Ok((e, keep)) if e <= epsilon + tol => {
                found = Some(MmIsoWitness {
                    assignment: a.to_vec(),
                    non_exceptional: keep,
                    epsilon: e,
                })
            }
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    match res {
        Err(Error::BudgetExceeded(_)) => return Ok(SearchOutcome::Indeterminate),
        Err(e) => return Err(e),
        Ok(()) => {}
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(match found {
        Some(w) => SearchOutcome::Found(w),
        None => SearchOutcome::NotFound,
    })
}
