//! Prokhorov distance between two measures on one finite space.
//!
//! The flow route uses the coupling characterization: `eps` is feasible iff
//! some coupling puts mass `<= eps` on pairs farther apart than `eps`. The
//! least coupling mass on far pairs, `G(eps) = 1 - maxflow(d <= eps)`, is a
//! right-continuous step function with jumps at pairwise distances, so the
//! distance is `min_k max(d_k, G(d_k))` over the sorted critical distances,
//! located by binary search at the crossing of `d_k` and `G(d_k)`.
//!
//! The oracle route enumerates every subset `A` and evaluates the defining
//! condition `mu(U_eps(A)) >= nu(A) - eps` on each interval between critical
//! radii.

use alloc::vec::Vec;

use crate::flow::bipartite_max_flow;
use crate::space::{FiniteMetricSpace, ProbabilityWeights};
use crate::{Error, Result};

/// Largest space accepted by [`prokhorov_oracle`].
pub const PROKHOROV_ORACLE_MAX_POINTS: usize = 12;

fn check(space: &FiniteMetricSpace, mu: &ProbabilityWeights, nu: &ProbabilityWeights) -> Result<()> {
    if mu.len() != space.len() {
        return Err(Error::SpaceMismatch(space.len(), mu.len()));
    }
    if nu.len() != space.len() {
        return Err(Error::SpaceMismatch(space.len(), nu.len()));
    }
    Ok(())
}

/// Prokhorov distance via coupling feasibility (max-flow).
pub fn prokhorov(
    space: &FiniteMetricSpace,
    mu: &ProbabilityWeights,
    nu: &ProbabilityWeights,
) -> Result<f64> {
    check(space, mu, nu)?;
    let (sm, sn) = (mu.support(), nu.support());
    let mut crit: Vec<f64> = Vec::with_capacity(sm.len() * sn.len() + 1);
    crit.push(0.0);
    for &i in &sm {
        for &j in &sn {
            crit.push(space.d(i, j));
        }
    }
    crit.sort_by(f64::total_cmp);
    crit.dedup();

    let far_mass = |eps: f64| -> f64 {
        let allowed = sm
            .iter()
            .flat_map(|&i| sn.iter().map(move |&j| (i, j)))
            .filter(|&(i, j)| space.d(i, j) <= eps);
        let g = 1.0 - bipartite_max_flow(mu.as_slice(), nu.as_slice(), allowed);
        if g < 1e-12 {
            0.0
        } else {
            g
        }
    };

    // first index with crit[k] >= G(crit[k]); the last index always qualifies
    let (mut lo, mut hi) = (0usize, crit.len() - 1);
    if crit[0] >= far_mass(crit[0]) {
        return Ok(0.0);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if crit[mid] >= far_mass(crit[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(crit[hi].min(far_mass(crit[lo])))
}

/// Prokhorov distance straight from the subset definition. Refuses spaces
/// with more than [`PROKHOROV_ORACLE_MAX_POINTS`] points.
pub fn prokhorov_oracle(
    space: &FiniteMetricSpace,
    mu: &ProbabilityWeights,
    nu: &ProbabilityWeights,
) -> Result<f64> {
    check(space, mu, nu)?;
    let n = space.len();
    if n > PROKHOROV_ORACLE_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "Prokhorov oracle",
            size: n,
            limit: PROKHOROV_ORACLE_MAX_POINTS,
        });
    }
    let mut worst: f64 = 0.0;
    let mut radius = alloc::vec![0.0; n];
    for mask in 1u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let nu_a: f64 = members.iter().map(|&i| nu.get(i)).sum();
        for (y, r) in radius.iter_mut().enumerate() {
            *r = members
                .iter()
                .map(|&z| space.d(y, z))
                .fold(f64::INFINITY, f64::min);
        }
        let mut radii = radius.clone();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        // For eps in (r_j, r_{j+1}] the neighbourhood carries the mass of
        // points within r_j; the least admissible eps there is
        // max(r_j, nu(A) - that mass).
        let threshold = radii
            .iter()
            .map(|&r| {
                let m: f64 = (0..n).filter(|&y| radius[y] <= r).map(|y| mu.get(y)).sum();
                r.max(nu_a - m)
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(threshold);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pair(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(2, "p", |_, _| d).unwrap()
    }

    #[test]
    fn equal_measures() {
        let s = pair(1.0);
        let mu = ProbabilityWeights::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(prokhorov(&s, &mu, &mu).unwrap(), 0.0);
        assert_eq!(prokhorov_oracle(&s, &mu, &mu).unwrap(), 0.0);
    }

    #[test]
    fn point_masses() {
        let s = pair(0.3);
        let mu = ProbabilityWeights::dirac(2, 0).unwrap();
        let nu = ProbabilityWeights::dirac(2, 1).unwrap();
        assert_eq!(prokhorov(&s, &mu, &nu).unwrap(), 0.3);
        assert_eq!(prokhorov_oracle(&s, &mu, &nu).unwrap(), 0.3);
    }

    #[test]
    fn mass_gap() {
        let s = pair(1.0);
        let mu = ProbabilityWeights::new(vec![0.5, 0.5]).unwrap();
        let nu = ProbabilityWeights::new(vec![0.8, 0.2]).unwrap();
        assert!((prokhorov(&s, &mu, &nu).unwrap() - 0.3).abs() < 1e-12);
        assert!((prokhorov_oracle(&s, &mu, &nu).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn mismatched_spaces() {
        let s = pair(1.0);
        let mu = ProbabilityWeights::uniform(3).unwrap();
        let nu = ProbabilityWeights::uniform(2).unwrap();
        assert!(matches!(prokhorov(&s, &mu, &nu), Err(Error::SpaceMismatch(..))));
    }
}
