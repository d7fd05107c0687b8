//! Partial diameter `Diam(mu; 1 - kappa)`: the least diameter of a set of mass
//! at least `1 - kappa`.
//!
//! A set of diameter at most `D` is a clique in the threshold graph joining
//! points at distance `<= D`, so the partial diameter is the least candidate
//! distance `D` whose threshold graph has a clique of weight `>= 1 - kappa`.
//! Feasibility is monotone in `D`; we binary-search the sorted candidates and
//! decide each one with a weighted clique branch-and-bound.

use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::space::{subset_diameter, FiniteMetricSpace, ProbabilityWeights};
use crate::{Error, Result};

/// Largest space accepted by [`partial_diameter_oracle`].
pub const ORACLE_MAX_POINTS: usize = 20;

/// A validated partial-diameter question.
#[derive(Debug, Clone, Copy)]
pub struct PartialDiameterQuery<'a> {
    pub space: &'a FiniteMetricSpace,
    pub weights: &'a ProbabilityWeights,
    pub kappa: f64,
}

impl<'a> PartialDiameterQuery<'a> {
    pub fn new(
        space: &'a FiniteMetricSpace,
        weights: &'a ProbabilityWeights,
        kappa: f64,
    ) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::WeightLength {
                expected: space.len(),
                got: weights.len(),
            });
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::KappaOutOfRange(kappa));
        }
        Ok(PartialDiameterQuery {
            space,
            weights,
            kappa,
        })
    }

    fn atoms(&self) -> Vec<(usize, f64)> {
        (0..self.space.len())
            .filter(|&i| self.weights.get(i) > 0.0)
            .map(|i| (i, self.weights.get(i)))
            .collect()
    }
}

/// Partial diameter `Diam(weights; 1 - kappa)` for `kappa` in `(0, 1)`.
///
/// Masses are compared against `1 - kappa - tol`.
pub fn partial_diameter(
    space: &FiniteMetricSpace,
    weights: &ProbabilityWeights,
    kappa: f64,
    tol: f64,
) -> Result<f64> {
    let q = PartialDiameterQuery::new(space, weights, kappa)?;
    let atoms = q.atoms();
    Ok(min_diameter_for_mass(space, &atoms, 1.0 - kappa - tol).unwrap_or(f64::INFINITY))
}

/// Partial diameter together with the lexicographically smallest (as a sorted
/// index vector) optimal set. Only points of positive weight are used.
pub fn partial_diameter_witness(
    space: &FiniteMetricSpace,
    weights: &ProbabilityWeights,
    kappa: f64,
    tol: f64,
) -> Result<(f64, Vec<usize>)> {
    let q = PartialDiameterQuery::new(space, weights, kappa)?;
    let atoms = q.atoms();
    let target = 1.0 - kappa - tol;
    let value = min_diameter_for_mass(space, &atoms, target).unwrap_or(f64::INFINITY);
    let solver = Atoms::new(space, &atoms, value);
    // `solver` indexes atoms in weight order; map back and forth through `pos`.
    let mut pos = alloc::vec![usize::MAX; space.len()];
    for (k, &a) in solver.index.iter().enumerate() {
        pos[a] = k;
    }
    let support: Vec<usize> = atoms.iter().map(|&(i, _)| i).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut mass = 0.0;
    while mass < target {
        let last = chosen.last().copied();
        let mut extended = false;
        for &v in support.iter().filter(|&&v| last.is_none_or(|l| v > l)) {
            let pv = pos[v];
            if !chosen.iter().all(|&c| solver.adj[pos[c]].contains(pv)) {
                continue;
            }
            let mut cand = BitSet::new(solver.len());
            for &u in support.iter().filter(|&&u| u > v) {
                cand.insert(pos[u]);
            }
            cand.intersect_with(&solver.adj[pv]);
            for &c in &chosen {
                cand.intersect_with(&solver.adj[pos[c]]);
            }
            if solver.reaches(cand, mass + solver.w[pv], target) {
                chosen.push(v);
                mass += solver.w[pv];
                extended = true;
                break;
            }
        }
        if !extended {
            // unreachable when `value` is feasible
            break;
        }
    }
    Ok((value, chosen))
}

/// Exhaustive minimum over all `2^n` subsets. Refuses spaces with more than
/// [`ORACLE_MAX_POINTS`] points.
pub fn partial_diameter_oracle(
    space: &FiniteMetricSpace,
    weights: &ProbabilityWeights,
    kappa: f64,
    tol: f64,
) -> Result<f64> {
    PartialDiameterQuery::new(space, weights, kappa)?;
    let n = space.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "partial diameter oracle",
            size: n,
            limit: ORACLE_MAX_POINTS,
        });
    }
    let target = 1.0 - kappa - tol;
    let mut best = f64::INFINITY;
    let mut set = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        set.clear();
        set.extend((0..n).filter(|&i| mask >> i & 1 == 1));
        if weights.mass(&set) >= target {
            best = best.min(subset_diameter(space, &set));
        }
    }
    Ok(best)
}

/// Least diameter of a subset of `atoms` (point index, positive mass) with
/// total mass `>= target`; `None` when even all atoms fall short.
pub(crate) fn min_diameter_for_mass(
    space: &FiniteMetricSpace,
    atoms: &[(usize, f64)],
    target: f64,
) -> Option<f64> {
    if target <= 0.0 {
        return Some(0.0);
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if total < target {
        return None;
    }
    if atoms.iter().any(|a| a.1 >= target) {
        return Some(0.0);
    }
    let mut cands: Vec<f64> = Vec::with_capacity(atoms.len() * atoms.len() / 2 + 1);
    cands.push(0.0);
    for (k, &(i, _)) in atoms.iter().enumerate() {
        for &(j, _) in &atoms[k + 1..] {
            cands.push(space.d(i, j));
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    // cands[0] = 0 is infeasible (no single atom suffices); the last is the
    // full support diameter, which is feasible.
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if Atoms::new(space, atoms, cands[mid]).feasible(target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(cands[hi])
}

/// Threshold graph on a weighted atom set, atoms re-indexed by decreasing
/// weight.
pub(crate) struct Atoms {
    pub(crate) index: Vec<usize>,
    pub(crate) w: Vec<f64>,
    pub(crate) adj: Vec<BitSet>,
}

impl Atoms {
    pub(crate) fn new(space: &FiniteMetricSpace, atoms: &[(usize, f64)], d_max: f64) -> Self {
        let mut sorted: Vec<(usize, f64)> = atoms.to_vec();
        sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let k = sorted.len();
        let mut adj = alloc::vec![BitSet::new(k); k];
        for a in 0..k {
            for b in a + 1..k {
                if space.d(sorted[a].0, sorted[b].0) <= d_max {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
        }
        Atoms {
            index: sorted.iter().map(|a| a.0).collect(),
            w: sorted.iter().map(|a| a.1).collect(),
            adj,
        }
    }

    fn len(&self) -> usize {
        self.w.len()
    }

    fn feasible(&self, target: f64) -> bool {
        self.reaches(BitSet::full(self.len()), 0.0, target)
    }

    /// Whether some clique drawn from `cand` (all of which must be adjacent
    /// to the current partial clique) brings the weight from `cur` to
    /// `target`.
    fn reaches(&self, mut cand: BitSet, cur: f64, target: f64) -> bool {
        if cur >= target {
            return true;
        }
        let mut rest: f64 = cand.iter().map(|v| self.w[v]).sum();
        while let Some(v) = cand.first() {
            if cur + rest < target {
                return false;
            }
            let next = cand.intersection(&self.adj[v]);
            if self.reaches(next, cur + self.w[v], target) {
                return true;
            }
            cand.remove(v);
            rest -= self.w[v];
        }
        false
    }
}
