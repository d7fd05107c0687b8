use alloc::vec::Vec;

use super::cover::{ConflictGraph, EXACT_COVER_MAX_POINTS};
use crate::bitset::BitSet;
use crate::space::{pushforward, FiniteMetricSpace, ProbabilityWeights};
use crate::{Error, Result};

/// A map between finite metric spaces, stored as the image index of every
/// source point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMap<'a> {
    pub(crate) source: &'a FiniteMetricSpace,
    pub(crate) target: &'a FiniteMetricSpace,
    pub(crate) assignment: Vec<usize>,
}

impl<'a> PointMap<'a> {
    pub fn new(
        source: &'a FiniteMetricSpace,
        target: &'a FiniteMetricSpace,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::SpaceMismatch(source.len(), assignment.len()));
        }
        for &y in &assignment {
            target.check_index(y)?;
        }
        Ok(PointMap {
            source,
            target,
            assignment,
        })
    }

    pub fn constant(
        source: &'a FiniteMetricSpace,
        target: &'a FiniteMetricSpace,
        y: usize,
    ) -> Result<Self> {
        Self::new(source, target, alloc::vec![y; source.len()])
    }

    pub fn source(&self) -> &'a FiniteMetricSpace {
        self.source
    }

    pub fn target(&self) -> &'a FiniteMetricSpace {
        self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// `d_Y(f(x), f(z)) - d_X(x, z)`
    pub fn pair_defect(&self, x: usize, z: usize) -> f64 {
        self.target.d(self.assignment[x], self.assignment[z]) - self.source.d(x, z)
    }

    /// Largest expansion over pairs of `set`, floored at 0.
    pub fn defect_on(&self, set: &[usize]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &x) in set.iter().enumerate() {
            for &z in &set[k + 1..] {
                worst = worst.max(self.pair_defect(x, z));
            }
        }
        worst
    }

    /// Largest `|d_Y(f(x), f(z)) - d_X(x, z)|` over pairs of `set`.
    pub fn distortion_on(&self, set: &[usize]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &x) in set.iter().enumerate() {
            for &z in &set[k + 1..] {
                worst = worst.max(libm::fabs(self.pair_defect(x, z)));
            }
        }
        worst
    }

    pub fn pushforward(&self, mu: &ProbabilityWeights) -> Result<ProbabilityWeights> {
        pushforward(&self.assignment, mu, self.target.len())
    }

    /// Sorted, deduplicated image.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.assignment.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// `max_{x,z} (d_Y(f(x), f(z)) - d_X(x, z))`, floored at 0. The map is in
/// `Lip_1^delta` iff this is `<= delta`, and 1-Lipschitz iff it is 0.
pub fn lipschitz_defect(map: &PointMap<'_>) -> f64 {
    let all: Vec<usize> = (0..map.source.len()).collect();
    map.defect_on(&all)
}

/// Certificate for membership in the almost-Lipschitz family: the
/// non-exceptional set carries mass `>= 1 - delta` and the map expands no pair
/// inside it by more than `delta`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LipschitzWitness {
    pub delta: f64,
    pub non_exceptional: Vec<usize>,
}

/// Decides whether `map` is 1-Lipschitz up to `delta` outside an exceptional
/// set of `mu`-mass `<= delta`. Returns the witness with the heaviest
/// non-exceptional set, or `None`.
///
/// Exact; refuses sources with more than [`EXACT_COVER_MAX_POINTS`] points
/// whenever some pair actually conflicts.
pub fn almost_lipschitz_min_mass_defect(
    map: &PointMap<'_>,
    mu: &ProbabilityWeights,
    delta: f64,
    tol: f64,
) -> Result<Option<LipschitzWitness>> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: "must be non-negative",
        });
    }
    let n = map.source.len();
    if mu.len() != n {
        return Err(Error::WeightLength {
            expected: n,
            got: mu.len(),
        });
    }
    let g = ConflictGraph::build(n, |x, z| map.pair_defect(x, z) > delta + tol);
    if !g.has_edges() {
        return Ok(Some(LipschitzWitness {
            delta,
            non_exceptional: (0..n).collect(),
        }));
    }
    if n > EXACT_COVER_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "almost-Lipschitz membership",
            size: n,
            limit: EXACT_COVER_MAX_POINTS,
        });
    }
    Ok(g.min_cover(mu.as_slice(), delta + tol).map(|(_, cover)| {
        let mut keep = BitSet::full(n);
        keep.difference_with(&cover);
        LipschitzWitness {
            delta,
            non_exceptional: keep.to_vec(),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::countable_screen;

    #[test]
    fn constant_and_identity_have_no_defect() {
        let (x, y) = countable_screen(5).unwrap();
        let c = PointMap::constant(&x.space, &y, 3).unwrap();
        assert_eq!(lipschitz_defect(&c), 0.0);
        let id = PointMap::new(&y, &y, (0..6).collect()).unwrap();
        assert_eq!(lipschitz_defect(&id), 0.0);
    }

    #[test]
    fn screen_map_defect() {
        let (x, y) = countable_screen(10).unwrap();
        for i in 1..=10 {
            let f = PointMap::new(&x.space, &y, alloc::vec![0, i]).unwrap();
            assert!((lipschitz_defect(&f) - 1.0 / i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn almost_lipschitz_on_screen_maps() {
        let (x, y) = countable_screen(10).unwrap();
        let f = PointMap::new(&x.space, &y, alloc::vec![0, 10]).unwrap();
        let w = almost_lipschitz_min_mass_defect(&f, &x.mu, 0.1 + 1e-6, 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(w.non_exceptional, alloc::vec![0, 1]);
        // 1/2 > 0.4: no single atom may be dropped
        let g = PointMap::new(&x.space, &y, alloc::vec![0, 2]).unwrap();
        assert!(almost_lipschitz_min_mass_defect(&g, &x.mu, 0.4, 1e-9)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rejects_bad_assignment() {
        let (x, y) = countable_screen(2).unwrap();
        assert!(PointMap::new(&x.space, &y, alloc::vec![0, 3]).is_err());
        assert!(PointMap::new(&x.space, &y, alloc::vec![0]).is_err());
    }
}
