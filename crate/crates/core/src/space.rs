//! Finite metric spaces, probability weights and the elementary set
//! operations on them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result, AXIOM_TOL};

/// The first metric axiom found to fail, with witnessing indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NonZeroDiagonal { i: usize, value: f64 },
    Asymmetry { i: usize, j: usize },
    NonPositive { i: usize, j: usize },
    /// `d(i, k) > d(i, j) + d(j, k)`.
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonZeroDiagonal { i, value } => write!(f, "d({i},{i}) = {value} != 0"),
            Violation::Asymmetry { i, j } => write!(f, "asymmetry at ({i},{j})"),
            Violation::NonPositive { i, j } => {
                write!(f, "distinct points {i} and {j} at distance 0")
            }
            Violation::Triangle { i, j, k } => {
                write!(f, "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validation {
    Pass,
    Fail(Violation),
}

impl Validation {
    pub fn is_pass(&self) -> bool {
        matches!(self, Validation::Pass)
    }
}

/// Checks a labelled distance matrix against the metric axioms.
///
/// Shape problems and NaN/negative/infinite entries are errors; a well-formed
/// matrix that breaks an axiom yields [`Validation::Fail`] with the first
/// violation in index order. Symmetry and the triangle inequality are checked
/// to [`AXIOM_TOL`].
pub fn validate(labels: usize, dist: &[Vec<f64>]) -> Result<Validation> {
    let n = labels;
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n || dist.len() != n {
            return Err(Error::DimensionMismatch {
                labels: n,
                rows: dist.len(),
                row,
                cols: r.len(),
            });
        }
    }
    if dist.len() != n {
        return Err(Error::DimensionMismatch {
            labels: n,
            rows: dist.len(),
            row: 0,
            cols: 0,
        });
    }
    for (i, r) in dist.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidEntry { i, j, value: v });
            }
        }
    }
    for (i, r) in dist.iter().enumerate() {
        if r[i] != 0.0 {
            return Ok(Validation::Fail(Violation::NonZeroDiagonal { i, value: r[i] }));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if libm::fabs(dist[i][j] - dist[j][i]) > AXIOM_TOL {
                return Ok(Validation::Fail(Violation::Asymmetry { i, j }));
            }
            if dist[i][j] <= 0.0 {
                return Ok(Validation::Fail(Violation::NonPositive { i, j }));
            }
        }
    }
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                if dist[i][k] > dist[i][j] + dist[j][k] + AXIOM_TOL {
                    return Ok(Validation::Fail(Violation::Triangle { i, j, k }));
                }
            }
        }
    }
    Ok(Validation::Pass)
}

/// A finite metric space with labelled points.
///
/// Immutable after construction; the distance matrix is validated and stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
}

impl FiniteMetricSpace {
    /// Builds a space from labels and a square distance matrix. The matrix
    /// must pass [`validate`]; entries within tolerance of symmetric are
    /// stored as exactly symmetric (upper triangle wins).
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        match validate(labels.len(), &dist)? {
            Validation::Pass => {}
            Validation::Fail(v) => return Err(Error::NotMetric(v)),
        }
        let n = labels.len();
        let mut flat = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                flat[i * n + j] = dist[i][j];
                flat[j * n + i] = dist[i][j];
            }
        }
        Ok(FiniteMetricSpace {
            labels,
            dist: flat,
            n,
        })
    }

    /// Builds a space from a distance function on `0..n`, labelling points by
    /// `prefix` followed by the index.
    pub fn from_fn(n: usize, prefix: &str, mut d: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let labels = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { d(i, j) }).collect())
            .collect();
        Self::new(labels, dist)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Largest distance from `i` to any point.
    pub fn eccentricity(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(0.0, f64::max)
    }

    /// Sorted distinct off-diagonal distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Relabelled copy with point `perm[i]` of the result equal to point `i`
    /// of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        if perm.len() != n {
            return Err(Error::SpaceMismatch(n, perm.len()));
        }
        let mut inv = alloc::vec![usize::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::IndexOutOfRange { index: p, len: n });
            }
            inv[p] = i;
        }
        let labels = inv.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = (0..n)
            .map(|a| (0..n).map(|b| self.d(inv[a], inv[b])).collect())
            .collect();
        Self::new(labels, dist)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            })
        }
    }
}

/// A probability vector (non-negative entries summing to 1 within
/// [`AXIOM_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityWeights(Vec<f64>);

impl ProbabilityWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty("weight vector"));
        }
        for (index, &value) in w.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let s: f64 = w.iter().sum();
        if libm::fabs(s - 1.0) > AXIOM_TOL {
            return Err(Error::NotNormalized(s));
        }
        Ok(ProbabilityWeights(w))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("weight vector"));
        }
        Ok(ProbabilityWeights(alloc::vec![1.0 / n as f64; n]))
    }

    /// Unit mass at `i`.
    pub fn dirac(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let mut w = alloc::vec![0.0; n];
        w[i] = 1.0;
        Ok(ProbabilityWeights(w))
    }

    /// Normalizes positive raw weights.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        let s: f64 = raw.iter().sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NotNormalized(s));
        }
        Self::new(raw.iter().map(|x| x / s).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Mass of a set of indices, summed in the given order.
    pub fn mass(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.0[i]).sum()
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }

    pub fn min_weight(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut w = alloc::vec![0.0; self.0.len()];
        for (i, &p) in perm.iter().enumerate() {
            w[p] = self.0[i];
        }
        ProbabilityWeights(w)
    }
}

/// A finite metric space with a full-support probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMMSpace {
    pub space: FiniteMetricSpace,
    pub mu: ProbabilityWeights,
}

impl FiniteMMSpace {
    pub fn new(space: FiniteMetricSpace, mu: ProbabilityWeights) -> Result<Self> {
        if mu.len() != space.len() {
            return Err(Error::WeightLength {
                expected: space.len(),
                got: mu.len(),
            });
        }
        if let Some(i) = (0..mu.len()).find(|&i| mu.get(i) <= 0.0) {
            return Err(Error::NotFullSupport(i));
        }
        Ok(FiniteMMSpace { space, mu })
    }

    pub fn uniform(space: FiniteMetricSpace) -> Result<Self> {
        let mu = ProbabilityWeights::uniform(space.len())?;
        Self::new(space, mu)
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(self.space.permuted(perm)?, self.mu.permuted(perm))
    }
}

/// A metric space with a distinguished base point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointedMetricSpace {
    pub space: FiniteMetricSpace,
    basepoint: usize,
}

impl PointedMetricSpace {
    pub fn new(space: FiniteMetricSpace, basepoint: usize) -> Result<Self> {
        space.check_index(basepoint)?;
        Ok(PointedMetricSpace { space, basepoint })
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// Closed ball `B_r(o)` around the base point (to `tol`).
    pub fn ball(&self, r: f64, tol: f64) -> Vec<usize> {
        let o = self.basepoint;
        (0..self.space.len())
            .filter(|&y| self.space.d(o, y) <= r + tol)
            .collect()
    }
}

/// Open neighbourhood `U_eps(A) = { y : d(y, A) < eps }`.
///
/// The inequality is strict: points at distance within `tol` of `eps` count
/// as ties and are excluded. The neighbourhood of the empty set is empty.
pub fn neighborhood(space: &FiniteMetricSpace, a: &[usize], eps: f64, tol: f64) -> Vec<usize> {
    (0..space.len())
        .filter(|&y| a.iter().any(|&z| space.d(y, z) < eps - tol))
        .collect()
}

/// Largest pairwise distance within `a`; 0 for empty sets and singletons.
pub fn subset_diameter(space: &FiniteMetricSpace, a: &[usize]) -> f64 {
    let mut m: f64 = 0.0;
    for (k, &i) in a.iter().enumerate() {
        for &j in &a[k + 1..] {
            m = m.max(space.d(i, j));
        }
    }
    m
}

/// Push-forward of `mu` along `assignment` onto a target with `target_len`
/// points. Source weights are accumulated in source index order.
pub fn pushforward(
    assignment: &[usize],
    mu: &ProbabilityWeights,
    target_len: usize,
) -> Result<ProbabilityWeights> {
    if assignment.len() != mu.len() {
        return Err(Error::WeightLength {
            expected: assignment.len(),
            got: mu.len(),
        });
    }
    let mut w = alloc::vec![0.0; target_len];
    for (x, &y) in assignment.iter().enumerate() {
        if y >= target_len {
            return Err(Error::IndexOutOfRange {
                index: y,
                len: target_len,
            });
        }
        w[y] += mu.get(x);
    }
    ProbabilityWeights::new(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn grid(m: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(m, "g", |i, j| (i as f64 - j as f64).abs() / (m - 1) as f64)
            .unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(
            validate(2, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            Validation::Pass
        );
        assert_eq!(
            validate(2, &[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap(),
            Validation::Fail(Violation::Asymmetry { i: 0, j: 1 })
        );
        let v = validate(
            3,
            &[
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 1.0],
                vec![3.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        assert_eq!(v, Validation::Fail(Violation::Triangle { i: 0, j: 1, k: 2 }));
    }

    #[test]
    fn validate_errors() {
        assert!(matches!(
            validate(3, &[vec![0.0, 1.0], vec![1.0, 0.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            validate(2, &[vec![0.0, f64::NAN], vec![1.0, 0.0]]),
            Err(Error::InvalidEntry { i: 0, j: 1, .. })
        ));
        assert!(matches!(
            validate(2, &[vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(Error::InvalidEntry { .. })
        ));
        assert_eq!(
            validate(2, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap(),
            Validation::Fail(Violation::NonPositive { i: 0, j: 1 })
        );
        assert!(FiniteMetricSpace::new(labels(2), vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let g = grid(3);
        assert_eq!(neighborhood(&g, &[0], 0.6, 1e-9), vec![0, 1]);
        assert!(neighborhood(&g, &[0, 2], 0.0, 1e-9).is_empty());
        assert_eq!(neighborhood(&g, &[0, 1, 2], 0.1, 1e-9), vec![0, 1, 2]);
        assert!(neighborhood(&g, &[], 5.0, 1e-9).is_empty());
        // tie at exactly eps is excluded
        assert_eq!(neighborhood(&g, &[0], 0.5, 1e-9), vec![0]);
    }

    #[test]
    fn diameter_examples() {
        let g = grid(5);
        assert_eq!(subset_diameter(&g, &[3]), 0.0);
        assert_eq!(subset_diameter(&g, &[]), 0.0);
        assert_eq!(subset_diameter(&g, &[0, 1, 2, 3, 4]), 1.0);
        assert_eq!(subset_diameter(&grid(2), &[0, 1]), 1.0);
    }

    #[test]
    fn pushforward_examples() {
        let mu = ProbabilityWeights::uniform(2).unwrap();
        assert_eq!(pushforward(&[0, 1], &mu, 2).unwrap(), mu);
        assert_eq!(
            pushforward(&[1, 1], &mu, 3).unwrap().as_slice(),
            &[0.0, 1.0, 0.0]
        );
        assert_eq!(
            pushforward(&[2, 0], &mu, 3).unwrap().as_slice(),
            &[0.5, 0.0, 0.5]
        );
        assert!(pushforward(&[0, 3], &mu, 3).is_err());
    }

    #[test]
    fn full_support_enforced() {
        let g = grid(2);
        let w = ProbabilityWeights::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(FiniteMMSpace::new(g, w), Err(Error::NotFullSupport(1)));
        assert!(ProbabilityWeights::new(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn permutation_is_isometric() {
        let g = grid(4);
        let p = g.permuted(&[2, 0, 3, 1]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.d(i, j), p.d([2, 0, 3, 1][i], [2, 0, 3, 1][j]));
            }
        }
    }
}
