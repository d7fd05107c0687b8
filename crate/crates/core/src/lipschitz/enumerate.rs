use alloc::vec::Vec;

use super::search::{Flow, MapConstraints, Searcher, Visitor};
use super::PointMap;
use crate::metrics::ky_fan;
use crate::space::{FiniteMMSpace, FiniteMetricSpace, ProbabilityWeights};
use crate::{Error, Result, DEFAULT_MAX_NODES, DEFAULT_TOL};

/// Which relaxation of the 1-Lipschitz condition a family uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FamilyKind {
    /// `d_Y(f(x), f(z)) <= d_X(x, z) + delta` for all pairs (`delta = 0` gives
    /// the 1-Lipschitz maps).
    Lipschitz,
    /// The same bound on a set of mass `>= 1 - delta`.
    AlmostLipschitz,
}

/// Restricts images to the open ball `d_Y(basepoint, f(x)) < radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RangeLimit {
    pub basepoint: usize,
    pub radius: f64,
}

/// Comparison tolerance and node budget for backtracking searches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub tol: f64,
    pub max_nodes: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: DEFAULT_TOL,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// A set of maps sharing source and target, kept sorted and deduplicated by
/// assignment vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFamily<'a> {
    source: &'a FiniteMetricSpace,
    target: &'a FiniteMetricSpace,
    maps: Vec<Vec<usize>>,
}

impl<'a> MapFamily<'a> {
    pub fn from_assignments(
        source: &'a FiniteMetricSpace,
        target: &'a FiniteMetricSpace,
        mut maps: Vec<Vec<usize>>,
    ) -> Result<Self> {
        for m in &maps {
            PointMap::new(source, target, m.clone())?;
        }
        maps.sort_unstable();
        maps.dedup();
        Ok(MapFamily {
            source,
            target,
            maps,
        })
    }

    pub fn source(&self) -> &'a FiniteMetricSpace {
        self.source
    }

    pub fn target(&self) -> &'a FiniteMetricSpace {
        self.target
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn contains(&self, assignment: &[usize]) -> bool {
        self.maps
            .binary_search_by(|m| m.as_slice().cmp(assignment))
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = PointMap<'a>> + '_ {
        self.maps.iter().map(|m| PointMap {
            source: self.source,
            target: self.target,
            assignment: m.clone(),
        })
    }
}

struct Collect(Vec<Vec<usize>>);

impl Visitor for Collect {
    fn leaf(&mut self, assignment: &[usize]) -> Flow {
        self.0.push(assignment.to_vec());
        Flow::Continue
    }
}

/// All maps of the given family, optionally range-restricted.
///
/// Backtracks over source points in decreasing eccentricity order and prunes
/// partial assignments that already violate the family's condition. Fails
/// with [`Error::BudgetExceeded`] after `opts.max_nodes` search nodes.
pub fn enumerate_family<'a>(
    source: &'a FiniteMMSpace,
    target: &'a FiniteMetricSpace,
    delta: f64,
    kind: FamilyKind,
    range: Option<RangeLimit>,
    opts: SearchOptions,
) -> Result<MapFamily<'a>> {
    let c = MapConstraints::new(
        &source.space,
        target,
        source.mu.as_slice(),
        delta,
        kind,
        range,
        opts.tol,
    )?;
    let mut s = Searcher::new(&c, c.eccentricity_order(), opts.max_nodes);
    let mut out = Collect(Vec::new());
    s.run(&mut out)?;
    MapFamily::from_assignments(&source.space, target, out.0)
}

/// The same family by filtering all `|Y|^|X|` assignments one by one. Fails
/// when that count exceeds `opts.max_nodes`.
pub fn enumerate_family_unpruned<'a>(
    source: &'a FiniteMMSpace,
    target: &'a FiniteMetricSpace,
    delta: f64,
    kind: FamilyKind,
    range: Option<RangeLimit>,
    opts: SearchOptions,
) -> Result<MapFamily<'a>> {
    let c = MapConstraints::new(
        &source.space,
        target,
        source.mu.as_slice(),
        delta,
        kind,
        range,
        opts.tol,
    )?;
    let mut out = Vec::new();
    for_each_assignment(source.len(), target.len(), opts.max_nodes, |a| {
        if c.admits(a) {
            out.push(a.to_vec());
        }
    })?;
    MapFamily::from_assignments(&source.space, target, out)
}

/// Calls `f` on every vector in `{0..m}^n` in lexicographic order.
pub(crate) fn for_each_assignment(
    n: usize,
    m: usize,
    max: u64,
    mut f: impl FnMut(&[usize]),
) -> Result<()> {
    let total = (m as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if total > max {
        return Err(Error::BudgetExceeded(max));
    }
    if m == 0 && n > 0 {
        return Ok(());
    }
    let mut a = alloc::vec![0usize; n];
    loop {
        f(&a);
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            a[k] += 1;
            if a[k] < m {
                break;
            }
            a[k] = 0;
        }
    }
}

/// Hausdorff distance between two families under the Ky Fan metric of `mu`.
pub fn hausdorff_kyfan_families(
    f: &MapFamily<'_>,
    g: &MapFamily<'_>,
    mu: &ProbabilityWeights,
) -> Result<f64> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::Empty("map family"));
    }
    if f.source != g.source || f.target != g.target {
        return Err(Error::SpaceMismatch(f.source.len(), g.source.len()));
    }
    let target = f.target;
    let directed = |a: &MapFamily<'_>, b: &MapFamily<'_>| -> Result<f64> {
        let mut sup: f64 = 0.0;
        for p in &a.maps {
            let mut inf = f64::INFINITY;
            for q in &b.maps {
                inf = inf.min(ky_fan(target, mu, p, q)?);
                if inf <= sup {
                    break;
                }
            }
            sup = sup.max(inf);
        }
        Ok(sup)
    };
    Ok(directed(f, g)?.max(directed(g, f)?))
}
