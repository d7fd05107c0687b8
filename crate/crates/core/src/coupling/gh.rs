use alloc::vec::Vec;

use super::{distortion, CorrespondenceSet, SearchOutcome};
use crate::bitset::BitSet;
use crate::lipschitz::{for_each_assignment, PointMap};
use crate::space::{FiniteMetricSpace, PointedMetricSpace};
use crate::{Error, Result};

/// Largest `|X| |Y|` accepted by [`gh_distance`].
pub const GH_EXACT_MAX_CELLS: usize = 20;

/// Largest `|X|` and `|Y|` accepted by [`gh_distance_oracle`].
pub const GH_ORACLE_MAX_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GhResult {
    pub value: f64,
    /// A correspondence of distortion `2 * value`.
    pub correspondence: CorrespondenceSet,
}

/// Gromov-Hausdorff distance as half the least distortion of a
/// correspondence. Binary search over the candidate distortions, each decided
/// by a covering search over mutually compatible cells.
pub fn gh_distance(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<GhResult> {
    let (nx, ny) = (x.len(), y.len());
    let k = nx * ny;
    if k > GH_EXACT_MAX_CELLS {
        return Err(Error::TooLarge {
            what: "exact Gromov-Hausdorff distance",
            size: k,
            limit: GH_EXACT_MAX_CELLS,
        });
    }
    let cell = |u: usize| (u / ny, u % ny);
    let disc = |u: usize, v: usize| {
        let ((a, b), (c, e)) = (cell(u), cell(v));
        libm::fabs(x.d(a, c) - y.d(b, e))
    };
    let mut crit = alloc::vec![0.0];
    for u in 0..k {
        for v in u + 1..k {
            crit.push(disc(u, v));
        }
    }
    crit.sort_by(f64::total_cmp);
    crit.dedup();

    let feasible = |t: f64| -> Option<BitSet> {
        let mut adj = alloc::vec![BitSet::new(k); k];
        for u in 0..k {
            for v in u + 1..k {
                if disc(u, v) <= t {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
        }
        let mut s = Cover {
            nx,
            ny,
            adj,
            chosen: BitSet::new(k),
        };
        if s.go(BitSet::full(k)) {
            Some(s.chosen)
        } else {
            None
        }
    };

    // the full product is always a correspondence with the largest distortion
    let (mut lo, mut hi) = (0usize, crit.len() - 1);
    let mut best = feasible(crit[hi]).expect("full product is feasible");
    if let Some(s) = feasible(crit[0]) {
        hi = 0;
        best = s;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match feasible(crit[mid]) {
            Some(s) => {
                hi = mid;
                best = s;
            }
            None => lo = mid,
        }
    }
    let pairs: Vec<(usize, usize)> = best.iter().map(cell).collect();
    let correspondence = CorrespondenceSet::new(nx, ny, pairs)?;
    Ok(GhResult {
        value: distortion(&correspondence, x, y) / 2.0,
        correspondence,
    })
}

struct Cover {
    nx: usize,
    ny: usize,
    adj: Vec<BitSet>,
    chosen: BitSet,
}

impl Cover {
    /// `cand`: cells compatible with every chosen cell.
    fn go(&mut self, cand: BitSet) -> bool {
        let mut rows = alloc::vec![false; self.nx];
        let mut cols = alloc::vec![false; self.ny];
        for u in self.chosen.iter() {
            rows[u / self.ny] = true;
            cols[u % self.ny] = true;
        }
        // the uncovered row or column with the fewest candidate cells
        let mut pick: Option<(usize, Vec<usize>)> = None;
        for (i, _) in rows.iter().enumerate().filter(|r| !*r.1) {
            let opts: Vec<usize> = (0..self.ny)
                .map(|j| i * self.ny + j)
                .filter(|&u| cand.contains(u))
                .collect();
            if pick.as_ref().is_none_or(|p| opts.len() < p.0) {
                pick = Some((opts.len(), opts));
            }
        }
        for (j, _) in cols.iter().enumerate().filter(|c| !*c.1) {
            let opts: Vec<usize> = (0..self.nx)
                .map(|i| i * self.ny + j)
                .filter(|&u| cand.contains(u))
                .collect();
            if pick.as_ref().is_none_or(|p| opts.len() < p.0) {
                pick = Some((opts.len(), opts));
            }
        }
        let Some((_, opts)) = pick else {
            return true;
        };
        for u in opts {
            self.chosen.insert(u);
            if self.go(cand.intersection(&self.adj[u])) {
                return true;
            }
            self.chosen.remove(u);
        }
        false
    }
}

/// Gromov-Hausdorff distance from the embedding definition.
///
/// Every correspondence contains one of the form `graph(p) u graph(q)^T`
/// with `p: X -> Y`, `q: Y -> X`. For each such relation `R` and radius `r`,
/// joining related points by edges of length `r` and taking shortest paths
/// on `X u Y` gives a metric extending `d_X` and `d_Y` exactly when `r` is
/// large enough; the least such `r` is found by bisection (Floyd-Warshall
/// check), and the Hausdorff distance of the two copies in that metric is
/// recorded. The minimum over relations is returned.
pub fn gh_distance_oracle(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    let (nx, ny) = (x.len(), y.len());
    if nx > GH_ORACLE_MAX_POINTS || ny > GH_ORACLE_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "Gromov-Hausdorff oracle",
            size: nx.max(ny),
            limit: GH_ORACLE_MAX_POINTS,
        });
    }
    let n = nx + ny;
    let scale = x.diameter().max(y.diameter()).max(1.0);
    let embed = |rel: &[(usize, usize)], r: f64| -> Vec<Vec<f64>> {
        let mut d = alloc::vec![alloc::vec![f64::INFINITY; n]; n];
        for a in 0..nx {
            for b in 0..nx {
                d[a][b] = x.d(a, b);
            }
        }
        for a in 0..ny {
            for b in 0..ny {
                d[nx + a][nx + b] = y.d(a, b);
            }
        }
        for &(a, b) in rel {
            d[a][nx + b] = d[a][nx + b].min(r);
            d[nx + b][a] = d[nx + b][a].min(r);
        }
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let via = d[a][m] + d[m][b];
                    if via < d[a][b] {
                        d[a][b] = via;
                    }
                }
            }
        }
        d
    };
    let extends = |d: &[Vec<f64>]| -> bool {
        (0..nx).all(|a| (0..nx).all(|b| d[a][b] >= x.d(a, b) - 1e-12))
            && (0..ny).all(|a| (0..ny).all(|b| d[nx + a][nx + b] >= y.d(a, b) - 1e-12))
    };
    let mut best = f64::INFINITY;
    let mut rel: Vec<(usize, usize)> = Vec::with_capacity(n);
    for_each_assignment(nx, ny, u64::MAX, |p| {
        for_each_assignment(ny, nx, u64::MAX, |q| {
            rel.clear();
            rel.extend(p.iter().copied().enumerate());
            rel.extend(q.iter().enumerate().map(|(b, &a)| (a, b)));
            let (mut lo, mut hi) = (0.0, scale);
            if extends(&embed(&rel, lo)) {
                hi = lo;
            } else {
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if extends(&embed(&rel, mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
            }
            let d = embed(&rel, hi);
            let directed = |from: core::ops::Range<usize>, to: core::ops::Range<usize>| {
                from.map(|a| to.clone().map(|b| d[a][b]).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max)
            };
            let h = directed(0..nx, nx..n).max(directed(nx..n, 0..nx));
            best = best.min(h);
        })
        .expect("unbounded");
    })
    .expect("unbounded");
    Ok(best)
}

/// Outcome of an epsilon-approximation (or pointed GH) check. Strict
/// inequalities `a < eps` are evaluated as `a < eps - shift`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ApproxReport {
    pub epsilon: f64,
    pub shift: f64,
    pub distortion: f64,
    pub distortion_ok: bool,
    /// First target point outside `U_eps` of the image, if any.
    pub uncovered: Option<usize>,
}

impl ApproxReport {
    pub fn covering_ok(&self) -> bool {
        self.uncovered.is_none()
    }

    pub fn pass(&self) -> bool {
        self.distortion_ok && self.covering_ok()
    }
}

/// Checks distortion `< eps` and `U_eps(f(Y)) = Z`.
pub fn approx_map_check(f: &PointMap<'_>, epsilon: f64, tol: f64) -> ApproxReport {
    let all: Vec<usize> = (0..f.source().len()).collect();
    let distortion = f.distortion_on(&all);
    let image = f.image();
    let z = f.target();
    let uncovered = (0..z.len()).find(|&p| !image.iter().any(|&q| z.d(p, q) < epsilon - tol));
    ApproxReport {
        epsilon,
        shift: tol,
        distortion,
        distortion_ok: distortion < epsilon - tol,
        uncovered,
    }
}

/// Searches all maps `Y -> Z` for an `epsilon`-approximation map; more than
/// `max_maps` candidates gives [`SearchOutcome::Indeterminate`].
pub fn approx_map_search(
    y: &FiniteMetricSpace,
    z: &FiniteMetricSpace,
    epsilon: f64,
    tol: f64,
    max_maps: u64,
) -> SearchOutcome<Vec<usize>> {
    let mut found = None;
    let res = for_each_assignment(y.len(), z.len(), max_maps, |a| {
        if found.is_some() {
            return;
        }
        let f = PointMap {
            source: y,
            target: z,
            assignment: a.to_vec(),
        };
        if approx_map_check(&f, epsilon, tol).pass() {
            found = Some(a.to_vec());
        }
    });
    match (res, found) {
        (Err(_), _) => SearchOutcome::Indeterminate,
        (Ok(()), Some(a)) => SearchOutcome::Found(a),
        (Ok(()), None) => SearchOutcome::NotFound,
    }
}

/// Outcome of the pointed GH conditions for one map.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PghReport {
    pub radius: f64,
    pub epsilon: f64,
    pub shift: f64,
    pub distortion: f64,
    pub distortion_ok: bool,
    /// First point of `B_{R - eps}(o_n)` outside `U_eps` of the image.
    pub uncovered: Option<usize>,
}

impl PghReport {
    pub fn pass(&self) -> bool {
        self.distortion_ok && self.uncovered.is_none()
    }
}

/// Checks the pointed GH conditions for `f: B_R(o) -> Y_n`, given as an
/// optional image per point of the domain space: distortion `< eps` on the
/// ball and `U_eps(f(B_R(o))) >= B_{R - eps}(o_n)`. Fails with an error when
/// `f` is undefined somewhere on the ball.
pub fn pgh_check(
    f: &[Option<usize>],
    domain: &PointedMetricSpace,
    target: &PointedMetricSpace,
    radius: f64,
    epsilon: f64,
    tol: f64,
) -> Result<PghReport> {
    if f.len() != domain.space.len() {
        return Err(Error::SpaceMismatch(domain.space.len(), f.len()));
    }
    let ball = domain.ball(radius, tol);
    let mut image = Vec::with_capacity(ball.len());
    for &b in &ball {
        match f[b] {
            Some(v) => {
                target.space.check_index(v)?;
                image.push(v);
            }
            None => {
                return Err(Error::InvalidParameter {
                    name: "map",
                    reason: "not defined on the whole ball",
                })
            }
        }
    }
    let mut dist: f64 = 0.0;
    for (k, &a) in ball.iter().enumerate() {
        for (l, &b) in ball.iter().enumerate().skip(k + 1) {
            dist = dist.max(libm::fabs(
                domain.space.d(a, b) - target.space.d(image[k], image[l]),
            ));
        }
    }
    let uncovered = target
        .ball(radius - epsilon, tol)
        .into_iter()
        .find(|&z| !image.iter().any(|&q| target.space.d(z, q) < epsilon - tol));
    Ok(PghReport {
        radius,
        epsilon,
        shift: tol,
        distortion: dist,
        distortion_ok: dist < epsilon - tol,
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid_interval, line_grid};

    fn pts(d: &[f64]) -> FiniteMetricSpace {
        // three points given by the distances (01, 02, 12)
        FiniteMetricSpace::from_fn(3, "p", |i, j| match (i.min(j), i.max(j)) {
            (0, 1) => d[0],
            (0, 2) => d[1],
            _ => d[2],
        })
        .unwrap()
    }

    #[test]
    fn gh_examples() {
        let a = pts(&[1.0, 1.5, 2.0]);
        assert_eq!(gh_distance(&a, &a).unwrap().value, 0.0);
        let one = FiniteMetricSpace::from_fn(1, "o", |_, _| 0.0).unwrap();
        let two = FiniteMetricSpace::from_fn(2, "t", |_, _| 1.0).unwrap();
        assert_eq!(gh_distance(&one, &two).unwrap().value, 0.5);
        assert!((gh_distance_oracle(&one, &two).unwrap() - 0.5).abs() < 1e-9);
        let b = pts(&[1.0, 1.5, 2.1]);
        assert!((gh_distance(&a, &b).unwrap().value - 0.05).abs() < 1e-12);
        assert!((gh_distance_oracle(&a, &b).unwrap() - 0.05).abs() < 1e-9);
    }

    #[test]
    fn gh_result_is_a_correspondence() {
        let a = pts(&[1.0, 2.0, 2.5]);
        let b = FiniteMetricSpace::from_fn(2, "t", |_, _| 1.2).unwrap();
        let r = gh_distance(&a, &b).unwrap();
        assert!(r.correspondence.is_correspondence(3, 2));
        assert!((gh_distance_oracle(&a, &b).unwrap() - r.value).abs() < 1e-9);
    }

    #[test]
    fn approx_examples() {
        let g = grid_interval(4).unwrap();
        let id = PointMap::new(&g.space, &g.space, alloc::vec![0, 1, 2, 3]).unwrap();
        assert!(approx_map_check(&id, 0.01, 1e-9).pass());
        let two = FiniteMetricSpace::from_fn(2, "t", |_, _| 1.0).unwrap();
        let c = PointMap::constant(&two, &two, 0).unwrap();
        let r = approx_map_check(&c, 0.5, 1e-9);
        assert!(!r.pass());
        assert_eq!(r.uncovered, Some(1));
        let fine = grid_interval(11).unwrap();
        let coarse = grid_interval(6).unwrap();
        let half = PointMap::new(&fine.space, &coarse.space, (0..11).map(|i| i / 2).collect()).unwrap();
        assert!(approx_map_check(&half, 0.15, 1e-9).pass());
    }

    #[test]
    fn pgh_identity_and_failures() {
        let line = line_grid(2.0, 0.5).unwrap();
        let id: Vec<Option<usize>> = (0..line.space.len()).map(Some).collect();
        assert!(pgh_check(&id, &line, &line, 1.0, 0.1, 1e-9).unwrap().pass());
        // only [-0.5, 0.5] is mapped: the target ball of radius 1.9 is not covered
        let small = line_grid(0.5, 0.5).unwrap();
        let emb: Vec<Option<usize>> = (0..3).map(|i| Some(i + 3)).collect();
        let r = pgh_check(&emb, &small, &line, 2.0, 0.1, 1e-9).unwrap();
        assert!(r.distortion_ok && r.uncovered.is_some());
        let partial: Vec<Option<usize>> = (0..line.space.len()).map(|i| (i != 4).then_some(i)).collect();
        assert!(pgh_check(&partial, &line, &line, 1.0, 0.1, 1e-9).is_err());
    }
}
