//! Box distance `inf_xi inf_S max(1 - xi(S), dis(S))`.
//!
//! For a fixed distortion threshold `t`, the admissible `S` are the cliques of
//! the graph joining cells `(x, y)` whose pairwise discrepancy is `<= t`, and
//! the best coupling mass on `S` is a max-flow (any sub-coupling extends to a
//! full coupling). Flow is monotone in `S`, so maximal cliques suffice.

use alloc::vec::Vec;

use super::{Coupling, CorrespondenceSet};
use crate::bitset::BitSet;
use crate::flow::{bipartite_max_flow, bipartite_plan};
use crate::space::FiniteMMSpace;
use crate::{Error, Result};

/// Largest `|X| |Y|` accepted by the exact mode.
pub const BOX_EXACT_MAX_CELLS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxResult {
    pub value: f64,
    /// Distortion threshold of the optimal cell set.
    pub threshold: f64,
    pub set: CorrespondenceSet,
    pub coupling: Coupling,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxBounds {
    pub lower: f64,
    pub upper: f64,
}

struct Cells<'a> {
    x: &'a FiniteMMSpace,
    y: &'a FiniteMMSpace,
    ny: usize,
    k: usize,
}

impl<'a> Cells<'a> {
    fn new(x: &'a FiniteMMSpace, y: &'a FiniteMMSpace) -> Self {
        Cells {
            x,
            y,
            ny: y.len(),
            k: x.len() * y.len(),
        }
    }

    fn cell(&self, u: usize) -> (usize, usize) {
        (u / self.ny, u % self.ny)
    }

    fn disc(&self, u: usize, v: usize) -> f64 {
        let ((a, b), (c, e)) = (self.cell(u), self.cell(v));
        libm::fabs(self.x.space.d(a, c) - self.y.space.d(b, e))
    }

    fn thresholds(&self) -> Vec<f64> {
        let mut t = alloc::vec![0.0];
        for u in 0..self.k {
            for v in u + 1..self.k {
                t.push(self.disc(u, v));
            }
        }
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    fn graph(&self, t: f64) -> Vec<BitSet> {
        let mut adj = alloc::vec![BitSet::new(self.k); self.k];
        for u in 0..self.k {
            for v in u + 1..self.k {
                if self.disc(u, v) <= t {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
        }
        adj
    }

    fn flow(&self, set: &BitSet) -> f64 {
        bipartite_max_flow(
            self.x.mu.as_slice(),
            self.y.mu.as_slice(),
            set.iter().map(|u| self.cell(u)),
        )
    }
}

/// Bron-Kerbosch with pivoting, tracking the heaviest-flow maximal clique
/// and skipping branches whose whole candidate set cannot beat it.
struct CliqueFlow<'c, 'a> {
    cells: &'c Cells<'a>,
    adj: Vec<BitSet>,
    best: f64,
    best_set: BitSet,
}

impl CliqueFlow<'_, '_> {
    fn run(&mut self, r: BitSet, mut p: BitSet, mut x: BitSet) {
        if p.is_empty() {
            if x.is_empty() {
                let f = self.cells.flow(&r);
                if f > self.best {
                    self.best = f;
                    self.best_set = r;
                }
            }
            return;
        }
        let mut reach = r.clone();
        reach.union_with(&p);
        if self.cells.flow(&reach) <= self.best {
            return;
        }
        let mut pu = p.clone();
        pu.union_with(&x);
        let pivot = pu
            .iter()
            .max_by_key(|&u| self.adj[u].intersection(&p).count())
            .expect("non-empty");
        let mut todo = p.clone();
        todo.difference_with(&self.adj[pivot]);
        for v in todo.iter() {
            let mut r2 = r.clone();
            r2.insert(v);
            self.run(r2, p.intersection(&self.adj[v]), x.intersection(&self.adj[v]));
            p.remove(v);
            x.insert(v);
        }
    }
}

/// Exact box distance. Refuses `|X| |Y| > ` [`BOX_EXACT_MAX_CELLS`].
pub fn box_distance(x: &FiniteMMSpace, y: &FiniteMMSpace) -> Result<BoxResult> {
    let cells = Cells::new(x, y);
    if cells.k > BOX_EXACT_MAX_CELLS {
        return Err(Error::TooLarge {
            what: "exact box distance",
            size: cells.k,
            limit: BOX_EXACT_MAX_CELLS,
        });
    }
    let mut best: Option<(f64, f64, BitSet)> = None;
    for t in cells.thresholds() {
        if best.as_ref().is_some_and(|b| t >= b.0) {
            break;
        }
        let mut cf = CliqueFlow {
            cells: &cells,
            adj: cells.graph(t),
            best: 0.0,
            best_set: BitSet::new(cells.k),
        };
        cf.run(BitSet::new(cells.k), BitSet::full(cells.k), BitSet::new(cells.k));
        let v = t.max(1.0 - cf.best);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, t, cf.best_set));
        }
    }
    let (value, threshold, set) = best.expect("threshold 0 is always tried");
    let pairs: Vec<(usize, usize)> = set.iter().map(|u| cells.cell(u)).collect();
    let (_, plan) = bipartite_plan(x.mu.as_slice(), y.mu.as_slice(), pairs.iter().copied());
    Ok(BoxResult {
        value: value.max(0.0),
        threshold,
        set: CorrespondenceSet::new(x.len(), y.len(), pairs)?,
        coupling: Coupling::complete(plan, &x.mu, &y.mu)?,
    })
}

/// Lower and upper bounds on the box distance for any size.
///
/// For each threshold, the clique flow is at most the flow on the closed
/// neighbourhood of its best vertex (lower bound), and at least the flow on a
/// greedily grown clique (upper bound).
pub fn box_distance_bounds(x: &FiniteMMSpace, y: &FiniteMMSpace) -> BoxBounds {
    let cells = Cells::new(x, y);
    let mut order: Vec<usize> = (0..cells.k).collect();
    let mass = |u: usize| {
        let (a, b) = cells.cell(u);
        x.mu.get(a) * y.mu.get(b)
    };
    order.sort_by(|&u, &v| mass(v).total_cmp(&mass(u)).then(u.cmp(&v)));
    let (mut lower, mut upper) = (f64::INFINITY, f64::INFINITY);
    for t in cells.thresholds() {
        if t >= lower && t >= upper {
            break;
        }
        let adj = cells.graph(t);
        let mut relax: f64 = 0.0;
        for u in 0..cells.k {
            let mut nb = adj[u].clone();
            nb.insert(u);
            relax = relax.max(cells.flow(&nb));
        }
        lower = lower.min(t.max(1.0 - relax));
        let mut clique = BitSet::new(cells.k);
        for &u in &order {
            if clique.iter().all(|v| adj[u].contains(v)) {
                clique.insert(u);
            }
        }
        upper = upper.min(t.max(1.0 - cells.flow(&clique)));
    }
    BoxBounds {
        lower: lower.max(0.0),
        upper: upper.max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid_interval, perturbed, random};
    use crate::space::FiniteMetricSpace;

    #[test]
    fn box_to_itself_is_zero() {
        let x = random(4, 3, true).unwrap();
        let r = box_distance(&x, &x).unwrap();
        assert_eq!(r.value, 0.0);
        let b = box_distance_bounds(&x, &x);
        assert_eq!(b.upper, 0.0);
    }

    #[test]
    fn two_points_against_one() {
        let x = grid_interval(2).unwrap();
        let y = FiniteMMSpace::uniform(FiniteMetricSpace::from_fn(1, "p", |_, _| 0.0).unwrap())
            .unwrap();
        let r = box_distance(&x, &y).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        let b = box_distance_bounds(&x, &y);
        assert!(b.lower <= r.value + 1e-12 && r.value <= b.upper + 1e-12);
    }

    #[test]
    fn perturbed_copy_is_close() {
        let x = random(4, 11, false).unwrap();
        let y = FiniteMMSpace::new(perturbed(&x.space, 0.01, 5).unwrap(), x.mu.clone()).unwrap();
        assert!(box_distance(&x, &y).unwrap().value <= 0.03 + 1e-12);
    }

    #[test]
    fn refuses_large_instances() {
        let x = grid_interval(5).unwrap();
        assert!(matches!(box_distance(&x, &x), Err(Error::TooLarge { .. })));
    }
}
