//! Minimum-mass vertex cover by branch and bound.
//!
//! Deciding whether a map is 1-Lipschitz up to `delta` off an exceptional set
//! of mass `<= delta` amounts to covering every conflicting pair (pairs whose
//! defect exceeds `delta`) with a vertex set of mass `<= delta`.

use alloc::vec::Vec;

use crate::bitset::BitSet;

/// Largest conflict graph handled exactly.
pub const EXACT_COVER_MAX_POINTS: usize = 25;

/// Undirected conflict graph as adjacency bit sets.
#[derive(Clone, Debug)]
pub(crate) struct ConflictGraph {
    pub(crate) adj: Vec<BitSet>,
}

impl ConflictGraph {
    pub(crate) fn build(n: usize, mut conflict: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = alloc::vec![BitSet::new(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if conflict(i, j) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        ConflictGraph { adj }
    }

    pub(crate) fn has_edges(&self) -> bool {
        self.adj.iter().any(|a| !a.is_empty())
    }

    /// Minimum-mass vertex cover with mass `<= budget`, or `None`.
    /// Ties between covers of equal mass go to the first found (highest
    /// degree first, smaller index on equal degree, "take the vertex" branch
    /// before "take its neighbours").
    pub(crate) fn min_cover(&self, w: &[f64], budget: f64) -> Option<(f64, BitSet)> {
        let n = self.adj.len();
        let mut s = CoverSearch {
            adj: &self.adj,
            w,
            limit: budget,
            best: None,
        };
        s.go(BitSet::full(n), BitSet::new(n), 0.0);
        s.best
    }
}

struct CoverSearch<'a> {
    adj: &'a [BitSet],
    w: &'a [f64],
    limit: f64,
    best: Option<(f64, BitSet)>,
}

impl CoverSearch<'_> {
    fn admissible(&self, cost: f64) -> bool {
        match self.best {
            None => cost <= self.limit,
            Some((b, _)) => cost < b,
        }
    }

    /// Disjoint-edge lower bound on the mass still needed.
    fn matching_bound(&self, alive: &BitSet) -> f64 {
        let mut free = alive.clone();
        let mut lb = 0.0;
        for u in alive.iter() {
            if !free.contains(u) {
                continue;
            }
            if let Some(v) = self.adj[u].intersection(&free).first() {
                free.remove(u);
                free.remove(v);
                lb += self.w[u].min(self.w[v]);
            }
        }
        lb
    }

    fn go(&mut self, alive: BitSet, cover: BitSet, cost: f64) {
        if !self.admissible(cost) {
            return;
        }
        let mut pick = None;
        let mut max_deg = 0;
        for v in alive.iter() {
            let deg = self.adj[v].intersection(&alive).count();
            if deg > max_deg {
                max_deg = deg;
                pick = Some(v);
            }
        }
        let Some(v) = pick else {
            self.best = Some((cost, cover));
            return;
        };
        if !self.admissible(cost + self.matching_bound(&alive)) {
            return;
        }
        let mut a1 = alive.clone();
        a1.remove(v);
        let mut c1 = cover.clone();
        c1.insert(v);
        self.go(a1, c1, cost + self.w[v]);

        let nbrs = self.adj[v].intersection(&alive);
        let extra: f64 = nbrs.iter().map(|u| self.w[u]).sum();
        let mut a2 = alive;
        a2.difference_with(&nbrs);
        a2.remove(v);
        let mut c2 = cover;
        c2.union_with(&nbrs);
        self.go(a2, c2, cost + extra);
    }
}
