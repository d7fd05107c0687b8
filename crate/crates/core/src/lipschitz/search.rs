//! Backtracking over assignments `X -> Y` with forward checking.
//!
//! Pairs whose defect bound can never be waived ("hard" pairs) shrink the
//! domains of unassigned points as soon as one end is placed. For the
//! almost-Lipschitz family only pairs of atoms heavier than `delta` are hard;
//! every other violation goes into a partial conflict graph whose
//! minimum-mass cover must stay within `delta`.

use alloc::vec::Vec;

use super::cover::ConflictGraph;
use super::{FamilyKind, RangeLimit};
use crate::bitset::BitSet;
use crate::space::FiniteMetricSpace;
use crate::{Error, Result};

pub(crate) const UNASSIGNED: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Prune,
    Stop,
}

pub(crate) struct State<'s> {
    pub(crate) assignment: &'s [usize],
    pub(crate) domains: &'s [BitSet],
    pub(crate) depth: usize,
    pub(crate) order: &'s [usize],
}

pub(crate) trait Visitor {
    /// Called on every interior node; may prune or stop the whole search.
    fn enter(&mut self, _state: &State<'_>) -> Flow {
        Flow::Continue
    }
    /// Called on every complete assignment that satisfies the constraints.
    fn leaf(&mut self, assignment: &[usize]) -> Flow;
    /// Order in which the values of `dom` are tried for source point `x`.
    fn candidates(&mut self, _state: &State<'_>, _x: usize, dom: &BitSet) -> Vec<usize> {
        dom.to_vec()
    }
}

/// Static description of a map family.
pub(crate) struct MapConstraints<'a> {
    pub(crate) x: &'a FiniteMetricSpace,
    pub(crate) y: &'a FiniteMetricSpace,
    pub(crate) mu: &'a [f64],
    pub(crate) delta: f64,
    pub(crate) kind: FamilyKind,
    pub(crate) tol: f64,
    pub(crate) allowed: BitSet,
    hard: Vec<BitSet>,
}

impl<'a> MapConstraints<'a> {
    pub(crate) fn new(
        x: &'a FiniteMetricSpace,
        y: &'a FiniteMetricSpace,
        mu: &'a [f64],
        delta: f64,
        kind: FamilyKind,
        range: Option<RangeLimit>,
        tol: f64,
    ) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "must be non-negative",
            });
        }
        if mu.len() != x.len() {
            return Err(Error::WeightLength {
                expected: x.len(),
                got: mu.len(),
            });
        }
        let allowed = match range {
            None => BitSet::full(y.len()),
            Some(r) => {
                y.check_index(r.basepoint)?;
                BitSet::from_indices(
                    y.len(),
                    (0..y.len()).filter(|&w| y.d(r.basepoint, w) < r.radius - tol),
                )
            }
        };
        let n = x.len();
        let heavy = |i: usize| mu[i] > delta + tol;
        let mut hard = alloc::vec![BitSet::new(n); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && (kind == FamilyKind::Lipschitz || (heavy(i) && heavy(j))) {
                    hard[i].insert(j);
                }
            }
        }
        Ok(MapConstraints {
            x,
            y,
            mu,
            delta,
            kind,
            tol,
            allowed,
            hard,
        })
    }

    /// Whether `(x -> a, z -> b)` respects the defect bound.
    pub(crate) fn compatible(&self, x: usize, a: usize, z: usize, b: usize) -> bool {
        self.y.d(a, b) <= self.x.d(x, z) + self.delta + self.tol
    }

    /// Points sorted by decreasing eccentricity, then decreasing weight, then
    /// index: distant points constrain the most and go first.
    pub(crate) fn eccentricity_order(&self) -> Vec<usize> {
        let ecc: Vec<f64> = (0..self.x.len()).map(|i| self.x.eccentricity(i)).collect();
        let mut order: Vec<usize> = (0..self.x.len()).collect();
        order.sort_by(|&a, &b| {
            ecc[b]
                .total_cmp(&ecc[a])
                .then(self.mu[b].total_cmp(&self.mu[a]))
                .then(a.cmp(&b))
        });
        order
    }

    /// Full membership test for a complete assignment.
    pub(crate) fn admits(&self, assignment: &[usize]) -> bool {
        if assignment.iter().any(|&b| !self.allowed.contains(b)) {
            return false;
        }
        let n = self.x.len();
        let g = ConflictGraph::build(n, |i, j| !self.compatible(i, assignment[i], j, assignment[j]));
        if !g.has_edges() {
            return true;
        }
        match self.kind {
            FamilyKind::Lipschitz => false,
            FamilyKind::AlmostLipschitz => g.min_cover(self.mu, self.delta + self.tol).is_some(),
        }
    }
}

pub(crate) struct Searcher<'c, 'a> {
    c: &'c MapConstraints<'a>,
    order: Vec<usize>,
    pos: Vec<usize>,
    max_nodes: u64,
    nodes: u64,
    assignment: Vec<usize>,
    conflicts: ConflictGraph,
}

impl<'c, 'a> Searcher<'c, 'a> {
    pub(crate) fn new(c: &'c MapConstraints<'a>, order: Vec<usize>, max_nodes: u64) -> Self {
        let n = c.x.len();
        let mut pos = alloc::vec![0; n];
        for (k, &p) in order.iter().enumerate() {
            pos[p] = k;
        }
        Searcher {
            c,
            order,
            pos,
            max_nodes,
            nodes: 0,
            assignment: alloc::vec![UNASSIGNED; n],
            conflicts: ConflictGraph::build(n, |_, _| false),
        }
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Runs the search; `Ok(true)` when the visitor stopped it early.
    pub(crate) fn run<V: Visitor>(&mut self, v: &mut V) -> Result<bool> {
        let n = self.c.x.len();
        if self.c.allowed.is_empty() && n > 0 {
            return Ok(false);
        }
        let domains = alloc::vec![self.c.allowed.clone(); n];
        Ok(self.rec(0, domains, v)? == Flow::Stop)
    }

    fn rec<V: Visitor>(&mut self, depth: usize, domains: Vec<BitSet>, v: &mut V) -> Result<Flow> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded(self.max_nodes));
        }
        if depth == self.order.len() {
            return Ok(match v.leaf(&self.assignment) {
                Flow::Stop => Flow::Stop,
                _ => Flow::Continue,
            });
        }
        let state = State {
            assignment: &self.assignment,
            domains: &domains,
            depth,
            order: &self.order,
        };
        match v.enter(&state) {
            Flow::Stop => return Ok(Flow::Stop),
            Flow::Prune => return Ok(Flow::Continue),
            Flow::Continue => {}
        }
        let x = self.order[depth];
        let cands = v.candidates(&state, x, &domains[x]);
        for a in cands {
            let mut next = domains.clone();
            next[x] = BitSet::from_indices(self.c.y.len(), [a]);
            let mut ok = true;
            for z in self.c.hard[x].iter() {
                if self.pos[z] <= depth {
                    continue;
                }
                let keep = BitSet::from_indices(
                    self.c.y.len(),
                    next[z].iter().filter(|&b| self.c.compatible(x, a, z, b)),
                );
                if keep.is_empty() {
                    ok = false;
                    break;
                }
                next[z] = keep;
            }
            if !ok {
                continue;
            }
            self.assignment[x] = a;
            let mut added: Vec<usize> = Vec::new();
            if self.c.kind == FamilyKind::AlmostLipschitz {
                for &z in &self.order[..depth] {
                    if !self.c.compatible(x, a, z, self.assignment[z]) {
                        self.conflicts.adj[x].insert(z);
                        self.conflicts.adj[z].insert(x);
                        added.push(z);
                    }
                }
                if !added.is_empty()
                    && self
                        .conflicts
                        .min_cover(self.c.mu, self.c.delta + self.c.tol)
                        .is_none()
                {
                    ok = false;
                }
            }
            let flow = if ok {
                self.rec(depth + 1, next, v)
            } else {
                Ok(Flow::Continue)
            };
            for z in added {
                self.conflicts.adj[x].remove(z);
                self.conflicts.adj[z].remove(x);
            }
            self.assignment[x] = UNASSIGNED;
            if flow? == Flow::Stop {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }
}
