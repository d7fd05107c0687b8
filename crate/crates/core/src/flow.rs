//! Maximum flow on real capacities (Dinic), specialised helpers for
//! bipartite transport between two weight vectors.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Residual capacities below this are treated as saturated.
const FLOW_EPS: f64 = 1e-15;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: f64,
    rev: usize,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<Edge>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds a directed edge and returns a handle `(from, index)` usable with
    /// [`FlowNetwork::flow_on`].
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> (usize, usize) {
        let a = self.adj[from].len();
        let b = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Edge { to, cap, rev: b });
        self.adj[to].push(Edge {
            to: from,
            cap: 0.0,
            rev: a,
        });
        (from, a)
    }

    /// Flow currently routed through an edge added with `original` capacity.
    pub fn flow_on(&self, handle: (usize, usize), original: f64) -> f64 {
        (original - self.adj[handle.0][handle.1].cap).max(0.0)
    }

    fn bfs(&self, s: usize, t: usize, level: &mut [i32]) -> bool {
        level.iter_mut().for_each(|l| *l = -1);
        level[s] = 0;
        let mut q = VecDeque::new();
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for e in &self.adj[u] {
                if e.cap > FLOW_EPS && level[e.to] < 0 {
                    level[e.to] = level[u] + 1;
                    q.push_back(e.to);
                }
            }
        }
        level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64, level: &[i32], it: &mut [usize]) -> f64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let i = it[u];
            let (to, cap) = (self.adj[u][i].to, self.adj[u][i].cap);
            if cap > FLOW_EPS && level[to] == level[u] + 1 {
                let d = self.dfs(to, t, pushed.min(cap), level, it);
                if d > FLOW_EPS {
                    self.adj[u][i].cap -= d;
                    let rev = self.adj[u][i].rev;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.adj.len();
        let mut level = vec![-1; n];
        let mut total = 0.0;
        while self.bfs(s, t, &mut level) {
            let mut it = vec![0usize; n];
            loop {
                let f = self.dfs(s, t, f64::INFINITY, &level, &mut it);
                if f <= FLOW_EPS {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

/// Largest total mass transportable from `supply` to `demand` using only the
/// allowed cells `(i, j)`, i.e. the maximum of `sum xi` over sub-couplings
/// supported on `allowed` with row sums `<= supply` and column sums
/// `<= demand`.
pub fn bipartite_max_flow(
    supply: &[f64],
    demand: &[f64],
    allowed: impl IntoIterator<Item = (usize, usize)>,
) -> f64 {
    bipartite_plan(supply, demand, allowed).0
}

/// Like [`bipartite_max_flow`] but also returns the transport plan as a dense
/// `supply.len() x demand.len()` matrix.
pub fn bipartite_plan(
    supply: &[f64],
    demand: &[f64],
    allowed: impl IntoIterator<Item = (usize, usize)>,
) -> (f64, Vec<Vec<f64>>) {
    let (n, m) = (supply.len(), demand.len());
    let s = n + m;
    let t = s + 1;
    let mut g = FlowNetwork::new(n + m + 2);
    for (i, &w) in supply.iter().enumerate() {
        if w > 0.0 {
            g.add_edge(s, i, w);
        }
    }
    for (j, &w) in demand.iter().enumerate() {
        if w > 0.0 {
            g.add_edge(n + j, t, w);
        }
    }
    let mut handles = Vec::new();
    for (i, j) in allowed {
        if supply[i] > 0.0 && demand[j] > 0.0 {
            let h = g.add_edge(i, n + j, f64::INFINITY);
            handles.push((i, j, h));
        }
    }
    let total = g.max_flow(s, t);
    let mut plan = vec![vec![0.0; m]; n];
    for (i, j, h) in handles {
        let e = &g.adj[h.0][h.1];
        // reverse edge capacity equals routed flow for infinite forward caps
        plan[i][j] += g.adj[e.to][e.rev].cap;
    }
    (total, plan)
}
