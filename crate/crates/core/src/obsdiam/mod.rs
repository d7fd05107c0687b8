//! Observable diameter of a finite mm space with a finite screen.
//!
//! `ObsDiam_Y(X; -kappa)` is the largest partial diameter
//! `Diam(f_# mu_X; 1 - kappa)` over the maps `f: X -> Y` of a family: the
//! 1-Lipschitz maps (plain), maps with additive error `delta` (delta), or maps
//! with additive error `delta` off an exceptional set of mass `<= delta`
//! (tilde_delta). The family is finite, so the supremum is a maximum.
//!
//! [`obsdiam`] is a branch and bound over partial assignments. At each node
//! the objective of every completion is bounded by
//!
//! * the diameter of the assigned images together with the remaining domains
//!   (a push-forward lives on the image, and its partial diameter is at most
//!   the diameter of its support);
//! * once the assigned points carry mass `>= 1 - kappa`, the partial diameter
//!   of the partial push-forward (a set heavy enough for the partial measure is
//!   heavy enough for every completion);
//! * for the non-tilde families, the largest screen distance not exceeding
//!   `Diam(X) + delta`.
//!
//! A second, index-ordered pass then returns the lexicographically smallest
//! optimal assignment, so witnesses do not depend on search heuristics.

pub mod audit;

use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::lipschitz::search::{Flow, MapConstraints, Searcher, State, Visitor};
use crate::lipschitz::{for_each_assignment, FamilyKind, RangeLimit};
use crate::metrics::min_diameter_for_mass;
use crate::space::{FiniteMMSpace, FiniteMetricSpace};
use crate::{Error, Result};

pub use crate::lipschitz::SearchOptions;

/// Which map family the observable diameter ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Variant {
    Plain,
    Delta,
    TildeDelta,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Delta => "delta",
            Variant::TildeDelta => "tilde_delta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plain" => Some(Variant::Plain),
            "delta" => Some(Variant::Delta),
            "tilde_delta" | "tilde" => Some(Variant::TildeDelta),
            _ => None,
        }
    }

    fn family(self, delta: f64) -> (FamilyKind, f64) {
        match self {
            Variant::Plain => (FamilyKind::Lipschitz, 0.0),
            Variant::Delta => (FamilyKind::Lipschitz, delta),
            Variant::TildeDelta => (FamilyKind::AlmostLipschitz, delta),
        }
    }
}

/// A validated observable-diameter question.
#[derive(Clone, Copy, Debug)]
pub struct ObsDiamQuery<'a> {
    pub x: &'a FiniteMMSpace,
    pub y: &'a FiniteMetricSpace,
    pub kappa: f64,
    pub delta: f64,
    pub variant: Variant,
    pub range: Option<RangeLimit>,
}

impl<'a> ObsDiamQuery<'a> {
    pub fn new(
        x: &'a FiniteMMSpace,
        y: &'a FiniteMetricSpace,
        kappa: f64,
        delta: f64,
        variant: Variant,
    ) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::KappaOutOfRange(kappa));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "must be finite and non-negative",
            });
        }
        Ok(ObsDiamQuery {
            x,
            y,
            kappa,
            delta,
            variant,
            range: None,
        })
    }

    pub fn plain(x: &'a FiniteMMSpace, y: &'a FiniteMetricSpace, kappa: f64) -> Result<Self> {
        Self::new(x, y, kappa, 0.0, Variant::Plain)
    }

    pub fn with_range(mut self, range: RangeLimit) -> Result<Self> {
        self.y.check_index(range.basepoint)?;
        self.range = Some(range);
        Ok(self)
    }

    fn constraints(&self, tol: f64) -> Result<MapConstraints<'a>> {
        let (kind, delta) = self.variant.family(self.delta);
        MapConstraints::new(
            &self.x.space,
            self.y,
            self.x.mu.as_slice(),
            delta,
            kind,
            self.range,
            tol,
        )
    }
}

/// Optimal value with the lexicographically smallest optimal assignment.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObsDiamResult {
    pub value: f64,
    pub witness: Vec<usize>,
    /// Search nodes visited (both passes) or maps enumerated.
    pub nodes: u64,
}

/// `Diam(f_# mu; 1 - kappa)` for the assignment `f`.
pub(crate) fn map_value(
    y: &FiniteMetricSpace,
    mu: &[f64],
    assignment: &[usize],
    kappa: f64,
    tol: f64,
) -> f64 {
    let mut mass = alloc::vec![0.0; y.len()];
    for (i, &a) in assignment.iter().enumerate() {
        mass[a] += mu[i];
    }
    let atoms: Vec<(usize, f64)> = mass
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m > 0.0)
        .map(|(j, &m)| (j, m))
        .collect();
    min_diameter_for_mass(y, &atoms, 1.0 - kappa - tol).unwrap_or(f64::INFINITY)
}

struct Bounder<'q> {
    y: &'q FiniteMetricSpace,
    mu: &'q [f64],
    kappa: f64,
    tol: f64,
    cap: f64,
}

impl Bounder<'_> {
    fn bound(&self, s: &State<'_>) -> f64 {
        let mut u = BitSet::new(self.y.len());
        let mut atoms: Vec<(usize, f64)> = Vec::new();
        let mut assigned = 0.0;
        for &p in &s.order[..s.depth] {
            let a = s.assignment[p];
            u.insert(a);
            assigned += self.mu[p];
            match atoms.iter_mut().find(|t| t.0 == a) {
                Some(t) => t.1 += self.mu[p],
                None => atoms.push((a, self.mu[p])),
            }
        }
        for &p in &s.order[s.depth..] {
            u.union_with(&s.domains[p]);
        }
        let pts = u.to_vec();
        let mut diam: f64 = 0.0;
        for (k, &a) in pts.iter().enumerate() {
            for &b in &pts[k + 1..] {
                diam = diam.max(self.y.d(a, b));
            }
        }
        let mut b = self.cap.min(diam);
        let target = 1.0 - self.kappa - self.tol;
        if assigned >= target {
            if let Some(v) = min_diameter_for_mass(self.y, &atoms, target) {
                b = b.min(v);
            }
        }
        b
    }
}

struct Maximize<'q> {
    b: Bounder<'q>,
    best: f64,
}

impl Visitor for Maximize<'_> {
    fn enter(&mut self, s: &State<'_>) -> Flow {
        if self.b.bound(s) <= self.best {
            Flow::Prune
        } else {
            Flow::Continue
        }
    }

    fn leaf(&mut self, assignment: &[usize]) -> Flow {
        let v = map_value(self.b.y, self.b.mu, assignment, self.b.kappa, self.b.tol);
        if v > self.best {
            self.best = v;
        }
        if self.best >= self.b.cap {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    fn candidates(&mut self, s: &State<'_>, _x: usize, dom: &BitSet) -> Vec<usize> {
        let y = self.b.y;
        let placed: Vec<usize> = s.order[..s.depth].iter().map(|&p| s.assignment[p]).collect();
        let score = |a: usize| -> f64 {
            if placed.is_empty() {
                dom.iter().map(|b| y.d(a, b)).fold(0.0, f64::max)
            } else {
                placed.iter().map(|&b| y.d(a, b)).fold(0.0, f64::max)
            }
        };
        let mut c: Vec<(f64, usize)> = dom.iter().map(|a| (score(a), a)).collect();
        c.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));
        c.into_iter().map(|p| p.1).collect()
    }
}

struct LexFirst<'q> {
    b: Bounder<'q>,
    target: f64,
    found: Option<Vec<usize>>,
}

impl Visitor for LexFirst<'_> {
    fn enter(&mut self, s: &State<'_>) -> Flow {
        if self.b.bound(s) < self.target {
            Flow::Prune
        } else {
            Flow::Continue
        }
    }

    fn leaf(&mut self, assignment: &[usize]) -> Flow {
        let v = map_value(self.b.y, self.b.mu, assignment, self.b.kappa, self.b.tol);
        if v >= self.target {
            self.found = Some(assignment.to_vec());
            Flow::Stop
        } else {
            Flow::Continue
        }
    }
}

/// Largest screen distance that a map of the family can realize between two
/// images, or infinity when the family does not bound image diameters.
fn image_cap(q: &ObsDiamQuery<'_>, c: &MapConstraints<'_>, tol: f64) -> f64 {
    if q.variant == Variant::TildeDelta {
        return f64::INFINITY;
    }
    let (_, delta) = q.variant.family(q.delta);
    let limit = q.x.space.diameter() + delta + tol;
    let pts = c.allowed.to_vec();
    let mut cap: f64 = 0.0;
    for (k, &a) in pts.iter().enumerate() {
        for &b in &pts[k..] {
            let d = q.y.d(a, b);
            if d <= limit {
                cap = cap.max(d);
            }
        }
    }
    cap
}

/// Exact observable diameter by branch and bound.
///
/// Fails with [`Error::BudgetExceeded`] when either pass exceeds
/// `opts.max_nodes` nodes, and with [`Error::Empty`] when the range
/// restriction leaves no admissible image.
pub fn obsdiam(q: &ObsDiamQuery<'_>, opts: SearchOptions) -> Result<ObsDiamResult> {
    let c = q.constraints(opts.tol)?;
    if c.allowed.is_empty() {
        return Err(Error::Empty("map family"));
    }
    let mk = || Bounder {
        y: q.y,
        mu: q.x.mu.as_slice(),
        kappa: q.kappa,
        tol: opts.tol,
        cap: image_cap(q, &c, opts.tol),
    };
    let mut s = Searcher::new(&c, c.eccentricity_order(), opts.max_nodes);
    let mut m = Maximize { b: mk(), best: 0.0 };
    s.run(&mut m)?;
    let value = m.best;
    let used = s.nodes();

    let lex: Vec<usize> = (0..q.x.len()).collect();
    let mut s2 = Searcher::new(&c, lex, opts.max_nodes.saturating_sub(used));
    let mut l = LexFirst {
        b: mk(),
        target: value,
        found: None,
    };
    s2.run(&mut l)?;
    let witness = l.found.ok_or(Error::Empty("map family"))?;
    Ok(ObsDiamResult {
        value,
        witness,
        nodes: used + s2.nodes(),
    })
}

/// The same value by evaluating every assignment in `Y^X` (lexicographic
/// order, first maximum kept). Fails when `|Y|^|X|` exceeds
/// `opts.max_nodes`.
pub fn obsdiam_exhaustive(q: &ObsDiamQuery<'_>, opts: SearchOptions) -> Result<ObsDiamResult> {
    let c = q.constraints(opts.tol)?;
    let mu = q.x.mu.as_slice();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut count = 0u64;
    for_each_assignment(q.x.len(), q.y.len(), opts.max_nodes, |a| {
        count += 1;
        if !c.admits(a) {
            return;
        }
        let v = map_value(q.y, mu, a, q.kappa, opts.tol);
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, a.to_vec()));
        }
    })?;
    let (value, witness) = best.ok_or(Error::Empty("map family"))?;
    Ok(ObsDiamResult {
        value,
        witness,
        nodes: count,
    })
}

/// Values along a decreasing error schedule and the reading of the
/// `delta -> 0` limit.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlusProfile {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    /// Last value of the schedule.
    pub limit: f64,
    /// The last two values agree within the tolerance.
    pub stabilized: bool,
    /// Values never increase as `delta` decreases.
    pub monotone: bool,
}

/// Evaluates the `delta` or `tilde_delta` variant along `schedule`, which
/// must be strictly decreasing and positive.
pub fn obsdiam_plus(
    x: &FiniteMMSpace,
    y: &FiniteMetricSpace,
    kappa: f64,
    variant: Variant,
    schedule: &[f64],
    opts: SearchOptions,
) -> Result<PlusProfile> {
    if schedule.is_empty()
        || schedule.iter().any(|&d| !(d > 0.0))
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParameter {
            name: "delta schedule",
            reason: "must be positive and strictly decreasing",
        });
    }
    let mut values = Vec::with_capacity(schedule.len());
    for &d in schedule {
        values.push(obsdiam(&ObsDiamQuery::new(x, y, kappa, d, variant)?, opts)?.value);
    }
    let n = values.len();
    let stabilized = n >= 2 && libm::fabs(values[n - 1] - values[n - 2]) < opts.tol;
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + opts.tol);
    Ok(PlusProfile {
        deltas: schedule.to_vec(),
        limit: values[n - 1],
        values,
        stabilized,
        monotone,
    })
}

/// Certified enclosure of the observable diameter with the segment
/// `[-R, R]` as screen.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RealLineEnclosure {
    /// Value on the grid screen with the error-`h` family.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Grid points actually searched after translation reduction.
    pub grid_points: usize,
    /// `R < Diam(X)`: the segment may be too short for some maps.
    pub range_warning: bool,
    pub witness: Vec<usize>,
}

/// Encloses the observable diameter of `x` with screen `[-R, R]` by searching
/// the grid `{-R, -R + h, ..., R}` with the error-`h` family.
///
/// Rounding a 1-Lipschitz real map to the grid costs additive error `h`, so
/// it stays in the grid family and loses at most `h` of partial diameter.
/// Conversely a grid map with error `h` lies within `h` of the 1-Lipschitz
/// map `inf_z (f(z) + d(x, z))`, which costs at most `2h`. Hence the segment
/// value lies in `[v - 2h, v + 2h]`.
///
/// Image diameters of the grid family are at most `Diam(X) + h`, and
/// translates of a grid map stay in the family, so only a window of
/// `floor((Diam(X) + h) / h) + 1` consecutive grid points is searched.
pub fn obsdiam_realline(
    x: &FiniteMMSpace,
    kappa: f64,
    r: f64,
    h: f64,
    opts: SearchOptions,
) -> Result<RealLineEnclosure> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter {
            name: "h",
            reason: "mesh must be positive",
        });
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "R",
            reason: "must be non-negative",
        });
    }
    let diam = x.space.diameter();
    let full = 2 * (libm::floor(r / h + 1e-9) as usize) + 1;
    let window = libm::floor((diam + h) / h + 1e-9) as usize + 1;
    let k = full.min(window);
    let grid = FiniteMetricSpace::from_fn(k, "t", |i, j| i.abs_diff(j) as f64 * h)?;
    let q = ObsDiamQuery::new(x, &grid, kappa, h, Variant::Delta)?;
    let res = obsdiam(&q, opts)?;
    Ok(RealLineEnclosure {
        value: res.value,
        lower: res.value - 2.0 * h,
        upper: res.value + 2.0 * h,
        grid_points: k,
        range_warning: r < diam,
        witness: res.witness,
    })
}
