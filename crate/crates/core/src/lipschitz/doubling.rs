use alloc::vec::Vec;

use super::PointMap;
use crate::space::{FiniteMMSpace, FiniteMetricSpace};
use crate::{Error, Result};

/// Nearest-point projection onto `net`: every point goes to a closest member
/// of `net` (smallest index on ties), members of `net` to themselves.
pub fn nearest_point_map<'a>(space: &'a FiniteMetricSpace, net: &[usize]) -> Result<PointMap<'a>> {
    if net.is_empty() {
        return Err(Error::Empty("net"));
    }
    for &p in net {
        space.check_index(p)?;
    }
    let mut sorted = net.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let assignment = (0..space.len())
        .map(|x| {
            let mut best = sorted[0];
            for &p in &sorted[1..] {
                if space.d(x, p) < space.d(x, best) {
                    best = p;
                }
            }
            best
        })
        .collect();
    PointMap::new(space, space, assignment)
}

/// Least `N >= 0` with `mu(B_2r(x)) <= 2^N mu(B_r(x))` for all centres `x` and
/// radii `r > 0`, closed balls. Both balls only change at `r = d(x, y)` and
/// `r = d(x, y) / 2`, so those radii are the only ones scanned.
pub fn doubling_exponent(mm: &FiniteMMSpace, tol: f64) -> f64 {
    let s = &mm.space;
    let n = s.len();
    let ball = |x: usize, r: f64| -> f64 {
        (0..n).filter(|&y| s.d(x, y) <= r + tol).map(|y| mm.mu.get(y)).sum()
    };
    let mut worst: f64 = 1.0;
    for x in 0..n {
        for y in 0..n {
            let d = s.d(x, y);
            if d <= 0.0 {
                continue;
            }
            for r in [d, d / 2.0] {
                worst = worst.max(ball(x, 2.0 * r) / ball(x, r));
            }
        }
    }
    libm::log2(worst).max(0.0)
}

/// Greedy maximal `eta`-separated set in index order: pairwise distances are
/// `>= eta`, and closed `eta`-balls around it cover the space.
pub fn separated_net(space: &FiniteMetricSpace, eta: f64, tol: f64) -> Result<Vec<usize>> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: "must be positive",
        });
    }
    let mut net: Vec<usize> = Vec::new();
    for x in 0..space.len() {
        if net.iter().all(|&p| space.d(x, p) >= eta - tol) {
            net.push(x);
        }
    }
    debug_assert!((0..space.len()).all(|x| net.iter().any(|&p| space.d(x, p) <= eta + tol)));
    Ok(net)
}

/// Outcome of comparing the nearest-point gap against `3 D delta^(1/N)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapCheck {
    pub holds: bool,
    /// `max_x d(x, pi(x))`
    pub gap: f64,
    pub bound: f64,
    /// A point attaining the gap.
    pub worst_point: usize,
    pub exponent: f64,
    /// `gap / bound` (0 when the gap is 0).
    pub ratio: f64,
}

/// Projects onto `subset` (of mass `>= 1 - delta`) and checks the largest
/// displacement against `3 Diam(X) delta^(1/N)`, `N` the doubling exponent.
pub fn nearest_gap_bound_check(
    mm: &FiniteMMSpace,
    delta: f64,
    subset: &[usize],
    tol: f64,
) -> Result<GapCheck> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: "must lie in [0, 1]",
        });
    }
    for &p in subset {
        mm.space.check_index(p)?;
    }
    let mut members = subset.to_vec();
    members.sort_unstable();
    members.dedup();
    if mm.mu.mass(&members) < 1.0 - delta - tol {
        return Err(Error::InvalidParameter {
            name: "subset",
            reason: "mass below 1 - delta",
        });
    }
    let pi = nearest_point_map(&mm.space, &members)?;
    let (mut gap, mut worst_point) = (0.0, 0);
    for x in 0..mm.len() {
        let g = mm.space.d(x, pi.apply(x));
        if g > gap {
            gap = g;
            worst_point = x;
        }
    }
    let exponent = doubling_exponent(mm, tol);
    let bound = if exponent > 0.0 {
        3.0 * mm.space.diameter() * libm::pow(delta, 1.0 / exponent)
    } else {
        0.0
    };
    let ratio = if gap == 0.0 { 0.0 } else { gap / bound };
    Ok(GapCheck {
        holds: gap <= bound + tol,
        gap,
        bound,
        worst_point,
        exponent,
        ratio,
    })
}
