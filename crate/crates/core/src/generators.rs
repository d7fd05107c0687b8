//! Concrete spaces: interval grids, the apex counterexample and its scaled ray
//! screens, the countable screen, circles, star trees, random point clouds.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{FiniteMMSpace, FiniteMetricSpace, PointedMetricSpace, ProbabilityWeights};
use crate::{Error, Result};

fn need(cond: bool, name: &'static str, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason })
    }
}

fn grid_labels(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("x{i}")).collect()
}

/// `m` equally spaced points on `[0, 1]` with uniform weights.
pub fn grid_interval(m: usize) -> Result<FiniteMMSpace> {
    need(m >= 2, "m", "at least 2 grid points")?;
    let step = 1.0 / (m - 1) as f64;
    let dist = (0..m)
        .map(|i| (0..m).map(|j| i.abs_diff(j) as f64 * step).collect())
        .collect();
    FiniteMMSpace::uniform(FiniteMetricSpace::new(grid_labels(m), dist)?)
}

/// The interval grid plus an apex `inf` at distance 1 from every grid point.
/// The apex carries mass 1/2, each grid point `1 / (2m)`. The apex is the last
/// point.
pub fn counterexample_x(m: usize) -> Result<FiniteMMSpace> {
    need(m >= 2, "m", "at least 2 grid points")?;
    let step = 1.0 / (m - 1) as f64;
    let d = |i: usize, j: usize| -> f64 {
        if i == j {
            0.0
        } else if i == m || j == m {
            1.0
        } else {
            i.abs_diff(j) as f64 * step
        }
    };
    let dist = (0..=m).map(|i| (0..=m).map(|j| d(i, j)).collect()).collect();
    let mut labels = grid_labels(m);
    labels.push(String::from("inf"));
    let mut w = alloc::vec![0.5 / m as f64; m];
    w.push(0.5);
    FiniteMMSpace::new(
        FiniteMetricSpace::new(labels, dist)?,
        ProbabilityWeights::new(w)?,
    )
}

/// Discretized scaled screen `Y_n`: the counterexample space (indices
/// `0..=m`, apex at `m`) with the ray points `-h, -2h, ..., -R` glued at the
/// grid point 0 and the ray stretched by `n`. Ray point `-k h` has index
/// `m + k`. The basepoint is the ray point `-1`.
pub fn counterexample_yn(m: usize, n: f64, r: f64, h: f64) -> Result<PointedMetricSpace> {
    need(m >= 2, "m", "at least 2 grid points")?;
    need(n > 0.0, "n", "scale must be positive")?;
    need(h > 0.0, "h", "mesh must be positive")?;
    need(r >= 1.0, "R", "the ray must reach -1")?;
    let steps_to_one = libm::round(1.0 / h);
    need(
        libm::fabs(steps_to_one * h - 1.0) < 1e-9,
        "h",
        "-1 is not on the ray mesh",
    )?;
    let k_max = libm::floor(r / h + 1e-9) as usize;
    let step = 1.0 / (m - 1) as f64;
    let total = m + 1 + k_max;
    // position on the ray (as a non-negative depth) or inside X
    enum P {
        Grid(f64),
        Apex,
        Ray(f64),
    }
    let at = |i: usize| -> P {
        if i < m {
            P::Grid(i as f64 * step)
        } else if i == m {
            P::Apex
        } else {
            P::Ray((i - m) as f64 * h)
        }
    };
    let d = |i: usize, j: usize| -> f64 {
        if i == j {
            return 0.0;
        }
        match (at(i), at(j)) {
            (P::Grid(a), P::Grid(b)) => libm::fabs(a - b),
            (P::Grid(_), P::Apex) | (P::Apex, P::Grid(_)) => 1.0,
            (P::Apex, P::Apex) => 0.0,
            (P::Ray(a), P::Ray(b)) => n * libm::fabs(a - b),
            (P::Ray(a), P::Grid(b)) | (P::Grid(b), P::Ray(a)) => n * a + b,
            (P::Ray(a), P::Apex) | (P::Apex, P::Ray(a)) => n * a + 1.0,
        }
    };
    let dist = (0..total).map(|i| (0..total).map(|j| d(i, j)).collect()).collect();
    let mut labels = grid_labels(m);
    labels.push(String::from("inf"));
    labels.extend((1..=k_max).map(|k| format!("r{k}")));
    PointedMetricSpace::new(
        FiniteMetricSpace::new(labels, dist)?,
        m + steps_to_one as usize,
    )
}

/// Truncation `y_0, ..., y_k` of the countable screen with
/// `d(y_0, y_i) = 1 + 1/i` and `d(y_j, y_l) = 2 + 1/j + 1/l`, together with
/// the two-point source space (distance 1, uniform).
pub fn countable_screen(k: usize) -> Result<(FiniteMMSpace, FiniteMetricSpace)> {
    need(k >= 1, "k", "at least one screen point besides y0")?;
    let inv = |i: usize| 1.0 / i as f64;
    let d = |i: usize, j: usize| -> f64 {
        match (i.min(j), i.max(j)) {
            (a, b) if a == b => 0.0,
            (0, b) => 1.0 + inv(b),
            (a, b) => 2.0 + inv(a) + inv(b),
        }
    };
    let y = FiniteMetricSpace::new(
        (0..=k).map(|i| format!("y{i}")).collect(),
        (0..=k).map(|i| (0..=k).map(|j| d(i, j)).collect()).collect(),
    )?;
    let x = FiniteMMSpace::uniform(FiniteMetricSpace::new(
        alloc::vec![String::from("x0"), String::from("x1")],
        alloc::vec![alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]],
    )?)?;
    Ok((x, y))
}

/// `m` equally spaced points on a circle of radius `r` with the arc metric.
pub fn circle(m: usize, r: f64) -> Result<FiniteMetricSpace> {
    need(m >= 1, "m", "at least one point")?;
    need(r > 0.0, "r", "radius must be positive")?;
    let arc = 2.0 * core::f64::consts::PI * r / m as f64;
    FiniteMetricSpace::from_fn(m, "c", |i, j| {
        let k = i.abs_diff(j);
        k.min(m - k) as f64 * arc
    })
}

/// Star tree with `branches` edges of the given `length`, each split into `m`
/// segments, path metric. Index 0 is the centre; point `j` (`1..=m`) of
/// branch `b` has index `1 + b m + (j - 1)`.
pub fn star_tree(branches: usize, m: usize, length: f64) -> Result<FiniteMetricSpace> {
    need(branches >= 1, "branches", "at least one branch")?;
    need(m >= 1, "m", "at least one segment per branch")?;
    need(length > 0.0, "length", "must be positive")?;
    let mesh = length / m as f64;
    let loc = |i: usize| -> (usize, usize) {
        if i == 0 {
            (0, 0)
        } else {
            ((i - 1) / m, (i - 1) % m + 1)
        }
    };
    FiniteMetricSpace::from_fn(1 + branches * m, "s", |i, j| {
        let ((bi, ji), (bj, jj)) = (loc(i), loc(j));
        let steps = if ji == 0 || jj == 0 || bi == bj {
            ji.abs_diff(jj)
        } else {
            ji + jj
        };
        steps as f64 * mesh
    })
}

/// `n` i.i.d. uniform points of the unit square with the Euclidean metric.
/// Weights are uniform, or i.i.d. uniform on `[0.1, 1]` and normalized when
/// `random_weights` is set. Deterministic in `seed`.
pub fn random(n: usize, seed: u64, random_weights: bool) -> Result<FiniteMMSpace> {
    need(n >= 1, "n", "at least one point")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let space = FiniteMetricSpace::from_fn(n, "p", |i, j| {
        libm::hypot(pts[i].0 - pts[j].0, pts[i].1 - pts[j].1)
    })?;
    let mu = if random_weights {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        ProbabilityWeights::normalized(&raw)?
    } else {
        ProbabilityWeights::uniform(n)?
    };
    FiniteMMSpace::new(space, mu)
}

/// Copy of `space` with every off-diagonal distance raised by
/// `eps (1 + u) / 2`, `u` uniform on `[0, 1]`. The identity then distorts by
/// at most `eps`, and the triangle inequality survives because every side
/// grows by at least `eps / 2`.
pub fn perturbed(space: &FiniteMetricSpace, eps: f64, seed: u64) -> Result<FiniteMetricSpace> {
    need(eps >= 0.0, "eps", "must be non-negative")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.len();
    let mut dist = space.to_matrix();
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            dist[i][j] += eps * (1.0 + u) / 2.0;
            dist[j][i] = dist[i][j];
        }
    }
    FiniteMetricSpace::new(space.labels().to_vec(), dist)
}

/// Grid `{-R, ..., -h, 0, h, ..., R}` on the line, pointed at 0 (index
/// `R / h`).
pub fn line_grid(r: f64, h: f64) -> Result<PointedMetricSpace> {
    need(h > 0.0, "h", "mesh must be positive")?;
    need(r >= 0.0, "R", "must be non-negative")?;
    let k = libm::floor(r / h + 1e-9) as usize;
    let space = FiniteMetricSpace::from_fn(2 * k + 1, "t", |i, j| i.abs_diff(j) as f64 * h)?;
    PointedMetricSpace::new(space, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{validate, Validation};

    #[test]
    fn grids() {
        let g = grid_interval(2).unwrap();
        assert_eq!(g.space.d(0, 1), 1.0);
        assert_eq!(g.mu.as_slice(), &[0.5, 0.5]);
        let g = grid_interval(5).unwrap();
        assert_eq!(g.space.d(0, 1), 0.25);
        for m in 2..20 {
            assert!((grid_interval(m).unwrap().space.diameter() - 1.0).abs() < 1e-12);
        }
        assert!(grid_interval(1).is_err());
    }

    #[test]
    fn counterexample_space() {
        let x = counterexample_x(10).unwrap();
        assert!((x.mu.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(x.mu.get(10), 0.5);
        assert_eq!(x.space.d(0, 9), 1.0);
        assert_eq!(x.space.d(0, 10), 1.0);
    }

    #[test]
    fn scaled_screen() {
        let y = counterexample_yn(5, 3.0, 2.0, 0.25).unwrap();
        let s = &y.space;
        // basepoint -1 is ray step 4
        assert_eq!(y.basepoint(), 5 + 4);
        assert_eq!(s.d(y.basepoint(), 5), 3.0 + 1.0);
        let x = counterexample_x(5).unwrap();
        for i in 0..=5 {
            for j in 0..=5 {
                assert_eq!(s.d(i, j), x.space.d(i, j));
            }
        }
        let one = counterexample_yn(5, 1.0, 2.0, 0.25).unwrap();
        assert_eq!(one.space.d(6, 4), 0.25 + 1.0);
        assert!(counterexample_yn(5, 1.0, 2.0, 0.3).is_err());
    }

    #[test]
    fn countable_screen_distances() {
        let (_, y) = countable_screen(2).unwrap();
        assert_eq!(y.d(0, 1), 2.0);
        assert_eq!(y.d(1, 2), 3.5);
        for k in 1..=50 {
            let (_, y) = countable_screen(k).unwrap();
            assert_eq!(validate(y.len(), &y.to_matrix()).unwrap(), Validation::Pass);
        }
    }

    #[test]
    fn circle_and_star() {
        let c = circle(8, 1.0).unwrap();
        assert!((c.diameter() - core::f64::consts::PI).abs() < 1e-12);
        let s = star_tree(2, 4, 1.0).unwrap();
        // branch 0 outward is indices 1..=4, branch 1 is 5..=8
        assert_eq!(s.d(4, 8), 2.0);
        assert_eq!(s.d(1, 3), 0.5);
        assert_eq!(s.diameter(), 2.0);
    }

    #[test]
    fn random_is_seeded() {
        let a = random(7, 42, true).unwrap();
        let b = random(7, 42, true).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random(7, 43, true).unwrap());
    }

    #[test]
    fn perturbation_stays_metric() {
        let g = grid_interval(6).unwrap();
        let p = perturbed(&g.space, 0.05, 9).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let diff = p.d(i, j) - g.space.d(i, j);
                assert!((0.0..=0.05).contains(&diff));
            }
        }
    }
}
