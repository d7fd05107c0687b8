//! Experiment drivers. Each scenario builds its instances, splits the work
//! into independent cells, runs the cells on the worker pool and returns the
//! rows sorted by key, so reports do not depend on scheduling.

use std::f64::consts::PI;
use std::sync::Arc;

use mmspace_core::coupling::{
    approx_map_check, approx_map_search, box_distance, gh_distance, mm_iso_epsilon,
    mm_iso_search, pgh_check, SearchOutcome,
};
use mmspace_core::generators::{
    circle, counterexample_x, counterexample_yn, countable_screen, grid_interval, line_grid,
    perturbed, random, star_tree,
};
use mmspace_core::lipschitz::{
    enumerate_family, hausdorff_kyfan_families, nearest_gap_bound_check, FamilyKind, PointMap,
    SearchOptions,
};
use mmspace_core::metrics::partial_diameter;
use mmspace_core::obsdiam::audit::{
    box_sequence_audit, coincidence_audit, screen_sequence_audit, ScreenLink, SpaceLink, Window,
    CERTIFICATE_SLACK,
};
use mmspace_core::obsdiam::{
    obsdiam, obsdiam_exhaustive, obsdiam_realline, ObsDiamQuery, ObsDiamResult, Variant,
};
use mmspace_core::report::{format_assignment, ExperimentReport, ReportRow, Verdict};
use mmspace_core::{pushforward, Error, FiniteMMSpace, FiniteMetricSpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{CliError, Result};

/// Environment variable holding the worker count (unset or 0: one per core).
pub const WORKERS_ENV: &str = "MMSPACE_WORKERS";

type Cell = Box<dyn Fn() -> Result<Vec<ReportRow>> + Send + Sync>;

pub fn workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV} must be a number, got '{v}'"))),
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let cells = match cfg.scenario {
        Scenario::CountableScreen => countable_screen_cells(cfg)?,
        Scenario::RayScale => ray_scale_cells(cfg)?,
        Scenario::FiniteCat0 => finite_cat0_cells(cfg)?,
        Scenario::Circle => circle_cells(cfg)?,
        Scenario::BoxPerturbation => box_cells(cfg)?,
        Scenario::DoublingGap => doubling_cells(cfg)?,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers()?)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let parts: Vec<Result<Vec<ReportRow>>> = pool.install(|| cells.par_iter().map(|c| c()).collect());
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    match cfg.scenario {
        Scenario::RayScale => rows.extend(ray_scale_summary(cfg, &rows)),
        Scenario::FiniteCat0 => rows.extend(cross_mesh_rows(cfg, &rows)),
        _ => {}
    }
    Ok(ExperimentReport::new(rows))
}

fn opts(cfg: &ScenarioConfig) -> SearchOptions {
    SearchOptions {
        tol: cfg.tol,
        max_nodes: cfg.max_nodes,
    }
}

/// One observable diameter; budget exhaustion becomes `None`.
fn od(q: std::result::Result<ObsDiamQuery<'_>, Error>, o: SearchOptions) -> Result<Option<ObsDiamResult>> {
    match obsdiam(&q?, o) {
        Ok(r) => Ok(Some(r)),
        Err(Error::BudgetExceeded(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn undecided(scenario: &str, n: u64, variant: &str) -> ReportRow {
    ReportRow::new(scenario, n, variant, f64::NAN, Verdict::Indeterminate)
}

fn countable_screen_cells(cfg: &ScenarioConfig) -> Result<Vec<Cell>> {
    let cfg = cfg.clone();
    let cell: Cell = Box::new(move || {
        let s = cfg.scenario.as_str();
        let o = opts(&cfg);
        let k = cfg.k;
        let (x, y) = countable_screen(k)?;
        let mut rows = Vec::new();
        let lip = enumerate_family(&x, &y, 0.0, FamilyKind::Lipschitz, None, o)?;
        let constants = lip.assignments().iter().all(|a| a.iter().all(|&v| v == a[0]));
        rows.push(
            ReportRow::new(s, k as u64, "lip:count", lip.len() as f64, Verdict::from_bool(constants && lip.len() == k + 1))
                .lower((k + 1) as f64)
                .upper((k + 1) as f64),
        );
        for &d in &cfg.deltas {
            let tilde = enumerate_family(&x, &y, d, FamilyKind::AlmostLipschitz, None, o)?;
            let hd = hausdorff_kyfan_families(&lip, &tilde, &x.mu)?;
            rows.push(
                ReportRow::new(s, k as u64, "hd-kf", hd, Verdict::le(0.5, hd, cfg.tol))
                    .delta(d)
                    .lower(0.5),
            );
            // the maps x0 -> y0, x1 -> y_i with 1/i < delta
            let members: Vec<usize> = (1..=k).filter(|&i| 1.0 / (i as f64) < d).collect();
            let all_in = members.iter().all(|&i| tilde.contains(&[0, i]));
            rows.push(
                ReportRow::new(s, k as u64, "escape-maps", members.len() as f64, Verdict::from_bool(all_in))
                    .delta(d)
                    .witness(format_assignment(&members)),
            );
        }
        for &kappa in &cfg.kappas {
            let plain = obsdiam(&ObsDiamQuery::plain(&x, &y, kappa)?, o)?;
            rows.push(
                ReportRow::new(s, k as u64, "plain", plain.value, Verdict::from_bool(plain.value == 0.0))
                    .kappa(kappa)
                    .upper(0.0)
                    .witness(format_assignment(&plain.witness)),
            );
            for &d in &cfg.deltas {
                let q = ObsDiamQuery::new(&x, &y, kappa, d, Variant::TildeDelta)?;
                let r = obsdiam(&q, o)?;
                let check = obsdiam_exhaustive(&q, o)?;
                rows.push(
                    ReportRow::new(s, k as u64, "tilde_delta", r.value, Verdict::from_bool(r.value == check.value))
                        .kappa(kappa)
                        .delta(d)
                        .lower(check.value)
                        .upper(check.value)
                        .witness(format_assignment(&r.witness)),
                );
            }
        }
        Ok(rows)
    });
    Ok(vec![cell])
}

/// The quoted value `(1/2 - kappa) / 2` for the real-line screen.
fn quoted_realline_value(kappa: f64) -> f64 {
    0.5 * (0.5 - kappa)
}

/// Partial diameter of `f(x) = x` on the grid, `f(inf) = 1/2`, a 1-Lipschitz
/// map into the line.
fn explicit_line_map_value(x: &FiniteMMSpace, m: usize, kappa: f64, tol: f64) -> Result<f64> {
    let step = 1.0 / (m - 1) as f64;
    let mut pos: Vec<f64> = (0..m).map(|i| i as f64 * step).collect();
    pos.push(0.5);
    let mut uniq = pos.clone();
    uniq.sort_by(f64::total_cmp);
    uniq.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let assign: Vec<usize> = pos
        .iter()
        .map(|p| uniq.iter().position(|u| (u - p).abs() < 1e-12).unwrap())
        .collect();
    let line = FiniteMetricSpace::from_fn(uniq.len(), "t", |i, j| (uniq[i] - uniq[j]).abs())?;
    let w = pushforward(&assign, &x.mu, uniq.len())?;
    Ok(partial_diameter(&line, &w, kappa, tol)?)
}

fn ray_scale_cells(cfg: &ScenarioConfig) -> Result<Vec<Cell>> {
    let s = cfg.scenario.as_str();
    let x = Arc::new(counterexample_x(cfg.m)?);
    let meshes = [cfg.h, cfg.h / 2.0];
    let mut cells: Vec<Cell> = Vec::new();
    for &kappa in &cfg.kappas {
        let (x1, cfg1) = (x.clone(), cfg.clone());
        cells.push(Box::new(move || {
            let (x, cfg) = (&x1, &cfg1);
            let pd = partial_diameter(&x.space, &x.mu, kappa, cfg.tol)?;
            let explicit = explicit_line_map_value(x, cfg.m, kappa, cfg.tol)?;
            let claim = quoted_realline_value(kappa);
            Ok(vec![
                ReportRow::new(s, 0, "partial-diameter", pd, Verdict::le(1.0, pd, cfg.tol))
                    .kappa(kappa)
                    .lower(1.0),
                ReportRow::new(s, 0, "quoted-claim:explicit-map", explicit, Verdict::le(explicit, claim, cfg.tol))
                    .kappa(kappa)
                    .upper(claim)
                    .witness("f(t)=t,f(inf)=1/2"),
            ])
        }));
        for h in meshes {
            let (x1, cfg1) = (x.clone(), cfg.clone());
            cells.push(Box::new(move || {
                let (x, cfg) = (&x1, &cfg1);
                let tag = format!("h={h}");
                let e = match obsdiam_realline(x, kappa, cfg.r, h, opts(cfg)) {
                    Ok(e) => e,
                    Err(Error::BudgetExceeded(_)) => {
                        return Ok(vec![undecided(s, 0, &format!("realline:{tag}")).kappa(kappa)])
                    }
                    Err(e) => return Err(e.into()),
                };
                let claim = quoted_realline_value(kappa);
                let inside = e.lower - cfg.tol <= claim && claim <= e.upper + cfg.tol;
                let verdict = if e.range_warning { Verdict::Indeterminate } else { Verdict::Holds };
                Ok(vec![
                    ReportRow::new(s, 0, &format!("realline:{tag}"), e.value, verdict)
                        .kappa(kappa)
                        .lower(e.lower)
                        .upper(e.upper)
                        .witness(format_assignment(&e.witness)),
                    ReportRow::new(s, 0, &format!("quoted-claim:enclosure:{tag}"), claim, Verdict::from_bool(inside))
                        .kappa(kappa)
                        .lower(e.lower)
                        .upper(e.upper),
                ])
            }));
            for &n in &cfg.n {
                let (x1, cfg1) = (x.clone(), cfg.clone());
                cells.push(Box::new(move || {
                    let (x, cfg) = (&x1, &cfg1);
                    let variant = format!("obsdiam:h={h}");
                    let y = counterexample_yn(cfg.m, n as f64, cfg.r, h)?;
                    let pd = partial_diameter(&x.space, &x.mu, kappa, cfg.tol)?;
                    Ok(match od(ObsDiamQuery::plain(x, &y.space, kappa), opts(cfg))? {
                        Some(r) => vec![
                            ReportRow::new(s, n, &variant, r.value, Verdict::le(1.0, r.value, cfg.tol))
                                .kappa(kappa)
                                .lower(1.0)
                                .witness(format_assignment(&r.witness)),
                            ReportRow::new(s, n, &format!("embedding-bound:h={h}"), r.value, Verdict::le(pd, r.value, cfg.tol))
                                .kappa(kappa)
                                .lower(pd),
                        ],
                        None => vec![undecided(s, n, &variant).kappa(kappa)],
                    })
                }));
            }
        }
    }
    for &n in &cfg.n {
        let cfg = cfg.clone();
        cells.push(Box::new(move || {
            // (Y_n, -1) -> (R, 0): t in B_{n/2}(0) goes to the ray point at depth
            // 1 + t/n, on a ray mesh h/n so that images are mesh points
            let nf = n as f64;
            let radius = nf / 2.0;
            let eps = 1.0 / nf;
            let ray_h = cfg.h / nf;
            let y = counterexample_yn(cfg.m, nf, 2.0, ray_h)?;
            let dom = line_grid(radius, cfg.h)?;
            let centre = dom.basepoint() as i64;
            let shift = (1.0 / ray_h).round() as i64;
            let f: Vec<Option<usize>> = (0..dom.space.len() as i64)
                .map(|j| Some((cfg.m as i64 + shift + (j - centre)) as usize))
                .collect();
            let rep = pgh_check(&f, &dom, &y, radius, eps, cfg.tol)?;
            let uncovered = rep.uncovered.map(|u| format!(";uncovered={u}")).unwrap_or_default();
            Ok(vec![ReportRow::new(s, n, "pgh", rep.distortion, Verdict::from_bool(rep.pass()))
                .delta(eps)
                .upper(eps)
                .witness(format!("R={radius}{uncovered}"))])
        }));
    }
    Ok(cells)
}

/// Rows comparing the sequence values with the real-line enclosure: the
/// limit inequality holds, and the gap that makes it strict.
fn ray_scale_summary(cfg: &ScenarioConfig, rows: &[ReportRow]) -> Vec<ReportRow> {
    let s = cfg.scenario.as_str();
    let mut out = Vec::new();
    let fine = format!("h={}", cfg.h / 2.0);
    for &kappa in &cfg.kappas {
        let at = |prefix: &str| {
            rows.iter()
                .filter(move |r| r.kappa == Some(kappa) && r.variant.starts_with(prefix))
                .collect::<Vec<_>>()
        };
        let seq = at("obsdiam:");
        let enc = at(&format!("realline:{fine}"));
        if seq.is_empty() || enc.len() != 1 {
            continue;
        }
        if seq.iter().any(|r| r.verdict == Verdict::Indeterminate)
            || enc[0].verdict == Verdict::Indeterminate
        {
            out.push(undecided(s, 0, "quoted-claim:gap").kappa(kappa));
            continue;
        }
        let low = seq.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        let upper = enc[0].upper.unwrap_or(f64::NAN);
        out.push(
            ReportRow::new(s, 0, "lsc-window", low, Verdict::le(enc[0].lower.unwrap_or(f64::NAN), low, cfg.tol))
                .kappa(kappa)
                .lower(enc[0].lower.unwrap_or(f64::NAN)),
        );
        out.push(
            ReportRow::new(s, 0, "quoted-claim:gap", low - upper, Verdict::from_bool(low - upper > cfg.tol))
                .kappa(kappa)
                .lower(0.0)
                .witness(fine.clone()),
        );
    }
    out
}

/// Four points on a cycle, sides `1/2`, diagonals `1`, uniform weights.
pub fn cycle4() -> Result<FiniteMMSpace> {
    let space = FiniteMetricSpace::from_fn(4, "c", |i, j| {
        if i.abs_diff(j) == 2 {
            1.0
        } else {
            0.5
        }
    })?;
    Ok(FiniteMMSpace::uniform(space)?)
}

/// Star-tree point `(branch, step)` at `per` points per branch; step 0 is the
/// centre.
fn star_index(per: usize, branch: usize, step: usize) -> usize {
    if step == 0 {
        0
    } else {
        1 + branch * per + step - 1
    }
}

/// Maps between the star trees with `fine` and `coarse` points per branch:
/// rounding to the nearest coarse point, and the inclusion.
fn star_links(branches: usize, fine: usize, coarse: usize) -> (Vec<usize>, Vec<usize>) {
    let ratio = fine / coarse;
    let round = (0..1 + branches * fine)
        .map(|i| {
            if i == 0 {
                return 0;
            }
            let (b, j) = ((i - 1) / fine, (i - 1) % fine + 1);
            let c = (2 * j + ratio - 1) / (2 * ratio);
            star_index(coarse, b, c)
        })
        .collect();
    let incl = (0..1 + branches * coarse)
        .map(|i| {
            if i == 0 {
                return 0;
            }
            let (b, j) = ((i - 1) / coarse, (i - 1) % coarse + 1);
            star_index(fine, b, j * ratio)
        })
        .collect();
    (round, incl)
}

const STAR_BRANCHES: usize = 3;

fn finite_cat0_meshes(cfg: &ScenarioConfig) -> Vec<(u64, f64, usize)> {
    (0..3)
        .map(|i| {
            let h = cfg.h / f64::powi(2.0, i);
            (i as u64 + 1, h, (1.0 / h).round() as usize)
        })
        .collect()
}

fn finite_cat0_cells(cfg: &ScenarioConfig) -> Result<Vec<Cell>> {
    let s = cfg.scenario.as_str();
    let x = Arc::new(cycle4()?);
    let meshes = finite_cat0_meshes(cfg);
    let mut cells: Vec<Cell> = Vec::new();
    for &(n, _, per) in &meshes {
        for &kappa in &cfg.kappas {
            let (x, cfg) = (x.clone(), cfg.clone());
            cells.push(Box::new(move || {
                let y = star_tree(STAR_BRANCHES, per, 1.0)?;
                Ok(coincidence_audit(s, n, &x, &y, &[kappa], &cfg.deltas, n == 1, opts(&cfg))?)
            }));
        }
    }
    let (_, h0, coarse) = meshes[0];
    {
        let (x, cfg) = (x.clone(), cfg.clone());
        cells.push(Box::new(move || {
            let y = star_tree(STAR_BRANCHES, coarse, 1.0)?;
            let o = opts(&cfg);
            let w = x.mu.min_weight();
            let mut rows = Vec::new();
            for &d in cfg.deltas.iter().filter(|&&d| d < w) {
                let del = enumerate_family(&x, &y, d, FamilyKind::Lipschitz, None, o)?;
                let til = enumerate_family(&x, &y, d, FamilyKind::AlmostLipschitz, None, o)?;
                rows.push(
                    ReportRow::new(s, 1, "lip-equivalence", del.len() as f64, Verdict::from_bool(del.assignments() == til.assignments()))
                        .delta(d)
                        .upper(til.len() as f64),
                );
            }
            Ok(rows)
        }));
    }
    let (_, _, finest) = meshes[meshes.len() - 1];
    for &kappa in &cfg.kappas {
        let (x, cfg, meshes) = (x.clone(), cfg.clone(), meshes.clone());
        cells.push(Box::new(move || {
            let limit = star_tree(STAR_BRANCHES, finest, 1.0)?;
            let screens: Vec<(u64, FiniteMetricSpace, usize)> = meshes[..meshes.len() - 1]
                .iter()
                .map(|&(n, _, per)| Ok((n, star_tree(STAR_BRANCHES, per, 1.0)?, per)))
                .collect::<Result<_>>()?;
            let links: Vec<ScreenLink<'_>> = screens
                .iter()
                .map(|(n, y, per)| {
                    let (to_screen, from_screen) = star_links(STAR_BRANCHES, finest, *per);
                    ScreenLink {
                        n: *n,
                        screen: y,
                        to_screen,
                        from_screen,
                        mesh: 0.0,
                    }
                })
                .collect();
            let w = Window { tol: 4.0 * h0, limit_mesh: 0.0 };
            Ok(screen_sequence_audit(s, &x, &limit, &links, &[kappa], w, opts(&cfg))?)
        }));
    }
    Ok(cells)
}

/// `|plain_h - plain_{h/2}| <= 4h` between consecutive meshes.
fn cross_mesh_rows(cfg: &ScenarioConfig, rows: &[ReportRow]) -> Vec<ReportRow> {
    let s = cfg.scenario.as_str();
    let meshes = finite_cat0_meshes(cfg);
    let mut out = Vec::new();
    for &kappa in &cfg.kappas {
        let value = |n: u64| {
            rows.iter()
                .find(|r| r.n == n && r.kappa == Some(kappa) && r.variant == "plain")
                .map(|r| r.value)
        };
        for w in meshes.windows(2) {
            let (a, b) = (value(w[0].0), value(w[1].0));
            out.push(match (a, b) {
                (Some(a), Some(b)) => {
                    let diff = (a - b).abs();
                    ReportRow::new(s, w[1].0, "cross-mesh", diff, Verdict::le(diff, 4.0 * w[0].1, cfg.tol))
                        .kappa(kappa)
                        .upper(4.0 * w[0].1)
                }
                _ => undecided(s, w[1].0, "cross-mesh").kappa(kappa),
            });
        }
    }
    out
}

fn circle_cells(cfg: &ScenarioConfig) -> Result<Vec<Cell>> {
    let s = cfg.scenario.as_str();
    let mut cells: Vec<Cell> = Vec::new();
    for &kappa in &cfg.kappas {
        let cfg = cfg.clone();
        cells.push(Box::new(move || {
            let x = FiniteMMSpace::uniform(circle(cfg.m, 1.0)?)?;
            let limit = circle(cfg.k, 1.0)?;
            let mesh = |r: f64| 2.0 * PI * r / cfg.k as f64;
            let screens: Vec<(u64, f64, FiniteMetricSpace)> = cfg
                .n
                .iter()
                .map(|&n| {
                    let r = 1.0 + f64::powi(0.5, n as i32);
                    Ok((n, r, circle(cfg.k, r)?))
                })
                .collect::<Result<_>>()?;
            let id: Vec<usize> = (0..cfg.k).collect();
            let links: Vec<ScreenLink<'_>> = screens
                .iter()
                .map(|(n, r, y)| ScreenLink {
                    n: *n,
                    screen: y,
                    to_screen: id.clone(),
                    from_screen: id.clone(),
                    mesh: mesh(*r),
                })
                .collect();
            let w = Window { tol: 4.0 * mesh(1.0), limit_mesh: mesh(1.0) };
            Ok(screen_sequence_audit(s, &x, &limit, &links, &[kappa], w, opts(&cfg))?)
        }));
    }
    Ok(cells)
}

fn outcome_verdict<T>(o: &SearchOutcome<T>) -> Verdict {
    match o {
        SearchOutcome::Found(_) => Verdict::Holds,
        SearchOutcome::NotFound => Verdict::Fails,
        SearchOutcome::Indeterminate => Verdict::Indeterminate,
    }
}

/// Screen used by the box audit: the segment `[-1, 1]` at mesh `1/4`.
pub const BOX_SCREEN: (f64, f64) = (1.0, 0.25);

fn box_cells(cfg: &ScenarioConfig) -> Result<Vec<Cell>> {
    let s = cfg.scenario.as_str();
    let eps_list = if cfg.eps.is_empty() { vec![0.01] } else { cfg.eps.clone() };
    let mut cells: Vec<Cell> = Vec::new();
    for i in 0..cfg.instances {
        let cfg = cfg.clone();
        let eps = eps_list[i % eps_list.len()];
        cells.push(Box::new(move || {
            let n = i as u64;
            let seed = cfg.seed.wrapping_add(i as u64);
            let x = random(cfg.m, seed, true)?;
            let y = FiniteMMSpace::new(perturbed(&x.space, eps, seed ^ 0x5eed)?, x.mu.clone())?;
            let o = opts(&cfg);
            let tol = cfg.tol;
            let ids: Vec<usize> = (0..x.len()).collect();
            let fwd = PointMap::new(&x.space, &y.space, ids.clone())?;
            let bwd = PointMap::new(&y.space, &x.space, ids.clone())?;
            let (e_fwd, _) = mm_iso_epsilon(&fwd, &x.mu, &y.mu)?;
            let (e_bwd, _) = mm_iso_epsilon(&bwd, &y.mu, &x.mu)?;
            let bx = box_distance(&x, &y)?.value;
            let gh = gh_distance(&x.space, &y.space)?.value;
            let budget = 1_000_000;
            let conv = mm_iso_search(&x, &y, 3.0 * (bx + CERTIFICATE_SLACK), tol, budget)?;
            let approx = approx_map_search(&x.space, &y.space, 3.0 * (gh + CERTIFICATE_SLACK), tol, budget);
            let id_eps = fwd.distortion_on(&ids) + CERTIFICATE_SLACK;
            let id_ok = approx_map_check(&fwd, id_eps, 0.0).pass();
            let mut rows = vec![
                ReportRow::new(s, n, "mm-iso", e_fwd, Verdict::le(e_fwd, eps, tol))
                    .delta(eps)
                    .upper(eps),
                ReportRow::new(s, n, "box-3eps", bx, Verdict::le(bx, 3.0 * e_fwd, tol))
                    .delta(eps)
                    .upper(3.0 * e_fwd),
                ReportRow::new(s, n, "box-converse", 3.0 * (bx + CERTIFICATE_SLACK), outcome_verdict(&conv))
                    .delta(eps)
                    .witness(match &conv {
                        SearchOutcome::Found(w) => format_assignment(&w.assignment),
                        _ => String::new(),
                    }),
                ReportRow::new(s, n, "gh-approx", 3.0 * (gh + CERTIFICATE_SLACK), outcome_verdict(&approx))
                    .delta(eps)
                    .witness(match &approx {
                        SearchOutcome::Found(a) => format_assignment(a),
                        _ => String::new(),
                    }),
                ReportRow::new(s, n, "gh-converse", gh, Verdict::from_bool(id_ok && gh < 3.0 * id_eps))
                    .delta(eps)
                    .upper(3.0 * id_eps),
            ];
            let screen = line_grid(BOX_SCREEN.0, BOX_SCREEN.1)?.space;
            let links = [SpaceLink {
                n,
                space: &y,
                eps_to_limit: e_bwd,
                eps_from_limit: e_fwd,
            }];
            rows.extend(box_sequence_audit(s, &x, &links, &screen, &cfg.kappas, o)?);
            for r in rows.iter_mut().filter(|r| r.variant.starts_with("box:")) {
                r.witness = format!("eps={eps};{}", r.witness);
            }
            Ok(rows)
        }));
    }
    Ok(cells)
}

fn doubling_cells(cfg: &ScenarioConfig) -> Result<Vec<Cell>> {
    let s = cfg.scenario.as_str();
    let mut cells: Vec<Cell> = Vec::new();
    let lo = 4.min(cfg.m.max(2));
    for i in 0..cfg.instances {
        let cfg = cfg.clone();
        cells.push(Box::new(move || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            let m = rng.random_range(lo..=cfg.m.max(lo));
            let delta: f64 = rng.random_range(0.05..0.5);
            let x = grid_interval(m)?;
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(&mut rng);
            let mut keep: Vec<usize> = (0..m).collect();
            let mut dropped = Vec::new();
            for p in order {
                let rest: Vec<usize> = keep.iter().copied().filter(|&q| q != p).collect();
                if !rest.is_empty() && x.mu.mass(&rest) >= 1.0 - delta {
                    keep = rest;
                    dropped.push(p);
                }
            }
            dropped.sort_unstable();
            let g = nearest_gap_bound_check(&x, delta, &keep, cfg.tol)?;
            Ok(vec![ReportRow::new(s, i as u64, "gap-bound", g.gap, Verdict::le(g.gap, g.bound, cfg.tol))
                .delta(delta)
                .upper(g.bound)
                .witness(format!("m={m};dropped={}", format_assignment(&dropped)))])
        }));
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_links_round_and_include() {
        let (round, incl) = star_links(3, 4, 2);
        let fine = star_tree(3, 4, 1.0).unwrap();
        let coarse = star_tree(3, 2, 1.0).unwrap();
        let r = PointMap::new(&fine, &coarse, round).unwrap();
        let all: Vec<usize> = (0..fine.len()).collect();
        assert!(r.distortion_on(&all) <= 0.5 + 1e-12);
        let c = PointMap::new(&coarse, &fine, incl).unwrap();
        let all: Vec<usize> = (0..coarse.len()).collect();
        assert_eq!(c.distortion_on(&all), 0.0);
    }

    #[test]
    fn explicit_map_beats_the_quoted_value() {
        let x = counterexample_x(10).unwrap();
        let v = explicit_line_map_value(&x, 10, 0.25, 1e-9).unwrap();
        assert!((v - 4.0 / 9.0).abs() < 1e-12);
    }
}
