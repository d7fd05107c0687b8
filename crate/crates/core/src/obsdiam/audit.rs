//! Finite-scale audits of the limit inequalities between observable
//! diameters.
//!
//! Limits over `n` and `delta -> 0` cannot be evaluated from finitely many
//! terms. Each audit therefore emits two kinds of rows:
//!
//! * certified rows: inequalities that hold exactly for the finite instances
//!   at hand, with the error of the connecting maps made explicit. A `fails`
//!   verdict on such a row is a genuine counterexample (or a bug).
//! * window rows: the limit statement read over the supplied finite window
//!   (liminf and limsup become min and max), compared within a caller-chosen
//!   tolerance. Equalities that only hold for almost every `kappa` are not
//!   asserted near a breakpoint of the `kappa`-profile.

use alloc::format;
use alloc::vec::Vec;

use super::{obsdiam, ObsDiamQuery, ObsDiamResult, SearchOptions, Variant};
use crate::lipschitz::{enumerate_family, hausdorff_kyfan_families, FamilyKind, PointMap};
use crate::report::{format_assignment, ReportRow, Verdict};
use crate::space::{FiniteMMSpace, FiniteMetricSpace, ProbabilityWeights};
use crate::{Error, Result};

/// Largest support for which breakpoints are enumerated.
pub const BREAKPOINT_MAX_POINTS: usize = 24;

/// Slack added to map errors before they enter a certified bound. The bounds
/// use open neighbourhoods, so the error itself is not quite enough.
pub const CERTIFICATE_SLACK: f64 = 1e-6;

/// Possible jump points of every `kappa`-profile over `mu`: the values
/// `1 - mu(S)` in `(0, 1)` over subsets `S`. A push-forward's partial
/// diameter can only change where `1 - kappa` crosses the mass of a union of
/// fibres.
pub fn kappa_breakpoints(mu: &ProbabilityWeights) -> Result<Vec<f64>> {
    if mu.len() > BREAKPOINT_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "breakpoint enumeration",
            size: mu.len(),
            limit: BREAKPOINT_MAX_POINTS,
        });
    }
    let mut sums = alloc::vec![0.0];
    for &w in mu.as_slice() {
        let more: Vec<f64> = sums.iter().map(|s| s + w).collect();
        sums.extend(more);
        sums.sort_by(f64::total_cmp);
        sums.dedup_by(|a, b| libm::fabs(*a - *b) <= 1e-12);
    }
    let mut out: Vec<f64> = sums
        .into_iter()
        .map(|s| 1.0 - s)
        .filter(|&k| k > 1e-12 && k < 1.0 - 1e-12)
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

pub fn near_breakpoint(kappa: f64, breakpoints: &[f64], tol: f64) -> bool {
    breakpoints.iter().any(|&b| libm::fabs(kappa - b) <= tol)
}

/// Runs one query, mapping budget exhaustion to `None`.
fn cell(q: Result<ObsDiamQuery<'_>>, opts: SearchOptions) -> Result<Option<ObsDiamResult>> {
    match obsdiam(&q?, opts) {
        Ok(r) => Ok(Some(r)),
        Err(Error::BudgetExceeded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn indeterminate(scenario: &str, n: u64, variant: &str, kappa: f64) -> ReportRow {
    ReportRow::new(scenario, n, variant, f64::NAN, Verdict::Indeterminate).kappa(kappa)
}

/// Worst distortion of an assignment between two metric spaces.
fn map_distortion(src: &FiniteMetricSpace, dst: &FiniteMetricSpace, a: &[usize]) -> Result<f64> {
    let f = PointMap::new(src, dst, a.to_vec())?;
    let all: Vec<usize> = (0..src.len()).collect();
    Ok(f.distortion_on(&all))
}

/// One screen of a sequence with its connecting maps to the limit screen.
#[derive(Clone, Debug)]
pub struct ScreenLink<'a> {
    pub n: u64,
    pub screen: &'a FiniteMetricSpace,
    /// A map from the limit screen into this screen.
    pub to_screen: Vec<usize>,
    /// A map from this screen into the limit screen.
    pub from_screen: Vec<usize>,
    /// Mesh of the screen as a discretization, `0` for none.
    pub mesh: f64,
}

/// Tolerance of the window rows and the mesh of the limit screen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub tol: f64,
    pub limit_mesh: f64,
}

/// `ObsDiam^mesh` for a discretized screen, plain otherwise.
fn mesh_cell(
    x: &FiniteMMSpace,
    screen: &FiniteMetricSpace,
    kappa: f64,
    mesh: f64,
    opts: SearchOptions,
) -> Result<Option<ObsDiamResult>> {
    if mesh > 0.0 {
        cell(ObsDiamQuery::new(x, screen, kappa, mesh, Variant::Delta), opts)
    } else {
        cell(ObsDiamQuery::plain(x, screen, kappa), opts)
    }
}

/// Audits a screen sequence `Y_n -> Y` for a fixed `x`.
///
/// Certified rows, with `eta` the distortion of the connecting map plus
/// [`CERTIFICATE_SLACK`]:
///
/// * `bound:lsc`: `ObsDiam_Y <= ObsDiam^eta_{Y_n} + eta`, since composing with
///   `Y -> Y_n` turns 1-Lipschitz maps into maps of error `eta`, and fibres of
///   a set of diameter `D` have diameter at most `D + eta`;
/// * `bound:usc`: `ObsDiam_{Y_n} <= ObsDiam^eta_Y + eta`, symmetrically.
///
/// Window rows (`n = 0`): `window:min` and `window:max` compare the least and
/// largest values over the sequence with the limit value within `window.tol`,
/// skipping `kappa` near a breakpoint. A screen with a positive mesh `h`
/// stands for a continuum screen, so its value there is `ObsDiam^h` (grid
/// rounding of a 1-Lipschitz map has defect at most `h`), reported as a
/// `screen:mesh` row.
pub fn screen_sequence_audit(
    scenario: &str,
    x: &FiniteMMSpace,
    limit: &FiniteMetricSpace,
    links: &[ScreenLink<'_>],
    kappas: &[f64],
    window: Window,
    opts: SearchOptions,
) -> Result<Vec<ReportRow>> {
    let bps = kappa_breakpoints(&x.mu)?;
    let mesh_row = |n: u64, mesh: f64, kappa: f64, r: &Option<ObsDiamResult>| match r {
        Some(r) => ReportRow::new(scenario, n, "screen:mesh", r.value, Verdict::Holds)
            .kappa(kappa)
            .delta(mesh)
            .witness(format_assignment(&r.witness)),
        None => indeterminate(scenario, n, "screen:mesh", kappa).delta(mesh),
    };
    let mut rows = Vec::new();
    for &kappa in kappas {
        let base = cell(ObsDiamQuery::plain(x, limit, kappa), opts)?;
        match &base {
            Some(r) => rows.push(
                ReportRow::new(scenario, 0, "screen:limit", r.value, Verdict::Holds)
                    .kappa(kappa)
                    .witness(format_assignment(&r.witness)),
            ),
            None => rows.push(indeterminate(scenario, 0, "screen:limit", kappa)),
        }
        let base_w = if window.limit_mesh > 0.0 {
            let r = mesh_cell(x, limit, kappa, window.limit_mesh, opts)?;
            rows.push(mesh_row(0, window.limit_mesh, kappa, &r));
            r
        } else {
            base.clone()
        };
        let mut values: Vec<f64> = Vec::new();
        let mut window_complete = true;
        for link in links {
            let eta_to = map_distortion(limit, link.screen, &link.to_screen)? + CERTIFICATE_SLACK;
            let eta_from =
                map_distortion(link.screen, limit, &link.from_screen)? + CERTIFICATE_SLACK;
            let plain_n = cell(ObsDiamQuery::plain(x, link.screen, kappa), opts)?;
            rows.push(match &plain_n {
                Some(r) => ReportRow::new(scenario, link.n, "screen:plain", r.value, Verdict::Holds)
                    .kappa(kappa)
                    .witness(format_assignment(&r.witness)),
                None => indeterminate(scenario, link.n, "screen:plain", kappa),
            });
            let value_n = if link.mesh > 0.0 {
                let r = mesh_cell(x, link.screen, kappa, link.mesh, opts)?;
                rows.push(mesh_row(link.n, link.mesh, kappa, &r));
                r
            } else {
                plain_n.clone()
            };
            match value_n {
                Some(r) => values.push(r.value),
                None => window_complete = false,
            }
            let relaxed_n = cell(
                ObsDiamQuery::new(x, link.screen, kappa, eta_to, Variant::Delta),
                opts,
            )?;
            rows.push(match (&base, relaxed_n) {
                (Some(b), Some(r)) => {
                    let rhs = r.value + eta_to;
                    ReportRow::new(scenario, link.n, "bound:lsc", b.value, Verdict::le(b.value, rhs, opts.tol))
                        .kappa(kappa)
                        .delta(eta_to)
                        .upper(rhs)
                        .witness(format_assignment(&r.witness))
                }
                _ => indeterminate(scenario, link.n, "bound:lsc", kappa).delta(eta_to),
            });
            let relaxed_y = cell(
                ObsDiamQuery::new(x, limit, kappa, eta_from, Variant::Delta),
                opts,
            )?;
            rows.push(match (&plain_n, relaxed_y) {
                (Some(p), Some(r)) => {
                    let rhs = r.value + eta_from;
                    ReportRow::new(scenario, link.n, "bound:usc", p.value, Verdict::le(p.value, rhs, opts.tol))
                        .kappa(kappa)
                        .delta(eta_from)
                        .upper(rhs)
                        .witness(format_assignment(&r.witness))
                }
                _ => indeterminate(scenario, link.n, "bound:usc", kappa).delta(eta_from),
            });
        }
        if let (Some(b), true, false) = (&base_w, window_complete, values.is_empty()) {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let excluded = near_breakpoint(kappa, &bps, opts.tol.max(1e-9));
            for (name, v) in [("window:min", lo), ("window:max", hi)] {
                let verdict = if excluded {
                    Verdict::ExcludedNearBreakpoint
                } else {
                    Verdict::from_bool(libm::fabs(v - b.value) <= window.tol + opts.tol)
                };
                rows.push(
                    ReportRow::new(scenario, 0, name, v, verdict)
                        .kappa(kappa)
                        .lower(b.value - window.tol)
                        .upper(b.value + window.tol),
                );
            }
        }
    }
    Ok(rows)
}

/// One member of a sequence `X_n -> X` in the box topology, with the errors
/// of mm isomorphisms in both directions.
#[derive(Clone, Debug)]
pub struct SpaceLink<'a> {
    pub n: u64,
    pub space: &'a FiniteMMSpace,
    /// `eps` of an mm isomorphism `X_n -> X`.
    pub eps_to_limit: f64,
    /// `eps` of an mm isomorphism `X -> X_n`.
    pub eps_from_limit: f64,
}

/// Audits a sequence of mm spaces against a fixed screen.
///
/// With `e` an mm-isomorphism error plus [`CERTIFICATE_SLACK`], composing a
/// 1-Lipschitz map with the isomorphism yields a map of error `e` off a set of
/// mass `e`, and the Prokhorov bound moves mass by `e` and diameters by `2e`:
///
/// * `box:lower`: `ObsDiam_Y(X; -(kappa + e)) <= tilde^e_Y(X_n; -kappa) + 2e`;
/// * `box:upper`: `ObsDiam_Y(X_n; -(kappa + e)) <= tilde^e_Y(X; -kappa) + 2e`.
///
/// Rows whose shifted `kappa` leaves `(0, 1)` are indeterminate.
pub fn box_sequence_audit(
    scenario: &str,
    x: &FiniteMMSpace,
    links: &[SpaceLink<'_>],
    screen: &FiniteMetricSpace,
    kappas: &[f64],
    opts: SearchOptions,
) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for link in links {
        let sides = [
            ("box:lower", x, link.space, link.eps_to_limit),
            ("box:upper", link.space, x, link.eps_from_limit),
        ];
        for &kappa in kappas {
            for (name, lhs_space, rhs_space, eps) in sides {
                let e = eps + CERTIFICATE_SLACK;
                if kappa + e >= 1.0 {
                    rows.push(indeterminate(scenario, link.n, name, kappa).delta(e));
                    continue;
                }
                let lhs = cell(ObsDiamQuery::plain(lhs_space, screen, kappa + e), opts)?;
                let rhs = cell(
                    ObsDiamQuery::new(rhs_space, screen, kappa, e, Variant::TildeDelta),
                    opts,
                )?;
                rows.push(match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        let bound = r.value + 2.0 * e;
                        ReportRow::new(scenario, link.n, name, l.value, Verdict::le(l.value, bound, opts.tol))
                            .kappa(kappa)
                            .delta(e)
                            .upper(bound)
                            .witness(format_assignment(&l.witness))
                    }
                    _ => indeterminate(scenario, link.n, name, kappa).delta(e),
                });
            }
        }
    }
    Ok(rows)
}

/// Audits the relaxed families of one instance against the plain one.
///
/// For every `kappa` and `delta` in `schedule` (strictly decreasing):
///
/// * `chain`: `ObsDiam <= ObsDiam^delta <= tilde^delta` (certified);
/// * `delta-monotone`: both relaxed values do not increase as `delta`
///   decreases (certified, families shrink);
/// * `coincide`: `tilde^delta` at the last `delta` equals the plain value
///   within `tol` (window row, skipped near breakpoints);
/// * `coin-bound`, when `with_kyfan` is set: with `e` the Hausdorff-Ky Fan
///   distance of `Lip_1` and `tilde-Lip^delta` plus [`CERTIFICATE_SLACK`],
///   `tilde^delta(kappa) <= ObsDiam(kappa - e) + 2e` (certified; requires
///   enumerating both families).
#[allow(clippy::too_many_arguments)]
pub fn coincidence_audit(
    scenario: &str,
    n: u64,
    x: &FiniteMMSpace,
    y: &FiniteMetricSpace,
    kappas: &[f64],
    schedule: &[f64],
    with_kyfan: bool,
    opts: SearchOptions,
) -> Result<Vec<ReportRow>> {
    if schedule.is_empty()
        || schedule.iter().any(|&d| !(d > 0.0))
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParameter {
            name: "delta schedule",
            reason: "must be positive and strictly decreasing",
        });
    }
    let bps = kappa_breakpoints(&x.mu)?;
    let tol = opts.tol;
    let mut kf = Vec::new();
    if with_kyfan {
        let lip = enumerate_family(x, y, 0.0, FamilyKind::Lipschitz, None, opts)?;
        for &d in schedule {
            let tilde = enumerate_family(x, y, d, FamilyKind::AlmostLipschitz, None, opts)?;
            kf.push(hausdorff_kyfan_families(&lip, &tilde, &x.mu)?);
        }
    }
    let mut rows = Vec::new();
    for &kappa in kappas {
        let Some(plain) = cell(ObsDiamQuery::plain(x, y, kappa), opts)? else {
            rows.push(indeterminate(scenario, n, "chain", kappa));
            continue;
        };
        rows.push(
            ReportRow::new(scenario, n, "plain", plain.value, Verdict::Holds)
                .kappa(kappa)
                .witness(format_assignment(&plain.witness)),
        );
        let mut prev: Option<(f64, f64)> = None;
        let mut last_tilde = None;
        for (i, &d) in schedule.iter().enumerate() {
            let dv = cell(ObsDiamQuery::new(x, y, kappa, d, Variant::Delta), opts)?;
            let tv = cell(ObsDiamQuery::new(x, y, kappa, d, Variant::TildeDelta), opts)?;
            let (Some(dv), Some(tv)) = (dv, tv) else {
                rows.push(indeterminate(scenario, n, "chain", kappa).delta(d));
                prev = None;
                last_tilde = None;
                continue;
            };
            rows.push(
                ReportRow::new(scenario, n, "delta", dv.value, Verdict::Holds)
                    .kappa(kappa)
                    .delta(d)
                    .witness(format_assignment(&dv.witness)),
            );
            rows.push(
                ReportRow::new(scenario, n, "tilde_delta", tv.value, Verdict::Holds)
                    .kappa(kappa)
                    .delta(d)
                    .witness(format_assignment(&tv.witness)),
            );
            let chain = plain.value <= dv.value + tol && dv.value <= tv.value + tol;
            rows.push(
                ReportRow::new(scenario, n, "chain", dv.value, Verdict::from_bool(chain))
                    .kappa(kappa)
                    .delta(d)
                    .lower(plain.value)
                    .upper(tv.value),
            );
            if let Some((pd, pt)) = prev {
                let ok = dv.value <= pd + tol && tv.value <= pt + tol;
                rows.push(
                    ReportRow::new(scenario, n, "delta-monotone", tv.value, Verdict::from_bool(ok))
                        .kappa(kappa)
                        .delta(d)
                        .upper(pt),
                );
            }
            prev = Some((dv.value, tv.value));
            last_tilde = Some((d, tv.value));
            if with_kyfan {
                let e = kf[i] + CERTIFICATE_SLACK;
                let row = if kappa - e > 0.0 {
                    match cell(ObsDiamQuery::plain(x, y, kappa - e), opts)? {
                        Some(p) => {
                            let bound = p.value + 2.0 * e;
                            ReportRow::new(scenario, n, "coin-bound", tv.value, Verdict::le(tv.value, bound, tol))
                                .kappa(kappa)
                                .delta(d)
                                .upper(bound)
                                .witness(format!("hd_kf={}", kf[i]))
                        }
                        None => indeterminate(scenario, n, "coin-bound", kappa).delta(d),
                    }
                } else {
                    indeterminate(scenario, n, "coin-bound", kappa).delta(d)
                };
                rows.push(row);
            }
        }
        if let Some((d, t)) = last_tilde {
            let verdict = if near_breakpoint(kappa, &bps, tol.max(1e-9)) {
                Verdict::ExcludedNearBreakpoint
            } else {
                Verdict::from_bool(libm::fabs(t - plain.value) <= tol)
            };
            rows.push(
                ReportRow::new(scenario, n, "coincide", t, verdict)
                    .kappa(kappa)
                    .delta(d)
                    .lower(plain.value)
                    .upper(plain.value),
            );
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle, grid_interval, perturbed, star_tree};

    #[test]
    fn breakpoints_of_uniform_weights() {
        let mu = ProbabilityWeights::uniform(4).unwrap();
        let b = kappa_breakpoints(&mu).unwrap();
        assert_eq!(b.len(), 3);
        for (v, e) in b.iter().zip([0.25, 0.5, 0.75]) {
            assert!((v - e).abs() < 1e-12);
        }
        assert!(near_breakpoint(0.5, &b, 1e-9));
        assert!(!near_breakpoint(0.4, &b, 1e-9));
    }

    #[test]
    fn constant_screen_sequence_holds_with_equality() {
        let x = grid_interval(3).unwrap();
        let y = circle(6, 1.0).unwrap();
        let id: Vec<usize> = (0..6).collect();
        let links = [1, 2].map(|n| ScreenLink {
            n,
            screen: &y,
            to_screen: id.clone(),
            from_screen: id.clone(),
            mesh: 0.0,
        });
        let w = Window { tol: 0.0, limit_mesh: 0.0 };
        let rows = screen_sequence_audit("t", &x, &y, &links, &[0.2, 0.5], w, SearchOptions::default())
            .unwrap();
        assert!(rows.iter().all(|r| r.verdict != Verdict::Fails));
        assert!(rows.iter().any(|r| r.variant == "window:min" && r.verdict == Verdict::Holds));
        assert!(!rows.iter().any(|r| r.variant == "screen:mesh"));
    }

    #[test]
    fn box_audit_on_perturbed_copy() {
        let x = grid_interval(3).unwrap();
        let xn = FiniteMMSpace::new(perturbed(&x.space, 0.01, 4).unwrap(), x.mu.clone()).unwrap();
        let screen = grid_interval(4).unwrap().space;
        let links = [SpaceLink {
            n: 1,
            space: &xn,
            eps_to_limit: 0.01,
            eps_from_limit: 0.01,
        }];
        let rows = box_sequence_audit("t", &x, &links, &screen, &[0.2, 0.5], SearchOptions::default())
            .unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.verdict == Verdict::Holds));
    }

    #[test]
    fn coincidence_on_a_star_tree() {
        let x = grid_interval(2).unwrap();
        let y = star_tree(3, 2, 1.0).unwrap();
        let rows = coincidence_audit(
            "t",
            1,
            &x,
            &y,
            &[0.3, 0.5],
            &[0.1, 0.01],
            true,
            SearchOptions::default(),
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.verdict != Verdict::Fails));
        let c: Vec<&ReportRow> = rows.iter().filter(|r| r.variant == "coincide").collect();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].verdict, Verdict::Holds);
        assert_eq!(c[1].verdict, Verdict::ExcludedNearBreakpoint);
    }
}
