//! Acceptance suite. Prints one pass/fail line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mmspace::{run_scenario, Scenario, ScenarioConfig};
use mmspace_core::generators::{countable_screen, random};
use mmspace_core::lipschitz::{enumerate_family, FamilyKind, SearchOptions};
use mmspace_core::metrics::{ky_fan, partial_diameter, partial_diameter_oracle, prokhorov, prokhorov_oracle};
use mmspace_core::obsdiam::{obsdiam, obsdiam_exhaustive, ObsDiamQuery, Variant};
use mmspace_core::report::{ExperimentReport, ReportRow, Verdict};
use mmspace_core::{pushforward, FiniteMetricSpace, DEFAULT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const KAPPAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const DELTAS: [f64; 3] = [0.05, 0.1, 0.2];

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("runtime {t:.2?} exceeds {limit:?}"))
}

fn screen(m: usize, seed: u64) -> FiniteMetricSpace {
    random(m, seed, false).expect("valid generator input").space
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    for seed in 0..200u64 {
        let n = 1 + (seed as usize % 12);
        let x = random(n, seed, true).map_err(|e| e.to_string())?;
        for k in KAPPAS {
            let a = partial_diameter(&x.space, &x.mu, k, DEFAULT_TOL).map_err(|e| e.to_string())?;
            let b = partial_diameter_oracle(&x.space, &x.mu, k, DEFAULT_TOL).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("seed {seed} n {n} kappa {k}: {a} != oracle {b}"))?;
            checks += 1;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{checks} exact matches in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    for seed in 0..200u64 {
        let n = 1 + (seed as usize % 10);
        let x = random(n, seed, true).map_err(|e| e.to_string())?;
        let nu = random(n, seed ^ 0xabc, true).map_err(|e| e.to_string())?.mu;
        let a = prokhorov(&x.space, &x.mu, &nu).map_err(|e| e.to_string())?;
        let b = prokhorov_oracle(&x.space, &x.mu, &nu).map_err(|e| e.to_string())?;
        ensure((a - b).abs() <= 1e-9, || format!("seed {seed}: {a} vs oracle {b}"))?;
    }
    for seed in 0..100u64 {
        let n = 1 + (seed as usize % 10);
        let x = random(n, seed + 1000, true).map_err(|e| e.to_string())?;
        let nu = random(n, seed ^ 0x51, true).map_err(|e| e.to_string())?.mu;
        let rho = random(n, seed ^ 0x77, true).map_err(|e| e.to_string())?.mu;
        let p = |a, b| prokhorov(&x.space, a, b).map_err(|e| e.to_string());
        let (ab, ba) = (p(&x.mu, &nu)?, p(&nu, &x.mu)?);
        let (ac, cb) = (p(&x.mu, &rho)?, p(&rho, &nu)?);
        ensure((ab - ba).abs() <= 1e-9, || format!("triple {seed}: asymmetric {ab} {ba}"))?;
        ensure(ab <= ac + cb + 1e-9, || format!("triple {seed}: triangle {ab} > {ac} + {cb}"))?;
    }
    Ok("200 oracle matches, 100 triples symmetric and triangular".into())
}

fn criterion_3() -> Outcome {
    let mut checks = 0;
    for seed in 0..100u64 {
        let n = 1 + (seed as usize % 5);
        let m = 1 + ((seed as usize / 5) % 5);
        let x = random(n, seed, true).map_err(|e| e.to_string())?;
        let y = screen(m, seed ^ 0x3c3c);
        for k in KAPPAS {
            for v in [Variant::Plain, Variant::Delta, Variant::TildeDelta] {
                let q = ObsDiamQuery::new(&x, &y, k, 0.1, v).map_err(|e| e.to_string())?;
                let a = obsdiam(&q, opts()).map_err(|e| e.to_string())?;
                let b = obsdiam_exhaustive(&q, opts()).map_err(|e| e.to_string())?;
                ensure(a.value == b.value, || {
                    format!("seed {seed} {v:?} kappa {k}: {} != {}", a.value, b.value)
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} exact matches"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in 0..500 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=6);
        let x = random(n, rng.random(), true).map_err(|e| e.to_string())?;
        let y = screen(m, rng.random());
        let f: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
        let g: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
        let pf = pushforward(&f, &x.mu, m).map_err(|e| e.to_string())?;
        let pg = pushforward(&g, &x.mu, m).map_err(|e| e.to_string())?;
        let dp = prokhorov(&y, &pf, &pg).map_err(|e| e.to_string())?;
        let kf = ky_fan(&y, &x.mu, &f, &g).map_err(|e| e.to_string())?;
        ensure(dp <= kf + 1e-12, || format!("pair {t}: d_P {dp} > d_KF {kf}"))?;
    }
    Ok("500 pairs, 0 violations".into())
}

fn criterion_5() -> Outcome {
    let mut checks = 0;
    for seed in 0..100u64 {
        let n = 1 + (seed as usize % 4);
        let m = 1 + ((seed as usize / 4) % 5);
        let x = random(n, seed + 500, true).map_err(|e| e.to_string())?;
        let y = screen(m, seed ^ 0x5a5a);
        let lip = enumerate_family(&x, &y, 0.0, FamilyKind::Lipschitz, None, opts()).map_err(|e| e.to_string())?;
        for d in DELTAS {
            let del = enumerate_family(&x, &y, d, FamilyKind::Lipschitz, None, opts()).map_err(|e| e.to_string())?;
            let til = enumerate_family(&x, &y, d, FamilyKind::AlmostLipschitz, None, opts()).map_err(|e| e.to_string())?;
            ensure(lip.assignments().iter().all(|a| del.contains(a)), || format!("seed {seed} delta {d}: Lip not in Lip^delta"))?;
            ensure(del.assignments().iter().all(|a| til.contains(a)), || format!("seed {seed} delta {d}: Lip^delta not in tilde"))?;
            let mut prev = [f64::INFINITY; 3];
            for k in KAPPAS {
                let mut vals = [0.0; 3];
                for (i, v) in [Variant::Plain, Variant::Delta, Variant::TildeDelta].into_iter().enumerate() {
                    let q = ObsDiamQuery::new(&x, &y, k, d, v).map_err(|e| e.to_string())?;
                    vals[i] = obsdiam(&q, opts()).map_err(|e| e.to_string())?.value;
                }
                ensure(vals[0] <= vals[1] + DEFAULT_TOL && vals[1] <= vals[2] + DEFAULT_TOL, || {
                    format!("seed {seed} delta {d} kappa {k}: chain {vals:?}")
                })?;
                for i in 0..3 {
                    ensure(vals[i] <= prev[i] + DEFAULT_TOL, || format!("seed {seed} delta {d} kappa {k}: not monotone"))?;
                    prev[i] = vals[i];
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (instance, delta, kappa) cells, 0 violations"))
}

fn scenario(s: Scenario) -> Result<ExperimentReport, String> {
    let cfg = ScenarioConfig::preset(s);
    run_scenario(&cfg).map_err(|e| e.to_string())
}

fn rows<'a>(r: &'a ExperimentReport, variant: &str) -> Vec<&'a ReportRow> {
    r.rows.iter().filter(|row| row.variant == variant).collect()
}

fn single<'a>(r: &'a ExperimentReport, variant: &str) -> Result<&'a ReportRow, String> {
    let v = rows(r, variant);
    match v.as_slice() {
        [one] => Ok(one),
        _ => Err(format!("expected one {variant} row, found {}", v.len())),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (x, y) = countable_screen(10).map_err(|e| e.to_string())?;
    let lip = enumerate_family(&x, &y, 0.0, FamilyKind::Lipschitz, None, opts()).map_err(|e| e.to_string())?;
    let constants: Vec<Vec<usize>> = (0..=10).map(|i| vec![i, i]).collect();
    ensure(lip.assignments() == constants.as_slice(), || "Lip_1 is not the 11 constant maps".into())?;
    let r = scenario(Scenario::CountableScreen)?;
    let hd = single(&r, "hd-kf")?;
    ensure(hd.value >= 0.5, || format!("Hd_KF {} < 0.5", hd.value))?;
    let plain = single(&r, "plain")?;
    ensure(plain.value == 0.0, || format!("plain {} != 0", plain.value))?;
    let tilde = single(&r, "tilde_delta")?;
    within(start, Duration::from_secs(5))?;
    ensure((tilde.value - 1.1).abs() <= 1e-9, || {
        format!(
            "tilde-delta value {} != 1.1 (x0->y5 has defect 0.2 <= delta, so the supremum is 1 + 1/5); \
             Lip_1 = 11 constants, Hd_KF = {}, plain = 0 hold",
            tilde.value, hd.value
        )
    })?;
    Ok(format!("Hd_KF {}, plain 0, tilde-delta {}", hd.value, tilde.value))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let r = scenario(Scenario::RayScale)?;
    let pd = single(&r, "partial-diameter")?;
    ensure(pd.value >= 1.0, || format!("partial diameter {} < 1", pd.value))?;
    let seq = rows(&r, "obsdiam:h=0.25");
    let ns: Vec<u64> = seq.iter().map(|row| row.n).collect();
    ensure(ns == [1, 2, 4, 8], || format!("obsdiam rows for n = {ns:?}"))?;
    for row in &seq {
        ensure(row.value >= 1.0, || format!("n {}: ObsDiam_Yn {} < 1", row.n, row.value))?;
    }
    let enc = single(&r, "realline:h=0.25")?;
    let claim = single(&r, "quoted-claim:enclosure:h=0.25")?;
    ensure(matches!(claim.verdict, Verdict::Holds | Verdict::Fails), || "quoted claim not decided".into())?;
    within(start, Duration::from_secs(300))?;
    let flag = if claim.verdict == Verdict::Holds { "agreement" } else { "discrepancy" };
    Ok(format!(
        "ObsDiam_Yn >= 1 for n in {{1,2,4,8}}; real-line enclosure [{}, {}] vs quoted 0.125 flagged as {flag}",
        enc.lower.unwrap_or(f64::NAN),
        enc.upper.unwrap_or(f64::NAN)
    ))
}

fn no_failures(r: &ExperimentReport) -> Result<(), String> {
    let bad: Vec<String> = r
        .rows
        .iter()
        .filter(|row| matches!(row.verdict, Verdict::Fails | Verdict::Indeterminate))
        .map(|row| format!("{} n={} {:?}", row.variant, row.n, row.verdict))
        .collect();
    ensure(bad.is_empty(), || format!("{} bad rows, first {}", bad.len(), bad[0]))
}

fn criterion_8() -> Outcome {
    let r = scenario(Scenario::BoxPerturbation)?;
    no_failures(&r)?;
    let box3 = rows(&r, "box-3eps").len();
    ensure(box3 == 50, || format!("{box3} box-3eps rows"))?;
    for v in ["mm-iso", "box-converse", "gh-approx", "gh-converse"] {
        ensure(rows(&r, v).len() == 50, || format!("missing {v} rows"))?;
    }
    Ok(format!("50 instances, {} rows, 0 violations", r.rows.len()))
}

fn criterion_9() -> Outcome {
    let r = scenario(Scenario::DoublingGap)?;
    no_failures(&r)?;
    let c = rows(&r, "gap-bound").len();
    ensure(c == 100, || format!("{c} gap-bound rows"))?;
    Ok("100 triples, 0 violations".into())
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let cfg = ScenarioConfig::preset(Scenario::FiniteCat0);
    ensure(cfg.h == 0.25, || format!("base mesh {}", cfg.h))?;
    let r = run_scenario(&cfg).map_err(|e| e.to_string())?;
    no_failures(&r)?;
    let mono = rows(&r, "delta-monotone").len();
    let coincide = rows(&r, "coincide");
    let excluded = coincide.iter().filter(|row| row.verdict == Verdict::ExcludedNearBreakpoint).count();
    for row in &coincide {
        ensure(row.delta == Some(0.001), || format!("coincide row at delta {:?}", row.delta))?;
        if row.verdict == Verdict::Holds {
            let plain = row.lower.unwrap_or(f64::NAN);
            ensure((row.value - plain).abs() <= 1e-6, || format!("{} vs plain {plain}", row.value))?;
        }
    }
    let cross = rows(&r, "cross-mesh").len();
    ensure(mono > 0 && !coincide.is_empty() && cross > 0, || "missing rows".into())?;
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{mono} monotone rows, {} equalities ({excluded} excluded near breakpoints), {cross} cross-mesh rows",
        coincide.len() - excluded
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (i, f) in criteria {
        match f() {
            Ok(msg) => println!("criterion {i}: PASS {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {i}: FAIL {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
