use mmspace_core::coupling::{box_distance, gh_distance, gh_distance_oracle};
use mmspace_core::generators::{perturbed, random};
use mmspace_core::lipschitz::{
    enumerate_family, enumerate_family_unpruned, FamilyKind, RangeLimit, SearchOptions,
};
use mmspace_core::metrics::{
    ky_fan, partial_diameter, partial_diameter_oracle, prokhorov, prokhorov_oracle,
};
use mmspace_core::obsdiam::{obsdiam, obsdiam_exhaustive, ObsDiamQuery, Variant};
use mmspace_core::{pushforward, FiniteMMSpace, FiniteMetricSpace};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn kappa() -> impl Strategy<Value = f64> {
    (1u32..10).prop_map(|k| k as f64 / 10.0)
}

fn screen(n: usize, seed: u64) -> FiniteMetricSpace {
    random(n, seed, false).unwrap().space
}

fn perm(n: usize, seed: u64) -> Vec<usize> {
    // a seeded Fisher-Yates shuffle without pulling in rand here
    let mut p: Vec<usize> = (0..n).collect();
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = (s >> 33) as usize % (i + 1);
        p.swap(i, j);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_diameter_matches_oracle(n in 1usize..10, seed in any::<u64>(), k in kappa()) {
        let x = random(n, seed, true).unwrap();
        let a = partial_diameter(&x.space, &x.mu, k, TOL).unwrap();
        let b = partial_diameter_oracle(&x.space, &x.mu, k, TOL).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn prokhorov_matches_oracle_and_is_a_metric(n in 1usize..8, seed in any::<u64>()) {
        let x = random(n, seed, true).unwrap();
        let nu = random(n, seed ^ 0x9e37, true).unwrap().mu;
        let rho = random(n, seed ^ 0x7f4a, true).unwrap().mu;
        let a = prokhorov(&x.space, &x.mu, &nu).unwrap();
        prop_assert!((a - prokhorov_oracle(&x.space, &x.mu, &nu).unwrap()).abs() < 1e-9);
        prop_assert!((a - prokhorov(&x.space, &nu, &x.mu).unwrap()).abs() < 1e-12);
        let ac = prokhorov(&x.space, &x.mu, &rho).unwrap();
        let cb = prokhorov(&x.space, &rho, &nu).unwrap();
        prop_assert!(a <= ac + cb + 1e-9);
    }

    #[test]
    fn prokhorov_below_ky_fan(n in 1usize..7, m in 1usize..6, seed in any::<u64>()) {
        let x = random(n, seed, true).unwrap();
        let y = screen(m, seed ^ 1);
        let f = perm(n, seed).iter().map(|&i| i % m).collect::<Vec<_>>();
        let g = perm(n, seed ^ 5).iter().map(|&i| (i * 7 + 3) % m).collect::<Vec<_>>();
        let pf = pushforward(&f, &x.mu, m).unwrap();
        let pg = pushforward(&g, &x.mu, m).unwrap();
        let dp = prokhorov(&y, &pf, &pg).unwrap();
        let kf = ky_fan(&y, &x.mu, &f, &g).unwrap();
        prop_assert!(dp <= kf + 1e-12);
        prop_assert_eq!(ky_fan(&y, &x.mu, &f, &f).unwrap(), 0.0);
        prop_assert_eq!(kf, ky_fan(&y, &x.mu, &g, &f).unwrap());
    }

    #[test]
    fn obsdiam_matches_exhaustive(
        n in 1usize..5, m in 1usize..5, seed in any::<u64>(), k in kappa(),
        d in prop::sample::select(vec![0.05, 0.1, 0.2]),
        v in prop::sample::select(vec![Variant::Plain, Variant::Delta, Variant::TildeDelta]),
    ) {
        let x = random(n, seed, true).unwrap();
        let y = screen(m, seed.wrapping_add(17));
        let q = ObsDiamQuery::new(&x, &y, k, d, v).unwrap();
        let a = obsdiam(&q, opts()).unwrap();
        let b = obsdiam_exhaustive(&q, opts()).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn families_match_unpruned(
        n in 1usize..5, m in 1usize..5, seed in any::<u64>(),
        d in prop::sample::select(vec![0.0, 0.05, 0.1, 0.2]),
        kind in prop::sample::select(vec![FamilyKind::Lipschitz, FamilyKind::AlmostLipschitz]),
    ) {
        let x = random(n, seed, true).unwrap();
        let y = screen(m, seed ^ 99);
        let a = enumerate_family(&x, &y, d, kind, None, opts()).unwrap();
        let b = enumerate_family_unpruned(&x, &y, d, kind, None, opts()).unwrap();
        prop_assert_eq!(a.assignments(), b.assignments());
    }

    #[test]
    fn inclusion_chain_and_kappa_monotone(
        n in 1usize..5, m in 1usize..6, seed in any::<u64>(),
        d in prop::sample::select(vec![0.05, 0.1, 0.2]),
    ) {
        let x = random(n, seed, true).unwrap();
        let y = screen(m, seed ^ 3);
        let lip = enumerate_family(&x, &y, 0.0, FamilyKind::Lipschitz, None, opts()).unwrap();
        let del = enumerate_family(&x, &y, d, FamilyKind::Lipschitz, None, opts()).unwrap();
        let til = enumerate_family(&x, &y, d, FamilyKind::AlmostLipschitz, None, opts()).unwrap();
        prop_assert!(lip.assignments().iter().all(|a| del.contains(a)));
        prop_assert!(del.assignments().iter().all(|a| til.contains(a)));
        let mut prev = [f64::INFINITY; 3];
        for k in 1..10 {
            let k = k as f64 / 10.0;
            let vals: Vec<f64> = [Variant::Plain, Variant::Delta, Variant::TildeDelta]
                .iter()
                .map(|&v| obsdiam(&ObsDiamQuery::new(&x, &y, k, d, v).unwrap(), opts()).unwrap().value)
                .collect();
            prop_assert!(vals[0] <= vals[1] + TOL && vals[1] <= vals[2] + TOL);
            for i in 0..3 {
                prop_assert!(vals[i] <= prev[i] + TOL);
                prev[i] = vals[i];
            }
        }
    }

    #[test]
    fn small_delta_families_coincide(n in 1usize..5, m in 1usize..5, seed in any::<u64>()) {
        let x = random(n, seed, true).unwrap();
        let y = screen(m, seed ^ 11);
        let d = 0.9 * x.mu.min_weight();
        let del = enumerate_family(&x, &y, d, FamilyKind::Lipschitz, None, opts()).unwrap();
        let til = enumerate_family(&x, &y, d, FamilyKind::AlmostLipschitz, None, opts()).unwrap();
        prop_assert_eq!(del.assignments(), til.assignments());
    }

    #[test]
    fn obsdiam_relabel_invariant(n in 1usize..5, m in 1usize..5, seed in any::<u64>(), k in kappa()) {
        let x = random(n, seed, true).unwrap();
        let y = screen(m, seed ^ 23);
        let px = x.permuted(&perm(n, seed)).unwrap();
        let py = y.permuted(&perm(m, seed ^ 1)).unwrap();
        let a = obsdiam(&ObsDiamQuery::plain(&x, &y, k).unwrap(), opts()).unwrap().value;
        let b = obsdiam(&ObsDiamQuery::plain(&px, &py, k).unwrap(), opts()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn range_monotone(n in 1usize..4, m in 2usize..6, seed in any::<u64>(), k in kappa(), o in 0usize..6) {
        let x = random(n, seed, true).unwrap();
        let y = screen(m, seed ^ 41);
        let o = o % m;
        let mut prev = 0.0;
        for r in [0.3, 0.6, 1.0, 2.0] {
            let q = ObsDiamQuery::plain(&x, &y, k).unwrap().with_range(RangeLimit { basepoint: o, radius: r }).unwrap();
            let v = obsdiam(&q, opts()).map(|r| r.value).unwrap_or(0.0);
            prop_assert!(v + TOL >= prev);
            prev = v;
        }
        let full = obsdiam(&ObsDiamQuery::plain(&x, &y, k).unwrap(), opts()).unwrap().value;
        prop_assert!(prev <= full + TOL);
    }

    #[test]
    fn gh_matches_oracle(n in 1usize..4, m in 1usize..4, seed in any::<u64>()) {
        let x = screen(n, seed);
        let y = screen(m, seed ^ 77);
        let a = gh_distance(&x, &y).unwrap().value;
        prop_assert!((a - gh_distance_oracle(&x, &y).unwrap()).abs() < 1e-9);
        let b = gh_distance(&x.permuted(&perm(n, seed)).unwrap(), &y).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn box_relabel_invariant_and_perturbation_bound(n in 1usize..5, seed in any::<u64>()) {
        let x = random(n, seed, true).unwrap();
        let y = FiniteMMSpace::new(perturbed(&x.space, 0.05, seed).unwrap(), x.mu.clone()).unwrap();
        let a = box_distance(&x, &y).unwrap().value;
        prop_assert!(a <= 0.15 + 1e-12);
        let b = box_distance(&x.permuted(&perm(n, seed ^ 2)).unwrap(), &y).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }
}
