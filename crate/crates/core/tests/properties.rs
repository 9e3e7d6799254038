use collision::bounds::{aggregate_subgamma, subgamma_tail, SubGammaParams, TailEnvelope};
use collision::distribution::{make_pmf, sample_histogram, SampleSeed};
use collision::estimator::{
    centered_decomposition, estimate_from_histogram, estimate_pairwise, uniformity_test, SampleHistogram,
};
use collision::harness::{wilson_interval, Z95};
use collision::moments::{
    aux_g, aux_g_argmax, even_multinomial_sum, lambert_w, latala_t, rademacher_moment_ceiling,
    rademacher_moment_exact, AuxFunctionParams, MomentTable, LATALA_DEFAULT_BRACKET,
};
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 1..40).prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-6)
}

fn symbols() -> impl Strategy<Value = Vec<u8>> {
    (1u8..30).prop_flat_map(|k| prop::collection::vec(0..k, 2..300))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairwise_equals_histogram(sample in symbols()) {
        let a = estimate_pairwise(&sample).unwrap();
        let b = estimate_from_histogram(&SampleHistogram::from_symbols(&sample).unwrap()).unwrap();
        prop_assert_eq!(a.collision_pairs, b.collision_pairs);
        prop_assert_eq!(a.q_hat, b.q_hat);
    }

    #[test]
    fn q_hat_lies_in_unit_interval(sample in symbols()) {
        let q = estimate_pairwise(&sample).unwrap().q_hat;
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn decision_is_permutation_invariant(
        (sample, perm) in symbols().prop_flat_map(|s| { let v = s.clone(); (Just(s), Just(v).prop_shuffle()) }),
        eps in 0.05f64..1.0,
    ) {
        let a = uniformity_test(&SampleHistogram::from_symbols(&sample).unwrap(), 30, eps).unwrap();
        let b = uniformity_test(&SampleHistogram::from_symbols(&perm).unwrap(), 30, eps).unwrap();
        prop_assert_eq!(a.decision, b.decision);
        prop_assert_eq!(a.q_hat, b.q_hat);
    }

    #[test]
    fn histogram_counts_sum_to_n(w in weights(), n in 2u64..500, seed in any::<u64>()) {
        let pmf = make_pmf(&w).unwrap();
        let h = sample_histogram(&pmf, n, SampleSeed::new(seed, 0)).unwrap();
        prop_assert_eq!(h.counts().iter().sum::<u64>(), n);
        prop_assert_eq!(h.counts().len(), pmf.m());
        for (c, p) in h.counts().iter().zip(pmf.probs()) {
            if *p == 0.0 { prop_assert_eq!(*c, 0); }
        }
    }

    #[test]
    fn collision_probability_range(w in weights()) {
        let pmf = make_pmf(&w).unwrap();
        let q = pmf.collision_probability();
        prop_assert!(q >= 1.0 / pmf.m() as f64 * (1.0 - 1e-12));
        prop_assert!(q <= 1.0 + 1e-12);
        prop_assert!(pmf.power_sum(3) <= pmf.max_prob() * q * (1.0 + 1e-12));
        prop_assert!(pmf.max_prob() <= q.sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn decomposition_recombines(n in 0u64..200, frac in 0.0f64..=1.0, p in 0.0f64..=1.0) {
        let s = (frac * n as f64).floor() as u64;
        let d = centered_decomposition(s, n, p).unwrap();
        prop_assert!((d.lhs - d.recombine(n, p)).abs() <= 1e-9 * d.lhs.abs().max(1.0));
    }

    #[test]
    fn aggregation_is_commutative_and_associative(
        parts in prop::collection::vec((0.0f64..5.0, 0.0f64..2.0), 1..8),
        rot in 0usize..8,
    ) {
        let comps: Vec<SubGammaParams> = parts.iter().map(|&(v, b)| SubGammaParams::new(v, b).unwrap()).collect();
        let whole = aggregate_subgamma(&comps).unwrap();
        let mut rotated = comps.clone();
        rotated.rotate_left(rot % comps.len());
        let r = aggregate_subgamma(&rotated).unwrap();
        prop_assert!((whole.v2 - r.v2).abs() <= 1e-12 * whole.v2.max(1.0));
        prop_assert_eq!(whole.b, r.b);
        let mid = comps.len() / 2;
        if mid > 0 {
            let left = aggregate_subgamma(&comps[..mid]).unwrap();
            let right = aggregate_subgamma(&comps[mid..]).unwrap();
            let nested = aggregate_subgamma(&[left, right]).unwrap();
            prop_assert!((whole.v2 - nested.v2).abs() <= 1e-12 * whole.v2.max(1.0));
            prop_assert_eq!(whole.b, nested.b);
        }
    }

    #[test]
    fn subgamma_tail_in_range_and_monotone(v2 in 1e-6f64..10.0, b in 0.0f64..3.0, t in 0.0f64..50.0, dt in 0.0f64..5.0) {
        let p = SubGammaParams::new(v2, b).unwrap();
        let a = subgamma_tail(t, p).unwrap();
        prop_assert!((0.0..=2.0).contains(&a));
        prop_assert!(subgamma_tail(t + dt, p).unwrap() <= a);
    }

    #[test]
    fn envelope_non_increasing(
        consts in (0.1f64..3.0, 0.01f64..2.0, 0.01f64..2.0, 0.01f64..2.0),
        v2 in 1e-8f64..1.0, b in 1e-6f64..1.0, n in 2u64..5000,
        eps in 1e-6f64..1.0, scale in 1.0f64..10.0,
    ) {
        let env = TailEnvelope::new(consts.0, consts.1, consts.2, consts.3).unwrap();
        let params = SubGammaParams::new(v2, b).unwrap();
        let a = env.evaluate(eps, params, n);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(env.evaluate(eps * scale, params, n) <= a);
    }

    #[test]
    fn lambert_w_inverts(lx in -8.0f64..8.0) {
        let x = 10f64.powf(lx);
        let w = lambert_w(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x);
    }

    #[test]
    fn aux_g_is_unimodal(a in 0.01f64..10.0, b in 1.0f64..10.0) {
        let params = AuxFunctionParams::new(a, b).unwrap();
        let peak = aux_g_argmax(params);
        let left: Vec<f64> = (1..=50).map(|i| peak * i as f64 / 50.0).collect();
        let right: Vec<f64> = (0..=50).map(|i| peak * (1.0 + i as f64 / 10.0)).collect();
        for w in left.windows(2) {
            prop_assert!(aux_g(w[1], params) >= aux_g(w[0], params) * (1.0 - 1e-12));
        }
        for w in right.windows(2) {
            prop_assert!(aux_g(w[1], params) <= aux_g(w[0], params) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn latala_t_is_homogeneous(m in 1u32..50, lambda in 0.01f64..100.0, half_d in 1u32..5) {
        let d = 2 * half_d;
        // m independent Rademachers: sum of k-th moments is m
        let base = latala_t(|_| m as f64, d, LATALA_DEFAULT_BRACKET).unwrap();
        let scaled = latala_t(|k| m as f64 * lambda.powi(k as i32), d, LATALA_DEFAULT_BRACKET).unwrap();
        prop_assert!((scaled / (lambda * base) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn combinatorial_chain(half_d in 1u32..9, l_frac in 0.0f64..1.0) {
        let d = 2 * half_d;
        let l = 1 + ((d / 2 - 1) as f64 * l_frac).round() as u32;
        let multi = even_multinomial_sum(l, d).unwrap();
        let rad = rademacher_moment_exact(l, d).unwrap();
        prop_assert!(multi <= rad);
        prop_assert!(rad <= rademacher_moment_ceiling(l, d));
    }

    #[test]
    fn wilson_interval_contains_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let events = (frac * trials as f64).floor() as u64;
        let (lo, hi) = wilson_interval(events, trials, Z95);
        let p = events as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn moment_table_rejects_odd_orders(d in 0u32..40, v in 0.0f64..1e6) {
        let mut t = MomentTable::new("prop");
        prop_assert_eq!(t.insert(d, v).is_ok(), d >= 2 && d % 2 == 0);
    }
}
