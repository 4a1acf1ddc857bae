use proptest::prelude::*;
use ztpgini::gini::{self, gini_of_values};
use ztpgini::oracle::gini_pairwise;
use ztpgini::ztp::{mle, mle_from_mean, ztp_mean};
use ztpgini::{QuadSpec, Sample, ZtpParams};

fn counts() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..1000, 2..60)
}

proptest! {
    #[test]
    fn sorted_identity_matches_pairwise(values in counts()) {
        let fast = gini_of_values(&values).unwrap();
        let slow = gini_pairwise(&values).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-15 * slow.max(1.0));
    }

    #[test]
    fn gini_is_scale_invariant(values in counts(), c in 1u64..50) {
        let scaled: Vec<u64> = values.iter().map(|v| v * c).collect();
        let a = gini_of_values(&values).unwrap();
        let b = gini_of_values(&scaled).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn gini_is_permutation_invariant_and_bounded(mut values in counts()) {
        let a = gini_of_values(&values).unwrap();
        values.reverse();
        prop_assert_eq!(a, gini_of_values(&values).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn cdf_is_cumulative_pmf(lambda in 0.01f64..40.0, k in 1u64..60) {
        let d = ZtpParams::new(lambda).unwrap();
        let total: f64 = (1..=k).map(|j| d.pmf(j).unwrap()).sum();
        prop_assert!((d.cdf(k as f64) - total).abs() < 1e-12);
        prop_assert_eq!(d.cdf(k as f64 + 0.5), d.cdf(k as f64));
    }

    #[test]
    fn mle_round_trip(lambda in 1e-3f64..60.0) {
        let fit = mle_from_mean(ztp_mean(lambda));
        prop_assert!(!fit.degenerate);
        prop_assert!((fit.lambda - lambda).abs() <= 1e-9 * lambda.max(1.0));
    }

    #[test]
    fn mle_residual_contract(values in prop::collection::vec(1u64..30, 2..40)) {
        let sample = Sample::new(values).unwrap();
        let fit = mle(&sample);
        let xbar = sample.mean();
        if fit.degenerate {
            prop_assert_eq!(xbar, 1.0);
        } else {
            prop_assert!((ztp_mean(fit.lambda) - xbar).abs() <= 1e-12 * xbar);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expectation_bias_shrinks_like_one_over_n(lambda in 0.05f64..8.0, n in 2usize..80) {
        let spec = QuadSpec::default();
        let d = ZtpParams::new(lambda).unwrap();
        let g = gini::gini_population(&d, spec).unwrap();
        let e = gini::expected_gini(&d, n, spec).unwrap();
        prop_assert!(e > 0.0 && e < 1.0);
        prop_assert!((e - g).abs() * n as f64 <= 0.2, "λ={} n={}: E={} G={}", lambda, n, e, g);
    }

    #[test]
    fn reduced_and_literal_expectation_agree(lambda in 0.3f64..5.0, n in 2usize..40) {
        let spec = QuadSpec::default();
        let d = ZtpParams::new(lambda).unwrap();
        let a = gini::expected_gini(&d, n, spec).unwrap();
        let b = gini::expected_gini_unreduced(&d, n, spec).unwrap();
        prop_assert!((a - b).abs() < 1e-10, "λ={} n={}: {} vs {}", lambda, n, a, b);
    }
}
