use fracgp::estimators::{hurst_aggregated_variance, lass_best_index};
use fracgp::io::{path_csv, read_path_csv};
use fracgp::kernels::{covariance, fbm_cov, gc_cov, rl_fbm_cov, weyl_fou_cov};
use fracgp::process::{AlphaFunction, HurstFunction, ProcessSpec, Profile};
use fracgp::sampler::{CovarianceMatrix, Sampler, TimeGrid};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = ProcessSpec> {
    prop_oneof![
        (0.05..0.95f64).prop_map(|hurst| ProcessSpec::Fbm { hurst }),
        (0.05..0.95f64).prop_map(|hurst| ProcessSpec::RlFbm { hurst }),
        (0.2..0.8f64, 0.2..0.8f64).prop_map(|(a, b)| ProcessSpec::RlMbm {
            hurst: HurstFunction::new(Profile::linear(a, b, 0.0, 2.0)).unwrap()
        }),
        (0.55..2.5f64, 0.2..3.0f64).prop_map(|(alpha, omega)| ProcessSpec::WeylFou { alpha, omega }),
        (0.55..2.5f64, 0.2..3.0f64).prop_map(|(alpha, omega)| ProcessSpec::RlFou { alpha, omega }),
        (0.6..1.5f64, 0.5..2.0f64).prop_map(|(a, omega)| ProcessSpec::WeylMou {
            alpha: AlphaFunction::constant(a).unwrap(),
            omega
        }),
        (0.1..2.0f64, 0.1..3.0f64).prop_map(|(alpha, beta)| ProcessSpec::Gc { alpha, beta }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_symmetric(spec in spec_strategy(), t in 0.01..2.0f64, s in 0.01..2.0f64) {
        let a = covariance(&spec, t, s).unwrap();
        let b = covariance(&spec, s, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn gram_matrices_are_positive_semidefinite(
        spec in spec_strategy(),
        mut times in proptest::collection::vec(0.01..2.0f64, 2..12),
    ) {
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let gram = CovarianceMatrix::new(&spec, &times).unwrap();
        prop_assert!(gram.min_eigenvalue() >= -1e-8 * gram.max_diagonal());
    }

    #[test]
    fn fbm_is_self_similar(h in 0.05..0.95f64, t in 0.01..3.0f64, s in 0.01..3.0f64, c in 0.1..10.0f64) {
        let lhs = fbm_cov(h, c * t, c * s).unwrap();
        let rhs = c.powf(2.0 * h) * fbm_cov(h, t, s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn rl_fbm_is_self_similar(h in 0.05..0.95f64, a in 0.01..3.0f64, b in 0.01..3.0f64, c in 0.1..10.0f64) {
        let (t, s) = (a.max(b), a.min(b));
        let lhs = rl_fbm_cov(h, c * t, c * s).unwrap();
        let rhs = c.powf(2.0 * h) * rl_fbm_cov(h, t, s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn stationary_kernels_peak_at_zero_lag(alpha in 0.55..2.5f64, omega in 0.2..3.0f64, beta in 0.1..3.0f64, tau in 0.0..5.0f64) {
        prop_assert!(weyl_fou_cov(alpha, omega, tau).unwrap() <= weyl_fou_cov(alpha, omega, 0.0).unwrap() * (1.0 + 1e-12));
        let g = gc_cov(alpha.min(2.0), beta, tau).unwrap();
        prop_assert!(g > 0.0 && g <= 1.0);
    }

    #[test]
    fn hurst_estimate_ignores_amplitude(seed in 0u64..1000, scale in 0.01..100.0f64) {
        let grid = TimeGrid::new(0.0, 1.0 / 1024.0, 1025).unwrap();
        let path = Sampler::fbm_from_fgn(0.6, &grid).unwrap().sample(seed);
        let scales = fracgp::estimators::default_scales(path.values.len() - 1);
        let incr: Vec<f64> = path.values.windows(2).map(|w| w[1] - w[0]).collect();
        let scaled: Vec<f64> = incr.iter().map(|x| x * scale).collect();
        let a = hurst_aggregated_variance(&incr, &scales).unwrap().global_value.unwrap();
        let b = hurst_aggregated_variance(&scaled, &scales).unwrap().global_value.unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn path_csv_round_trips(
        start in -10.0..10.0f64,
        steps in proptest::collection::vec(1e-6..1.0f64, 1..40),
        seed in any::<u64>(),
    ) {
        let mut times = vec![start];
        for d in &steps {
            times.push(times.last().unwrap() + d);
        }
        let values: Vec<f64> = (0..times.len()).map(|i| ((seed ^ i as u64) as f64).sin() * 1e3).collect();
        let text = path_csv(&times, &values);
        let (t2, v2) = read_path_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(t2, times);
        prop_assert_eq!(v2, values);
    }
}

#[test]
fn lass_prefers_half_the_gc_index() {
    let spec = ProcessSpec::Gc { alpha: 0.8, beta: 1.0 };
    let grid = TimeGrid::new(0.0, 1.0 / 64.0, 65).unwrap();
    let ensemble = Sampler::new(&spec, &grid).unwrap().ensemble_values(42, 4000);
    let scales = [0.25, 0.125, 0.0625];
    let best = lass_best_index(&grid, &ensemble, 0.5, &scales, &[0.4, 0.8]).unwrap();
    assert_eq!(best.diagnostics["kappa"], 0.4);
}
