use symprop::sim::*;

#[test]
fn uniform_counts_pass_chi_square() {
    // upper 1e-6 quantile of chi-square with 99 degrees of freedom
    const CRITICAL: f64 = 180.792_015_325_899_74;
    let d = make_distribution(Family::Uniform, 100).unwrap();
    let n = 100_000u64;
    for mode in [SamplingMode::Iid, SamplingMode::Poissonized] {
        let h = draw_sample(&d, n, mode, 12_345);
        let expected = n as f64 / 100.0;
        let stat: f64 = (0..100u32)
            .map(|i| {
                let c = h.get(&i) as f64;
                (c - expected).powi(2) / expected
            })
            .sum();
        assert!(stat < CRITICAL, "{mode:?}: chi-square {stat}");
    }
}

#[test]
fn poissonized_total_has_mean_n() {
    // four standard errors; exceeded with probability below 1e-4
    let d = make_distribution(Family::Zipf { alpha: 1.0 }, 50).unwrap();
    let n = 100u64;
    let seeds = 2_000u64;
    let total: u64 = (0..seeds).map(|s| draw_sample(&d, n, SamplingMode::Poissonized, s).n()).sum();
    let mean = total as f64 / seeds as f64;
    assert!((mean - n as f64).abs() <= 4.0 * (n as f64 / seeds as f64).sqrt(), "mean {mean}");
}

#[test]
fn poissonized_totals_vary() {
    let d = make_distribution(Family::Uniform, 10).unwrap();
    let totals: Vec<u64> = (0..20).map(|s| draw_sample(&d, 100, SamplingMode::Poissonized, s).n()).collect();
    assert!(totals.iter().any(|&t| t != 100));
}

#[test]
fn coupon_collector_regime() {
    let k = 1_000u64;
    let n = (10.0 * k as f64 * (k as f64).ln()).ceil() as u64;
    let mut spec = ExperimentSpec::new(Family::Uniform, k, vec![Estimator::Plugin], vec![n], 99);
    spec.trials = 50;
    let res = run_trials(&spec).unwrap();
    let row = &res.rows[0];
    // at most one trial may miss a symbol, and by at most a few
    assert!(row.rmse.unwrap() <= 1.0, "{row:?}");
}

#[test]
fn same_spec_same_numbers() {
    let estimators = ["plugin", "chebyshev", "good-turing", "chao1", "distinct", "polynomial", "miller-madow"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mut spec = ExperimentSpec::new(Family::GeoZipfMix, 2_000, estimators, vec![300, 1_500], 11);
    spec.trials = 12;
    let a = run_trials(&spec).unwrap();
    let b = run_trials(&spec).unwrap();
    assert_eq!(a.rows.len(), 14);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!((x.n, &x.estimator, x.failures), (y.n, &y.estimator, y.failures));
        assert_eq!(x.rmse.map(f64::to_bits), y.rmse.map(f64::to_bits));
        assert_eq!(x.std.map(f64::to_bits), y.std.map(f64::to_bits));
        assert_eq!(x.mean_estimate.map(f64::to_bits), y.mean_estimate.map(f64::to_bits));
    }

    spec.seed = 12;
    let c = run_trials(&spec).unwrap();
    assert_ne!(a.rows[0].mean_estimate, c.rows[0].mean_estimate);
}

#[test]
fn rmse_dominates_bias() {
    let estimators = ["plugin", "chebyshev", "chao1", "empirical", "polynomial"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mut spec = ExperimentSpec::new(Family::Zipf { alpha: 0.5 }, 5_000, estimators, vec![1_000, 8_000], 5);
    spec.trials = 10;
    spec.mode = SamplingMode::Poissonized;
    for row in run_trials(&spec).unwrap().rows {
        let rmse = row.rmse.unwrap();
        let bias = row.mean_estimate.unwrap() - row.truth;
        let std = row.std.unwrap();
        assert!(rmse >= 0.0);
        assert!(rmse * rmse >= bias * bias * (1.0 - 1e-12), "{row:?}");
        assert!((rmse * rmse - (bias * bias + std * std)).abs() <= 1e-9 * rmse.max(1.0).powi(2));
    }
}

#[test]
fn chebyshev_beats_plugin_when_undersampled() {
    let estimators = vec!["plugin".parse().unwrap(), "chebyshev".parse().unwrap()];
    let spec = ExperimentSpec::new(Family::Uniform, 10_000, estimators, vec![500], 7);
    let res = run_trials(&spec).unwrap();
    let plug = res.row(500, "plugin").unwrap().rmse.unwrap();
    let cheb = res.row(500, "chebyshev").unwrap().rmse.unwrap();
    assert!(cheb < plug, "chebyshev {cheb} vs plugin {plug}");
}

#[test]
fn csv_layout() {
    let mut spec = ExperimentSpec::new(Family::Uniform, 50, vec![Estimator::Plugin, Estimator::GoodTuring], vec![20], 1);
    spec.trials = 3;
    let res = run_trials(&spec).unwrap();
    let mut buf = Vec::new();
    res.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,estimator,trials,failures,rmse,std,mean_estimate,truth"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("20,plugin,3,"));
    assert!(rows[1].starts_with("20,good-turing,3,"));
    assert!(rows.iter().all(|r| r.split(',').count() == 8));

    let json = serde_json::to_value(&res).unwrap();
    assert_eq!(json["spec"]["k"], 50);
    assert_eq!(json["paired"], true);
    assert_eq!(json["rng"], "ChaCha8");
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = ExperimentSpec::new(Family::Uniform, 50, vec![Estimator::Plugin], vec![20], 1);
    spec.trials = 0;
    assert!(run_trials(&spec).is_err());
    spec.trials = 1;
    spec.sizes = vec![0];
    assert!(run_trials(&spec).is_err());
    spec.sizes = vec![10];
    spec.family = Family::GeoZipfMix;
    spec.k = 51;
    assert!(run_trials(&spec).is_err());
}
