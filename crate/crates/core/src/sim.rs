//! Synthetic distributions, seeded samplers and the RMSE experiment runner.
//!
//! Every trial draws one sample from a `ChaCha8Rng` seeded with
//! [`trial_seed`]`(master, n, trial)`, and all estimators of an [`ExperimentSpec`] are
//! evaluated on that same sample.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::distinct::{estimate_distinct, DistinctConfig};
use crate::entropy::{self, estimate_entropy, EntropyConfig};
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, Histogram};
use crate::support::{
    chao1_support, chebyshev_support, chebyshev_support_adaptive, good_turing_support, plugin_support,
    SupportConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Family {
    Uniform,
    Zipf { alpha: f64 },
    GeoZipfMix,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Uniform => write!(f, "uniform"),
            Family::Zipf { alpha } => write!(f, "zipf({alpha})"),
            Family::GeoZipfMix => write!(f, "geo-zipf-mix"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    pub family: Family,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Normalises `weights`; every weight must be positive and finite.
    pub fn from_weights(family: Family, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::domain("distribution weights must be positive and finite"));
        }
        let total = pairwise_sum(&weights);
        let probs = weights.into_iter().map(|w| w / total).collect();
        Ok(DiscreteDistribution { family, probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k(&self) -> u64 {
        self.probs.len() as u64
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        let terms: Vec<f64> = self.probs.iter().map(|&p| entropy::phi(p)).collect();
        pairwise_sum(&terms)
    }
}

pub fn make_distribution(family: Family, k: u64) -> Result<DiscreteDistribution> {
    if k < 2 {
        return Err(Error::domain(format!("support size must be at least 2, got {k}")));
    }
    let weights: Vec<f64> = match family {
        Family::Uniform => vec![1.0; k as usize],
        Family::Zipf { alpha } => {
            if !alpha.is_finite() {
                return Err(Error::domain("zipf exponent must be finite"));
            }
            (1..=k).map(|i| (i as f64).powf(-alpha)).collect()
        }
        Family::GeoZipfMix => {
            if !k.is_multiple_of(2) {
                return Err(Error::domain(format!("geo-zipf-mix needs an even k, got {k}")));
            }
            let half = (k / 2) as usize;
            let zipf: Vec<f64> = (1..=half).map(|i| 1.0 / i as f64).collect();
            let ratio = 1.0 - 2.0 / k as f64;
            let geo: Vec<f64> = (0..half).map(|i| ratio.powi(i as i32)).collect();
            let (zs, gs) = (pairwise_sum(&zipf), pairwise_sum(&geo));
            let mut w: Vec<f64> = zipf.iter().map(|z| 0.5 * z / zs).collect();
            w.extend(geo.iter().map(|g| 0.5 * g / gs));
            w
        }
    };
    DiscreteDistribution::from_weights(family, weights)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    #[default]
    Iid,
    Poissonized,
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(SamplingMode::Iid),
            "poissonized" | "poisson" => Ok(SamplingMode::Poissonized),
            other => Err(Error::Input(format!("unknown sampling mode '{other}' (iid | poissonized)"))),
        }
    }
}

/// Histogram keyed by symbol index; zero counts are not stored.
pub fn draw_sample(p: &DiscreteDistribution, n: u64, mode: SamplingMode, seed: u64) -> Histogram<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Histogram::new();
    match mode {
        SamplingMode::Iid => {
            // multinomial as a chain of conditional binomials
            let mut remaining = n;
            let mut mass = 1.0;
            let last = p.probs.len() - 1;
            for (i, &pi) in p.probs.iter().enumerate() {
                if remaining == 0 {
                    break;
                }
                let c = if i == last {
                    remaining
                } else {
                    let q = (pi / mass).clamp(0.0, 1.0);
                    Binomial::new(remaining, q).expect("q in [0, 1]").sample(&mut rng)
                };
                if c > 0 {
                    h.add(i as u32, c);
                }
                remaining -= c;
                mass -= pi;
            }
        }
        SamplingMode::Poissonized => {
            if n == 0 {
                return h;
            }
            for (i, &pi) in p.probs.iter().enumerate() {
                let c = Poisson::new(n as f64 * pi).expect("positive rate").sample(&mut rng) as u64;
                if c > 0 {
                    h.add(i as u32, c);
                }
            }
        }
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix64(splitmix64(splitmix64(master) ^ n) ^ trial)`.
pub fn trial_seed(master: u64, n: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n) ^ trial)
}

/// Recursive pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Support,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Estimator {
    Plugin,
    Chebyshev { c0: f64, c1: f64 },
    ChebyshevAdaptive { eps: f64, c0: f64, c1: f64 },
    GoodTuring,
    Chao1,
    Distinct { alpha: f64, beta: f64 },
    Empirical,
    MillerMadow,
    Polynomial { c0: f64, c1: f64, c2: f64, split: bool },
    PolynomialAdaptive { c0: f64, c1: f64, c2: f64 },
}

pub const DEFAULT_EPS: f64 = 0.1;

impl Estimator {
    pub const NAMES: &'static [&'static str] = &[
        "plugin",
        "chebyshev",
        "chebyshev-adaptive",
        "good-turing",
        "chao1",
        "distinct",
        "empirical",
        "miller-madow",
        "polynomial",
        "polynomial-adaptive",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Plugin => "plugin",
            Estimator::Chebyshev { .. } => "chebyshev",
            Estimator::ChebyshevAdaptive { .. } => "chebyshev-adaptive",
            Estimator::GoodTuring => "good-turing",
            Estimator::Chao1 => "chao1",
            Estimator::Distinct { .. } => "distinct",
            Estimator::Empirical => "empirical",
            Estimator::MillerMadow => "miller-madow",
            Estimator::Polynomial { .. } => "polynomial",
            Estimator::PolynomialAdaptive { .. } => "polynomial-adaptive",
        }
    }

    pub fn property(&self) -> Property {
        match self {
            Estimator::Empirical
            | Estimator::MillerMadow
            | Estimator::Polynomial { .. }
            | Estimator::PolynomialAdaptive { .. } => Property::Entropy,
            _ => Property::Support,
        }
    }

    /// Evaluates on a sample from a distribution with `k` atoms.
    pub fn evaluate(&self, h: &Histogram<u32>, f: &Fingerprint, k: u64, seed: u64) -> Result<f64> {
        let support = |c0, c1| SupportConfig { k, c0, c1 };
        let entropy_cfg = |c0, c1, c2, split, adaptive| EntropyConfig {
            k: Some(k),
            c0,
            c1,
            c2,
            split,
            adaptive,
        };
        match *self {
            Estimator::Plugin => Ok(plugin_support(f) as f64),
            Estimator::Chebyshev { c0, c1 } => Ok(chebyshev_support(f, &support(c0, c1))?.estimate),
            Estimator::ChebyshevAdaptive { eps, c0, c1 } => {
                Ok(chebyshev_support_adaptive(f, eps, c0, c1, Some(k))?.estimate)
            }
            Estimator::GoodTuring => Ok(good_turing_support(f)?.estimate),
            Estimator::Chao1 => Ok(chao1_support(f).estimate),
            Estimator::Distinct { alpha, beta } => {
                let cfg = DistinctConfig {
                    k,
                    n: f.n(),
                    alpha,
                    beta,
                };
                Ok(estimate_distinct(f, &cfg)?.estimate)
            }
            Estimator::Empirical => entropy::empirical_entropy(h),
            Estimator::MillerMadow => entropy::miller_madow(h),
            Estimator::Polynomial { c0, c1, c2, split } => {
                Ok(estimate_entropy(h, &entropy_cfg(c0, c1, c2, split, false), Some(seed))?.estimate)
            }
            Estimator::PolynomialAdaptive { c0, c1, c2 } => {
                Ok(estimate_entropy(h, &entropy_cfg(c0, c1, c2, false, true), Some(seed))?.estimate)
            }
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    /// Parses a name with default constants.
    fn from_str(s: &str) -> Result<Self> {
        use crate::{distinct as d, support as sp};
        let (e0, e1, e2) = (entropy::DEFAULT_C0, entropy::DEFAULT_C1, entropy::DEFAULT_C2);
        Ok(match s.trim() {
            "plugin" => Estimator::Plugin,
            "chebyshev" => Estimator::Chebyshev {
                c0: sp::DEFAULT_C0,
                c1: sp::DEFAULT_C1,
            },
            "chebyshev-adaptive" => Estimator::ChebyshevAdaptive {
                eps: DEFAULT_EPS,
                c0: sp::DEFAULT_C0,
                c1: sp::DEFAULT_C1,
            },
            "good-turing" => Estimator::GoodTuring,
            "chao1" => Estimator::Chao1,
            "distinct" => Estimator::Distinct {
                alpha: d::DEFAULT_ALPHA,
                beta: d::DEFAULT_BETA,
            },
            "empirical" => Estimator::Empirical,
            "miller-madow" => Estimator::MillerMadow,
            "polynomial" => Estimator::Polynomial {
                c0: e0,
                c1: e1,
                c2: e2,
                split: false,
            },
            "polynomial-adaptive" => Estimator::PolynomialAdaptive { c0: e0, c1: e1, c2: e2 },
            other => {
                return Err(Error::Input(format!(
                    "unknown estimator '{other}'; expected one of {}",
                    Estimator::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub family: Family,
    pub k: u64,
    pub estimators: Vec<Estimator>,
    pub sizes: Vec<u64>,
    pub trials: u32,
    pub mode: SamplingMode,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(family: Family, k: u64, estimators: Vec<Estimator>, sizes: Vec<u64>, seed: u64) -> Self {
        ExperimentSpec {
            family,
            k,
            estimators,
            sizes,
            trials: 50,
            mode: SamplingMode::Iid,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::domain("sample sizes must be positive"));
        }
        if self.estimators.is_empty() {
            return Err(Error::domain("no estimators requested"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: u64,
    pub estimator: String,
    pub trials: u32,
    pub failures: u32,
    /// `None` when every trial failed.
    pub rmse: Option<f64>,
    /// Population standard deviation of the error.
    pub std: Option<f64>,
    pub mean_estimate: Option<f64>,
    pub truth: f64,
    pub wall_time_secs: f64,
    /// First failure message, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rng: &'static str,
    /// Estimators within a trial share one sample.
    pub paired: bool,
    pub rows: Vec<ResultRow>,
    pub wall_time_secs: f64,
}

pub const CSV_HEADER: [&str; 8] = ["n", "estimator", "trials", "failures", "rmse", "std", "mean_estimate", "truth"];

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let fail = |e: csv::Error| Error::Input(format!("writing CSV: {e}"));
        w.write_record(CSV_HEADER).map_err(fail)?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.estimator.clone(),
                r.trials.to_string(),
                r.failures.to_string(),
                opt(r.rmse),
                opt(r.std),
                opt(r.mean_estimate),
                r.truth.to_string(),
            ])
            .map_err(fail)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn row(&self, n: u64, estimator: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.n == n && r.estimator == estimator)
    }
}

/// Estimates for one trial, indexed like `spec.estimators`, with seconds spent.
type TrialOutcome = Vec<(Result<f64>, f64)>;

pub fn run_trials(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let started = Instant::now();
    let dist = make_distribution(spec.family, spec.k)?;
    let truth_support = dist.k() as f64;
    let truth_entropy = dist.entropy();
    let mut rows = Vec::new();
    for &n in &spec.sizes {
        let outcomes: Vec<TrialOutcome> = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(spec.seed, n, u64::from(t));
                let h = draw_sample(&dist, n, spec.mode, seed);
                let f = h.fingerprint();
                spec.estimators
                    .iter()
                    .map(|e| {
                        let clock = Instant::now();
                        let v = e.evaluate(&h, &f, spec.k, seed);
                        (v, clock.elapsed().as_secs_f64())
                    })
                    .collect()
            })
            .collect();
        for (idx, est) in spec.estimators.iter().enumerate() {
            let truth = match est.property() {
                Property::Support => truth_support,
                Property::Entropy => truth_entropy,
            };
            let mut values = Vec::with_capacity(outcomes.len());
            let mut first_error = None;
            let mut wall = 0.0;
            for trial in &outcomes {
                let (v, secs) = &trial[idx];
                wall += secs;
                match v {
                    Ok(x) => values.push(*x),
                    Err(e) => {
                        first_error.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            rows.push(summarize(n, est.name(), spec.trials, values, truth, wall, first_error));
        }
    }
    Ok(ExperimentResult {
        spec: spec.clone(),
        rng: "ChaCha8",
        paired: true,
        rows,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

fn summarize(
    n: u64,
    name: &str,
    trials: u32,
    values: Vec<f64>,
    truth: f64,
    wall_time_secs: f64,
    first_error: Option<String>,
) -> ResultRow {
    let ok = values.len();
    let failures = trials - ok as u32;
    let (rmse, std, mean) = if ok == 0 {
        (None, None, None)
    } else {
        let m = ok as f64;
        let errors: Vec<f64> = values.iter().map(|v| v - truth).collect();
        let squares: Vec<f64> = errors.iter().map(|e| e * e).collect();
        let mean_err = pairwise_sum(&errors) / m;
        let dev: Vec<f64> = errors.iter().map(|e| (e - mean_err).powi(2)).collect();
        (
            Some((pairwise_sum(&squares) / m).sqrt()),
            Some((pairwise_sum(&dev) / m).sqrt()),
            Some(pairwise_sum(&values) / m),
        )
    };
    ResultRow {
        n,
        estimator: name.to_string(),
        trials,
        failures,
        rmse,
        std,
        mean_estimate: mean,
        truth,
        wall_time_secs,
        first_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_examples() {
        assert_eq!(make_distribution(Family::Uniform, 4).unwrap().probs(), &[0.25; 4]);
        let z = make_distribution(Family::Zipf { alpha: 1.0 }, 3).unwrap();
        for (p, want) in z.probs().iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
            assert!((p - want).abs() < 1e-15);
        }
        let g = make_distribution(Family::GeoZipfMix, 4).unwrap();
        for (p, want) in g.probs().iter().zip([1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0]) {
            assert!((p - want).abs() < 1e-15);
        }
        assert!(make_distribution(Family::GeoZipfMix, 5).is_err());
        assert!(make_distribution(Family::Uniform, 1).is_err());
    }

    #[test]
    fn probabilities_sum_to_one() {
        for family in [Family::Uniform, Family::Zipf { alpha: 1.5 }, Family::GeoZipfMix] {
            let d = make_distribution(family, 10_000).unwrap();
            assert!((pairwise_sum(d.probs()) - 1.0).abs() < 1e-12);
            assert!(d.probs().iter().all(|&p| p > 0.0));
        }
    }

    #[test]
    fn sampler_edge_cases() {
        let d = make_distribution(Family::Uniform, 10).unwrap();
        assert!(draw_sample(&d, 0, SamplingMode::Iid, 1).is_empty());
        assert!(draw_sample(&d, 0, SamplingMode::Poissonized, 1).is_empty());
        let point = DiscreteDistribution::from_weights(Family::Uniform, vec![1.0]).unwrap();
        let h = draw_sample(&point, 37, SamplingMode::Iid, 5);
        assert_eq!(h.get(&0), 37);
        assert_eq!(h.distinct(), 1);
    }

    #[test]
    fn iid_conserves_sample_size() {
        let d = make_distribution(Family::Zipf { alpha: 1.0 }, 500).unwrap();
        for seed in 0..20 {
            assert_eq!(draw_sample(&d, 1234, SamplingMode::Iid, seed).n(), 1234);
        }
    }

    #[test]
    fn seeds_differ_across_trials_and_sizes() {
        assert_ne!(trial_seed(7, 500, 0), trial_seed(7, 500, 1));
        assert_ne!(trial_seed(7, 500, 0), trial_seed(7, 501, 0));
        assert_ne!(trial_seed(7, 500, 0), trial_seed(8, 500, 0));
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn estimator_names_round_trip() {
        for name in Estimator::NAMES {
            assert_eq!(name.parse::<Estimator>().unwrap().name(), *name);
        }
        assert!("bogus".parse::<Estimator>().is_err());
    }

    #[test]
    fn single_trial_full_coverage() {
        let mut spec = ExperimentSpec::new(Family::Uniform, 5, vec![Estimator::Plugin], vec![500], 3);
        spec.trials = 1;
        let res = run_trials(&spec).unwrap();
        assert_eq!(res.rows[0].rmse, Some(0.0));
        assert_eq!(res.rows[0].failures, 0);
    }

    #[test]
    fn failures_are_counted() {
        // k = 10^6, n = 3: nearly every sample is all singletons
        let mut spec = ExperimentSpec::new(Family::Uniform, 1_000_000, vec![Estimator::GoodTuring], vec![3], 1);
        spec.trials = 5;
        let res = run_trials(&spec).unwrap();
        assert_eq!(res.rows[0].failures, 5);
        assert_eq!(res.rows[0].rmse, None);
        assert!(res.rows[0].first_error.is_some());
    }
}
