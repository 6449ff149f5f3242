//! Shannon entropy estimators (nats).
//!
//! The polynomial estimator replaces `φ(p) = p ln(1/p)` on small masses by its
//! best degree-`L` uniform approximation on `[0, β]`, `β = c1 ln k / n`, and
//! estimates that polynomial without bias through falling factorials. Symbols
//! seen more than `T = c2 ln k` times fall back to the bias-corrected plug-in
//! term `φ(N/n) + 1/(2n)`.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fingerprint::Histogram;
use crate::poly::{falling_factorial, remez, RemezOptions, MAX_CHEBYSHEV_DEGREE};

pub const DEFAULT_C0: f64 = 1.6;
pub const DEFAULT_C1: f64 = 3.5;
pub const DEFAULT_C2: f64 = 1.6;

/// `φ(x) = x ln(1/x)` with `φ(0) = 0`.
pub fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyConfig {
    /// Alphabet-size bound; required unless `adaptive`.
    pub k: Option<u64>,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub split: bool,
    pub adaptive: bool,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            k: None,
            c0: DEFAULT_C0,
            c1: DEFAULT_C1,
            c2: DEFAULT_C2,
            split: false,
            adaptive: false,
        }
    }
}

impl EntropyConfig {
    pub fn with_k(k: u64) -> Self {
        EntropyConfig {
            k: Some(k),
            ..Self::default()
        }
    }

    pub fn adaptive() -> Self {
        EntropyConfig {
            adaptive: true,
            ..Self::default()
        }
    }
}

/// Best uniform approximation of `φ` on `[0, 1]` at a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiApprox {
    pub degree: u32,
    /// Monomial coefficients `a_0..a_L`.
    pub a: Vec<f64>,
    /// Uniform error; equals `a_0`.
    pub err: f64,
}

static PHI_CACHE: [OnceLock<PhiApprox>; MAX_CHEBYSHEV_DEGREE as usize + 1] =
    [const { OnceLock::new() }; MAX_CHEBYSHEV_DEGREE as usize + 1];

/// Cached Remez approximation of `φ` at `degree`.
///
/// The monomial form loses accuracy past degree ~20 on `[0, 1]`; the
/// estimator's degrees (`⌊1.6 ln k⌋`) stay below that for `k` up to ~10^5.
pub fn phi_approx(degree: u32) -> Result<&'static PhiApprox> {
    let cell = PHI_CACHE.get(degree as usize).ok_or(Error::Bounds {
        what: "entropy polynomial degree",
        value: u64::from(degree),
        cap: u64::from(MAX_CHEBYSHEV_DEGREE),
    })?;
    if let Some(p) = cell.get() {
        return Ok(p);
    }
    let fit = remez(phi, 0.0, 1.0, degree, RemezOptions::default())?;
    let mut a = fit.poly.into_coeffs();
    a.resize(degree as usize + 1, 0.0);
    let _ = cell.set(PhiApprox {
        degree,
        a,
        err: fit.error,
    });
    Ok(cell.get().expect("initialised above"))
}

/// Fixed per-sample quantities of the polynomial estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimator {
    pub degree: u32,
    /// Right end of the approximation interval, `c1 ln κ / n`.
    pub beta: f64,
    /// `c1 ln κ`.
    pub interval_param: f64,
    pub threshold: u64,
    /// `κ = k`, or `n` in adaptive mode.
    pub kappa: u64,
    pub n: u64,
    pub adaptive: bool,
    coeffs: Vec<f64>,
    /// `g_L(j)` for `j = 0..=T`.
    small: Vec<f64>,
}

impl EntropyEstimator {
    /// Unbiased estimate of `P_L(p)` from a Poisson count:
    /// `(1/n)(Σ_m a_m (c1 ln κ)^{1-m} (N)_m - N ln β)`.
    pub fn small_count(&self, count: u64) -> f64 {
        match self.small.get(count as usize) {
            Some(&v) => v,
            None => self.poly_term(count),
        }
    }

    /// Bias-corrected plug-in term `φ(N/n) + 1/(2n)`.
    pub fn large_count(&self, count: u64) -> f64 {
        let n = self.n as f64;
        phi(count as f64 / n) + 0.5 / n
    }

    fn poly_term(&self, count: u64) -> f64 {
        let x = count as f64;
        let mut sum = 0.0;
        let mut scale = self.interval_param;
        for (m, a) in self.coeffs.iter().enumerate() {
            if m as u64 > count {
                break;
            }
            sum += a * scale * falling_factorial(x, m as u32);
            scale /= self.interval_param;
        }
        (sum - x * self.beta.ln()) / self.n as f64
    }

    /// Best-approximation coefficients actually used (`a_0 = 0` in adaptive mode).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

pub fn build_entropy_estimator(cfg: &EntropyConfig, n: u64) -> Result<EntropyEstimator> {
    if !(cfg.c0 > 0.0 && cfg.c1 > 0.0 && cfg.c2 > 0.0) {
        return Err(Error::domain("entropy constants c0, c1, c2 must be positive"));
    }
    let kappa = if cfg.adaptive {
        if n < 3 {
            return Err(Error::domain(format!("adaptive entropy estimator needs n >= 3, got {n}")));
        }
        n
    } else {
        match cfg.k {
            Some(k) if k >= 2 => k,
            Some(k) => return Err(Error::domain(format!("k must be at least 2, got {k}"))),
            None => return Err(Error::domain("k is required unless adaptive")),
        }
    };
    if n == 0 {
        return Err(Error::domain("sample size must be positive"));
    }
    let log_kappa = (kappa as f64).ln();
    let degree = (cfg.c0 * log_kappa).floor() as u32;
    let interval_param = cfg.c1 * log_kappa;
    let beta = interval_param / n as f64;
    if beta >= 1.0 {
        return Err(Error::domain(format!(
            "approximation interval [0, {beta:.4}] is degenerate; need n > c1 ln k = {interval_param:.3}"
        )));
    }
    let threshold = (cfg.c2 * log_kappa).floor() as u64;
    let mut coeffs = phi_approx(degree)?.a.clone();
    if cfg.adaptive {
        coeffs[0] = 0.0;
    }
    let mut est = EntropyEstimator {
        degree,
        beta,
        interval_param,
        threshold,
        kappa,
        n,
        adaptive: cfg.adaptive,
        coeffs,
        small: Vec::new(),
    };
    est.small = (0..=threshold).map(|j| est.poly_term(j)).collect();
    Ok(est)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub estimator: &'static str,
    pub k_or_n: u64,
    #[serde(rename = "L")]
    pub degree: u32,
    pub beta: f64,
    #[serde(rename = "T")]
    pub threshold: u64,
    pub interval_param: f64,
    pub split: bool,
    pub adaptive: bool,
    /// Value before clamping.
    pub raw: f64,
    pub estimate: f64,
}

/// Plug-in entropy `Σ (N_i/n) ln(n/N_i)`.
pub fn empirical_entropy<S: Ord>(h: &Histogram<S>) -> Result<f64> {
    if h.n() == 0 {
        return Err(Error::domain("empirical entropy of an empty sample"));
    }
    let n = h.n() as f64;
    Ok(h.counts().map(|c| phi(c as f64 / n)).sum())
}

/// Plug-in entropy plus `(S_obs - 1)/(2n)`.
pub fn miller_madow<S: Ord>(h: &Histogram<S>) -> Result<f64> {
    let plug = empirical_entropy(h)?;
    Ok(plug + (h.distinct() as f64 - 1.0) / (2.0 * h.n() as f64))
}

/// Polynomial-approximation estimate. Split mode assigns every observation to
/// the selection or estimation half by a fair coin drawn from `seed`
/// (default 0).
pub fn estimate_entropy<S: Ord>(h: &Histogram<S>, cfg: &EntropyConfig, seed: Option<u64>) -> Result<EntropyEstimate> {
    if h.n() == 0 {
        return Err(Error::domain("entropy of an empty sample"));
    }
    if !cfg.split {
        let est = build_entropy_estimator(cfg, h.n())?;
        let pairs = h.counts().map(|c| (c, c));
        return finish(&est, cfg, h.distinct() as u64, pairs);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    let mut halves = Vec::with_capacity(h.distinct());
    for c in h.counts() {
        let selection = Binomial::new(c, 0.5)
            .map_err(|e| Error::domain(e.to_string()))?
            .sample(&mut rng);
        halves.push((c - selection, selection));
    }
    let n_est: u64 = halves.iter().map(|&(e, _)| e).sum();
    if n_est == 0 {
        return Err(Error::domain("estimation half of the split sample is empty"));
    }
    let est = build_entropy_estimator(cfg, n_est)?;
    finish(&est, cfg, h.distinct() as u64, halves.into_iter())
}

/// Sums `(estimation count, selection count)` pairs over observed symbols,
/// adds `g_L(0)` for each unseen symbol, and clamps.
fn finish<I>(est: &EntropyEstimator, cfg: &EntropyConfig, observed: u64, pairs: I) -> Result<EntropyEstimate>
where
    I: Iterator<Item = (u64, u64)>,
{
    let mut raw: f64 = pairs
        .map(|(count, select)| {
            if select <= est.threshold {
                est.small_count(count)
            } else {
                est.large_count(count)
            }
        })
        .sum();
    let upper = if cfg.adaptive {
        f64::INFINITY
    } else {
        let k = est.kappa;
        if observed > k {
            return Err(Error::domain(format!("observed {observed} symbols but k = {k}")));
        }
        raw += (k - observed) as f64 * est.small_count(0);
        (k as f64).ln()
    };
    Ok(EntropyEstimate {
        estimator: if cfg.adaptive { "polynomial-adaptive" } else { "polynomial" },
        k_or_n: est.kappa,
        degree: est.degree,
        beta: est.beta,
        threshold: est.threshold,
        interval_param: est.interval_param,
        split: cfg.split,
        adaptive: cfg.adaptive,
        raw,
        estimate: raw.max(0.0).min(upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(counts: &[u64]) -> Histogram<usize> {
        Histogram::from_counts(counts.iter().copied().enumerate())
    }

    #[test]
    fn empirical_examples() {
        assert_eq!(empirical_entropy(&hist(&[2])).unwrap(), 0.0);
        assert!((empirical_entropy(&hist(&[1, 1])).unwrap() - 2f64.ln()).abs() < 1e-15);
        let want = 0.75 * (4.0f64 / 3.0).ln() + 0.25 * 4f64.ln();
        assert!((empirical_entropy(&hist(&[3, 1])).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.562_335).abs() < 1e-6);
        assert!(empirical_entropy(&hist(&[])).is_err());
    }

    #[test]
    fn miller_madow_examples() {
        assert_eq!(miller_madow(&hist(&[2])).unwrap(), 0.0);
        assert_eq!(miller_madow(&hist(&[1_000])).unwrap(), 0.0);
        let v = miller_madow(&hist(&[1, 1])).unwrap();
        assert!((v - (2f64.ln() + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn experiment_parameters() {
        let est = build_entropy_estimator(&EntropyConfig::with_k(100_000), 10_000).unwrap();
        assert_eq!(est.degree, 18);
        assert_eq!(est.threshold, 18);
        assert!((est.interval_param - 40.29).abs() < 0.01);
        assert!((est.interval_param - 40.0).abs() < 0.5);
    }

    #[test]
    fn degenerate_interval() {
        assert!(build_entropy_estimator(&EntropyConfig::with_k(100_000), 40).is_err());
        assert!(build_entropy_estimator(&EntropyConfig::default(), 1000).is_err());
        assert!(build_entropy_estimator(&EntropyConfig::adaptive(), 2).is_err());
    }

    #[test]
    fn phi_errors_decrease() {
        let first = phi_approx(1).unwrap();
        assert!((first.err - 0.5 / std::f64::consts::E).abs() < 1e-6);
        let mut prev = first.err;
        for d in 2..=10 {
            let p = phi_approx(d).unwrap();
            assert!(p.err < prev);
            assert!((p.a[0] - p.err).abs() < 1e-9 * p.err.max(1.0));
            prev = p.err;
        }
    }

    #[test]
    fn adaptive_drops_constant() {
        let est = build_entropy_estimator(&EntropyConfig::adaptive(), 5_000).unwrap();
        assert_eq!(est.coeffs()[0], 0.0);
        assert_eq!(est.small_count(0), 0.0);
        assert_eq!(est.kappa, 5_000);
    }

    #[test]
    fn plugin_branch_when_counts_exceed_threshold() {
        let cfg = EntropyConfig::with_k(2);
        let h = hist(&[40, 60]);
        let out = estimate_entropy(&h, &cfg, None).unwrap();
        assert_eq!(out.threshold, 1);
        let want = phi(0.4) + phi(0.6) + 2.0 * 0.5 / 100.0;
        assert!((out.raw - want).abs() < 1e-15);
        assert_eq!(out.estimate, want.min(2f64.ln()));
    }

    #[test]
    fn output_is_clamped() {
        let cfg = EntropyConfig::with_k(50);
        for counts in [&[1u64; 50][..], &[200, 1, 1], &[9, 3, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]] {
            let out = estimate_entropy(&hist(counts), &cfg, None).unwrap();
            assert!(out.estimate >= 0.0 && out.estimate <= 50f64.ln());
        }
    }

    #[test]
    fn observed_beyond_k_is_an_error() {
        let cfg = EntropyConfig::with_k(2);
        assert!(estimate_entropy(&hist(&[5, 5, 5]), &cfg, None).is_err());
    }

    #[test]
    fn split_mode_is_seeded() {
        let cfg = EntropyConfig {
            split: true,
            ..EntropyConfig::with_k(1_000)
        };
        let h = hist(&[30, 20, 10, 5, 5, 3, 2, 2, 1, 1, 1, 1, 1, 1]);
        let a = estimate_entropy(&h, &cfg, Some(7)).unwrap();
        let b = estimate_entropy(&h, &cfg, Some(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.split);
        assert!(a.estimate >= 0.0 && a.estimate <= 1000f64.ln());
    }
}
