//! Support-size estimators.
//!
//! All estimators here are linear in the fingerprint,
//! `Ŝ = Σ_j g(j) Φ_j`, except the coverage-based Good–Turing and Chao 1
//! baselines. The Chebyshev estimator picks `g(j) = 1 + a_j j!/n^j` for
//! `j <= L`, where `a_j` are the monomial coefficients of the shifted
//! Chebyshev polynomial through `(0, -1)` on `[1/k, c1 ln k / n]`. Under
//! Poisson sampling its bias is `Σ_i e^{-n p_i} P_L(p_i)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::poly::{shifted_chebyshev_pl, Polynomial};

/// Experimental constants for the Chebyshev estimator.
pub const DEFAULT_C0: f64 = 0.45;
pub const DEFAULT_C1: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportConfig {
    /// `1/k` lower-bounds every nonzero probability.
    pub k: u64,
    pub c0: f64,
    pub c1: f64,
}

impl SupportConfig {
    pub fn new(k: u64) -> Self {
        SupportConfig {
            k,
            c0: DEFAULT_C0,
            c1: DEFAULT_C1,
        }
    }
}

/// Construction details carried alongside a [`LinearEstimator`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EstimatorMeta {
    #[serde(rename = "L")]
    pub degree: u32,
    pub l: Option<f64>,
    pub r: Option<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub warnings: Vec<String>,
}

/// `Ŝ = Σ_j g(j) Φ_j` with `g(0) = 0` and `g(j) = default_weight` beyond the
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEstimator {
    g: Vec<f64>,
    default_weight: f64,
    pub meta: EstimatorMeta,
}

impl LinearEstimator {
    /// Builds from `g(1..=J)`; `g(0)` is fixed to zero.
    pub fn new(weights: &[f64], default_weight: f64, meta: EstimatorMeta) -> Result<Self> {
        if let Some(j) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::Numerical {
                message: format!("weight g({}) is not finite", j + 1),
                condition: f64::INFINITY,
            });
        }
        let mut g = Vec::with_capacity(weights.len() + 1);
        g.push(0.0);
        g.extend_from_slice(weights);
        Ok(LinearEstimator {
            g,
            default_weight,
            meta,
        })
    }

    /// Estimator with `g ≡ 1` on observed symbols.
    pub fn plugin(meta: EstimatorMeta) -> Self {
        LinearEstimator {
            g: vec![0.0],
            default_weight: 1.0,
            meta,
        }
    }

    pub fn weight(&self, j: u64) -> f64 {
        match usize::try_from(j) {
            Ok(0) => 0.0,
            Ok(i) if i < self.g.len() => self.g[i],
            _ => self.default_weight,
        }
    }

    /// `u_j = g(j) - 1` for `j = 1..=J`.
    pub fn corrections(&self) -> Vec<f64> {
        self.g.iter().skip(1).map(|g| g - 1.0).collect()
    }

    pub fn table(&self) -> &[f64] {
        &self.g
    }

    pub fn default_weight(&self) -> f64 {
        self.default_weight
    }

    /// `Σ_j g(j) Φ_j` before rounding.
    pub fn raw(&self, f: &Fingerprint) -> f64 {
        f.iter().map(|(j, phi)| self.weight(j) * phi as f64).sum()
    }
}

/// Serialized result record shared by the support and distinct commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportEstimate {
    pub estimator: String,
    pub k: Option<u64>,
    pub n: u64,
    #[serde(rename = "L")]
    pub degree: Option<u32>,
    pub l: Option<f64>,
    pub r: Option<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub raw: f64,
    pub estimate: f64,
    pub warnings: Vec<String>,
}

impl SupportEstimate {
    fn simple(estimator: &str, f: &Fingerprint, raw: f64, estimate: f64) -> Self {
        SupportEstimate {
            estimator: estimator.to_string(),
            k: None,
            n: f.n(),
            degree: None,
            l: None,
            r: None,
            c0: None,
            c1: None,
            raw,
            estimate,
            warnings: Vec::new(),
        }
    }
}

/// Round half up.
pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Number of observed symbols.
pub fn plugin_support(f: &Fingerprint) -> u64 {
    f.observed_support()
}

fn validate_constants(c0: f64, c1: f64) -> Result<()> {
    if !(c0 > 0.0 && c1 > c0 && c1.is_finite()) {
        return Err(Error::domain(format!("need 0 < c0 < c1, got c0 = {c0}, c1 = {c1}")));
    }
    Ok(())
}

/// Chebyshev estimator with degree `L = ⌊c0 ln k⌋` on `[1/k, c1 ln k / n]`.
pub fn chebyshev_support_coeffs(cfg: &SupportConfig, n: u64) -> Result<LinearEstimator> {
    if cfg.k < 2 {
        return Err(Error::domain(format!("k must be at least 2, got {}", cfg.k)));
    }
    if n == 0 {
        return Err(Error::domain("sample size must be positive"));
    }
    validate_constants(cfg.c0, cfg.c1)?;
    let log_k = (cfg.k as f64).ln();
    let degree = (cfg.c0 * log_k).floor() as u32;
    let l = 1.0 / cfg.k as f64;
    let r = cfg.c1 * log_k / n as f64;
    polynomial_estimator(degree, l, r, n, cfg.c0, cfg.c1)
}

/// The `k`-agnostic variant: `L = ⌊c0 ln n⌋`, `r = c1 ln n / n` and
/// `l = (c1/c0²) ln²(1/eps) / (n ln n)`.
pub fn chebyshev_support_coeffs_adaptive(n: u64, eps: f64, c0: f64, c1: f64) -> Result<LinearEstimator> {
    if n < 3 {
        return Err(Error::domain(format!("adaptive estimator needs n >= 3, got {n}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    validate_constants(c0, c1)?;
    let nf = n as f64;
    let log_n = nf.ln();
    let degree = (c0 * log_n).floor() as u32;
    let l = c1 / (c0 * c0) * (1.0 / eps).ln().powi(2) / (nf * log_n);
    let r = c1 * log_n / nf;
    polynomial_estimator(degree, l, r, n, c0, c1)
}

fn polynomial_estimator(degree: u32, l: f64, r: f64, n: u64, c0: f64, c1: f64) -> Result<LinearEstimator> {
    let mut meta = EstimatorMeta {
        degree,
        l: Some(l),
        r: Some(r),
        c0: Some(c0),
        c1: Some(c1),
        warnings: Vec::new(),
    };
    if degree == 0 {
        meta.warnings
            .push("degree is zero; estimator reduces to plug-in".to_string());
        return Ok(LinearEstimator::plugin(meta));
    }
    if !(l > 0.0) || l >= r {
        meta.warnings.push(format!(
            "approximation interval [{l:.3e}, {r:.3e}] is empty; falling back to plug-in"
        ));
        return Ok(LinearEstimator::plugin(meta));
    }
    let p = shifted_chebyshev_pl(degree, l, r)?;
    let weights = weights_from_polynomial(&p, degree, n as f64);
    LinearEstimator::new(&weights, 1.0, meta)
}

/// `g(j) = 1 + a_j j! / n^j` for `j = 1..=L`.
fn weights_from_polynomial(p: &Polynomial, degree: u32, n: f64) -> Vec<f64> {
    let mut scale = 1.0;
    (1..=degree as usize)
        .map(|j| {
            scale *= j as f64 / n;
            1.0 + p.coeff(j) * scale
        })
        .collect()
}

/// Applies a linear estimator: `raw = Σ_j g(j) Φ_j`, then rounds half up and
/// clamps to `[S_plug, k]`.
pub fn apply_linear(f: &Fingerprint, e: &LinearEstimator, k: u64) -> SupportEstimate {
    let raw = e.raw(f);
    let plug = plugin_support(f);
    let mut warnings = e.meta.warnings.clone();
    if plug > k {
        warnings.push(format!("observed support {plug} exceeds k = {k}"));
    }
    let estimate = round_half_up(raw).min(k as f64).max(plug as f64);
    SupportEstimate {
        estimator: "chebyshev".to_string(),
        k: Some(k),
        n: f.n(),
        degree: Some(e.meta.degree),
        l: e.meta.l,
        r: e.meta.r,
        c0: e.meta.c0,
        c1: e.meta.c1,
        raw,
        estimate,
        warnings,
    }
}

/// Builds and applies the Chebyshev estimator for the fingerprint's own `n`.
pub fn chebyshev_support(f: &Fingerprint, cfg: &SupportConfig) -> Result<SupportEstimate> {
    let e = chebyshev_support_coeffs(cfg, f.n().max(1))?;
    Ok(apply_linear(f, &e, cfg.k))
}

/// Adaptive Chebyshev estimate. With no `k`, only the lower clamp applies.
pub fn chebyshev_support_adaptive(
    f: &Fingerprint,
    eps: f64,
    c0: f64,
    c1: f64,
    k: Option<u64>,
) -> Result<SupportEstimate> {
    let e = chebyshev_support_coeffs_adaptive(f.n(), eps, c0, c1)?;
    let mut out = apply_linear(f, &e, k.unwrap_or(u64::MAX));
    out.estimator = "chebyshev-adaptive".to_string();
    out.k = k;
    Ok(out)
}

/// `S_plug / (1 - Φ_1/n)`, rounded half up.
pub fn good_turing_support(f: &Fingerprint) -> Result<SupportEstimate> {
    let n = f.n();
    if n == 0 {
        return Err(Error::Undefined("good-turing needs a nonempty sample"));
    }
    let f1 = f.get(1);
    if f1 == n {
        return Err(Error::Undefined("good-turing coverage is zero (every symbol is a singleton)"));
    }
    let coverage = 1.0 - f1 as f64 / n as f64;
    let raw = plugin_support(f) as f64 / coverage;
    Ok(SupportEstimate::simple("good-turing", f, raw, round_half_up(raw)))
}

/// Bias-corrected Chao 1: `S_plug + Φ_1(Φ_1 - 1) / (2(Φ_2 + 1))`.
pub fn chao1_support(f: &Fingerprint) -> SupportEstimate {
    let f1 = f.get(1) as f64;
    let f2 = f.get(2) as f64;
    let raw = plugin_support(f) as f64 + f1 * (f1 - 1.0) / (2.0 * (f2 + 1.0));
    SupportEstimate::simple("chao1", f, raw, round_half_up(raw))
}

/// Good–Toulmin extrapolation `S_plug + Σ_j (-1)^{j+1} t^j Φ_j`.
///
/// The alternating series blows up for `t > 1`.
pub fn good_toulmin_support(f: &Fingerprint, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let correction: f64 = f
        .iter()
        .map(|(j, phi)| alternating(j) * t.powf(j as f64) * phi as f64)
        .sum();
    Ok(plugin_support(f) as f64 + correction)
}

/// Efron–Thisted: Good–Toulmin with the `j`th term damped by
/// `b_j = P[Binomial(J, 1/(t+1)) >= j]`.
pub fn efron_thisted_support(f: &Fingerprint, t: f64, big_j: u32) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if big_j == 0 {
        return Err(Error::domain("J must be at least 1"));
    }
    let tails = binomial_upper_tails(big_j, 1.0 / (t + 1.0));
    let correction: f64 = f
        .iter()
        .take_while(|&(j, _)| j <= u64::from(big_j))
        .map(|(j, phi)| alternating(j) * t.powf(j as f64) * tails[j as usize] * phi as f64)
        .sum();
    Ok(plugin_support(f) as f64 + correction)
}

fn alternating(j: u64) -> f64 {
    if j % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `tails[j] = P[Binomial(trials, p) >= j]` for `j = 0..=trials`.
fn binomial_upper_tails(trials: u32, p: f64) -> Vec<f64> {
    let nt = trials as usize;
    let mut pmf = vec![0.0; nt + 1];
    let mut binom = 1.0;
    for (i, slot) in pmf.iter_mut().enumerate() {
        *slot = binom * p.powi(i as i32) * (1.0 - p).powi((nt - i) as i32);
        binom = binom * (nt - i) as f64 / (i + 1) as f64;
    }
    let mut tails = vec![0.0; nt + 1];
    let mut acc = 0.0;
    for i in (0..=nt).rev() {
        acc += pmf[i];
        tails[i] = acc;
    }
    tails
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(entries: &[(u64, u64)]) -> Fingerprint {
        Fingerprint::from_entries(entries.iter().copied()).unwrap()
    }

    #[test]
    fn plugin_examples() {
        assert_eq!(plugin_support(&fp(&[(1, 2), (3, 1)])), 3);
        assert_eq!(plugin_support(&Fingerprint::new()), 0);
    }

    #[test]
    fn degree_pins() {
        for (k, want) in [(1_000_000u64, 6u32), (32_000, 4), (1_000_000_000, 9)] {
            let e = chebyshev_support_coeffs(&SupportConfig::new(k), 200_000).unwrap();
            assert_eq!(e.meta.degree, want, "k = {k}");
        }
    }

    #[test]
    fn adaptive_degree() {
        let e = chebyshev_support_coeffs_adaptive(1_000_000, 0.05, 0.45, 0.5).unwrap();
        assert_eq!(e.meta.degree, 6);
        let wide = chebyshev_support_coeffs_adaptive(1_000_000, 1.0 - 1e-9, 0.45, 0.5).unwrap();
        assert!(wide.meta.l.unwrap() < 1e-20);
        assert!(chebyshev_support_coeffs_adaptive(2, 0.1, 0.45, 0.5).is_err());
        assert!(chebyshev_support_coeffs_adaptive(100, 1.0, 0.45, 0.5).is_err());
    }

    #[test]
    fn constants_must_be_ordered() {
        let cfg = SupportConfig {
            k: 1000,
            c0: 0.6,
            c1: 0.5,
        };
        assert!(chebyshev_support_coeffs(&cfg, 100).is_err());
    }

    #[test]
    fn degenerate_interval_falls_back() {
        // n >= c1 k ln k
        let e = chebyshev_support_coeffs(&SupportConfig::new(100), 1_000).unwrap();
        assert_eq!(e.corrections(), Vec::<f64>::new());
        assert!(!e.meta.warnings.is_empty());
        let f = fp(&[(1, 4), (2, 3)]);
        assert_eq!(apply_linear(&f, &e, 100).estimate, 7.0);
    }

    #[test]
    fn zero_degree_is_plugin() {
        let e = chebyshev_support_coeffs(&SupportConfig::new(2), 1).unwrap();
        assert_eq!(e.meta.degree, 0);
        assert_eq!(e.raw(&fp(&[(1, 2)])), 2.0);
    }

    #[test]
    fn apply_linear_examples() {
        let meta = EstimatorMeta::default();
        let zero = LinearEstimator::new(&[1.0, 1.0, 1.0], 1.0, meta.clone()).unwrap();
        let f = fp(&[(1, 2), (2, 1), (7, 4)]);
        assert_eq!(apply_linear(&f, &zero, 100).estimate, 7.0);

        let e = LinearEstimator::new(&[3.0], 1.0, meta.clone()).unwrap();
        let f = fp(&[(1, 2), (2, 1)]);
        let out = apply_linear(&f, &e, 100);
        assert_eq!(out.raw, 7.0);
        assert_eq!(out.estimate, 7.0);

        // beyond the table the weight is 1
        let f = fp(&[(5, 3)]);
        assert_eq!(apply_linear(&f, &e, 100).estimate, 3.0);

        // clamps
        let neg = LinearEstimator::new(&[-4.0], 1.0, meta.clone()).unwrap();
        assert_eq!(apply_linear(&fp(&[(1, 3)]), &neg, 100).estimate, 3.0);
        let big = LinearEstimator::new(&[50.0], 1.0, meta).unwrap();
        assert_eq!(apply_linear(&fp(&[(1, 3)]), &big, 100).estimate, 100.0);
    }

    #[test]
    fn good_turing_examples() {
        let out = good_turing_support(&fp(&[(1, 2), (2, 1)])).unwrap();
        assert_eq!(out.estimate, 6.0);
        assert_eq!(good_turing_support(&fp(&[(2, 3)])).unwrap().estimate, 3.0);
        assert!(matches!(
            good_turing_support(&fp(&[(1, 4)])),
            Err(Error::Undefined(_))
        ));
        assert!(good_turing_support(&Fingerprint::new()).is_err());
    }

    #[test]
    fn chao1_examples() {
        assert_eq!(chao1_support(&fp(&[(2, 3)])).estimate, 3.0);
        let out = chao1_support(&fp(&[(1, 3), (2, 1)]));
        assert_eq!(out.raw, 5.5);
        assert_eq!(out.estimate, 6.0);
        assert_eq!(chao1_support(&fp(&[(1, 2)])).estimate, 3.0);
    }

    #[test]
    fn good_toulmin_examples() {
        let f = fp(&[(1, 2), (2, 1)]);
        assert!((good_toulmin_support(&f, 1e-12).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(good_toulmin_support(&f, 1.0).unwrap(), 4.0);
        assert_eq!(good_toulmin_support(&fp(&[(5, 1)]), 2.0).unwrap(), 33.0);
        assert!(good_toulmin_support(&f, 0.0).is_err());
    }

    #[test]
    fn efron_thisted_examples() {
        let f = fp(&[(1, 2), (2, 1)]);
        assert!((efron_thisted_support(&f, 1.0, 2).unwrap() - 4.25).abs() < 1e-12);
        assert!((efron_thisted_support(&f, 1e-12, 2).unwrap() - 3.0).abs() < 1e-9);
        // j > J contributes nothing
        let g = fp(&[(1, 2), (2, 1), (3, 9)]);
        assert!((efron_thisted_support(&g, 1.0, 2).unwrap() - 13.25).abs() < 1e-12);
        assert!(efron_thisted_support(&f, 1.0, 0).is_err());
    }

    #[test]
    fn binomial_tails_sum() {
        let tails = binomial_upper_tails(2, 0.5);
        assert_eq!(tails, vec![1.0, 0.75, 0.25]);
    }

    #[test]
    fn large_alphabet_configuration_alternates() {
        let cfg = SupportConfig::new(1_000_000);
        let u = chebyshev_support_coeffs(&cfg, 200_000).unwrap().corrections();
        assert_eq!(u.len(), 6);
        assert!(u[0] > 0.0);
        for w in u.windows(2) {
            assert!(w[0] * w[1] < 0.0, "{u:?}");
        }
    }
}
