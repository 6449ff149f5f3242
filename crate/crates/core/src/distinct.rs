//! Distinct elements in a `k`-ball urn.
//!
//! Probabilities are multiples of `1/k`, so the bias only has to be
//! controlled on the grid `{1/M, ..., 1}` rather than a whole interval. The
//! weights `w` of the polynomial `p(x) = Σ_{j=1}^L w_j x^j` minimise
//! `‖Bw - 1‖₂` over that grid, with `B` the partial Vandermonde matrix
//! `B[i][j] = ((i+1)/M)^(j+1)`. When `M <= L` the system is underdetermined
//! and `p` interpolates `1` on the grid exactly.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::support::{plugin_support, round_half_up, EstimatorMeta, LinearEstimator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistinctConfig {
    /// Number of balls in the urn.
    pub k: u64,
    /// Expected sample size.
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
}

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    LeastSquares,
    Interpolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSolution {
    pub w: Vec<f64>,
    /// `‖Bw - 1‖₂` for the returned `w`.
    pub residual: f64,
    pub regime: Regime,
}

/// `L = max(1, ⌊α ln k⌋)`, `M = max(1, ⌈β k ln k / n⌉)`.
pub fn select_params(cfg: &DistinctConfig) -> Result<(usize, usize)> {
    if cfg.k < 3 {
        return Err(Error::domain(format!("urn size must be at least 3, got {}", cfg.k)));
    }
    if cfg.n == 0 {
        return Err(Error::domain("sample size must be positive"));
    }
    if !(cfg.alpha > 0.0 && cfg.beta > cfg.alpha && cfg.beta.is_finite()) {
        return Err(Error::domain(format!(
            "need 0 < alpha < beta, got alpha = {}, beta = {}",
            cfg.alpha, cfg.beta
        )));
    }
    let log_k = (cfg.k as f64).ln();
    let degree = ((cfg.alpha * log_k).floor() as usize).max(1);
    let grid = ((cfg.beta * cfg.k as f64 * log_k / cfg.n as f64).ceil() as usize).max(1);
    Ok((degree, grid))
}

/// `M × L` partial Vandermonde matrix on the grid `{1/M, ..., 1}`.
pub fn build_design_b(degree: usize, grid: usize) -> DMatrix<f64> {
    DMatrix::from_fn(grid, degree, |i, j| ((i + 1) as f64 / grid as f64).powi(j as i32 + 1))
}

/// Condition estimate above which the least-squares factor is treated as
/// rank deficient.
const MAX_CONDITION: f64 = 1e13;

pub fn solve_weights(degree: usize, grid: usize) -> Result<WeightSolution> {
    if degree == 0 || grid == 0 {
        return Err(Error::domain("L and M must be positive"));
    }
    let b = build_design_b(degree, grid);
    let ones = DVector::from_element(grid, 1.0);
    let (w, regime) = if grid > degree {
        (least_squares(&b, &ones)?, Regime::LeastSquares)
    } else {
        let mut w = interpolation_weights(grid);
        w.resize(degree, 0.0);
        (DVector::from_vec(w), Regime::Interpolation)
    };
    let residual = (&b * &w - ones).norm();
    Ok(WeightSolution {
        w: w.iter().copied().collect(),
        residual,
        regime,
    })
}

fn least_squares(b: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let qr = b.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = r.diagonal().iter().map(|d| d.abs()).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(Error::Numerical {
            message: format!("design matrix {}x{} is rank deficient", b.nrows(), b.ncols()),
            condition,
        });
    }
    let qt_rhs = qr.q().transpose() * rhs;
    r.solve_upper_triangular(&qt_rhs).ok_or_else(|| Error::Numerical {
        message: "triangular solve failed".into(),
        condition,
    })
}

/// Coefficients `w_1..w_M` of `p(x) = 1 - Π_{i=1}^M (1 - M x / i)`, the
/// degree-`M` polynomial with `p(0) = 0` and `p(i/M) = 1`.
fn interpolation_weights(grid: usize) -> Vec<f64> {
    let mut q = vec![1.0];
    for i in 1..=grid {
        let slope = -(grid as f64) / i as f64;
        let mut next = vec![0.0; q.len() + 1];
        for (m, c) in q.iter().enumerate() {
            next[m] += c;
            next[m + 1] += c * slope;
        }
        q = next;
    }
    q.iter().skip(1).map(|c| -c).collect()
}

/// `u_j = w_j j! (k/(nM))^j`, giving `g(j) = 1 + u_j` for `j <= L`.
pub fn coeffs_from_weights(w: &[f64], cfg: &DistinctConfig, grid: usize) -> Result<LinearEstimator> {
    let ratio = cfg.k as f64 / (cfg.n as f64 * grid as f64);
    let mut scale = 1.0;
    let weights: Vec<f64> = w
        .iter()
        .enumerate()
        .map(|(i, wj)| {
            scale *= (i + 1) as f64 * ratio;
            1.0 + wj * scale
        })
        .collect();
    let meta = EstimatorMeta {
        degree: w.len() as u32,
        ..EstimatorMeta::default()
    };
    LinearEstimator::new(&weights, 1.0, meta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistinctEstimate {
    pub estimator: &'static str,
    pub k: u64,
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "L")]
    pub degree: usize,
    #[serde(rename = "M")]
    pub grid: usize,
    pub regime: Regime,
    pub residual: f64,
    pub raw: f64,
    pub estimate: f64,
    pub warnings: Vec<String>,
}

/// Full pipeline, with the raw value projected onto `[S_plug, k]`.
pub fn estimate_distinct(f: &Fingerprint, cfg: &DistinctConfig) -> Result<DistinctEstimate> {
    let (degree, grid) = select_params(cfg)?;
    let sol = solve_weights(degree, grid)?;
    let est = coeffs_from_weights(&sol.w, cfg, grid)?;
    let raw = est.raw(f);
    let plug = plugin_support(f);
    let mut warnings = Vec::new();
    if plug > cfg.k {
        warnings.push(format!("observed support {plug} exceeds k = {}", cfg.k));
    }
    let estimate = round_half_up(raw).min(cfg.k as f64).max(plug as f64);
    Ok(DistinctEstimate {
        estimator: "distinct",
        k: cfg.k,
        n: cfg.n,
        alpha: cfg.alpha,
        beta: cfg.beta,
        degree,
        grid,
        regime: sol.regime,
        residual: sol.residual,
        raw,
        estimate,
        warnings,
    })
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn cfg(k: u64, n: u64, alpha: f64, beta: f64) -> DistinctConfig {
        DistinctConfig { k, n, alpha, beta }
    }

    #[test]
    fn parameter_examples() {
        assert_eq!(select_params(&cfg(10_000, 20_000, 0.5, 1.0)).unwrap(), (4, 5));
        assert_eq!(select_params(&cfg(10_000, 100_000, 0.5, 1.0)).unwrap(), (4, 1));
        assert_eq!(select_params(&cfg(10_000, 100_000, 1e-9, 1.0)).unwrap().0, 1);
        assert!(select_params(&cfg(10_000, 100, 1.0, 0.5)).is_err());
        assert!(select_params(&cfg(2, 100, 0.5, 1.0)).is_err());
    }

    #[test]
    fn design_examples() {
        let b = build_design_b(1, 2);
        assert_eq!(b.as_slice(), &[0.5, 1.0]);
        let b = build_design_b(2, 2);
        assert_eq!(b.row(0).iter().copied().collect::<Vec<_>>(), vec![0.5, 0.25]);
        assert_eq!(b.row(1).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0]);
        let b = build_design_b(5, 9);
        assert!(b.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn hand_solved_least_squares() {
        let sol = solve_weights(1, 2).unwrap();
        assert_eq!(sol.regime, Regime::LeastSquares);
        assert!((sol.w[0] - 1.2).abs() < 1e-12);
        assert!((sol.residual - 1.0 / 5f64.sqrt()).abs() < 1e-12);

        let sol = solve_weights(2, 3).unwrap();
        assert!((sol.residual - 1.0 / 19f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_exact() {
        for degree in 1..=10 {
            for grid in 1..=degree {
                let sol = solve_weights(degree, grid).unwrap();
                assert_eq!(sol.regime, Regime::Interpolation);
                assert_eq!(sol.w.len(), degree);
                assert!(sol.residual <= 1e-8 * (grid as f64).sqrt(), "L={degree} M={grid}");
            }
        }
    }

    #[test]
    fn weight_transform() {
        let c = cfg(10, 5, 0.5, 1.0);
        let e = coeffs_from_weights(&[1.2], &c, 2).unwrap();
        assert!((e.corrections()[0] - 1.2).abs() < 1e-12);
        let e = coeffs_from_weights(&[0.0, 0.0], &c, 2).unwrap();
        assert_eq!(e.corrections(), vec![0.0, 0.0]);

        let doubled = cfg(10, 10, 0.5, 1.0);
        let a = coeffs_from_weights(&[1.0, 1.0], &c, 2).unwrap().corrections();
        let b = coeffs_from_weights(&[1.0, 1.0], &doubled, 2).unwrap().corrections();
        assert!((b[0] - a[0] / 2.0).abs() < 1e-12);
        assert!((b[1] - a[1] / 4.0).abs() < 1e-12);
    }

    #[test]
    fn pipeline_composes_worked_values() {
        // k = 10, n = 5: L = max(1, ⌊0.3 ln 10⌋) = 1, M = ⌈0.4342 * 10 ln 10 / 5⌉ = 2
        let c = cfg(10, 5, 0.3, 0.4342);
        assert_eq!(select_params(&c).unwrap(), (1, 2));
        let f = Fingerprint::from_entries([(1, 2)]).unwrap();
        let out = estimate_distinct(&f, &c).unwrap();
        assert!((out.raw - (2.0 + 1.2 * 2.0)).abs() < 1e-12);
        assert_eq!(out.estimate, 4.0);
    }

    #[test]
    fn estimate_is_clamped() {
        let c = cfg(10, 5, 0.3, 0.4342);
        let f = Fingerprint::from_entries([(1, 9)]).unwrap();
        assert_eq!(estimate_distinct(&f, &c).unwrap().estimate, 10.0);
    }
}
