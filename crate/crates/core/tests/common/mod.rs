//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

/// `x (x-1) ... (x-m+1)` by direct product.
pub fn falling(x: f64, m: u32) -> f64 {
    (0..m).map(|i| x - f64::from(i)).product()
}

pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Poisson(λ) pmf at `j`, in log space.
pub fn poisson_pmf(lambda: f64, j: u64) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (j as f64 * lambda.ln() - lambda - ln_factorial(j)).exp()
}

/// Binomial(n, p) pmf at `j`.
pub fn binomial_pmf(n: u64, p: f64, j: u64) -> f64 {
    let ln_c = ln_factorial(n) - ln_factorial(j) - ln_factorial(n - j);
    let mut v = ln_c.exp();
    v *= p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
    v
}

/// `E[f(N)]` for `N ~ Poisson(λ)`, ignoring mass beyond `cap`.
pub fn poisson_expect<F: Fn(u64) -> f64>(lambda: f64, cap: u64, f: F) -> f64 {
    (0..=cap).map(|j| poisson_pmf(lambda, j) * f(j)).sum()
}

/// `E[f(N)]` for `N ~ Binomial(n, p)`, exhaustively.
pub fn binomial_expect<F: Fn(u64) -> f64>(n: u64, p: f64, f: F) -> f64 {
    (0..=n).map(|j| binomial_pmf(n, p, j) * f(j)).sum()
}

pub fn xlog1x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Binomial coefficient as a float.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Chebyshev `T_L(x)` via `cosh`/`cos`, independent of the recurrence.
pub fn chebyshev_t(degree: u32, x: f64) -> f64 {
    let l = f64::from(degree);
    if x.abs() <= 1.0 {
        (l * x.acos()).cos()
    } else if x > 1.0 {
        (l * x.acosh()).cosh()
    } else {
        let s = if degree.is_multiple_of(2) { 1.0 } else { -1.0 };
        s * (l * (-x).acosh()).cosh()
    }
}

/// Relative difference with an absolute floor.
pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
