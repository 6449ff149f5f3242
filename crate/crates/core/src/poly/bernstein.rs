use crate::error::{Error, Result};

const MAX_BERNSTEIN_ORDER: u64 = 1_000_000;

/// Bernstein polynomial `B_n(f)(x) = E[f(N/n)]` with `N ~ Binomial(n, x)`.
///
/// Binomial weights are accumulated in log space by the ratio recurrence
/// `w_{j+1} / w_j = (n - j)/(j + 1) * x/(1 - x)`.
pub fn bernstein_eval<F>(f: F, n: u64, x: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("bernstein point {x} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::domain("bernstein order must be positive"));
    }
    if n > MAX_BERNSTEIN_ORDER {
        return Err(Error::Bounds {
            what: "bernstein order",
            value: n,
            cap: MAX_BERNSTEIN_ORDER,
        });
    }
    let nf = n as f64;
    if x == 0.0 {
        return Ok(f(0.0));
    }
    if x == 1.0 {
        return Ok(f(1.0));
    }
    let log_odds = x.ln() - (-x).ln_1p();
    let mut log_w = nf * (-x).ln_1p();
    let mut total = 0.0;
    for j in 0..=n {
        let jf = j as f64;
        total += log_w.exp() * f(jf / nf);
        if j < n {
            log_w += ((nf - jf) / (jf + 1.0)).ln() + log_odds;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -x * x.ln()
        }
    }

    #[test]
    fn reproduces_affine() {
        let v = bernstein_eval(|x| x, 7, 0.3).unwrap();
        assert!((v - 0.3).abs() < 1e-14);
        let v = bernstein_eval(|x| 2.0 - 3.0 * x, 40, 0.81).unwrap();
        assert!((v - (2.0 - 3.0 * 0.81)).abs() < 1e-12);
    }

    #[test]
    fn hand_examples() {
        assert!((bernstein_eval(|x| x * x, 2, 0.5).unwrap() - 0.375).abs() < 1e-15);
        let want = 0.5 * phi(0.5);
        assert!((bernstein_eval(phi, 2, 0.5).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.173_287).abs() < 1e-6);
    }

    #[test]
    fn endpoints_and_domain() {
        assert_eq!(bernstein_eval(|x| x + 1.0, 5, 0.0).unwrap(), 1.0);
        assert_eq!(bernstein_eval(|x| x + 1.0, 5, 1.0).unwrap(), 2.0);
        assert!(bernstein_eval(|x| x, 5, 1.5).is_err());
        assert!(bernstein_eval(|x| x, 5, -0.1).is_err());
        assert!(bernstein_eval(|x| x, 0, 0.5).is_err());
    }

    #[test]
    fn large_order_mean() {
        let v = bernstein_eval(|x| x, 1_000_000, 0.37).unwrap();
        assert!((v - 0.37).abs() < 1e-8);
    }
}
