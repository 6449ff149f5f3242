use super::Polynomial;
use crate::error::{Error, Result};

/// Discrete Chebyshev polynomial `t_m` on `{0, ..., n-1}`.
///
/// `t_m(x) = Δ^m [ (x)_m (x - n)_m ] / m!`, with the forward differences taken
/// exactly in integer arithmetic on the expanded monomial form. The family is
/// orthogonal under counting measure with `Σ_j t_m(j)^2 = (n+m)_{2m+1}/(2m+1)`.
pub fn discrete_chebyshev(m: u32, n: u32) -> Result<Polynomial> {
    if m >= n {
        return Err(Error::domain(format!("discrete chebyshev needs m < n, got m = {m}, n = {n}")));
    }
    let overflow = || Error::Domain(format!("discrete chebyshev (m = {m}, n = {n}) overflows exact arithmetic"));
    // p(x) = prod_{i<m} (x - i)(x - n - i)
    let mut p: Vec<i128> = vec![1];
    for i in 0..m {
        p = mul_linear(&p, -i128::from(i)).ok_or_else(overflow)?;
        p = mul_linear(&p, -i128::from(n) - i128::from(i)).ok_or_else(overflow)?;
    }
    for _ in 0..m {
        p = forward_difference(&p).ok_or_else(overflow)?;
    }
    let factorial: f64 = (1..=m).map(f64::from).product();
    Ok(Polynomial::from_finite(
        p.iter().map(|&c| c as f64 / factorial).collect(),
    ))
}

fn mul_linear(p: &[i128], root_neg: i128) -> Option<Vec<i128>> {
    // p(x) * (x + root_neg)
    let mut out = vec![0i128; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        out[k + 1] = out[k + 1].checked_add(c)?;
        out[k] = out[k].checked_add(c.checked_mul(root_neg)?)?;
    }
    Some(out)
}

/// `p(x + 1) - p(x)` in exact arithmetic.
fn forward_difference(p: &[i128]) -> Option<Vec<i128>> {
    let deg = p.len() - 1;
    let mut shifted = vec![0i128; p.len()];
    // (x+1)^k = Σ_j C(k, j) x^j
    for (k, &c) in p.iter().enumerate() {
        let mut binom: i128 = 1;
        for (j, slot) in shifted.iter_mut().enumerate().take(k + 1) {
            *slot = slot.checked_add(c.checked_mul(binom)?)?;
            binom = binom.checked_mul((k - j) as i128)? / (j + 1) as i128;
        }
    }
    let mut out = shifted
        .iter()
        .zip(p)
        .map(|(a, b)| a.checked_sub(*b))
        .collect::<Option<Vec<i128>>>()?;
    out.truncate(deg.max(1));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_examples() {
        assert_eq!(discrete_chebyshev(0, 3).unwrap().coeffs(), &[1.0]);
        assert_eq!(discrete_chebyshev(1, 3).unwrap().coeffs(), &[-2.0, 2.0]);
        let t1 = discrete_chebyshev(1, 3).unwrap();
        let norm: f64 = (0..3).map(|j| t1.eval(f64::from(j)).powi(2)).sum();
        assert_eq!(norm, 8.0);
    }

    #[test]
    fn requires_m_below_n() {
        assert!(discrete_chebyshev(3, 3).is_err());
        assert!(discrete_chebyshev(4, 3).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        assert!(discrete_chebyshev(30, 100_000).is_err());
    }

    #[test]
    fn difference_of_square() {
        assert_eq!(forward_difference(&[0, 0, 1]), Some(vec![1, 2]));
        assert_eq!(forward_difference(&[5]), Some(vec![0]));
    }
}
