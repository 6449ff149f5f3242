use super::Polynomial;
use crate::error::{Error, Result};

/// Highest Chebyshev degree the kernel will expand in the monomial basis.
pub const MAX_CHEBYSHEV_DEGREE: u32 = 64;

/// Monomial coefficients of `T_L`, built from `T_{k+1} = 2x T_k - T_{k-1}`.
pub fn chebyshev_first_kind(degree: u32) -> Result<Polynomial> {
    if degree > MAX_CHEBYSHEV_DEGREE {
        return Err(Error::Bounds {
            what: "chebyshev degree",
            value: u64::from(degree),
            cap: u64::from(MAX_CHEBYSHEV_DEGREE),
        });
    }
    let mut prev = vec![1.0];
    if degree == 0 {
        return Ok(Polynomial::from_finite(prev));
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..degree {
        let mut next = vec![0.0; cur.len() + 1];
        for (m, c) in cur.iter().enumerate() {
            next[m + 1] += 2.0 * c;
        }
        for (m, c) in prev.iter().enumerate() {
            next[m] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(Polynomial::from_finite(cur))
}

/// Shifted and scaled Chebyshev polynomial on `[l, r]` normalised so that
/// `P_L(0) = -1`:
///
/// `P_L(x) = -T_L((2x - r - l)/(r - l)) / T_L((-r - l)/(r - l))`.
///
/// Among degree-`L` polynomials through `(0, -1)` it has the smallest sup
/// norm on `[l, r]`, namely `1 / |T_L((-r - l)/(r - l))|`.
pub fn shifted_chebyshev_pl(degree: u32, l: f64, r: f64) -> Result<Polynomial> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::domain(format!("left endpoint must be positive, got {l}")));
    }
    if !(r > l) || !r.is_finite() {
        return Err(Error::domain(format!("need r > l, got l = {l}, r = {r}")));
    }
    let t = chebyshev_first_kind(degree)?;
    let scale = 2.0 / (r - l);
    let shift = -(r + l) / (r - l);
    let at_origin = t.eval(shift);
    let mut p = t.compose_affine(scale, shift).scale(-1.0 / at_origin);
    // The constant term is -T(shift)/T(shift); pin it.
    p.coeffs_mut()[0] = -1.0;
    Ok(p)
}

impl Polynomial {
    pub(crate) fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }
}
