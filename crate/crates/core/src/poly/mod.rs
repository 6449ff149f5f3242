//! Approximation-theory kernel.
//!
//! Polynomials are stored in the monomial basis in double precision. Every
//! degree used by the estimators is logarithmic in the alphabet size, so
//! conditioning stays manageable without extended precision.

mod bernstein;
mod chebyshev;
mod discrete;
mod remez;

pub use bernstein::bernstein_eval;
pub use chebyshev::{chebyshev_first_kind, shifted_chebyshev_pl, MAX_CHEBYSHEV_DEGREE};
pub use discrete::discrete_chebyshev;
pub use remez::{remez, RemezOptions, RemezResult};

use std::fmt;

use crate::error::{Error, Result};

/// A real polynomial in the monomial basis; `coeffs()[m]` multiplies `x^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, rejecting NaN and infinite coefficients.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::domain(format!("coefficient {i} is not finite")));
        }
        Ok(Self::from_finite(coeffs))
    }

    pub(crate) fn from_finite(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        debug_assert!(coeffs.iter().all(|c| c.is_finite()));
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    /// The polynomial `x`.
    pub fn identity() -> Self {
        Polynomial {
            coeffs: vec![0.0, 1.0],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `x^m`, zero beyond the stored length.
    pub fn coeff(&self, m: usize) -> f64 {
        self.coeffs.get(m).copied().unwrap_or(0.0)
    }

    /// Highest index with a nonzero coefficient; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Polynomial::from_finite(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::from_finite((0..len).map(|m| self.coeff(m) + other.coeff(m)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_finite(out)
    }

    /// Returns `q(x) = p(scale * x + shift)`, expanded by Horner's scheme on
    /// polynomials.
    pub fn compose_affine(&self, scale: f64, shift: f64) -> Self {
        let inner = Polynomial {
            coeffs: vec![shift, scale],
        };
        let mut acc = Polynomial::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(&inner).add(&Polynomial::constant(c));
        }
        acc.truncate(self.coeffs.len());
        acc
    }

    fn truncate(&mut self, len: usize) {
        self.coeffs.truncate(len.max(1));
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 && !(first && m == self.coeffs.len() - 1) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match m {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{m}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Falling factorial `x (x-1) ... (x-m+1)`; the empty product is 1.
pub fn falling_factorial(x: f64, m: u32) -> f64 {
    (0..m).map(|i| x - f64::from(i)).product()
}
