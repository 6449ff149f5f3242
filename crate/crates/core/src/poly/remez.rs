//! Best uniform polynomial approximation by single-point Remez exchange.
//!
//! Each iteration solves the levelled system `f(x_j) - Q(x_j) = (-1)^j δ` on
//! the current reference set, locates the global maximiser `ξ` of `|f - Q|`
//! and swaps it into the reference set so that the error keeps alternating in
//! sign. The iteration stops once the levelled error `|δ|` and the true
//! uniform deviation `d` agree to `(d - |δ|)/d <= rel_tol`.
//!
//! The linear systems are posed in the Chebyshev basis of `[a, b]`; the
//! monomial form is produced once at the end.

use nalgebra::{DMatrix, DVector};

use super::Polynomial;
use crate::error::{Error, Result};

/// Points in the coarse scan of each sub-interval.
const SCAN_POINTS: usize = 64;
const GOLDEN_ITERS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemezOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RemezOptions {
    fn default() -> Self {
        RemezOptions {
            rel_tol: 1e-9,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemezResult {
    /// Best approximant in the monomial basis.
    pub poly: Polynomial,
    /// Uniform deviation `max |f - poly|` over `[a, b]`.
    pub error: f64,
    /// The final reference set, `degree + 2` sorted points.
    pub alternation_points: Vec<f64>,
    pub iterations: usize,
    /// Same approximant in the Chebyshev basis `T_i((2x - a - b)/(b - a))`.
    pub chebyshev_coeffs: Vec<f64>,
    pub interval: (f64, f64),
}

impl RemezResult {
    /// Evaluates the approximant through its Chebyshev form (Clenshaw), which
    /// is better conditioned than the monomial form at high degree.
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.interval;
        clenshaw(&self.chebyshev_coeffs, to_unit(x, a, b))
    }
}

/// Computes the degree-`degree` polynomial of best uniform approximation to
/// `f` on `[a, b]`.
pub fn remez<F>(f: F, a: f64, b: f64, degree: u32, opts: RemezOptions) -> Result<RemezResult>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("remez needs a finite interval a < b, got [{a}, {b}]")));
    }
    if !(2.0 / (b - a)).is_finite() {
        return Err(Error::domain(format!("interval [{a}, {b}] is too narrow to rescale")));
    }
    if !(opts.rel_tol > 0.0) {
        return Err(Error::domain("remez rel_tol must be positive"));
    }
    let deg = degree as usize;
    let refs = deg + 2;
    let mut xs = initial_nodes(a, b, deg);
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(format!(
            "{refs} reference points are not distinguishable in [{a}, {b}]"
        )));
    }
    let eval_f = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::domain(format!("function is not finite at {x}")))
        }
    };

    let mut best: Option<(RemezResult, f64)> = None;
    for iteration in 1..=opts.max_iter.max(1) {
        let fx = xs.iter().map(|&x| eval_f(x)).collect::<Result<Vec<_>>>()?;
        let (coeffs, delta) = solve_levelled(&xs, &fx, a, b, deg)?;

        let err = |x: f64| f(x) - clenshaw(&coeffs, to_unit(x, a, b));
        let (xi, d) = global_max(&err, &xs, a, b);
        let gap = if d > 0.0 { (d - delta.abs()) / d } else { 0.0 };

        let candidate = || RemezResult {
            poly: monomial_from_chebyshev(&coeffs, a, b),
            error: d,
            alternation_points: xs.clone(),
            iterations: iteration,
            chebyshev_coeffs: coeffs.clone(),
            interval: (a, b),
        };
        if gap <= opts.rel_tol {
            return Ok(candidate());
        }
        if best.as_ref().is_none_or(|(r, _)| d < r.error) {
            best = Some((candidate(), gap));
        }
        exchange(&mut xs, xi, err(xi), delta);
    }
    let (best, gap) = best.expect("at least one iteration ran");
    Err(Error::Convergence {
        iterations: opts.max_iter,
        gap,
        best: Box::new(best),
    })
}

/// Chebyshev extrema of `[a, b]`, endpoints included.
fn initial_nodes(a: f64, b: f64, deg: usize) -> Vec<f64> {
    let m = deg + 1;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut xs: Vec<f64> = (0..=m)
        .map(|j| mid - half * (std::f64::consts::PI * j as f64 / m as f64).cos())
        .collect();
    xs[0] = a;
    xs[m] = b;
    xs
}

fn to_unit(x: f64, a: f64, b: f64) -> f64 {
    (2.0 * x - a - b) / (b - a)
}

fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + t * b1 - b2
}

fn solve_levelled(xs: &[f64], fx: &[f64], a: f64, b: f64, deg: usize) -> Result<(Vec<f64>, f64)> {
    let n = deg + 2;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (j, &x) in xs.iter().enumerate() {
        let t = to_unit(x, a, b);
        let (mut t_prev, mut t_cur) = (1.0, t);
        m[(j, 0)] = 1.0;
        if deg >= 1 {
            m[(j, 1)] = t;
        }
        for i in 2..=deg {
            let t_next = 2.0 * t * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
            m[(j, i)] = t_cur;
        }
        m[(j, deg + 1)] = if j % 2 == 0 { 1.0 } else { -1.0 };
    }
    let rhs = DVector::from_column_slice(fx);
    let lu = m.clone().lu();
    let sol = lu.solve(&rhs).ok_or_else(|| Error::Numerical {
        message: "singular levelled system in remez".into(),
        condition: f64::INFINITY,
    })?;
    let coeffs = sol.as_slice()[..=deg].to_vec();
    Ok((coeffs, sol[deg + 1]))
}

/// Global maximiser of `|err|` over `[a, b]`: a 64-point scan of each gap
/// between consecutive reference points, refined by golden-section search.
fn global_max<E: Fn(f64) -> f64>(err: &E, xs: &[f64], a: f64, b: f64) -> (f64, f64) {
    let mut knots = Vec::with_capacity(xs.len() + 2);
    knots.push(a);
    knots.extend_from_slice(xs);
    knots.push(b);
    knots.dedup();

    let mut best = (a, err(a).abs());
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !(hi > lo) {
            continue;
        }
        let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
        let grid = |i: usize| if i == SCAN_POINTS - 1 { hi } else { lo + step * i as f64 };
        let (mut arg, mut val) = (0, f64::NEG_INFINITY);
        for i in 0..SCAN_POINTS {
            let v = err(grid(i)).abs();
            if v > val {
                arg = i;
                val = v;
            }
        }
        let (x, v) = golden_max(
            |x| err(x).abs(),
            grid(arg.saturating_sub(1)),
            grid((arg + 1).min(SCAN_POINTS - 1)),
        );
        let (x, v) = if v > val { (x, v) } else { (grid(arg), val) };
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

fn golden_max<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..GOLDEN_ITERS {
        if hi - lo <= f64::EPSILON * (lo.abs() + hi.abs()) {
            break;
        }
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        }
    }
    if g1 >= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

/// Single-point exchange preserving sign alternation. The error at reference
/// `j` has sign `(-1)^j sign(δ)`.
fn exchange(xs: &mut Vec<f64>, xi: f64, err_xi: f64, delta: f64) {
    let last = xs.len() - 1;
    let sign_at = |j: usize| {
        let s = if delta >= 0.0 { 1.0 } else { -1.0 };
        if j.is_multiple_of(2) {
            s
        } else {
            -s
        }
    };
    let same = |j: usize| (err_xi >= 0.0) == (sign_at(j) > 0.0);
    if xi < xs[0] {
        if same(0) {
            xs[0] = xi;
        } else {
            xs.pop();
            xs.insert(0, xi);
        }
    } else if xi > xs[last] {
        if same(last) {
            xs[last] = xi;
        } else {
            xs.remove(0);
            xs.push(xi);
        }
    } else {
        let j = xs.partition_point(|&x| x <= xi).saturating_sub(1).min(last - 1);
        if same(j) {
            xs[j] = xi;
        } else {
            xs[j + 1] = xi;
        }
    }
}

fn monomial_from_chebyshev(coeffs: &[f64], a: f64, b: f64) -> Polynomial {
    // Clenshaw recurrence carried out on polynomials in x, with t = αx + γ.
    let t = Polynomial::from_finite(vec![-(a + b) / (b - a), 2.0 / (b - a)]);
    let two_t = t.scale(2.0);
    let mut b1 = Polynomial::zero();
    let mut b2 = Polynomial::zero();
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = two_t.mul(&b1).sub(&b2).add(&Polynomial::constant(c));
        b2 = std::mem::replace(&mut b1, b0);
    }
    let mut out = t.mul(&b1).sub(&b2).add(&Polynomial::constant(coeffs[0]));
    out.truncate(coeffs.len());
    out
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
    fn cubic_by_quadratic() {
        let r = remez(|x| x * x * x, -1.0, 1.0, 2, RemezOptions::default()).unwrap();
        assert!((r.error - 0.25).abs() < 1e-8);
        let want = [0.0, 0.75, 0.0];
        for (m, w) in want.iter().enumerate() {
            assert!((r.poly.coeff(m) - w).abs() < 1e-7, "coeff {m}");
        }
        assert_eq!(r.alternation_points.len(), 4);
    }

    #[test]
    fn identity_by_constant() {
        let r = remez(|x| x, 0.0, 1.0, 0, RemezOptions::default()).unwrap();
        assert!((r.error - 0.5).abs() < 1e-9);
        assert!((r.poly.coeff(0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn entropy_kernel_degree_one() {
        let r = remez(phi, 0.0, 1.0, 1, RemezOptions::default()).unwrap();
        let want = 0.5 / std::f64::consts::E;
        assert!((r.error - want).abs() < 1e-6);
        assert!((r.poly.coeff(0) - want).abs() < 1e-6);
        assert!(r.poly.coeff(1).abs() < 1e-6);
    }

    #[test]
    fn monomials_match_monic_chebyshev_bound() {
        for deg in 1..=8u32 {
            let r = remez(|x| x.powi(deg as i32 + 1), -1.0, 1.0, deg, RemezOptions::default())
                .unwrap();
            let want = 2f64.powi(-(deg as i32));
            assert!((r.error - want).abs() < 1e-8, "degree {deg}: {}", r.error);
        }
    }

    #[test]
    fn equioscillation_holds() {
        let opts = RemezOptions::default();
        for deg in [2u32, 4, 6, 8] {
            let r = remez(phi, 0.0, 1.0, deg, opts).unwrap();
            assert_eq!(r.alternation_points.len(), deg as usize + 2);
            let errs: Vec<f64> = r
                .alternation_points
                .iter()
                .map(|&x| phi(x) - r.eval(x))
                .collect();
            for e in &errs {
                assert!(e.abs() >= r.error * (1.0 - opts.rel_tol) - 1e-14);
                assert!(e.abs() <= r.error + 1e-14);
            }
            for w in errs.windows(2) {
                assert!(w[0] * w[1] < 0.0);
            }
        }
    }

    #[test]
    fn convergence_error_carries_best() {
        let opts = RemezOptions {
            rel_tol: 1e-15,
            max_iter: 2,
        };
        match remez(phi, 0.0, 1.0, 10, opts) {
            Err(Error::Convergence { best, .. }) => {
                assert_eq!(best.alternation_points.len(), 12);
                assert!(best.error > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn domain_errors() {
        let o = RemezOptions::default();
        assert!(remez(|x| x, 1.0, 1.0, 2, o).is_err());
        assert!(remez(|x| x, 0.0, 1e-320, 40, o).is_err());
        assert!(remez(|x| 1.0 / x, 0.0, 1.0, 2, o).is_err());
    }
}
