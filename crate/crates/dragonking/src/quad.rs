//! Quadrature helpers shared by the distribution code.

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature with Richardson acceptance.
///
/// `tol` is an absolute error target on the whole interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 {
            return Err(Error::numerical(format!(
                "adaptive quadrature failed to converge on [{a}, {b}] (residual {delta:e})"
            )));
        }
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        let l = recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?;
        let r = recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }

    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::validation("quadrature bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// 5-point Gauss-Legendre rule on [a, b].
///
/// Exact for polynomials up to degree 9; used for the per-cell integrals of
/// the hyperbolic sampler grid where the cells are already fine.
pub fn gauss5<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    // Nodes/weights for [-1, 1].
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189_08,
        0.478_628_670_499_366_47,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for k in 0..5 {
        acc += W[k] * f(c + h * X[k]);
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_integrates_polynomial_exactly() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12).unwrap();
        // antiderivative x^4/4 - x^2 + x evaluated at 2: 4 - 4 + 2 = 2
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_gaussian_integral() {
        let v = adaptive_simpson(&|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn gauss5_matches_simpson_on_smooth_function() {
        let f = |x: f64| (-x).exp() * x.sin();
        let a = gauss5(&f, 0.0, 0.5);
        let b = adaptive_simpson(&f, 0.0, 0.5, 1e-13).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }
}
