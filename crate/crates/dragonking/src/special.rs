//! Special functions: the modified Bessel function K1.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Chebyshev coefficients of `g(t) = sqrt(z) e^z K1(z)` with `t = 4/z - 1`,
/// valid for `z >= 2`. Generated offline from a 50-digit reference evaluation
/// of K1 on Chebyshev-Gauss nodes; truncated where terms drop below 1e-17.
/// Convention: `g = C[0]/2 + sum_{k>=1} C[k] T_k(t)`.
const K1_CHEB: [f64; 24] = [
    2.720_626_190_484_442_7,
    1.039_237_365_768_172_4e-1,
    -2.857_816_859_622_779_4e-3,
    1.952_155_184_713_516_3e-4,
    -1.936_197_974_166_083e-5,
    2.406_484_947_837_217_1e-6,
    -3.501_960_603_087_812_5e-7,
    5.741_084_125_450_049_3e-8,
    -1.034_576_246_567_809_7e-8,
    2.015_049_755_197_034_6e-9,
    -4.190_354_759_341_925_6e-10,
    9.218_315_187_605_314_1e-11,
    -2.129_967_838_427_791e-11,
    5.139_639_673_482_343_5e-12,
    -1.289_173_960_949_822_9e-12,
    3.348_419_666_052_243_1e-13,
    -8.976_705_182_010_146_1e-14,
    2.477_154_424_219_598_7e-14,
    -7.019_837_089_214_768_8e-15,
    2.038_703_166_239_860_9e-15,
    -6.057_047_270_643_017_7e-16,
    1.838_093_575_243_045_2e-16,
    -5.689_462_849_193_643_1e-17,
    1.794_051_047_886_345_1e-17,
];

/// Clenshaw evaluation of a Chebyshev series on [-1, 1].
fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    b1 - t * b2 - 0.5 * coeffs[0]
}

/// Modified Bessel function of the second kind, order 1.
///
/// Relative error is below 1e-12 on the whole positive axis. For `z <= 2`
/// the ascending series is used (no cancellation there); for `z > 2` a
/// Chebyshev expansion of the exponentially scaled function.
pub fn bessel_k1(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::validation(format!(
            "bessel_k1 requires z > 0, got {z}"
        )));
    }
    if z <= 2.0 {
        Ok(k1_series(z))
    } else {
        let t = 4.0 / z - 1.0;
        Ok(clenshaw(&K1_CHEB, t) * (-z).exp() / z.sqrt())
    }
}

/// Ascending series: K1(z) = ln(z/2) I1(z) + 1/z
///   - (z/4) sum_k [psi(k+1) + psi(k+2)] (z^2/4)^k / (k! (k+1)!).
fn k1_series(z: f64) -> f64 {
    let q = 0.25 * z * z;

    // I1 by its own rapidly converging series.
    let mut i1_term = 0.5 * z;
    let mut i1 = i1_term;
    let mut k = 1.0;
    loop {
        i1_term *= q / (k * (k + 1.0));
        i1 += i1_term;
        if i1_term < 1e-18 * i1 {
            break;
        }
        k += 1.0;
    }

    // psi(1) = -gamma; psi(k+1) = psi(k) + 1/k.
    let mut psi_a = -EULER_GAMMA; // psi(k+1) at k=0
    let mut psi_b = 1.0 - EULER_GAMMA; // psi(k+2) at k=0
    let mut term = 1.0; // (z^2/4)^k / (k! (k+1)!)
    let mut sum = psi_a + psi_b;
    let mut kk = 1.0;
    loop {
        term *= q / (kk * (kk + 1.0));
        psi_a += 1.0 / kk;
        psi_b += 1.0 / (kk + 1.0);
        let t = (psi_a + psi_b) * term;
        sum += t;
        if t.abs() < 1e-18 * sum.abs() {
            break;
        }
        kk += 1.0;
    }

    (0.5 * z).ln() * i1 + 1.0 / z - 0.25 * z * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;
    use approx::assert_relative_eq;

    /// Independent oracle: K1(z) = int_0^inf exp(-z cosh t) cosh t dt,
    /// by adaptive quadrature on a truncated interval. The integrand is
    /// scaled by e^z so the quadrature tolerance stays relative to the
    /// result even when K1 itself is tiny.
    fn k1_oracle(z: f64) -> f64 {
        // beyond t_max the scaled integrand is below exp(-745)
        let t_max = (745.0 / z + 1.0).acosh();
        let scaled =
            adaptive_simpson(&|t: f64| (-z * (t.cosh() - 1.0)).exp() * t.cosh(), 0.0, t_max, 1e-14)
                .unwrap();
        scaled * (-z).exp()
    }

    #[test]
    fn k1_at_one_matches_quadrature_oracle() {
        let v = bessel_k1(1.0).unwrap();
        assert_relative_eq!(v, 0.601_907_230_2, max_relative = 1e-9);
        assert_relative_eq!(v, k1_oracle(1.0), max_relative = 1e-10);
    }

    #[test]
    fn k1_at_ten_matches_quadrature_oracle() {
        let v = bessel_k1(10.0).unwrap();
        assert_relative_eq!(v, 1.864_9e-5, max_relative = 1e-4);
        assert_relative_eq!(v, k1_oracle(10.0), max_relative = 1e-9);
    }

    #[test]
    fn k1_small_argument_asymptote() {
        // z K1(z) -> 1 as z -> 0+
        let z = 1e-6;
        assert!((z * bessel_k1(z).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn k1_oracle_agreement_across_scales() {
        for &z in &[0.1, 0.5, 1.5, 2.0, 2.5, 3.0, 5.0, 8.0, 20.0, 50.0] {
            assert_relative_eq!(
                bessel_k1(z).unwrap(),
                k1_oracle(z),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn k1_branch_continuity_at_two() {
        let below = bessel_k1(2.0 - 1e-12).unwrap();
        let above = bessel_k1(2.0 + 1e-12).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-10);
    }

    #[test]
    fn k1_rejects_nonpositive() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
    }
}
