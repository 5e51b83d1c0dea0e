//! Empirical distribution function and the pointwise CLT confidence
//! machinery built on it.
//!
//! The edf uses the strict-inequality convention
//! `F_n(x) = (1/n) * #{ x_i < x }`. This differs from the conventional
//! `<=` edf: at the largest observation the right-tail value is `1/n > 0`,
//! which keeps log-scale tail plots defined at the sample maximum. All tail
//! probabilities in this crate follow from that convention.

use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::error::{Error, Result};
use crate::tailfit::TailModel;

/// An ordered batch of observations with cached order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl Sample {
    /// Build a sample from raw observations (at least one, all finite).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("sample must contain at least one value"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "sample contains non-finite value {bad}"
            )));
        }
        let mut sorted = values.clone();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values, sorted })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Observations in input order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cached ascending order statistics.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// The k-th largest observation (k = 1 is the maximum).
    pub fn kth_largest(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.n() {
            return Err(Error::validation(format!(
                "rank {k} out of range for sample of size {}",
                self.n()
            )));
        }
        Ok(self.sorted[self.n() - k])
    }

    /// Edf value at `x` under the strict `<` convention.
    pub fn edf_value(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&v| v < x);
        below as f64 / self.n() as f64
    }

    /// Sample with every observation negated (used for left-tail analysis).
    pub fn negated(&self) -> Sample {
        Sample::new(self.values.iter().map(|v| -v).collect()).unwrap()
    }
}

/// Step-function view of a sample's empirical distribution function.
#[derive(Debug, Clone, Copy)]
pub struct Edf<'a> {
    sample: &'a Sample,
}

impl<'a> Edf<'a> {
    pub fn new(sample: &'a Sample) -> Self {
        Self { sample }
    }

    /// Fraction of sample values strictly less than `x`.
    pub fn value(&self, x: f64) -> f64 {
        self.sample.edf_value(x)
    }
}

/// Significance level together with the standard normal quantiles that
/// bound the pointwise interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceSpec {
    pub alpha: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

impl ConfidenceSpec {
    /// Build from a significance level in (0,1). `z_hi = -z_lo` exactly.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::validation(format!(
                "significance level must be in (0,1), got {alpha}"
            )));
        }
        let z_hi = normal_quantile(1.0 - alpha / 2.0)?;
        Ok(Self { alpha, z_lo: -z_hi, z_hi })
    }
}

/// Standard normal quantile, absolute error below 1e-9.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::validation(format!(
            "normal quantile requires p in (0,1), got {p}"
        )));
    }
    let normal = statrs::distribution::Normal::new(0.0, 1.0)
        .map_err(|e| Error::numerical(e.to_string()))?;
    Ok(normal.inverse_cdf(p))
}

/// Pointwise confidence interval for the edf at a point where the model
/// cdf equals `f_x`, for a sample of size `n`.
///
/// Returns `(f_x + z_lo * hw, f_x + z_hi * hw)` with
/// `hw = sqrt(f_x (1 - f_x) / n)`. Degenerate `f_x` in {0, 1} is rejected:
/// the CLT normalization divides by `sqrt(F(1-F))`, and a zero-width band
/// would classify everything as an outlier.
pub fn pointwise_ci(f_x: f64, n: usize, spec: &ConfidenceSpec) -> Result<(f64, f64)> {
    if !(f_x > 0.0 && f_x < 1.0) {
        return Err(Error::validation(format!(
            "pointwise CI requires F(x) strictly inside (0,1), got {f_x}"
        )));
    }
    if n == 0 {
        return Err(Error::validation("sample size must be at least 1"));
    }
    let hw = (f_x * (1.0 - f_x) / n as f64).sqrt();
    Ok((f_x + spec.z_lo * hw, f_x + spec.z_hi * hw))
}

/// Which tail of the distribution is under scrutiny.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Pointwise confidence band for a tail model evaluated on a set of
/// abscissae. Bounds are clipped to [0, 1]; `center` is the model tail value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Band {
    pub xs: Vec<f64>,
    pub center: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub side: Side,
    pub alpha: f64,
}

/// Evaluate the pointwise band of a fitted tail model.
///
/// The band center is the model tail value `M(x)` (a survival probability
/// for the right tail, a cdf value for the left tail) and the half-width is
/// `z * sqrt(M(x)(1 - M(x)) / n)`. Every `M(x)` must lie strictly in (0,1).
pub fn tail_band(
    model: &TailModel,
    xs: &[f64],
    n: usize,
    spec: &ConfidenceSpec,
    side: Side,
) -> Result<Band> {
    let mut center = Vec::with_capacity(xs.len());
    let mut lower = Vec::with_capacity(xs.len());
    let mut upper = Vec::with_capacity(xs.len());
    for &x in xs {
        let m = model.tail_value(x);
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::validation(format!(
                "model tail value {m} outside (0,1) at x={x}"
            )));
        }
        let (lo, hi) = pointwise_ci(m, n, spec)?;
        center.push(m);
        lower.push(lo.max(0.0));
        upper.push(hi.min(1.0));
    }
    Ok(Band {
        xs: xs.to_vec(),
        center,
        lower,
        upper,
        side,
        alpha: spec.alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tailfit::TailForm;
    use approx::assert_abs_diff_eq;

    /// Independent oracle for Phi: Taylor series of the error integral,
    /// valid for small |x|.
    fn phi_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0u32;
        loop {
            k += 1;
            term *= -x * x / 2.0 / k as f64;
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.abs() < 1e-16 {
                break;
            }
        }
        0.5 + sum / (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn edf_strict_inequality_convention() {
        let s = Sample::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.edf_value(0.0), 0.0);
        assert_abs_diff_eq!(s.edf_value(2.0), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(s.edf_value(10.0), 1.0);
        // at the maximum: (n-1)/n; just above: 1
        assert_abs_diff_eq!(s.edf_value(3.0), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(s.edf_value(3.0 + 1e-12), 1.0);
    }

    #[test]
    fn normal_quantile_symmetry_and_value() {
        assert_abs_diff_eq!(normal_quantile(0.5).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(normal_quantile(0.975).unwrap(), 1.959964, epsilon = 1e-6);
        for k in 1..50 {
            let p = k as f64 / 100.0;
            assert_abs_diff_eq!(
                normal_quantile(p).unwrap(),
                -normal_quantile(1.0 - p).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn normal_quantile_agrees_with_series_oracle() {
        // invert the series evaluation of Phi by bisection at p = 0.975
        let target = 0.975;
        let (mut lo, mut hi) = (0.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if phi_series(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(normal_quantile(target).unwrap(), lo, epsilon = 1e-9);
    }

    #[test]
    fn confidence_spec_symmetry() {
        let spec = ConfidenceSpec::new(0.05).unwrap();
        assert_eq!(spec.z_hi, -spec.z_lo);
        assert_abs_diff_eq!(phi_series(spec.z_hi), 0.975, epsilon = 1e-9);
    }

    #[test]
    fn pointwise_ci_arithmetic() {
        let spec = ConfidenceSpec::new(0.05).unwrap();
        let (lo, hi) = pointwise_ci(0.5, 100, &spec).unwrap();
        assert_abs_diff_eq!(lo, 0.40200, epsilon = 1e-5);
        assert_abs_diff_eq!(hi, 0.59800, epsilon = 1e-5);
    }

    #[test]
    fn pointwise_ci_half_width_scaling() {
        let spec = ConfidenceSpec::new(0.05).unwrap();
        let (lo1, hi1) = pointwise_ci(0.5, 100, &spec).unwrap();
        let (lo4, hi4) = pointwise_ci(0.5, 400, &spec).unwrap();
        assert_abs_diff_eq!((hi1 - lo1) / (hi4 - lo4), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn pointwise_ci_half_width_formula() {
        let spec = ConfidenceSpec::new(0.10).unwrap();
        let (lo, hi) = pointwise_ci(0.2, 1000, &spec).unwrap();
        let hw = 1.644854 * (0.16f64 / 1000.0).sqrt();
        assert_abs_diff_eq!((hi - lo) / 2.0, hw, epsilon = 1e-6);
        assert_abs_diff_eq!(hw, 0.020805, epsilon = 1e-6);
    }

    #[test]
    fn pointwise_ci_rejects_degenerate() {
        let spec = ConfidenceSpec::new(0.05).unwrap();
        assert!(pointwise_ci(0.0, 100, &spec).is_err());
        assert!(pointwise_ci(1.0, 100, &spec).is_err());
    }

    #[test]
    fn tail_band_power_example() {
        let model = TailModel::reference(TailForm::Power { b: 1.0, p: -1.0 });
        let spec = ConfidenceSpec::new(0.05).unwrap();
        let band = tail_band(&model, &[1000.0], 1000, &spec, Side::Right).unwrap();
        assert_abs_diff_eq!(band.center[0], 0.001, epsilon = 1e-15);
        let hw = band.upper[0] - band.center[0];
        assert_abs_diff_eq!(hw, 1.959964 * (0.001f64 * 0.999 / 1000.0).sqrt(), epsilon = 1e-7);
        assert_abs_diff_eq!(hw, 0.0019589, epsilon = 1e-6);
    }

    #[test]
    fn tail_band_weibull_example() {
        let model = TailModel::reference(TailForm::Weibull { beta: 1.0, tau: 1.0 });
        let spec = ConfidenceSpec::new(0.05).unwrap();
        let band = tail_band(&model, &[2.0f64.ln()], 100, &spec, Side::Right).unwrap();
        assert_abs_diff_eq!(band.center[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(band.upper[0] - band.center[0], 1.959964 * 0.05, epsilon = 1e-6);
    }

    #[test]
    fn tail_band_grows_with_confidence() {
        let model = TailModel::reference(TailForm::Power { b: 1.0, p: -1.0 });
        let mut prev = 0.0;
        for alpha in [0.2, 0.1, 0.05, 0.01, 1e-6, 1e-12] {
            let spec = ConfidenceSpec::new(alpha).unwrap();
            let band = tail_band(&model, &[100.0], 1000, &spec, Side::Right).unwrap();
            let hw = band.upper[0] - band.center[0];
            assert!(hw > prev, "half-width not monotone at alpha={alpha}");
            prev = hw;
        }
    }

    #[test]
    fn tail_band_rejects_out_of_range_center() {
        let model = TailModel::reference(TailForm::Power { b: 1.0, p: -1.0 });
        let spec = ConfidenceSpec::new(0.05).unwrap();
        // b x^p = 2 at x = 0.5: not a probability
        assert!(tail_band(&model, &[0.5], 1000, &spec, Side::Right).is_err());
    }

    #[test]
    fn band_symmetry_before_clipping() {
        let model = TailModel::reference(TailForm::Power { b: 0.5, p: -1.2 });
        let spec = ConfidenceSpec::new(0.05).unwrap();
        let xs: Vec<f64> = (1..50).map(|i| 1.0 + i as f64).collect();
        let band = tail_band(&model, &xs, 100_000, &spec, Side::Right).unwrap();
        for i in 0..band.xs.len() {
            assert_abs_diff_eq!(
                band.upper[i] - band.center[i],
                band.center[i] - band.lower[i],
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn sample_rejects_bad_input() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
    }
}
