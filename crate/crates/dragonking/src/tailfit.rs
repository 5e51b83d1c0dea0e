//! Calibration of tail models: least-squares fits to the extreme region of
//! a sample and full-sample Weibull maximum likelihood.
//!
//! The tail probability attached to ascending rank `i` is `(n - i + 1)/n`:
//! under the strict `<` edf the value at the i-th order statistic is
//! `(i-1)/n`, so the survival there is `(n-i+1)/n`. No plotting-position
//! offsets are applied.

use serde::{Deserialize, Serialize};

use crate::edf::{Sample, Side};
use crate::error::{Error, Result};

/// Which order statistics a tail fit is calibrated on.
///
/// `upper_frac` and `cut_frac` delimit the "10%-1%" style window: the
/// largest `upper_frac` fraction of the sample, with the most extreme
/// `cut_frac` fraction excluded as too noisy for least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailWindow {
    pub upper_frac: f64,
    pub cut_frac: f64,
    pub side: Side,
}

impl TailWindow {
    pub fn new(upper_frac: f64, cut_frac: f64, side: Side) -> Result<Self> {
        if !(0.0 < cut_frac && cut_frac < upper_frac && upper_frac < 1.0) {
            return Err(Error::validation(format!(
                "tail window requires 0 < cut ({cut_frac}) < upper ({upper_frac}) < 1"
            )));
        }
        Ok(Self { upper_frac, cut_frac, side })
    }

    /// The default 10%-1% window on the right tail.
    pub fn standard(side: Side) -> Self {
        Self { upper_frac: 0.10, cut_frac: 0.01, side }
    }

    /// The wider 25%-2.5% window.
    pub fn wide(side: Side) -> Self {
        Self { upper_frac: 0.25, cut_frac: 0.025, side }
    }

    /// Resolved inclusive range of ascending order-statistic ranks.
    pub fn resolve(&self, n: usize) -> Result<(usize, usize)> {
        let lo = ((1.0 - self.upper_frac) * n as f64).ceil() as usize + 1;
        let hi = ((1.0 - self.cut_frac) * n as f64).floor() as usize;
        if hi < lo + 1 {
            return Err(Error::validation(format!(
                "tail window resolves to fewer than two order statistics for n={n}"
            )));
        }
        Ok((lo, hi))
    }
}

/// Which least-squares family to calibrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Power,
    Weibull,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Power => write!(f, "power"),
            Family::Weibull => write!(f, "weibull"),
        }
    }
}

impl Family {
    /// Fit this family to tail points.
    pub fn fit(&self, points: &[(f64, f64)]) -> Result<TailModel> {
        match self {
            Family::Power => fit_power_tail(points),
            Family::Weibull => fit_weibull_tail(points),
        }
    }
}

/// Functional form of a tail reference.
///
/// `Power` and `Weibull` arise from least-squares fits; `ParetoSurvival`
/// is the exact shifted-Pareto survival used as a true reference in the
/// Monte Carlo study, where the asymptotic power form would be inaccurate
/// at moderate x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailForm {
    /// Survival (or left-tail cdf) `b * x^p`.
    Power { b: f64, p: f64 },
    /// Survival `exp(-beta * x^tau)`.
    Weibull { beta: f64, tau: f64 },
    /// Exact survival `lambda^alpha * (x + lambda)^-alpha`.
    ParetoSurvival { lambda: f64, alpha: f64 },
}

impl TailForm {
    /// Model tail probability at `x`.
    pub fn tail_value(&self, x: f64) -> f64 {
        match *self {
            TailForm::Power { b, p } => b * x.powf(p),
            TailForm::Weibull { beta, tau } => (-beta * x.powf(tau)).exp(),
            TailForm::ParetoSurvival { lambda, alpha } => (lambda / (x + lambda)).powf(alpha),
        }
    }
}

/// Least-squares diagnostics for a fitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Residual sum of squares in the transformed (log) coordinates.
    pub rss: f64,
    pub n_points: usize,
}

/// A calibrated tail model with its fit metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub form: TailForm,
    pub side: Side,
    pub window: Option<TailWindow>,
    pub diagnostics: Option<FitDiagnostics>,
}

impl TailModel {
    /// A reference (non-fitted) right-tail model.
    pub fn reference(form: TailForm) -> Self {
        Self { form, side: Side::Right, window: None, diagnostics: None }
    }

    pub fn with_window(mut self, window: TailWindow) -> Self {
        self.side = window.side;
        self.window = Some(window);
        self
    }

    /// Model tail probability at `x`.
    pub fn tail_value(&self, x: f64) -> f64 {
        self.form.tail_value(x)
    }
}

/// Extract the calibration points `(x, tail probability)` of a window.
///
/// For the right tail these are `(x_(i), (n-i+1)/n)` over the resolved rank
/// range. For the left tail the sample is negated first, so the returned
/// abscissae are magnitudes of the most negative observations.
pub fn select_tail_window(sample: &Sample, window: &TailWindow) -> Result<Vec<(f64, f64)>> {
    let negated;
    let s = match window.side {
        Side::Right => sample,
        Side::Left => {
            negated = sample.negated();
            &negated
        }
    };
    let n = s.n();
    let (lo, hi) = window.resolve(n)?;
    let sorted = s.sorted();
    let mut points = Vec::with_capacity(hi - lo + 1);
    for i in lo..=hi {
        let x = sorted[i - 1];
        if x <= 0.0 {
            return Err(Error::validation(format!(
                "order statistic {x} at rank {i} is not positive; log-log fitting impossible"
            )));
        }
        let q = (n - i + 1) as f64 / n as f64;
        points.push((x, q));
    }
    Ok(points)
}

/// Evaluate the empirical tail on an equally spaced grid across the window.
///
/// The order statistics cluster near the window's lower edge, so a fit on
/// the rank points themselves is dominated by that edge. Reading the edf
/// survival `#{x_i > g}/n` at equally spaced abscissae between the first
/// and last window order statistics (one per window rank) weights the
/// whole window evenly instead.
pub fn grid_tail_points(sample: &Sample, window: &TailWindow) -> Result<Vec<(f64, f64)>> {
    let negated;
    let s = match window.side {
        Side::Right => sample,
        Side::Left => {
            negated = sample.negated();
            &negated
        }
    };
    let n = s.n();
    let (lo, hi) = window.resolve(n)?;
    let sorted = s.sorted();
    let x_lo = sorted[lo - 1];
    let x_hi = sorted[hi - 1];
    if x_lo <= 0.0 {
        return Err(Error::validation(format!(
            "window lower edge {x_lo} is not positive; log-log fitting impossible"
        )));
    }
    let count = hi - lo + 1;
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let g = x_lo + t * (x_hi - x_lo);
        let above = n - sorted.partition_point(|&v| v <= g);
        let q = above as f64 / n as f64;
        if q > 0.0 && q < 1.0 {
            points.push((g, q));
        }
    }
    Ok(points)
}

/// Calibrate a family to a sample's tail window.
///
/// The power family is fitted by `fit_power_tail` on the grid-evaluated
/// edf (`grid_tail_points`). The Weibull family starts from the double-log
/// regression on the rank points and is then refined by least squares on
/// the survival scale, which the double-log transform would otherwise
/// distort (it weights the smallest survival values most).
pub fn fit_tail(sample: &Sample, window: &TailWindow, family: Family) -> Result<TailModel> {
    match family {
        Family::Power => {
            let points = grid_tail_points(sample, window)?;
            Ok(fit_power_tail(&points)?.with_window(*window))
        }
        Family::Weibull => {
            let points = select_tail_window(sample, window)?;
            let init = fit_weibull_tail(&points)?;
            let (beta0, tau0) = match init.form {
                TailForm::Weibull { beta, tau } => (beta, tau),
                _ => unreachable!(),
            };
            Ok(refine_weibull_survival(&points, beta0, tau0)?.with_window(*window))
        }
    }
}

/// Least squares of `q` on `exp(-beta x^tau)` directly on the survival
/// scale, by Levenberg-Marquardt in `(ln beta, tau)` from a given start.
/// The reported rss is on the survival scale.
fn refine_weibull_survival(points: &[(f64, f64)], beta0: f64, tau0: f64) -> Result<TailModel> {
    check_fit_points(points)?;
    if !(beta0 > 0.0) || !tau0.is_finite() {
        return Err(Error::numerical(format!(
            "unusable Weibull start (beta={beta0}, tau={tau0})"
        )));
    }
    let rss_at = |lb: f64, tau: f64| -> f64 {
        points
            .iter()
            .map(|&(x, q)| {
                let r = q - (-(lb + tau * x.ln()).exp()).exp();
                r * r
            })
            .sum()
    };

    let mut lb = beta0.ln();
    let mut tau = tau0;
    let mut rss = rss_at(lb, tau);
    let mut lambda = 1e-3;
    for _ in 0..100 {
        // residual r = q - m with m = exp(-w), w = exp(lb + tau ln x);
        // dm/d(lb) = -w m, dm/d(tau) = -w ln(x) m
        let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
        let (mut g1, mut g2) = (0.0, 0.0);
        for &(x, q) in points {
            let lx = x.ln();
            let e = lb + tau * lx;
            // for e > 300 both m and w*m underflow to exactly 0
            let (j1, j2, m) = if e > 300.0 {
                (0.0, 0.0, 0.0)
            } else {
                let w = e.exp();
                let m = (-w).exp();
                (-w * m, -w * lx * m, m)
            };
            let r = q - m;
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * r;
            g2 += j2 * r;
        }
        if g1.abs().max(g2.abs()) <= 1e-15 * (1.0 + rss) {
            break;
        }
        let b11 = a11 * (1.0 + lambda);
        let b22 = a22 * (1.0 + lambda);
        let det = b11 * b22 - a12 * a12;
        if !(det > 0.0) {
            break;
        }
        let d1 = (b22 * g1 - a12 * g2) / det;
        let d2 = (b11 * g2 - a12 * g1) / det;
        let trial = rss_at(lb + d1, tau + d2);
        if trial.is_finite() && trial < rss {
            lb += d1;
            tau += d2;
            rss = trial;
            lambda = (lambda * 0.3).max(1e-12);
            if d1.abs().max(d2.abs()) < 1e-12 {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e10 {
                break;
            }
        }
    }
    let beta = lb.exp();
    if !(beta > 0.0 && beta.is_finite()) || !tau.is_finite() {
        return Err(Error::numerical("Weibull survival refinement diverged"));
    }
    Ok(TailModel {
        form: TailForm::Weibull { beta, tau },
        side: Side::Right,
        window: None,
        diagnostics: Some(FitDiagnostics { rss, n_points: points.len() }),
    })
}

fn check_fit_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::validation("tail fit requires at least two points"));
    }
    for &(x, q) in points {
        if x <= 0.0 {
            return Err(Error::validation(format!("fit abscissa {x} must be positive")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::validation(format!(
                "tail probability {q} must lie strictly inside (0,1)"
            )));
        }
    }
    Ok(())
}

/// Ordinary least squares of y on x; returns (intercept, slope, rss).
fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::validation(
            "degenerate regression: all abscissae identical",
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    Ok((intercept, slope, rss))
}

/// Fit `tail_prob = b * x^p` by OLS of `log q` on `log x`.
pub fn fit_power_tail(points: &[(f64, f64)]) -> Result<TailModel> {
    check_fit_points(points)?;
    let lx: Vec<f64> = points.iter().map(|&(x, _)| x.ln()).collect();
    let lq: Vec<f64> = points.iter().map(|&(_, q)| q.ln()).collect();
    let (intercept, slope, rss) = ols(&lx, &lq)?;
    Ok(TailModel {
        form: TailForm::Power { b: intercept.exp(), p: slope },
        side: Side::Right,
        window: None,
        diagnostics: Some(FitDiagnostics { rss, n_points: points.len() }),
    })
}

/// Fit `tail_prob = exp(-beta * x^tau)` by OLS of `log(-log q)` on `log x`.
pub fn fit_weibull_tail(points: &[(f64, f64)]) -> Result<TailModel> {
    check_fit_points(points)?;
    let lx: Vec<f64> = points.iter().map(|&(x, _)| x.ln()).collect();
    let ll: Vec<f64> = points.iter().map(|&(_, q)| (-q.ln()).ln()).collect();
    let (intercept, slope, rss) = ols(&lx, &ll)?;
    Ok(TailModel {
        form: TailForm::Weibull { beta: intercept.exp(), tau: slope },
        side: Side::Right,
        window: None,
        diagnostics: Some(FitDiagnostics { rss, n_points: points.len() }),
    })
}

/// Profile-likelihood rate: the maximizing `beta` for a fixed shape `tau`
/// is `n / sum x_i^tau`.
pub fn weibull_rate_given_shape(sample: &Sample, tau: f64) -> Result<f64> {
    let n = sample.n() as f64;
    if sample.values().iter().any(|&x| x <= 0.0) {
        return Err(Error::validation(
            "Weibull MLE requires strictly positive observations",
        ));
    }
    let s: f64 = sample.values().iter().map(|&x| x.powf(tau)).sum();
    Ok(n / s)
}

const MLE_SHAPE_BRACKET: (f64, f64) = (1e-3, 50.0);

/// Full-sample maximum likelihood fit of `F(x) = 1 - exp(-beta x^tau)`.
///
/// The shape is found by root-finding on the profile likelihood score
/// (Newton with a bisection fallback inside a fixed bracket) to
/// `|score| <= 1e-10`, then the rate follows in closed form.
pub fn fit_weibull_mle(sample: &Sample) -> Result<TailModel> {
    let n = sample.n();
    if n < 2 {
        return Err(Error::validation("Weibull MLE requires at least two observations"));
    }
    if sample.values().iter().any(|&x| x <= 0.0) {
        return Err(Error::validation(
            "Weibull MLE requires strictly positive observations",
        ));
    }
    let first = sample.values()[0];
    if sample.values().iter().all(|&x| x == first) {
        return Err(Error::validation(
            "all observations identical: Weibull shape diverges",
        ));
    }

    // Work with scaled magnitudes y = x / max|x| so powers cannot overflow;
    // the scale cancels inside the score ratio.
    let c = sample
        .sorted()
        .last()
        .copied()
        .unwrap();
    let ys: Vec<f64> = sample.values().iter().map(|&x| x / c).collect();
    let sum_ln_x: f64 = sample.values().iter().map(|&x| x.ln()).sum();
    let ln_c = c.ln();
    let nf = n as f64;

    let score_and_slope = |tau: f64| {
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &y in &ys {
            let w = y.powf(tau);
            let l = y.ln();
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        let ratio = s1 / s0;
        let score = nf / tau + sum_ln_x - nf * (ln_c + ratio);
        let slope = -nf / (tau * tau) - nf * (s2 * s0 - s1 * s1) / (s0 * s0);
        (score, slope)
    };

    let (mut lo, mut hi) = MLE_SHAPE_BRACKET;
    let (f_lo, _) = score_and_slope(lo);
    let (f_hi, _) = score_and_slope(hi);
    if f_lo <= 0.0 || f_hi >= 0.0 {
        return Err(Error::numerical(format!(
            "Weibull shape score not bracketed in [{lo}, {hi}] (f_lo={f_lo:e}, f_hi={f_hi:e})"
        )));
    }

    let mut tau = 1.0;
    for _ in 0..200 {
        let (f, df) = score_and_slope(tau);
        if f.abs() <= 1e-10 {
            let beta = weibull_rate_given_shape(sample, tau)?;
            return Ok(TailModel {
                form: TailForm::Weibull { beta, tau },
                side: Side::Right,
                window: None,
                diagnostics: None,
            });
        }
        // score is decreasing in tau
        if f > 0.0 {
            lo = lo.max(tau);
        } else {
            hi = hi.min(tau);
        }
        let newton = tau - f / df;
        tau = if df < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::numerical("Weibull MLE shape search did not converge"))
}
