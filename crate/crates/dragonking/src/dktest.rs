//! The classification test: is an extreme order statistic a dragon king
//! (outside the pointwise CI of the fitted tail) or a black swan (inside)?

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::edf::{pointwise_ci, ConfidenceSpec, Sample, Side};
use crate::error::{Error, Result};
use crate::tailfit::{fit_tail, select_tail_window, Family, TailModel, TailWindow};

/// Ranks and confidence levels at which the test is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Significance levels; both 5% and 1% by default, matching the usual
    /// dashed/dotted 95%/99% CI curves.
    pub alphas: Vec<f64>,
    /// "k-th largest" ranks to test.
    pub ranks: Vec<usize>,
    pub side: Side,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self { alphas: vec![0.05, 0.01], ranks: vec![4, 8, 12], side: Side::Right }
    }
}

impl TestConfig {
    fn validate(&self, n: usize) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::validation("at least one significance level required"));
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::validation(format!("alpha {a} outside (0,1)")));
            }
        }
        if self.ranks.is_empty() {
            return Err(Error::validation("at least one rank required"));
        }
        for &k in &self.ranks {
            if k == 0 || k > n {
                return Err(Error::validation(format!(
                    "rank {k} out of range for sample of size {n}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DragonKing,
    BlackSwan,
}

/// Side of the band center on which the observation falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Above,
    Below,
}

/// Per-rank, per-level outcome of the test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub rank: usize,
    /// The tested observation (in original units; negative for left tails).
    pub x: f64,
    /// Tail value tested against the interval: the fraction of the sample
    /// strictly above the observation, (k-1)/n when the top values are
    /// distinct. This calibrates the test; testing the inclusive fraction
    /// k/n instead inflates rejection rates well above nominal.
    pub edf_tail: f64,
    /// Model tail value at the observation.
    pub center: f64,
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub verdict: Verdict,
    pub direction: Direction,
    /// Signed distance from the center in band half-widths; |score| > 1
    /// means outside the interval. Observations inside but close to the
    /// edge may still deserve attention, so this is reported as a
    /// diagnostic without affecting the verdict.
    pub band_score: f64,
}

/// Classify the configured ranks of a sample against a tail model.
///
/// The tested abscissa is exactly the k-th largest observation; the tested
/// tail value is the exceedance fraction strictly above it. The verdict
/// compares that value against the pointwise interval around the model
/// tail value at the same abscissa.
pub fn classify(
    sample: &Sample,
    model: &TailModel,
    config: &TestConfig,
) -> Result<Vec<TestResult>> {
    let n = sample.n();
    config.validate(n)?;
    let work;
    let (s, sign) = match config.side {
        Side::Right => (sample, 1.0),
        Side::Left => {
            work = sample.negated();
            (&work, -1.0)
        }
    };

    let mut results = Vec::with_capacity(config.ranks.len() * config.alphas.len());
    for &k in &config.ranks {
        let x = s.kth_largest(k)?;
        let above = n - s.sorted().partition_point(|&v| v <= x);
        let edf_tail = above as f64 / n as f64;
        let center = model.tail_value(x);
        if !(center > 0.0 && center < 1.0) {
            return Err(Error::validation(format!(
                "model tail value {center} outside (0,1) at x={x}"
            )));
        }
        for &alpha in &config.alphas {
            let spec = ConfidenceSpec::new(alpha)?;
            let (lo, hi) = pointwise_ci(center, n, &spec)?;
            let (lower, upper) = (lo.max(0.0), hi.min(1.0));
            let inside = edf_tail >= lower && edf_tail <= upper;
            let half = spec.z_hi * (center * (1.0 - center) / n as f64).sqrt();
            results.push(TestResult {
                rank: k,
                x: sign * x,
                edf_tail,
                center,
                lower,
                upper,
                alpha,
                verdict: if inside { Verdict::BlackSwan } else { Verdict::DragonKing },
                direction: if edf_tail >= center { Direction::Above } else { Direction::Below },
                band_score: (edf_tail - center) / half,
            });
        }
    }
    Ok(results)
}

/// Band curves evaluated on the plotting grid: the sample's own tail order
/// statistics plus a log-spaced overlay grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCurve {
    /// Abscissae (magnitudes for left tails).
    pub xs: Vec<f64>,
    /// Empirical tail value at each abscissa.
    pub edf_tail: Vec<f64>,
    /// Model tail value.
    pub center: Vec<f64>,
    pub lo95: Vec<f64>,
    pub hi95: Vec<f64>,
    pub lo99: Vec<f64>,
    pub hi99: Vec<f64>,
    /// Number of log-spaced overlay points (the remaining rows are the
    /// tail-window order statistics).
    pub grid_points: usize,
}

/// Self-contained result of one `test` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub version: String,
    /// SHA-256 of the input observations (little-endian f64 bits).
    pub input_digest: String,
    pub n: usize,
    pub family: Family,
    pub model: TailModel,
    pub config: TestConfig,
    pub results: Vec<TestResult>,
    pub band: BandCurve,
    /// Free-form provenance (preprocessing choices, shift constants, ...).
    pub metadata: BTreeMap<String, String>,
}

pub(crate) fn sample_digest(sample: &Sample) -> String {
    let mut hasher = Sha256::new();
    for v in sample.values() {
        hasher.update(v.to_le_bytes());
    }
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

const OVERLAY_GRID_POINTS: usize = 200;

/// Run the whole pipeline on one sample: select the tail window, fit the
/// requested family, classify the configured ranks, and evaluate the band
/// curves on the plotting grid. One invocation produces the content of one
/// tail-plot panel.
pub fn full_report(
    sample: &Sample,
    window: &TailWindow,
    family: Family,
    config: &TestConfig,
) -> Result<TestReport> {
    if window.side != config.side {
        return Err(Error::validation(
            "window side and test side must agree",
        ));
    }
    let model = fit_tail(sample, window, family)?;
    let results = classify(sample, &model, config)?;
    // band rows overlay the window's rank points regardless of which
    // abscissae the fit itself used
    let points = select_tail_window(sample, window)?;

    // magnitudes: already positive for the right tail, negated for the left
    let work;
    let s = match window.side {
        Side::Right => sample,
        Side::Left => {
            work = sample.negated();
            &work
        }
    };
    let n = s.n();
    let x_lo = points.first().unwrap().0;
    let x_hi = s.sorted()[n - 1] * 1.05;
    let mut xs: Vec<f64> = (0..OVERLAY_GRID_POINTS)
        .map(|i| {
            let t = i as f64 / (OVERLAY_GRID_POINTS - 1) as f64;
            (x_lo.ln() + t * (x_hi.ln() - x_lo.ln())).exp()
        })
        .collect();
    let grid_points = xs.len();
    xs.extend(points.iter().map(|&(x, _)| x));

    let spec95 = ConfidenceSpec::new(0.05)?;
    let spec99 = ConfidenceSpec::new(0.01)?;
    let band95 = crate::edf::tail_band(&model, &xs, n, &spec95, window.side)?;
    let band99 = crate::edf::tail_band(&model, &xs, n, &spec99, window.side)?;
    let edf_tail: Vec<f64> = xs.iter().map(|&x| 1.0 - s.edf_value(x)).collect();

    Ok(TestReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_digest: sample_digest(sample),
        n,
        family,
        model,
        config: config.clone(),
        results,
        band: BandCurve {
            xs,
            edf_tail,
            center: band95.center,
            lo95: band95.lower,
            hi95: band95.upper,
            lo99: band99.lower,
            hi99: band99.upper,
            grid_points,
        },
        metadata: BTreeMap::new(),
    })
}
