//! Financial drawdowns: scan a price path for peak-to-trough declines and
//! test whether the largest ones outrun a stretched-exponential law.
//!
//! The price path is a synthetic geometric random walk. Drawdown
//! magnitudes of such walks are roughly exponential (Weibull with shape
//! near 1), so the fitted Weibull tail should declare the top ranks black
//! swans most of the time.
//!
//! Run with: cargo run --example drawdowns

use chrono::NaiveDate;
use dragonking::dktest::{full_report, TestConfig};
use dragonking::io::report_to_text;
use dragonking::preprocess::{drawdowns, TimeSeries};
use dragonking::rng::uniform;
use dragonking::tailfit::Family;
use dragonking::{Result, Sample, Seed, Side, TailWindow};

fn main() -> Result<()> {
    // geometric walk: +-0.7% steps, 8000 days
    let seed = Seed(7);
    let mut prices = Vec::with_capacity(8000);
    let mut p = 100.0;
    for i in 0..8000u64 {
        let step = if uniform(seed, i) < 0.5 { -0.007 } else { 0.007 };
        p *= 1.0 + step;
        prices.push(p);
    }
    let anchor = NaiveDate::from_ymd_opt(1990, 1, 1).unwrap();
    let series = TimeSeries::daily_from(anchor, prices)?;

    let declines = drawdowns(&series)?;
    println!("found {} drawdowns", declines.len());
    let worst = declines
        .iter()
        .map(|d| d.magnitude)
        .fold(f64::INFINITY, f64::min);
    println!("worst decline: {:.1}%", 100.0 * worst);

    // test the magnitudes (positive fractions) against a Weibull tail
    let magnitudes: Vec<f64> = declines.iter().map(|d| -d.magnitude).collect();
    let sample = Sample::new(magnitudes)?;
    let window = TailWindow::standard(Side::Right);
    let config = TestConfig::default();
    let report = full_report(&sample, &window, Family::Weibull, &config)?;
    print!("{}", report_to_text(&report));
    Ok(())
}
