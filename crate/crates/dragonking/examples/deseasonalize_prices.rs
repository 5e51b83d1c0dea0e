//! Electricity-price preparation: strip the long-term trend and the weekly
//! pattern from a spot-price series, difference the stochastic part, and
//! test the largest price changes for dragon kings.
//!
//! The input is synthetic: a slow annual swing, a weekly pattern with
//! cheap weekends, heavy-tailed spikes, and a few holidays priced like
//! Sundays. The decomposition satisfies P = T + s + X - shift exactly,
//! with the shift chosen so min(X) = min(P).
//!
//! Run with: cargo run --example deseasonalize_prices

use std::collections::HashSet;

use chrono::{Datelike, NaiveDate};
use dragonking::dktest::{full_report, TestConfig};
use dragonking::preprocess::{
    deseasonalize, price_changes, LtscMethod, TimeSeries, WeeklyStat,
};
use dragonking::rng::uniform;
use dragonking::tailfit::Family;
use dragonking::{Result, Seed, Side, TailWindow};

fn main() -> Result<()> {
    let anchor = NaiveDate::from_ymd_opt(2004, 1, 1).unwrap();
    let n = 1460; // four years of daily prices
    let seed = Seed(11);

    let mut holidays = HashSet::new();
    let mut values = Vec::with_capacity(n);
    for t in 0..n {
        let date = anchor + chrono::Days::new(t as u64);
        let annual = 40.0 + 8.0 * (t as f64 / 365.25 * std::f64::consts::TAU).sin();
        let weekend = if date.weekday().num_days_from_monday() >= 5 { -6.0 } else { 2.0 };
        if date.month() == 12 && date.day() >= 24 && date.day() <= 26 {
            holidays.insert(date);
        }
        // occasional heavy spike on top of mild noise
        let u = uniform(seed, t as u64);
        let noise = 4.0 * (uniform(seed, (n + t) as u64) - 0.5);
        let spike = if u > 0.995 { 60.0 * (u - 0.995) / 0.005 } else { 0.0 };
        values.push(annual + weekend + noise + spike);
    }
    let series = TimeSeries::new((0..n).map(|t| anchor + chrono::Days::new(t as u64)).collect(), values, None)?;

    let decomp = deseasonalize(
        &series,
        LtscMethod::Wavelet { level: 6 },
        WeeklyStat::Median,
        Some(&holidays),
    )?;
    let range = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    println!("trend range:      {:?}", range(&decomp.trend));
    println!("weekly range:     {:?}", range(&decomp.weekly));
    println!("stochastic range: {:?}", range(&decomp.stochastic));
    println!("shift:            {:.6}", decomp.shift);

    // daily changes of the deseasonalized prices; test the upper tail
    let changes = price_changes(&decomp)?;
    let window = TailWindow::standard(Side::Right);
    let config = TestConfig::default();
    let report = full_report(&changes, &window, Family::Power, &config)?;
    for r in &report.results {
        println!(
            "rank {:>2}  x = {:>8.3}  alpha = {:>4}%  {:?}",
            r.rank,
            r.x,
            100.0 * r.alpha,
            r.verdict
        );
    }
    Ok(())
}
