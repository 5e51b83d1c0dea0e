//! Emit the data behind a tail plot: empirical tail, fitted tail and the
//! 95%/99% pointwise bands on a log-spaced grid plus the window's own
//! order statistics.
//!
//! Writes band.csv to the current directory; plot x against the remaining
//! columns on log-log axes to get the usual tail panel.
//!
//! Run with: cargo run --example band_plot

use dragonking::dktest::{full_report, TestConfig};
use dragonking::io::band_plot_csv;
use dragonking::tailfit::Family;
use dragonking::{DistributionModel, Result, Seed, Side, TailWindow};

fn main() -> Result<()> {
    let model = DistributionModel::Weibull { beta: 1.0, tau: 0.5 };
    let sample = model.sample(5000, Seed(9))?;
    let window = TailWindow::standard(Side::Right);
    let report = full_report(&sample, &window, Family::Weibull, &TestConfig::default())?;

    let csv = band_plot_csv(&report);
    std::fs::write("band.csv", &csv)?;
    println!(
        "wrote band.csv: {} rows ({} grid + {} window order statistics)",
        report.band.xs.len(),
        report.band.grid_points,
        report.band.xs.len() - report.band.grid_points
    );
    Ok(())
}
