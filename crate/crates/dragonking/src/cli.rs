//! Command-line front end.
//!
//! Subcommands mirror the library pipeline: `fit-tail`, `test`, `simulate`,
//! `drawdowns`, `deseasonalize`, `report`. Exit codes: 0 success, 1
//! validation or input error, 2 numerical failure.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dktest::{full_report, TestConfig};
use crate::edf::Side;
use crate::error::{Error, Result};
use crate::io as fileio;
use crate::preprocess::{
    deseasonalize, drawdowns, price_changes, LtscMethod, WeeklyStat,
};
use crate::rng::Seed;
use crate::study::{study_grid, StudyConfig};
use crate::tailfit::{fit_tail, Family, TailWindow};

#[derive(Parser)]
#[command(name = "dragonking", version, about = "Dragon-king tail test toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Power,
    Weibull,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Power => Family::Power,
            FamilyArg::Weibull => Family::Weibull,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Mean,
    Median,
}

#[derive(Clone, Copy, ValueEnum)]
enum LtscArg {
    Kernel,
    Wavelet,
}

/// `UPPER:CUT` tail-window fractions, e.g. `0.10:0.01`.
fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected UPPER:CUT, got `{s}`"))?;
    let upper: f64 = a.trim().parse().map_err(|_| format!("bad fraction `{a}`"))?;
    let cut: f64 = b.trim().parse().map_err(|_| format!("bad fraction `{b}`"))?;
    Ok((upper, cut))
}

#[derive(Args)]
struct TailArgs {
    /// One-column `value` CSV of observations.
    #[arg(long)]
    input: PathBuf,
    /// Tail family to fit.
    #[arg(long, value_enum, default_value = "power")]
    family: FamilyArg,
    /// Tail window as UPPER:CUT fractions of the sample.
    #[arg(long, value_parser = parse_window, default_value = "0.10:0.01")]
    window: (f64, f64),
    /// Which tail to analyze.
    #[arg(long, value_enum, default_value = "right")]
    side: SideArg,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a tail model to the window of largest observations.
    FitTail {
        #[command(flatten)]
        tail: TailArgs,
        /// Output file (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the dragon-king test and emit a report.
    Test {
        #[command(flatten)]
        tail: TailArgs,
        /// Comma-separated significance levels.
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.01")]
        alpha: Vec<f64>,
        /// Comma-separated "k-th largest" ranks to test.
        #[arg(long, value_delimiter = ',', default_value = "4,8,12")]
        ranks: Vec<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the band-curve table to this CSV file.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Run a Monte Carlo rejection-rate grid from a JSON configuration.
    Simulate {
        /// JSON file: {"cells": [ ... ]}, one study configuration per cell.
        #[arg(long)]
        config: PathBuf,
        /// Override the replication count of every cell.
        #[arg(long)]
        reps: Option<usize>,
        /// Override the master seed of every cell.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Extract drawdown magnitudes from a price series.
    Drawdowns {
        /// `date,value[,hour]` CSV of prices (single series expected).
        #[arg(long)]
        input: PathBuf,
        /// Emit |magnitude| instead of the signed (nonpositive) fraction.
        #[arg(long)]
        absolute: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decompose a price series into trend, weekly and stochastic parts.
    Deseasonalize {
        /// `date,value[,hour]` CSV; hourly panels are processed per hour.
        #[arg(long)]
        input: PathBuf,
        /// Long-term trend estimator.
        #[arg(long, value_enum, default_value = "kernel")]
        ltsc: LtscArg,
        /// Gaussian kernel bandwidth in days (kernel trend).
        #[arg(long, default_value_t = 64.0)]
        bandwidth: f64,
        /// Decomposition depth (wavelet trend).
        #[arg(long, default_value_t = 6)]
        level: usize,
        /// Statistic for the average week.
        #[arg(long, value_enum, default_value = "median")]
        stat: StatArg,
        /// Holiday calendar: one ISO-8601 date per line.
        #[arg(long)]
        holidays: Option<PathBuf>,
        /// Write `<prefix>_h<hour>.csv` per series (stdout when omitted).
        #[arg(long)]
        output_prefix: Option<String>,
        /// Also write first differences of the stochastic component as a
        /// `value` CSV per series.
        #[arg(long)]
        changes_prefix: Option<String>,
    },
    /// Re-render a stored JSON report.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the band-curve table to this CSV file.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn tail_window(args: &TailArgs) -> Result<TailWindow> {
    TailWindow::new(args.window.0, args.window.1, args.side.into())
}

#[derive(serde::Deserialize)]
struct SimulateFile {
    cells: Vec<StudyConfig>,
}

fn run_command(cli: Cli) -> Result<()> {
    match cli.command {
        Command::FitTail { tail, output } => {
            let sample = fileio::ingest_sample_csv(&tail.input)?;
            let window = tail_window(&tail)?;
            let model = fit_tail(&sample, &window, tail.family.into())?;
            let value =
                serde_json::to_value(&model).map_err(|e| Error::numerical(e.to_string()))?;
            emit(output.as_ref(), &fileio::canonical_json(&value))
        }
        Command::Test { tail, alpha, ranks, format, output, plot_data } => {
            let sample = fileio::ingest_sample_csv(&tail.input)?;
            let window = tail_window(&tail)?;
            let config = TestConfig { alphas: alpha, ranks, side: tail.side.into() };
            let mut report =
                full_report(&sample, &window, tail.family.into(), &config)?;
            report
                .metadata
                .insert("input".into(), tail.input.display().to_string());
            if let Some(path) = plot_data {
                emit(Some(&path), &fileio::band_plot_csv(&report))?;
            }
            let rendered = match format {
                FormatArg::Json => fileio::report_to_json(&report)?,
                FormatArg::Text => fileio::report_to_text(&report),
            };
            emit(output.as_ref(), &rendered)
        }
        Command::Simulate { config, reps, seed, format, output } => {
            let text = std::fs::read_to_string(&config)?;
            let file: SimulateFile = serde_json::from_str(&text)
                .map_err(|e| Error::validation(format!("invalid study config: {e}")))?;
            let mut cells = file.cells;
            for cell in &mut cells {
                if let Some(r) = reps {
                    cell.replications = r;
                }
                if let Some(s) = seed {
                    cell.master_seed = Seed(s);
                }
            }
            let grid = study_grid(&cells)?;
            let rendered = match format {
                FormatArg::Json => {
                    let value = serde_json::to_value(&grid)
                        .map_err(|e| Error::numerical(e.to_string()))?;
                    fileio::canonical_json(&value)
                }
                FormatArg::Text => {
                    format!("{}{}", fileio::study_grid_text(&grid), fileio::study_grid_csv(&grid))
                }
            };
            emit(output.as_ref(), &rendered)
        }
        Command::Drawdowns { input, absolute, output } => {
            let series = fileio::ingest_timeseries_csv(&input)?;
            if series.len() != 1 {
                return Err(Error::validation(format!(
                    "drawdowns expect a single series, found {} hour slices",
                    series.len()
                )));
            }
            let dd = drawdowns(&series[0])?;
            let values: Vec<f64> = dd
                .iter()
                .map(|d| if absolute { -d.magnitude } else { d.magnitude })
                .collect();
            emit(output.as_ref(), &fileio::sample_to_csv(&values))
        }
        Command::Deseasonalize {
            input,
            ltsc,
            bandwidth,
            level,
            stat,
            holidays,
            output_prefix,
            changes_prefix,
        } => {
            let series = fileio::ingest_timeseries_csv(&input)?;
            let calendar = match holidays {
                Some(path) => Some(fileio::read_holidays(&path)?),
                None => None,
            };
            let method = match ltsc {
                LtscArg::Kernel => LtscMethod::Kernel { bandwidth },
                LtscArg::Wavelet => LtscMethod::Wavelet { level },
            };
            let stat = match stat {
                StatArg::Mean => WeeklyStat::Mean,
                StatArg::Median => WeeklyStat::Median,
            };
            for s in &series {
                let decomp = deseasonalize(s, method, stat, calendar.as_ref())?;
                let suffix = match s.hour {
                    Some(h) => format!("_h{h:02}"),
                    None => String::new(),
                };
                match &output_prefix {
                    Some(prefix) => {
                        let path = PathBuf::from(format!("{prefix}{suffix}.csv"));
                        emit(Some(&path), &fileio::decomposition_to_csv(&decomp))?;
                    }
                    None => emit(None, &fileio::decomposition_to_csv(&decomp))?,
                }
                if let Some(prefix) = &changes_prefix {
                    let changes = price_changes(&decomp)?;
                    let path = PathBuf::from(format!("{prefix}{suffix}.csv"));
                    emit(Some(&path), &fileio::sample_to_csv(changes.values()))?;
                }
            }
            Ok(())
        }
        Command::Report { input, format, output, plot_data } => {
            let text = std::fs::read_to_string(&input)?;
            let report = fileio::report_from_json(&text)?;
            if let Some(path) = plot_data {
                emit(Some(&path), &fileio::band_plot_csv(&report))?;
            }
            let rendered = match format {
                FormatArg::Json => fileio::report_to_json(&report)?,
                FormatArg::Text => fileio::report_to_text(&report),
            };
            emit(output.as_ref(), &rendered)
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, usage errors are
            // validation failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parser() {
        assert_eq!(parse_window("0.10:0.01").unwrap(), (0.10, 0.01));
        assert!(parse_window("0.10").is_err());
        assert!(parse_window("a:b").is_err());
    }

    #[test]
    fn list_arguments_split_on_commas() {
        // malformed entries in the lists are usage errors, not panics
        assert_eq!(run(["dragonking", "test", "--input", "/nope", "--ranks", "4,x"]), 1);
        assert_eq!(run(["dragonking", "test", "--input", "/nope", "--alpha", "0.05,zz"]), 1);
    }

    #[test]
    fn unknown_subcommand_is_validation_failure() {
        assert_eq!(run(["dragonking", "frobnicate"]), 1);
    }

    #[test]
    fn help_is_success() {
        assert_eq!(run(["dragonking", "--help"]), 0);
    }
}
