//! File formats: CSV ingest, canonical JSON reports, figure-data emission.
//!
//! Inputs are plain CSV (`value` for samples, `date,value[,hour]` for time
//! series) plus an ISO-8601 date-list file for holiday calendars. Outputs
//! are canonical JSON (sorted keys, 17-significant-digit floats, newline
//! terminated, so serialize -> parse -> serialize is a fixed point), plain
//! text narration, and columnar band-curve data ready for external
//! plotting.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use crate::dktest::{TestReport, Verdict};
use crate::edf::Sample;
use crate::error::{Error, Result};
use crate::preprocess::{SeasonalDecomposition, TimeSeries};
use crate::study::StudyGrid;

/// Read a one-column `value` CSV into a sample.
pub fn ingest_sample_csv(path: &Path) -> Result<Sample> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::validation(e.to_string()))?
        .clone();
    if headers.len() != 1 || headers.get(0) != Some("value") {
        return Err(Error::validation(format!(
            "{}: expected header `value`, found {:?}",
            path.display(),
            headers
        )));
    }
    let mut values = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // header is line 1
        let record = record.map_err(|e| Error::validation(format!("line {line}: {e}")))?;
        let field = record.get(0).unwrap_or("");
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| Error::validation(format!("line {line}: non-numeric value `{field}`")))?;
        values.push(v);
    }
    Sample::new(values)
}

/// Read a `date,value[,hour]` CSV. With an `hour` column the panel is split
/// into one series per hour label; otherwise a single series is returned.
/// Dates must be strictly increasing within each series.
pub fn ingest_timeseries_csv(path: &Path) -> Result<Vec<TimeSeries>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::validation(e.to_string()))?
        .clone();
    let with_hour = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["date", "value"] => false,
        ["date", "value", "hour"] => true,
        other => {
            return Err(Error::validation(format!(
                "{}: expected header `date,value[,hour]`, found {other:?}",
                path.display()
            )))
        }
    };

    let mut groups: BTreeMap<Option<u8>, (Vec<NaiveDate>, Vec<f64>, Vec<usize>)> = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| Error::validation(format!("line {line}: {e}")))?;
        let date = NaiveDate::parse_from_str(record.get(0).unwrap_or("").trim(), "%Y-%m-%d")
            .map_err(|_| {
                Error::validation(format!(
                    "line {line}: invalid date `{}`",
                    record.get(0).unwrap_or("")
                ))
            })?;
        let value: f64 = record
            .get(1)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| {
                Error::validation(format!(
                    "line {line}: non-numeric value `{}`",
                    record.get(1).unwrap_or("")
                ))
            })?;
        let hour = if with_hour {
            let h: u8 = record
                .get(2)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| {
                    Error::validation(format!(
                        "line {line}: invalid hour `{}`",
                        record.get(2).unwrap_or("")
                    ))
                })?;
            Some(h)
        } else {
            None
        };
        let entry = groups.entry(hour).or_default();
        if let Some(last) = entry.0.last() {
            if date <= *last {
                return Err(Error::validation(format!(
                    "line {line}: date {date} not strictly increasing (previous {last})"
                )));
            }
        }
        entry.0.push(date);
        entry.1.push(value);
        entry.2.push(line);
    }
    if groups.is_empty() {
        return Err(Error::validation(format!("{}: no data rows", path.display())));
    }
    groups
        .into_iter()
        .map(|(hour, (dates, values, _))| TimeSeries::new(dates, values, hour))
        .collect()
}

/// Read a holiday calendar: one ISO-8601 date per line, blank lines and
/// `#` comments ignored.
pub fn read_holidays(path: &Path) -> Result<HashSet<NaiveDate>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let date = NaiveDate::parse_from_str(line, "%Y-%m-%d").map_err(|_| {
            Error::validation(format!("holiday file line {}: invalid date `{line}`", idx + 1))
        })?;
        out.insert(date);
    }
    Ok(out)
}

/// Canonical JSON: keys sorted, floats rendered with 17 significant digits,
/// newline terminated.
pub fn canonical_json(value: &serde_json::Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &serde_json::Value) {
    match value {
        serde_json::Value::Null => out.push_str("null"),
        serde_json::Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let _ = write!(out, "{:.16e}", n.as_f64().unwrap());
            }
        }
        serde_json::Value::String(s) => {
            let _ = write!(out, "{}", serde_json::Value::String(s.clone()));
        }
        serde_json::Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        serde_json::Value::Object(map) => {
            // serde_json's default map is a BTreeMap, so iteration is
            // already key-sorted
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", serde_json::Value::String(k.clone()));
                out.push(':');
                write_value(out, v);
            }
            out.push('}');
        }
    }
}

/// Serialize a test report canonically.
pub fn report_to_json(report: &TestReport) -> Result<String> {
    let value =
        serde_json::to_value(report).map_err(|e| Error::numerical(e.to_string()))?;
    Ok(canonical_json(&value))
}

/// Parse a stored report.
pub fn report_from_json(text: &str) -> Result<TestReport> {
    serde_json::from_str(text).map_err(|e| Error::validation(format!("invalid report: {e}")))
}

/// Human-readable narration of a test report.
pub fn report_to_text(report: &TestReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dragon-king test report (tool version {})", report.version);
    let _ = writeln!(out, "input: n = {}, sha256 {}", report.n, report.input_digest);
    let _ = writeln!(out, "side: {} tail, family: {}", report.config.side, report.family);
    if let Some(w) = &report.model.window {
        let _ = writeln!(
            out,
            "fit window: {:.1}%-{:.1}% largest observations",
            w.upper_frac * 100.0,
            w.cut_frac * 100.0
        );
    }
    match report.model.form {
        crate::tailfit::TailForm::Power { b, p } => {
            let _ = writeln!(out, "fitted tail: {b:.6} * x^({p:.6})");
        }
        crate::tailfit::TailForm::Weibull { beta, tau } => {
            let _ = writeln!(out, "fitted tail: exp(-{beta:.6} * x^{tau:.6})");
        }
        crate::tailfit::TailForm::ParetoSurvival { lambda, alpha } => {
            let _ = writeln!(out, "reference tail: {lambda:.6}^{alpha:.6} (x+{lambda:.6})^(-{alpha:.6})");
        }
    }
    if let Some(d) = &report.model.diagnostics {
        let _ = writeln!(out, "fit diagnostics: {} points, rss {:.6e}", d.n_points, d.rss);
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>5} {:>14} {:>12} {:>12} {:>24} {:>6}  verdict",
        "rank", "x", "edf tail", "center", "pointwise CI", "level"
    );
    for r in &report.results {
        let verdict = match r.verdict {
            Verdict::DragonKing => "DRAGON KING",
            Verdict::BlackSwan => "black swan",
        };
        let _ = writeln!(
            out,
            "{:>5} {:>14.6} {:>12.6} {:>12.6} [{:>10.6}, {:>10.6}] {:>5.0}%  {}",
            r.rank,
            r.x,
            r.edf_tail,
            r.center,
            r.lower,
            r.upper,
            (1.0 - r.alpha) * 100.0,
            verdict
        );
    }
    if !report.metadata.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "metadata:");
        for (k, v) in &report.metadata {
            let _ = writeln!(out, "  {k}: {v}");
        }
    }
    out
}

/// Columnar band-curve data: one row per abscissa with the empirical tail
/// and the 95%/99% pointwise bounds, directly plottable.
pub fn band_plot_csv(report: &TestReport) -> String {
    let mut out = String::from("x,edf_tail,center,lo95,hi95,lo99,hi99\n");
    let b = &report.band;
    for i in 0..b.xs.len() {
        let _ = writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            b.xs[i], b.edf_tail[i], b.center[i], b.lo95[i], b.hi95[i], b.lo99[i], b.hi99[i]
        );
    }
    out
}

/// Flat machine-readable rendering of a study grid.
pub fn study_grid_csv(grid: &StudyGrid) -> String {
    let mut out = String::from(
        "model,family,reference,window,n,rank,alpha,rate,mc_se,rejections,effective_replications,failed_fits\n",
    );
    for result in &grid.results {
        let c = &result.config;
        for cell in &result.cells {
            let _ = writeln!(
                out,
                "{},{},{},{:.3}:{:.3},{},{},{},{:.17e},{:.17e},{},{},{}",
                c.model,
                c.family,
                c.reference,
                c.window.upper_frac,
                c.window.cut_frac,
                c.n,
                c.rank,
                cell.alpha,
                cell.rate,
                cell.mc_se,
                cell.rejections,
                result.effective_replications,
                result.failed_fits
            );
        }
    }
    out
}

/// Pretty rendering of a study grid: blocks by (family, window, n), rows by
/// confidence level, columns by (model, reference).
pub fn study_grid_text(grid: &StudyGrid) -> String {
    use std::collections::BTreeSet;

    // block key: family, window, n; column key: model, reference
    let mut blocks: BTreeMap<String, BTreeMap<String, BTreeMap<String, (f64, f64)>>> =
        BTreeMap::new();
    let mut columns: BTreeSet<String> = BTreeSet::new();
    for result in &grid.results {
        let c = &result.config;
        let block = format!(
            "{} tail fitted to {:.1}%-{:.1}% largest observations | n = {}",
            c.family,
            c.window.upper_frac * 100.0,
            c.window.cut_frac * 100.0,
            c.n
        );
        let column = format!("{} [{}]", c.model, c.reference);
        columns.insert(column.clone());
        for cell in &result.cells {
            let row = format!("{:>4.1}% CI", (1.0 - cell.alpha) * 100.0);
            blocks
                .entry(block.clone())
                .or_default()
                .entry(row)
                .or_default()
                .insert(column.clone(), (cell.rate, cell.mc_se));
        }
    }

    let mut out = String::new();
    for (block, rows) in &blocks {
        let _ = writeln!(out, "{block}");
        let _ = write!(out, "{:>10}", "");
        for col in &columns {
            if rows.values().any(|r| r.contains_key(col)) {
                let _ = write!(out, " {col:>24}");
            }
        }
        let _ = writeln!(out);
        for (row, cells) in rows {
            let _ = write!(out, "{row:>10}");
            for col in &columns {
                if !rows.values().any(|r| r.contains_key(col)) {
                    continue;
                }
                match cells.get(col) {
                    Some((rate, se)) => {
                        let txt = format!("{:.1}% (se {:.2}pp)", rate * 100.0, se * 100.0);
                        let _ = write!(out, " {txt:>24}");
                    }
                    None => {
                        let _ = write!(out, " {:>24}", "-");
                    }
                }
            }
            let _ = writeln!(out);
        }
        let _ = writeln!(out);
    }
    out
}

/// Write a sample as a one-column `value` CSV.
pub fn sample_to_csv(values: &[f64]) -> String {
    let mut out = String::from("value\n");
    for v in values {
        let _ = writeln!(out, "{v:.17e}");
    }
    out
}

/// Decomposition table: date[,hour],price,trend,weekly,stochastic.
pub fn decomposition_to_csv(d: &SeasonalDecomposition) -> String {
    let with_hour = d.series.hour.is_some();
    let mut out = String::new();
    if with_hour {
        out.push_str("date,hour,price,trend,weekly,stochastic\n");
    } else {
        out.push_str("date,price,trend,weekly,stochastic\n");
    }
    for i in 0..d.series.len() {
        if with_hour {
            let _ = writeln!(
                out,
                "{},{},{:.17e},{:.17e},{:.17e},{:.17e}",
                d.series.dates[i],
                d.series.hour.unwrap(),
                d.series.values[i],
                d.trend[i],
                d.weekly[i],
                d.stochastic[i]
            );
        } else {
            let _ = writeln!(
                out,
                "{},{:.17e},{:.17e},{:.17e},{:.17e}",
                d.series.dates[i], d.series.values[i], d.trend[i], d.weekly[i], d.stochastic[i]
            );
        }
    }
    out
}
