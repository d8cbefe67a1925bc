use std::io::Write;

use serde_json::{json, Value};

use super::sweep::{CellStats, SweepResult};
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 15] = [
    "sweep",
    "algorithm",
    "m",
    "n",
    "k",
    "gamma",
    "budget",
    "noise",
    "trials",
    "successes",
    "success_rate",
    "support_match_rate",
    "mean_iterations",
    "mean_iterations_success",
    "failures",
];

pub const TIMING_COLUMNS: [&str; 10] = [
    "sweep",
    "algorithm",
    "m",
    "n",
    "k",
    "gamma",
    "budget",
    "trials",
    "mean_runtime_s",
    "median_runtime_s",
];

/// Six significant digits, printed in the shortest form that reads back to
/// the rounded value.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Numeric(format!("csv: {other:?}")),
    }
}

fn key(c: &CellStats) -> Vec<String> {
    vec![
        c.sweep.name().to_string(),
        c.algorithm.name().to_string(),
        c.m.to_string(),
        c.n.to_string(),
        c.k.to_string(),
        opt(c.gamma),
        c.budget.to_string(),
    ]
}

/// Writes one row per cell. Everything in this file is a function of the
/// seed and the grid, so reruns produce identical bytes.
pub fn write_csv<W: Write>(result: &SweepResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for c in &result.cells {
        let mut row = key(c);
        row.extend([
            format_float(c.noise),
            c.trials.to_string(),
            c.successes.to_string(),
            format_float(c.success_rate()),
            format_float(c.support_match_rate()),
            format_float(c.mean_iterations),
            opt(c.mean_iterations_success),
            c.failures().to_string(),
        ]);
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Wall-clock statistics, kept apart from [`write_csv`] because they change
/// from run to run.
pub fn write_timing_csv<W: Write>(result: &SweepResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TIMING_COLUMNS).map_err(csv_err)?;
    for c in &result.cells {
        let mut row = key(c);
        row.extend([
            c.trials.to_string(),
            format_float(c.mean_runtime),
            format_float(c.median_runtime),
        ]);
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn csv_string(result: &SweepResult) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(result, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Numeric(e.to_string()))
}

/// Provenance sidecar: grid, settings, thresholds, version and build id.
pub fn sidecar(result: &SweepResult) -> Value {
    json!({
        "provenance": result.provenance,
        "columns": CSV_COLUMNS,
        "rows": result.cells.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_float(0.98), "0.98");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(2.0 / 3.0), "0.666667");
        assert_eq!(format_float(123456789.0), "123457000");
        assert_eq!(format_float(1.23456789e-7), "0.000000123457");
        assert_eq!(format_float(0.0), "0");
    }
}
