//! CSV output of studies.

use std::io::{Read, Write};

use super::stats::{curves_of, success_rate_curve, SchemeSummary};
use super::ConvergenceRecord;
use crate::error::{Error, Result};

/// Six significant digits, `-` for undefined or non-finite values.
pub fn format_sig(v: Option<f64>) -> String {
    let Some(v) = v.filter(|v| v.is_finite()) else {
        return "-".into();
    };
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.5e}")
    }
}

fn parse_cell(s: &str) -> Result<Option<f64>> {
    if s == "-" {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::InvalidInput(format!("bad number `{s}` in records")))
}

pub const RECORDS_HEADER: [&str; 7] = ["scheme", "rep", "n", "nrmsd", "mu", "mean_err", "std_err"];

pub fn write_records_csv<W: Write>(out: W, records: &[ConvergenceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        w.write_record([
            r.scheme.clone(),
            r.rep.to_string(),
            r.n.to_string(),
            format_sig(Some(r.nrmsd)),
            format_sig(Some(r.mu)),
            format_sig(r.mean_err),
            format_sig(r.std_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read records written by [`write_records_csv`] (values at six digits).
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<ConvergenceRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        if row.len() != RECORDS_HEADER.len() {
            return Err(Error::InvalidInput(format!(
                "expected 7 columns, found {}",
                row.len()
            )));
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad integer `{s}` in records")))
        };
        out.push(ConvergenceRecord {
            scheme: row[0].to_string(),
            rep: int(&row[1])?,
            n: int(&row[2])?,
            nrmsd: parse_cell(&row[3])?.unwrap_or(f64::NAN),
            mu: parse_cell(&row[4])?.unwrap_or(f64::NAN),
            mean_err: parse_cell(&row[5])?,
            std_err: parse_cell(&row[6])?,
        });
    }
    Ok(out)
}

pub const SUMMARY_HEADER: [&str; 11] = [
    "grid",
    "threshold",
    "n_eps_median",
    "n_eps_std",
    "n_sr95",
    "n_sr99",
    "p_value",
    "rel_n_eps",
    "rel_sr95",
    "rel_sr99",
    "recross",
];

pub fn write_summary_csv<W: Write>(out: W, rows: &[SchemeSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            format_sig(Some(r.threshold)),
            format_sig(r.n_eps_median),
            format_sig(r.n_eps_std),
            format_sig(r.n_sr95),
            format_sig(r.n_sr99),
            format_sig(r.p_value),
            format_sig(r.rel_n_eps),
            format_sig(r.rel_sr95),
            format_sig(r.rel_sr99),
            r.recross.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Success rate of one scheme at one threshold and sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessRateRow {
    pub scheme: String,
    pub threshold: f64,
    pub n: f64,
    pub rate: f64,
}

/// Success-rate curves of every scheme, in first-appearance order.
pub fn success_rate_table(
    records: &[ConvergenceRecord],
    thresholds: &[f64],
    repetitions: usize,
) -> Vec<SuccessRateRow> {
    let mut labels: Vec<&str> = Vec::new();
    for r in records {
        if !labels.contains(&r.scheme.as_str()) {
            labels.push(&r.scheme);
        }
    }
    let mut rows = Vec::new();
    for label in labels {
        let curves = curves_of(records, label);
        for &threshold in thresholds {
            for (n, rate) in success_rate_curve(&curves, threshold, repetitions) {
                rows.push(SuccessRateRow {
                    scheme: label.to_string(),
                    threshold,
                    n,
                    rate,
                });
            }
        }
    }
    rows
}

pub fn write_success_rates_csv<W: Write>(out: W, rows: &[SuccessRateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["grid", "threshold", "n", "rate"])?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            format_sig(Some(r.threshold)),
            format_sig(Some(r.n)),
            format_sig(Some(r.rate)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
