use std::io::{Read, Write};

use crate::{Error, Result};

use super::monte_carlo::{RunRecord, SummaryStats};

pub const SUMMARY_HEADER: [&str; 7] = [
    "policy",
    "sweep_var",
    "sweep_value",
    "mean_pseudo_regret",
    "stderr",
    "violation_rate",
    "mean_min_budget",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn runs_header(num_arms: usize) -> Vec<String> {
    let fixed = [
        "policy",
        "alpha",
        "n",
        "delta",
        "replication",
        "seed",
        "pseudo_regret",
        "realized_regret",
        "min_pseudo_budget",
        "violated",
        "first_violation_round",
    ];
    fixed
        .iter()
        .map(|s| s.to_string())
        .chain((0..num_arms).map(|i| format!("pulls_{i}")))
        .collect()
}

pub fn write_runs_csv<W: Write>(writer: W, runs: &[RunRecord]) -> Result<()> {
    let num_arms = runs.first().map_or(0, |r| r.pulls.len());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(runs_header(num_arms))?;
    for r in runs {
        let mut record = vec![
            r.policy.to_string(),
            format_float(r.alpha),
            r.n.to_string(),
            format_float(r.delta),
            r.replication.to_string(),
            r.seed.to_string(),
            format_float(r.pseudo_regret),
            format_float(r.realized_regret),
            format_float(r.min_pseudo_budget),
            u8::from(r.violated).to_string(),
            r.first_violation_round.map_or_else(String::new, |t| t.to_string()),
        ];
        record.extend(r.pulls.iter().map(u64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(writer: W, summaries: &[SummaryStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        w.write_record([
            s.policy.to_string(),
            s.sweep_var.to_string(),
            format_float(s.sweep_value),
            format_float(s.mean_pseudo_regret),
            format_float(s.stderr),
            format_float(s.violation_rate),
            format_float(s.mean_min_budget),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One parsed line of a summary CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub policy: String,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub mean_pseudo_regret: f64,
    pub stderr: f64,
    pub violation_rate: f64,
    pub mean_min_budget: f64,
}

pub fn read_summary_csv<R: Read>(reader: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(SUMMARY_HEADER) {
        return Err(Error::config("summary", format!("unexpected header {header:?}")));
    }
    let float = |s: &str, line: u64| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::config("summary", format!("line {line}: {s:?} is not a number")))
    };
    r.records()
        .map(|rec| {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            Ok(SummaryRow {
                policy: rec[0].to_string(),
                sweep_var: rec[1].to_string(),
                sweep_value: float(&rec[2], line)?,
                mean_pseudo_regret: float(&rec[3], line)?,
                stderr: float(&rec[4], line)?,
                violation_rate: float(&rec[5], line)?,
                mean_min_budget: float(&rec[6], line)?,
            })
        })
        .collect()
}
