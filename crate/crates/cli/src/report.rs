//! Typed result rows, the machine-readable summary, and the human-readable
//! verification matrix.

use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct ReportRecord {
    pub experiment: String,
    /// Which verified statement the row belongs to.
    pub anchor: String,
    pub params: String,
    pub metric: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. "<= 1e-5" or "in [0.85, 1.15]".
    pub threshold: String,
    pub pass: bool,
}

impl ReportRecord {
    pub fn upper(
        experiment: &str,
        anchor: &str,
        params: &str,
        metric: &str,
        value: f64,
        limit: f64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            anchor: anchor.into(),
            params: params.into(),
            metric: metric.into(),
            value,
            threshold: format!("<= {limit:e}"),
            pass: value <= limit && value.is_finite(),
        }
    }

    pub fn window(
        experiment: &str,
        anchor: &str,
        params: &str,
        metric: &str,
        value: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            anchor: anchor.into(),
            params: params.into(),
            metric: metric.into(),
            value,
            threshold: format!("in [{lo}, {hi}]"),
            pass: value >= lo && value <= hi,
        }
    }

    pub fn flag(experiment: &str, anchor: &str, params: &str, metric: &str, ok: bool) -> Self {
        Self {
            experiment: experiment.into(),
            anchor: anchor.into(),
            params: params.into(),
            metric: metric.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: "== 1".into(),
            pass: ok,
        }
    }

    pub fn info(experiment: &str, anchor: &str, params: &str, metric: &str, value: f64) -> Self {
        Self {
            experiment: experiment.into(),
            anchor: anchor.into(),
            params: params.into(),
            metric: metric.into(),
            value,
            threshold: "reported".into(),
            pass: true,
        }
    }
}

/// RFC-quoted CSV with a mandatory header row.
pub fn write_summary_csv(path: &Path, records: &[ReportRecord]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "anchor", "params", "metric", "value", "threshold", "pass"])?;
    for r in records {
        w.write_record([
            r.experiment.as_str(),
            r.anchor.as_str(),
            r.params.as_str(),
            r.metric.as_str(),
            &format!("{:.17e}", r.value),
            r.threshold.as_str(),
            if r.pass { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned pass/fail table for terminals and logs.
pub fn write_matrix(path: &Path, records: &[ReportRecord]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrix_to(&mut out, records)?;
    out.flush()?;
    Ok(())
}

pub fn write_matrix_to(out: &mut impl Write, records: &[ReportRecord]) -> std::io::Result<()> {
    let wide = |f: fn(&ReportRecord) -> usize| records.iter().map(f).max().unwrap_or(0);
    let w_exp = wide(|r| r.experiment.len()).max(10);
    let w_anchor = wide(|r| r.anchor.len()).max(6);
    let w_metric = wide(|r| r.metric.len()).max(6);
    let w_thresh = wide(|r| r.threshold.len()).max(9);
    writeln!(
        out,
        "{:<w_exp$}  {:<w_anchor$}  {:<w_metric$}  {:>13}  {:<w_thresh$}  result",
        "experiment", "anchor", "metric", "value", "threshold"
    )?;
    for r in records {
        writeln!(
            out,
            "{:<w_exp$}  {:<w_anchor$}  {:<w_metric$}  {:>13.6e}  {:<w_thresh$}  {}",
            r.experiment,
            r.anchor,
            r.metric,
            r.value,
            r.threshold,
            if r.pass { "PASS" } else { "FAIL" }
        )?;
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    writeln!(
        out,
        "\n{} checks, {} passed, {} failed",
        records.len(),
        records.len() - failed,
        failed
    )?;
    Ok(())
}
