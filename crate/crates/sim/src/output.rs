//! JSON and CSV emission for study results.

use serde::Serialize;

use crate::error::Result;
use crate::replicate::SimSummary;
use crate::stats::Percentiles;

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| crate::error::Error::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| crate::error::Error::Output(e.to_string()))
}

/// One row per completed replication.
pub fn records_csv(summary: &SimSummary) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "rep",
        "seed",
        "model",
        "order",
        "rank",
        "pi",
        "sigma_hat",
        "tse",
        "parametric",
        "criterion",
    ])?;
    for r in &summary.records {
        w.write_record([
            r.rep.to_string(),
            r.seed.to_string(),
            r.model.clone(),
            r.order.to_string(),
            r.rank.to_string(),
            r.pi.to_string(),
            r.sigma_hat.to_string(),
            r.tse.to_string(),
            r.parametric.to_string(),
            r.criterion.as_str().to_string(),
        ])?;
    }
    finish(w)
}

/// Long-format percentile curves: one row per `(series, x, percentile)`.
pub fn percentile_curves_csv<'a>(
    curves: impl IntoIterator<Item = (&'a str, f64, &'a Percentiles)>,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["series", "x", "percentile", "value"])?;
    for (series, x, p) in curves {
        for (level, v) in p.values() {
            w.write_record([
                series.to_string(),
                x.to_string(),
                level.to_string(),
                v.to_string(),
            ])?;
        }
    }
    finish(w)
}
