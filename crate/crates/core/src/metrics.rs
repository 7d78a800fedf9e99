//! Tracking-error metrics and report assembly.
//!
//! - `SSE  = sum_j (a_j - b_j)^2`
//! - `RMSE = sqrt(SSE / n)` over the full overlap, day 0 included
//! - cumulative return `c_j = P_j / P_0 - 1`
//! - annual return: last over first observation within each calendar year
//!
//! Every tabular output of the CLI funnels through [`TrackingReport`], whose
//! JSON form is `{sse, rmse, annual: {year: return}, per_1000: bool}`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market_data::{indices_by_year, PriceSeries};

/// Sum of squared differences between two series on the same calendar.
pub fn sse(a: &PriceSeries, b: &PriceSeries) -> Result<f64> {
    ensure_aligned(a, b)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum())
}

/// Root mean squared difference, `sqrt(SSE / n)`, on the same calendar.
pub fn rmse(a: &PriceSeries, b: &PriceSeries) -> Result<f64> {
    Ok((sse(a, b)? / a.len() as f64).sqrt())
}

/// Cumulative simple returns relative to the first observation:
/// `c_j = P_j / P_0 - 1`, so `c_0 = 0`.
pub fn cumulative_returns(series: &PriceSeries) -> Vec<f64> {
    let p0 = series.first_value();
    series.values().iter().map(|p| p / p0 - 1.0).collect()
}

/// Simple return within each calendar year: last observation over first
/// observation of that year, minus one. Years with a single observation are
/// omitted (no round trip to measure).
pub fn annual_returns(series: &PriceSeries) -> BTreeMap<i32, f64> {
    let values = series.values();
    indices_by_year(series.calendar().dates())
        .into_iter()
        .filter(|(_, idx)| idx.len() >= 2)
        .map(|(year, idx)| {
            let first = values[idx[0]];
            let last = values[*idx.last().expect("non-empty")];
            (year, last / first - 1.0)
        })
        .collect()
}

/// Tracking summary of one series against a reference.
///
/// With `per_1000 = true` both series are rescaled to start at 1000 before
/// differencing, so `sse`/`rmse` read as dollars on a $1000 position. The
/// `annual` map holds the *series'* (not the reference's) per-year returns,
/// which are scale-invariant either way.
#[derive(Debug, Clone, Serialize)]
pub struct TrackingReport {
    /// Sum of squared level differences.
    pub sse: f64,
    /// Root mean squared level difference.
    pub rmse: f64,
    /// Calendar-year simple returns of the tracked series.
    pub annual: BTreeMap<i32, f64>,
    /// Whether levels were normalized to a $1000 start before differencing.
    pub per_1000: bool,
}

/// Builds a [`TrackingReport`] for `series` against `reference`.
pub fn tracking_report(
    series: &PriceSeries,
    reference: &PriceSeries,
    per_1000: bool,
) -> Result<TrackingReport> {
    let (a, b) = if per_1000 {
        (rescale_to(series, 1000.0)?, rescale_to(reference, 1000.0)?)
    } else {
        (series.clone(), reference.clone())
    };
    Ok(TrackingReport {
        sse: sse(&a, &b)?,
        rmse: rmse(&a, &b)?,
        annual: annual_returns(series),
        per_1000,
    })
}

/// Rescales a series so its first value equals `base`.
pub fn rescale_to(series: &PriceSeries, base: f64) -> Result<PriceSeries> {
    if !(base.is_finite() && base > 0.0) {
        return Err(Error::InvalidCapital { value: base });
    }
    let factor = base / series.first_value();
    PriceSeries::new(
        std::sync::Arc::clone(series.calendar()),
        series.values().iter().map(|v| v * factor).collect(),
    )
}

fn ensure_aligned(a: &PriceSeries, b: &PriceSeries) -> Result<()> {
    if a.calendar().dates() != b.calendar().dates() {
        return Err(Error::CalendarMismatch);
    }
    Ok(())
}
