//! Simple returns over fixed holding periods.
//!
//! Returns are computed over disjoint, consecutive `h`-day windows anchored
//! at the start of the series: `r_i = P(t_{i*h}) / P(t_{(i-1)*h}) - 1`. Any
//! tail shorter than `h` days is dropped, so a series of `n` observations
//! yields `floor((n - 1) / h)` returns.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::market_data::PriceSeries;

/// Simple returns over disjoint `h`-day windows, each tagged with the date
/// its window starts on.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    holding_period: usize,
    returns: Vec<f64>,
    start_dates: Vec<NaiveDate>,
}

impl ReturnSeries {
    /// Window length in trading days.
    pub fn holding_period(&self) -> usize {
        self.holding_period
    }

    /// Returns in window order. Positive prices guarantee every value is
    /// greater than -1.
    pub fn values(&self) -> &[f64] {
        &self.returns
    }

    /// The date each window starts on.
    pub fn start_dates(&self) -> &[NaiveDate] {
        &self.start_dates
    }

    /// Number of windows.
    pub fn len(&self) -> usize {
        self.returns.len()
    }

    /// Whether no window fit in the source series.
    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

/// Computes simple returns of `prices` over disjoint consecutive `h`-day
/// windows. Errors when `h == 0` or when the series has fewer than `h + 1`
/// observations (not even one full window).
pub fn simple_returns(prices: &PriceSeries, h: usize) -> Result<ReturnSeries> {
    if h == 0 {
        return Err(Error::InvalidHoldingPeriod);
    }
    if prices.len() < h + 1 {
        return Err(Error::SeriesTooShort {
            needed: h + 1,
            got: prices.len(),
        });
    }
    let values = prices.values();
    let dates = prices.calendar().dates();
    let count = (prices.len() - 1) / h;
    let mut returns = Vec::with_capacity(count);
    let mut start_dates = Vec::with_capacity(count);
    for i in 1..=count {
        let start = (i - 1) * h;
        let end = i * h;
        returns.push(values[end] / values[start] - 1.0);
        start_dates.push(dates[start]);
    }
    Ok(ReturnSeries {
        holding_period: h,
        returns,
        start_dates,
    })
}
