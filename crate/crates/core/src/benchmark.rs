//! The daily-rebalanced leveraged benchmark and its sensitivity to leverage.
//!
//! A fund that delivers `beta` times its underlying's *daily* return
//! compounds to `L_n = L_0 * prod_{j=1..n} (1 + beta * R_j)`. Because the
//! product compounds daily, the terminal value is path-dependent: an
//! oscillating underlying erodes both positively and negatively leveraged
//! funds at once (volatility decay).

use crate::error::{Error, Result};
use crate::market_data::PriceSeries;
use std::sync::Arc;

/// Daily leverage multiple `beta`, validated to be finite and within
/// `[-10, 10]`. Typical leveraged funds use -3..=3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeverageRatio(f64);

impl LeverageRatio {
    /// Validates and wraps a leverage multiple.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(-10.0..=10.0).contains(&value) {
            return Err(Error::InvalidLeverage { value });
        }
        Ok(Self(value))
    }

    /// The raw multiple.
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Compounds the perfect daily-rebalanced leveraged benchmark
/// `L_j = L_{j-1} * (1 + beta * R_j)` along `underlying`'s daily returns,
/// starting from `l0` on the first date.
///
/// Errors when `l0 <= 0`, or when any day's factor `1 + beta * R_j <= 0`
/// (the fund is wiped out); the error names the offending date.
pub fn leveraged_benchmark(
    underlying: &PriceSeries,
    beta: LeverageRatio,
    l0: f64,
) -> Result<PriceSeries> {
    if !(l0.is_finite() && l0 > 0.0) {
        return Err(Error::InvalidCapital { value: l0 });
    }
    let prices = underlying.values();
    let dates = underlying.calendar().dates();
    let mut levels = Vec::with_capacity(prices.len());
    let mut level = l0;
    levels.push(level);
    for j in 1..prices.len() {
        let daily_return = prices[j] / prices[j - 1] - 1.0;
        let factor = 1.0 + beta.value() * daily_return;
        if factor <= 0.0 {
            return Err(Error::Ruin { date: dates[j] });
        }
        level *= factor;
        levels.push(level);
    }
    PriceSeries::new(Arc::clone(underlying.calendar()), levels)
}

/// Sensitivity of the benchmark's log growth to leverage:
/// `d/d(beta) log(L_n / L_0) = sum_j R_j / (1 + beta * R_j)`.
///
/// Errors when any term's denominator is `<= 0` (the same ruin condition as
/// [`leveraged_benchmark`], but without dates attached to raw returns) and
/// when `returns` is empty.
pub fn leverage_sensitivity(returns: &[f64], beta: LeverageRatio) -> Result<f64> {
    if returns.is_empty() {
        return Err(Error::TooFewObservations { needed: 1, got: 0 });
    }
    let mut sum = 0.0;
    for &r in returns {
        let denom = 1.0 + beta.value() * r;
        if denom <= 0.0 {
            return Err(Error::InvalidLeverage { value: beta.value() });
        }
        sum += r / denom;
    }
    Ok(sum)
}
