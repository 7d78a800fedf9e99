//! Dynamic replication of a leveraged benchmark: rebalance a futures
//! position daily to hold `beta` times the portfolio's value in futures
//! exposure, financing the remainder at the short rate.
//!
//! The wealth recursion, at one trading day per step (`dt = 1/252`), is
//!
//! ```text
//! P_{j+1} = P_j * (1 + beta * (F_{j+1}/F_j - 1) - (beta - 1) * r_j * dt)
//! ```
//!
//! where `r_j` is the financing rate fixed at the start of step `j`. The
//! continuous-time limit admits a closed-form prediction in terms of the
//! realized variance `Sigma_t = sum (log F_{j+1}/F_j)^2` and the integrated
//! rate `R_t = sum r_j * dt`:
//!
//! ```text
//! log P_t = log P_0 + beta * log(F_t/F_0)
//!           + (beta - beta^2)/2 * Sigma_t + (1 - beta) * R_t
//! ```
//!
//! For `beta` outside `[0, 1]` the variance term is strictly negative on
//! any non-constant path — the volatility-decay drag that makes both a
//! leveraged and an inverse fund lose money on a round trip.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::benchmark::LeverageRatio;
use crate::error::{Error, Result};
use crate::market_data::{PriceSeries, RateSeries, TradingCalendar, DT};
use crate::metrics;

/// A simulated daily-rebalanced leveraged futures portfolio.
#[derive(Debug, Clone, PartialEq)]
pub struct LeveredPortfolioPath {
    beta: LeverageRatio,
    initial_capital: f64,
    path: PriceSeries,
}

impl LeveredPortfolioPath {
    /// Leverage the portfolio maintains.
    pub fn beta(&self) -> LeverageRatio {
        self.beta
    }

    /// Capital the portfolio started with (`P_0`).
    pub fn initial_capital(&self) -> f64 {
        self.initial_capital
    }

    /// Daily portfolio values, strictly positive.
    pub fn path(&self) -> &PriceSeries {
        &self.path
    }
}

/// Cumulative realized variance and integrated financing rate, per day.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceLedger {
    calendar: Arc<TradingCalendar>,
    realized_variance: Vec<f64>,
    integrated_rate: Vec<f64>,
}

impl VarianceLedger {
    /// Calendar the ledger is indexed by.
    pub fn calendar(&self) -> &Arc<TradingCalendar> {
        &self.calendar
    }

    /// Cumulative sum of squared daily log returns; starts at 0 and never
    /// decreases.
    pub fn realized_variance(&self) -> &[f64] {
        &self.realized_variance
    }

    /// Cumulative financing `sum r_j * dt`; starts at 0. All zeros when the
    /// ledger was built without rates.
    pub fn integrated_rate(&self) -> &[f64] {
        &self.integrated_rate
    }

    /// Total realized variance over the whole path.
    pub fn total_variance(&self) -> f64 {
        *self
            .realized_variance
            .last()
            .expect("ledger is never empty")
    }
}

/// Simulates the daily-rebalanced leveraged portfolio at one trading day
/// per step. Futures and rates must be aligned; ruin (a step factor `<= 0`)
/// is an error naming the date.
pub fn simulate(
    futures: &PriceSeries,
    rates: &RateSeries,
    beta: LeverageRatio,
    p0: f64,
) -> Result<LeveredPortfolioPath> {
    simulate_with_dt(futures, rates, beta, p0, DT)
}

/// [`simulate`] with an explicit year-fraction per step, for discretization
/// studies where the futures path is sampled at other frequencies.
pub fn simulate_with_dt(
    futures: &PriceSeries,
    rates: &RateSeries,
    beta: LeverageRatio,
    p0: f64,
    dt: f64,
) -> Result<LeveredPortfolioPath> {
    ensure_same_calendar(futures, rates)?;
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(Error::InvalidCapital { value: p0 });
    }
    let f = futures.values();
    let r = rates.values();
    let dates = futures.calendar().dates();
    let mut values = Vec::with_capacity(f.len());
    let mut level = p0;
    values.push(level);
    for j in 1..f.len() {
        let futures_return = f[j] / f[j - 1] - 1.0;
        // The rate is fixed at the start of the step: index j-1.
        let factor = 1.0 + beta.value() * futures_return - (beta.value() - 1.0) * r[j - 1] * dt;
        if factor <= 0.0 {
            return Err(Error::Ruin { date: dates[j] });
        }
        level *= factor;
        values.push(level);
    }
    Ok(LeveredPortfolioPath {
        beta,
        initial_capital: p0,
        path: PriceSeries::new(Arc::clone(futures.calendar()), values)?,
    })
}

/// Accumulates squared daily log returns of `futures` into a running
/// variance ledger (integrated rate left at zero).
pub fn realized_variance(futures: &PriceSeries) -> VarianceLedger {
    ledger(futures, None, DT)
}

/// Ledger with both realized variance and integrated financing rate.
/// Calendars must match.
pub fn variance_ledger(
    futures: &PriceSeries,
    rates: &RateSeries,
    dt: f64,
) -> Result<VarianceLedger> {
    ensure_same_calendar(futures, rates)?;
    Ok(ledger(futures, Some(rates), dt))
}

fn ledger(futures: &PriceSeries, rates: Option<&RateSeries>, dt: f64) -> VarianceLedger {
    let f = futures.values();
    let n = f.len();
    let mut rv = Vec::with_capacity(n);
    let mut ir = Vec::with_capacity(n);
    rv.push(0.0);
    ir.push(0.0);
    for j in 1..n {
        let log_ret = (f[j] / f[j - 1]).ln();
        rv.push(rv[j - 1] + log_ret * log_ret);
        let rate = rates.map_or(0.0, |r| r.values()[j - 1]);
        ir.push(ir[j - 1] + rate * dt);
    }
    VarianceLedger {
        calendar: Arc::clone(futures.calendar()),
        realized_variance: rv,
        integrated_rate: ir,
    }
}

/// Closed-form prediction of the simulated portfolio from the futures path
/// alone:
/// `log P_t = log P0 + beta log(F_t/F_0) + (beta - beta^2)/2 * Sigma_t
///  + (1 - beta) R_t`.
pub fn logprice_prediction(
    futures: &PriceSeries,
    rates: &RateSeries,
    beta: LeverageRatio,
    p0: f64,
) -> Result<PriceSeries> {
    logprice_prediction_with_dt(futures, rates, beta, p0, DT)
}

/// [`logprice_prediction`] with an explicit year-fraction per step.
pub fn logprice_prediction_with_dt(
    futures: &PriceSeries,
    rates: &RateSeries,
    beta: LeverageRatio,
    p0: f64,
    dt: f64,
) -> Result<PriceSeries> {
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(Error::InvalidCapital { value: p0 });
    }
    let ledger = variance_ledger(futures, rates, dt)?;
    let b = beta.value();
    let f = futures.values();
    let log_p0 = p0.ln();
    let values = (0..f.len())
        .map(|j| {
            let log_growth = b * (f[j] / f[0]).ln()
                + 0.5 * (b - b * b) * ledger.realized_variance()[j]
                + (1.0 - b) * ledger.integrated_rate()[j];
            (log_p0 + log_growth).exp()
        })
        .collect();
    PriceSeries::new(Arc::clone(futures.calendar()), values)
}

/// Side-by-side tracking summary of a replicating portfolio against its
/// benchmark: RMSE/SSE on levels rescaled to a $1000 start, plus each
/// side's calendar-year returns.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingComparison {
    /// Root mean squared level difference per $1000 invested.
    pub rmse: f64,
    /// Sum of squared level differences per $1000 invested.
    pub sse: f64,
    /// Portfolio calendar-year returns.
    pub portfolio_annual: BTreeMap<i32, f64>,
    /// Benchmark calendar-year returns.
    pub benchmark_annual: BTreeMap<i32, f64>,
}

/// Builds a [`TrackingComparison`] between aligned portfolio and benchmark
/// paths.
pub fn tracking_report(
    portfolio: &PriceSeries,
    benchmark: &PriceSeries,
) -> Result<TrackingComparison> {
    let p = metrics::rescale_to(portfolio, 1000.0)?;
    let b = metrics::rescale_to(benchmark, 1000.0)?;
    Ok(TrackingComparison {
        rmse: metrics::rmse(&p, &b)?,
        sse: metrics::sse(&p, &b)?,
        portfolio_annual: metrics::annual_returns(portfolio),
        benchmark_annual: metrics::annual_returns(benchmark),
    })
}

fn ensure_same_calendar(futures: &PriceSeries, rates: &RateSeries) -> Result<()> {
    if futures.calendar().dates() != rates.calendar().dates() {
        return Err(Error::CalendarMismatch);
    }
    Ok(())
}
