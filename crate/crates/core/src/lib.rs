//! Core library for analyzing leveraged exchange-traded funds against the
//! futures market they track: calendars and price/rate series, simple and
//! multi-day returns, leveraged daily-reset benchmarks, futures contract
//! listings with tenor-targeted roll schedules and ratio-spliced continuous
//! series, constrained least-squares static replication, rate-financed
//! dynamic replication with a closed-form log-price prediction, ordinary
//! least squares with t-tests, tracking-error metrics, and a seeded
//! synthetic market for experiments.
//!
//! All randomness is explicit (seeded scenarios) and every computation is
//! deterministic, so downstream outputs are byte-reproducible.

pub mod benchmark;
pub mod dynamic_replication;
pub mod error;
pub mod market_data;
pub mod metrics;
pub mod regression;
pub mod returns;
pub mod roll_schedule;
pub mod static_replication;
pub mod synthetic_market;

pub use benchmark::{leverage_sensitivity, leveraged_benchmark, LeverageRatio};
pub use dynamic_replication::{
    logprice_prediction, simulate, LeveredPortfolioPath, TrackingComparison, VarianceLedger,
};
pub use error::{CsvRowError, Error, Result};
pub use market_data::{
    align, money_market_series, read_price_csv, read_rate_csv, write_price_csv, write_rate_csv,
    CalendarSeries, PriceSeries, RateSeries, TradingCalendar, DT, TRADING_DAYS_PER_YEAR,
};
pub use metrics::{annual_returns, cumulative_returns, rmse, sse, tracking_report, TrackingReport};
pub use regression::{
    ols_fit, return_differential, slope_test, student_t_cdf, HypothesisResult, RegressionFit,
};
pub use returns::{simple_returns, ReturnSeries};
pub use roll_schedule::{
    available_contracts, build_schedule, contract_calendar, ContractId, FuturesContract,
    RollSchedule, Tenor,
};
pub use static_replication::{
    normalize, solve_constrained_lsq, DesignMatrix, ReplicationWeights, TargetVector,
};
pub use synthetic_market::{
    generate_futures_curve, generate_rates, generate_spot, normal_inv_cdf, price_contract,
    MarketScenario,
};
