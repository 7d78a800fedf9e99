//! Shared fixtures for the criterion benchmarks: canned scenarios sized so
//! each benchmark exercises a realistic multi-year input without paying
//! generation costs inside the measured closure.

use chrono::NaiveDate;

use aurum_core::{
    generate_futures_curve, generate_rates, generate_spot, MarketScenario, PriceSeries,
    RateSeries, Tenor,
};

/// First trading day used by every fixture.
pub fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2012, 1, 2).unwrap()
}

/// A moderately volatile scenario spanning roughly `years` calendar years.
pub fn scenario(years: usize) -> MarketScenario {
    let mut s = MarketScenario::new(20_120_102, years * 252);
    s.mu = 0.04;
    s.sigma = 0.18;
    s.rate = 0.01;
    s.carry = 0.02;
    s
}

/// Spot, rolled 12-month futures curve, and rates for [`scenario`].
pub fn market(years: usize) -> (PriceSeries, PriceSeries, RateSeries) {
    let s = scenario(years);
    let spot = generate_spot(&s, start_date()).expect("fixture spot");
    let futures = generate_futures_curve(&spot, &s, Tenor::M12).expect("fixture curve");
    let rates = generate_rates(&s, &spot).expect("fixture rates");
    (spot, futures, rates)
}
