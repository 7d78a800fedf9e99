//! Error type shared by every module in the crate.
//!
//! All fallible operations return [`Result`]. Variants carry enough context
//! (dates, row numbers, contract names) that a CLI can print an actionable
//! message without re-deriving state.

use chrono::NaiveDate;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while assembling or analyzing series.
#[derive(Debug, Error)]
pub enum Error {
    /// A trading calendar was constructed with no dates.
    #[error("trading calendar must contain at least one date")]
    EmptyCalendar,

    /// Calendar dates were not strictly increasing.
    #[error("calendar dates must be strictly increasing; offense at {date}")]
    UnsortedCalendar { date: NaiveDate },

    /// A series was constructed with a value count different from its calendar.
    #[error("series has {values} values but its calendar has {dates} dates")]
    LengthMismatch { values: usize, dates: usize },

    /// A price must be strictly positive and finite.
    #[error("non-positive or non-finite price {value} on {date}")]
    InvalidPrice { date: NaiveDate, value: f64 },

    /// A rate must be finite (negative rates are allowed).
    #[error("non-finite rate {value} on {date}")]
    InvalidRate { date: NaiveDate, value: f64 },

    /// CSV input had a malformed or missing header.
    #[error("malformed CSV header: {reason}")]
    CsvHeader { reason: String },

    /// CSV input contained no data rows.
    #[error("CSV input contains a header but no data rows")]
    CsvEmpty,

    /// One or more CSV data rows failed validation. Row numbers are 1-based
    /// counting data rows (the header is row 0).
    #[error("rejected {} CSV row(s): {}", .rows.len(), format_rows(.rows))]
    CsvRows { rows: Vec<CsvRowError> },

    /// The same date appeared twice in one input.
    #[error("duplicate date {date} in input")]
    DuplicateDate { date: NaiveDate },

    /// Underlying I/O failure while reading or writing.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Low-level CSV parsing failure (encoding, ragged rows, ...).
    #[error("CSV parse error: {0}")]
    Csv(#[from] csv::Error),

    /// Two or more series share no common dates.
    #[error("series share no common dates; cannot align")]
    EmptyIntersection,

    /// An operation required series on the same calendar.
    #[error("series calendars differ; align them first")]
    CalendarMismatch,

    /// A date range selection produced no observations.
    #[error("no observations between {start} and {end}")]
    EmptyDateRange { start: NaiveDate, end: NaiveDate },

    /// A series was too short for the requested operation.
    #[error("series too short: need at least {needed} observations, have {got}")]
    SeriesTooShort { needed: usize, got: usize },

    /// Holding period must be at least one day.
    #[error("holding period must be >= 1 day")]
    InvalidHoldingPeriod,

    /// Two return series had different holding periods.
    #[error("holding periods differ: {left} vs {right} days")]
    HoldingPeriodMismatch { left: usize, right: usize },

    /// Leverage ratio outside the supported range.
    #[error("leverage ratio {value} outside supported range [-10, 10]")]
    InvalidLeverage { value: f64 },

    /// Initial capital (or price level) must be strictly positive and finite.
    #[error("initial capital must be positive and finite, got {value}")]
    InvalidCapital { value: f64 },

    /// A compounding step would take the account to or below zero.
    #[error("compounding factor <= 0 on {date}: position is wiped out")]
    Ruin { date: NaiveDate },

    /// The regressor was constant, so the slope is undefined.
    #[error("regressor is constant; ordinary least squares is undefined")]
    ConstantRegressor,

    /// Paired samples had different lengths.
    #[error("paired samples differ in length: {left} vs {right}")]
    SampleLengthMismatch { left: usize, right: usize },

    /// Too few observations for the requested statistic.
    #[error("need at least {needed} paired observations, have {got}")]
    TooFewObservations { needed: usize, got: usize },

    /// A scheduled contract had no price on a date where one was required.
    #[error("missing price for contract {contract} on {date}")]
    MissingContractPrice { contract: String, date: NaiveDate },

    /// A futures contract failed its own consistency checks.
    #[error("invalid contract {contract}: {reason}")]
    InvalidContract { contract: String, reason: String },

    /// A contract identifier could not be parsed.
    #[error("cannot parse contract identifier {input:?}; expected e.g. \"Dec-12\" or \"2012-12\"")]
    BadContractId { input: String },

    /// Matrix dimensions did not line up for the requested operation.
    #[error("dimension mismatch: {reason}")]
    DimensionMismatch { reason: String },

    /// A market scenario had invalid parameters.
    #[error("invalid scenario: {reason}")]
    InvalidScenario { reason: String },

    /// The linear solver could not produce a solution.
    #[error("linear solve failed: {reason}")]
    SolveFailed { reason: String },
}

/// A single rejected CSV data row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvRowError {
    /// 1-based data-row number (header excluded).
    pub row: usize,
    /// Human-readable reason the row was rejected.
    pub reason: String,
}

/// At most this many row errors are spelled out in a message; the rest are
/// summarised as a count so one bad file cannot flood the terminal.
const MAX_LISTED_ROWS: usize = 5;

fn format_rows(rows: &[CsvRowError]) -> String {
    let mut msg = rows
        .iter()
        .take(MAX_LISTED_ROWS)
        .map(|r| format!("row {}: {}", r.row, r.reason))
        .collect::<Vec<_>>()
        .join("; ");
    if rows.len() > MAX_LISTED_ROWS {
        msg.push_str(&format!(" ... and {} more", rows.len() - MAX_LISTED_ROWS));
    }
    msg
}
