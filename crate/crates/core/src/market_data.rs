//! Market data carriers: trading calendars, price and rate series, CSV
//! ingestion, calendar alignment, and the money market account.
//!
//! Conventions used throughout the crate:
//! - A [`TradingCalendar`] is a strictly increasing, non-empty list of dates.
//! - A [`PriceSeries`] holds one strictly positive, finite value per calendar
//!   date (spot, fund, futures, portfolio, money market levels all use it).
//! - A [`RateSeries`] holds one finite value per date; negative rates are
//!   legal.
//! - Daily timestamps are `NaiveDate`s; all closes on the same date are
//!   treated as simultaneous.
//! - Alignment is the intersection of calendars. Missing days are dropped,
//!   never forward-filled.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::Arc;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::error::{CsvRowError, Error, Result};

/// One trading year expressed in days; a single day advances time by `1/252`.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Day-count step used by every daily compounding recursion in the crate.
pub const DT: f64 = 1.0 / TRADING_DAYS_PER_YEAR;

/// A strictly increasing, non-empty sequence of trading dates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    dates: Vec<NaiveDate>,
}

impl TradingCalendar {
    /// Builds a calendar, rejecting empty or non-increasing date lists.
    pub fn new(dates: Vec<NaiveDate>) -> Result<Self> {
        if dates.is_empty() {
            return Err(Error::EmptyCalendar);
        }
        for pair in dates.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::UnsortedCalendar { date: pair[1] });
            }
        }
        Ok(Self { dates })
    }

    /// Synthetic business-day calendar: every Monday-Friday in
    /// `[start, end]`, inclusive. Errors if the range contains no weekday.
    pub fn weekdays(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        let mut dates = Vec::new();
        let mut d = start;
        while d <= end {
            if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                dates.push(d);
            }
            d = d.succ_opt().expect("date overflow");
        }
        Self::new(dates)
    }

    /// Synthetic business-day calendar with exactly `n` weekdays starting at
    /// the first weekday on or after `start`.
    pub fn weekdays_from(start: NaiveDate, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyCalendar);
        }
        let mut dates = Vec::with_capacity(n);
        let mut d = start;
        while dates.len() < n {
            if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                dates.push(d);
            }
            d = d.succ_opt().expect("date overflow");
        }
        Self::new(dates)
    }

    /// Number of trading dates.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    /// A calendar is never empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// All dates, strictly increasing.
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    /// First trading date.
    pub fn first(&self) -> NaiveDate {
        self.dates[0]
    }

    /// Last trading date.
    pub fn last(&self) -> NaiveDate {
        *self.dates.last().expect("non-empty")
    }

    /// Index of `date`, if it is a trading date.
    pub fn position(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    /// Whether `date` is a trading date.
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.position(date).is_some()
    }

    /// Intersection of several calendars; errors when no date is shared.
    pub fn intersection(calendars: &[&TradingCalendar]) -> Result<TradingCalendar> {
        let first = calendars.first().ok_or(Error::EmptyCalendar)?;
        let mut shared: Vec<NaiveDate> = first
            .dates
            .iter()
            .copied()
            .filter(|d| calendars[1..].iter().all(|c| c.contains(*d)))
            .collect();
        shared.dedup();
        if shared.is_empty() {
            return Err(Error::EmptyIntersection);
        }
        TradingCalendar::new(shared)
    }
}

/// Anything that lives on a trading calendar and can be restricted to a
/// sub-calendar. Lets [`align`] work uniformly over prices and rates.
pub trait CalendarSeries: Sized {
    /// The calendar the values live on.
    fn calendar(&self) -> &Arc<TradingCalendar>;
    /// Restriction to `calendar`, which must be a subset of the current one.
    fn restrict_to(&self, calendar: &Arc<TradingCalendar>) -> Result<Self>;
}

macro_rules! series_common {
    ($name:ident, $validate:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            calendar: Arc<TradingCalendar>,
            values: Vec<f64>,
        }

        impl $name {
            /// Builds a series, validating one value per calendar date.
            pub fn new(calendar: Arc<TradingCalendar>, values: Vec<f64>) -> Result<Self> {
                if values.len() != calendar.len() {
                    return Err(Error::LengthMismatch {
                        values: values.len(),
                        dates: calendar.len(),
                    });
                }
                let check: fn(NaiveDate, f64) -> Result<()> = $validate;
                for (date, value) in calendar.dates().iter().zip(&values) {
                    check(*date, *value)?;
                }
                Ok(Self { calendar, values })
            }

            /// Builds a series from `(date, value)` pairs that are already
            /// strictly increasing in date.
            pub fn from_pairs(pairs: Vec<(NaiveDate, f64)>) -> Result<Self> {
                let (dates, values): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
                Self::new(Arc::new(TradingCalendar::new(dates)?), values)
            }

            /// The calendar the values live on.
            pub fn calendar(&self) -> &Arc<TradingCalendar> {
                &self.calendar
            }

            /// Values in calendar order.
            pub fn values(&self) -> &[f64] {
                &self.values
            }

            /// Number of observations.
            pub fn len(&self) -> usize {
                self.values.len()
            }

            /// Series are never empty by construction.
            pub fn is_empty(&self) -> bool {
                false
            }

            /// First value.
            pub fn first_value(&self) -> f64 {
                self.values[0]
            }

            /// Last value.
            pub fn last_value(&self) -> f64 {
                *self.values.last().expect("non-empty")
            }

            /// Value on `date`, if it is a calendar date.
            pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
                self.calendar.position(date).map(|i| self.values[i])
            }

            /// Iterator over `(date, value)` pairs.
            pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
                self.calendar
                    .dates()
                    .iter()
                    .copied()
                    .zip(self.values.iter().copied())
            }

            /// Observations with dates in `[start, end]`, inclusive.
            /// Errors when the window contains none.
            pub fn slice_dates(&self, start: NaiveDate, end: NaiveDate) -> Result<Self> {
                let pairs: Vec<(NaiveDate, f64)> =
                    self.iter().filter(|(d, _)| *d >= start && *d <= end).collect();
                if pairs.is_empty() {
                    return Err(Error::EmptyDateRange { start, end });
                }
                Self::from_pairs(pairs)
            }
        }

        impl CalendarSeries for $name {
            fn calendar(&self) -> &Arc<TradingCalendar> {
                &self.calendar
            }

            fn restrict_to(&self, calendar: &Arc<TradingCalendar>) -> Result<Self> {
                let values = calendar
                    .dates()
                    .iter()
                    .map(|d| self.value_on(*d).ok_or(Error::CalendarMismatch))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(Self {
                    calendar: Arc::clone(calendar),
                    values,
                })
            }
        }
    };
}

series_common!(
    PriceSeries,
    |date, value| {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidPrice { date, value });
        }
        Ok(())
    },
    "Daily price levels: strictly positive, finite, one per calendar date."
);

series_common!(
    RateSeries,
    |date, value| {
        if !value.is_finite() {
            return Err(Error::InvalidRate { date, value });
        }
        Ok(())
    },
    "Daily annualized interest rates: finite, one per calendar date; negative rates are legal."
);

/// Restricts every series to the intersection of their calendars.
///
/// The result shares a single calendar allocation. Errors when the
/// intersection is empty. Aligning already aligned series is a no-op.
pub fn align<S: CalendarSeries>(series: &[S]) -> Result<Vec<S>> {
    let calendars: Vec<&TradingCalendar> = series.iter().map(|s| s.calendar().as_ref()).collect();
    let shared = Arc::new(TradingCalendar::intersection(&calendars)?);
    series.iter().map(|s| s.restrict_to(&shared)).collect()
}

/// Intersection calendar across heterogeneous series (prices and rates).
pub fn common_calendar(calendars: &[&TradingCalendar]) -> Result<Arc<TradingCalendar>> {
    Ok(Arc::new(TradingCalendar::intersection(calendars)?))
}

/// Money market account compounded daily from an annualized rate series.
///
/// `M_0 = initial` on the first date and `M_{j+1} = M_j * (1 + r_j / 252)`,
/// using the rate observed at the start of each step (the final rate is not
/// consumed). Errors when `initial <= 0` or a step factor is `<= 0`.
pub fn money_market_series(rates: &RateSeries, initial: f64) -> Result<PriceSeries> {
    if !(initial.is_finite() && initial > 0.0) {
        return Err(Error::InvalidCapital { value: initial });
    }
    let dates = rates.calendar().dates();
    let mut values = Vec::with_capacity(rates.len());
    let mut level = initial;
    values.push(level);
    for j in 1..rates.len() {
        let factor = 1.0 + rates.values()[j - 1] * DT;
        if factor <= 0.0 {
            return Err(Error::Ruin { date: dates[j] });
        }
        level *= factor;
        values.push(level);
    }
    PriceSeries::new(Arc::clone(rates.calendar()), values)
}

/// Column selection for CSV ingestion.
///
/// Defaults: the date column is named `date` (case-insensitive) and the value
/// column is the first non-date column.
#[derive(Debug, Clone, Default)]
pub struct CsvSchema {
    /// Name of the date column; `None` means `date` (case-insensitive).
    pub date_column: Option<String>,
    /// Name of the value column; `None` means the first non-date column.
    pub value_column: Option<String>,
}

/// Reads a price series from `date,<name>` CSV. See [`read_series_csv`].
pub fn read_price_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<PriceSeries> {
    let (pairs, name) = read_series_csv(reader, schema, true)?;
    let _ = name;
    PriceSeries::from_pairs(pairs)
}

/// Reads a rate series from `date,<name>` CSV. See [`read_series_csv`].
pub fn read_rate_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<RateSeries> {
    let (pairs, name) = read_series_csv(reader, schema, false)?;
    let _ = name;
    RateSeries::from_pairs(pairs)
}

/// Reads a price series and also reports the value column's header name.
pub fn read_price_csv_named<R: Read>(reader: R, schema: &CsvSchema) -> Result<(PriceSeries, String)> {
    let (pairs, name) = read_series_csv(reader, schema, true)?;
    Ok((PriceSeries::from_pairs(pairs)?, name))
}

/// Reads a rate series and also reports the value column's header name.
pub fn read_rate_csv_named<R: Read>(reader: R, schema: &CsvSchema) -> Result<(RateSeries, String)> {
    let (pairs, name) = read_series_csv(reader, schema, false)?;
    Ok((RateSeries::from_pairs(pairs)?, name))
}

/// Shared CSV reader: parses, validates, sorts and deduplicates.
///
/// - Dates must be ISO-8601 (`YYYY-MM-DD`).
/// - With `positive = true`, values must be strictly positive (prices);
///   otherwise any finite value is accepted (rates).
/// - Rows failing validation are rejected together; the error lists every
///   offending 1-based data-row number.
/// - Rows may arrive in any order; output is sorted ascending by date.
///   A date that appears twice is an error.
fn read_series_csv<R: Read>(
    reader: R,
    schema: &CsvSchema,
    positive: bool,
) -> Result<(Vec<(NaiveDate, f64)>, String)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::CsvHeader {
            reason: format!("need a date column and a value column, found {} column(s)", headers.len()),
        });
    }
    let date_idx = match &schema.date_column {
        Some(name) => headers.iter().position(|h| h == name).ok_or(Error::CsvHeader {
            reason: format!("no column named {name:?}"),
        })?,
        None => headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case("date"))
            .ok_or(Error::CsvHeader {
                reason: "no column named \"date\"".into(),
            })?,
    };
    let value_idx = match &schema.value_column {
        Some(name) => headers.iter().position(|h| h == name).ok_or(Error::CsvHeader {
            reason: format!("no column named {name:?}"),
        })?,
        None => (0..headers.len()).find(|i| *i != date_idx).expect(">= 2 columns"),
    };
    if value_idx == date_idx {
        return Err(Error::CsvHeader {
            reason: "date and value columns must differ".into(),
        });
    }
    let value_name = headers[value_idx].to_string();

    let mut pairs: Vec<(NaiveDate, f64)> = Vec::new();
    let mut bad_rows: Vec<CsvRowError> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let date_field = record.get(date_idx).unwrap_or("");
        let value_field = record.get(value_idx).unwrap_or("");
        let date = match NaiveDate::parse_from_str(date_field, "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                bad_rows.push(CsvRowError {
                    row,
                    reason: format!("unparseable date {date_field:?}"),
                });
                continue;
            }
        };
        let value: f64 = match value_field.parse() {
            Ok(v) => v,
            Err(_) => {
                bad_rows.push(CsvRowError {
                    row,
                    reason: format!("unparseable value {value_field:?}"),
                });
                continue;
            }
        };
        if !value.is_finite() {
            bad_rows.push(CsvRowError {
                row,
                reason: format!("non-finite value {value}"),
            });
            continue;
        }
        if positive && value <= 0.0 {
            bad_rows.push(CsvRowError {
                row,
                reason: format!("non-positive price {value}"),
            });
            continue;
        }
        pairs.push((date, value));
    }
    if !bad_rows.is_empty() {
        return Err(Error::CsvRows { rows: bad_rows });
    }
    if pairs.is_empty() {
        return Err(Error::CsvEmpty);
    }
    pairs.sort_by_key(|(d, _)| *d);
    for pair in pairs.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::DuplicateDate { date: pair[0].0 });
        }
    }
    Ok((pairs, value_name))
}

/// Writes `date,<name>` CSV. Values use Rust's shortest exact `f64`
/// formatting, which round-trips bit-for-bit (more than 15 significant
/// digits whenever they matter).
pub fn write_series_csv<W: Write>(
    writer: W,
    dates: &[NaiveDate],
    values: &[f64],
    value_name: &str,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["date", value_name])?;
    for (date, value) in dates.iter().zip(values) {
        wtr.write_record([date.format("%Y-%m-%d").to_string(), value.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes a price series as `date,<name>` CSV.
pub fn write_price_csv<W: Write>(writer: W, series: &PriceSeries, value_name: &str) -> Result<()> {
    write_series_csv(writer, series.calendar().dates(), series.values(), value_name)
}

/// Writes a rate series as `date,<name>` CSV.
pub fn write_rate_csv<W: Write>(writer: W, series: &RateSeries, value_name: &str) -> Result<()> {
    write_series_csv(writer, series.calendar().dates(), series.values(), value_name)
}

/// Groups a series' observation indices by calendar year, preserving order.
pub(crate) fn indices_by_year(dates: &[NaiveDate]) -> BTreeMap<i32, Vec<usize>> {
    let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, d) in dates.iter().enumerate() {
        by_year.entry(d.year()).or_default().push(i);
    }
    by_year
}
