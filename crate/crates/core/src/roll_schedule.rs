//! Gold futures contract listings, tenor-keyed roll schedules, and splicing
//! of per-contract prices into continuous series.
//!
//! Listing rules for delivery months, evaluated fresh on every trading date:
//!
//! - the front three calendar months (starting with the current month until
//!   its contract expires, then shifting forward one month);
//! - every February, April, August and October within the next 23 months;
//! - every June and December within the next 72 months.
//!
//! A contract expires on the third-to-last business day (Mon-Fri) of its
//! delivery month and does not trade afterwards.
//!
//! Tenor bookkeeping counts the delivery month inclusively: in January the
//! December contract of the same year is the 12-month contract, and it ages
//! into an 11-month contract in February. Roll policy by nominal tenor:
//!
//! - tenors 1 and 2 roll on the first trading day of the active contract's
//!   delivery month, into the contract delivering `tenor` months after the
//!   current month (well clear of settlement-week pricing);
//! - tenors 6 and 12 hold their contract while it ages one month below
//!   nominal, then roll two delivery months forward (the deferred listings
//!   come every other month), restoring nominal tenor.
//!
//! The continuous series splices contracts by compounding daily returns:
//! on a roll date the return is taken from the *outgoing* contract, after
//! which the incoming contract's returns take over. Levels are rebased so
//! the series is continuous and starts at the first contract's first price.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::error::{Error, Result};
use crate::market_data::{PriceSeries, TradingCalendar};

/// Nominal tenor of a rolled futures position, in months.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tenor {
    /// Front-month position, rolled monthly.
    M1,
    /// Second-month position, rolled every two months.
    M2,
    /// Six-month position.
    M6,
    /// Twelve-month position.
    M12,
}

impl Tenor {
    /// All supported tenors, shortest first.
    pub const ALL: [Tenor; 4] = [Tenor::M1, Tenor::M2, Tenor::M6, Tenor::M12];

    /// Nominal tenor in months.
    pub fn months(self) -> u32 {
        match self {
            Tenor::M1 => 1,
            Tenor::M2 => 2,
            Tenor::M6 => 6,
            Tenor::M12 => 12,
        }
    }

    /// Parses 1, 2, 6 or 12.
    pub fn from_months(months: u32) -> Result<Self> {
        match months {
            1 => Ok(Tenor::M1),
            2 => Ok(Tenor::M2),
            6 => Ok(Tenor::M6),
            12 => Ok(Tenor::M12),
            other => Err(Error::InvalidScenario {
                reason: format!("unsupported tenor {other} months; expected 1, 2, 6 or 12"),
            }),
        }
    }
}

/// Identity of a futures contract: its delivery month.
///
/// Displays as `Dec-12`; parses from that form or from `2012-12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContractId {
    year: i32,
    month: u32,
}

impl ContractId {
    /// Builds an identity from a delivery year and month (1-12).
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::BadContractId {
                input: format!("{year}-{month}"),
            });
        }
        Ok(Self { year, month })
    }

    /// Delivery year.
    pub fn year(&self) -> i32 {
        self.year
    }

    /// Delivery month, 1-12.
    pub fn month(&self) -> u32 {
        self.month
    }

    /// Months since year zero; handy for month arithmetic.
    fn month_index(&self) -> i32 {
        self.year * 12 + self.month as i32 - 1
    }

    /// The contract delivering `months` months later.
    fn advanced(&self, months: i32) -> ContractId {
        from_month_index(self.month_index() + months)
    }

    /// Expiry: the third-to-last business day (Mon-Fri) of the delivery
    /// month. The contract does not trade after this date.
    pub fn expiry(&self) -> NaiveDate {
        let weekdays = weekdays_of_month(self.year, self.month);
        weekdays[weekdays.len() - 3]
    }

    /// Nominal tenor in months as seen from `date`, counting the delivery
    /// month inclusively: the December contract is a 12-month contract when
    /// viewed from January of the same year.
    pub fn tenor_months_from(&self, date: NaiveDate) -> i32 {
        self.month_index() - month_index_of(date) + 1
    }
}

impl fmt::Display for ContractId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 12] = [
            "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
        ];
        write!(
            f,
            "{}-{:02}",
            NAMES[(self.month - 1) as usize],
            self.year.rem_euclid(100)
        )
    }
}

impl FromStr for ContractId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadContractId { input: s.to_string() };
        let (a, b) = s.split_once('-').ok_or_else(bad)?;
        // "2012-12" form.
        if let (Ok(year), Ok(month)) = (a.parse::<i32>(), b.parse::<u32>()) {
            return ContractId::new(year, month).map_err(|_| bad());
        }
        // "Dec-12" form; two-digit years map into 2000-2099.
        const NAMES: [&str; 12] = [
            "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
        ];
        let month = NAMES
            .iter()
            .position(|n| a.eq_ignore_ascii_case(n))
            .ok_or_else(bad)? as u32
            + 1;
        let year: i32 = b.parse().map_err(|_| bad())?;
        let year = if (0..100).contains(&year) { 2000 + year } else { year };
        ContractId::new(year, month)
    }
}

/// A priced futures contract: identity, expiry, and daily settlement prices
/// ending no later than expiry.
#[derive(Debug, Clone, PartialEq)]
pub struct FuturesContract {
    id: ContractId,
    expiry: NaiveDate,
    prices: PriceSeries,
}

impl FuturesContract {
    /// Validates that `prices` stop on or before the contract's expiry.
    pub fn new(id: ContractId, prices: PriceSeries) -> Result<Self> {
        let expiry = id.expiry();
        let last = prices.calendar().last();
        if last > expiry {
            return Err(Error::InvalidContract {
                contract: id.to_string(),
                reason: format!("prices extend to {last}, past expiry {expiry}"),
            });
        }
        Ok(Self { id, expiry, prices })
    }

    /// Contract identity.
    pub fn id(&self) -> ContractId {
        self.id
    }

    /// Expiry date (third-to-last business day of the delivery month).
    pub fn expiry(&self) -> NaiveDate {
        self.expiry
    }

    /// Daily settlement prices.
    pub fn prices(&self) -> &PriceSeries {
        &self.prices
    }
}

/// Delivery months listed for trading on `date`, sorted ascending.
pub fn available_contracts(date: NaiveDate) -> Vec<ContractId> {
    let current = from_month_index(month_index_of(date));
    // The current month's contract drops out once it expires; the front
    // three consecutive months then shift forward by one.
    let front_start = if date <= current.expiry() { 0 } else { 1 };
    let mut listed: Vec<ContractId> = (front_start..front_start + 3)
        .map(|k| current.advanced(k))
        .collect();
    for months_ahead in 1..=72 {
        let id = current.advanced(months_ahead);
        let in_cycle = match id.month {
            2 | 4 | 8 | 10 => months_ahead <= 23,
            6 | 12 => true, // months_ahead <= 72 by loop bound
            _ => false,
        };
        if in_cycle && !listed.contains(&id) {
            listed.push(id);
        }
    }
    listed.sort();
    listed
}

/// Union of delivery months listed on any business day in `[start, end]`.
pub fn contract_calendar(start: NaiveDate, end: NaiveDate) -> Result<Vec<ContractId>> {
    let days = TradingCalendar::weekdays(start, end)?;
    let mut all: Vec<ContractId> = Vec::new();
    for &d in days.dates() {
        for id in available_contracts(d) {
            if !all.contains(&id) {
                all.push(id);
            }
        }
    }
    all.sort();
    Ok(all)
}

/// A day-by-day assignment of the active contract for one nominal tenor.
#[derive(Debug, Clone, PartialEq)]
pub struct RollSchedule {
    tenor: Tenor,
    calendar: Arc<TradingCalendar>,
    active: Vec<ContractId>,
    roll_dates: Vec<NaiveDate>,
}

impl RollSchedule {
    /// Nominal tenor the schedule maintains.
    pub fn tenor(&self) -> Tenor {
        self.tenor
    }

    /// The trading calendar the schedule covers.
    pub fn calendar(&self) -> &Arc<TradingCalendar> {
        &self.calendar
    }

    /// Active contract per calendar date (same indexing as the calendar).
    pub fn active(&self) -> &[ContractId] {
        &self.active
    }

    /// Active contract on a specific date, if it is a trading date.
    pub fn active_on(&self, date: NaiveDate) -> Option<ContractId> {
        self.calendar.position(date).map(|i| self.active[i])
    }

    /// Dates on which the active contract changed (the first day the
    /// incoming contract is active). The initial acquisition is not a roll.
    pub fn roll_dates(&self) -> &[NaiveDate] {
        &self.roll_dates
    }
}

/// Builds the roll schedule for `tenor` over `calendar`.
///
/// Every trading day has an active contract; the active contract is always
/// listed and never past expiry; and its inclusive tenor stays within one
/// month of nominal.
pub fn build_schedule(tenor: Tenor, calendar: &Arc<TradingCalendar>) -> Result<RollSchedule> {
    let dates = calendar.dates();
    let mut active_ids = Vec::with_capacity(dates.len());
    let mut roll_dates = Vec::new();

    let mut active = initial_contract(tenor, dates[0]);
    active_ids.push(active);
    for j in 1..dates.len() {
        let d = dates[j];
        let month_changed = month_index_of(d) != month_index_of(dates[j - 1]);
        if month_changed {
            if let Some(next) = roll_target(tenor, active, d) {
                active = next;
                roll_dates.push(d);
            }
        }
        active_ids.push(active);
    }

    Ok(RollSchedule {
        tenor,
        calendar: Arc::clone(calendar),
        active: active_ids,
        roll_dates,
    })
}

/// Contract acquired when the schedule starts on `date`.
fn initial_contract(tenor: Tenor, date: NaiveDate) -> ContractId {
    match tenor {
        // Short tenors take the contract delivering `tenor` months after
        // the current month, matching the steady-state holding.
        Tenor::M1 | Tenor::M2 => {
            from_month_index(month_index_of(date)).advanced(tenor.months() as i32)
        }
        // Deferred tenors take the listed contract closest to nominal
        // without exceeding it.
        Tenor::M6 | Tenor::M12 => best_deferred(tenor, date),
    }
}

/// Replacement contract if a roll triggers on the first trading day `d` of
/// a month, `None` when the active contract is simply held.
fn roll_target(tenor: Tenor, active: ContractId, d: NaiveDate) -> Option<ContractId> {
    match tenor {
        Tenor::M1 | Tenor::M2 => {
            // Roll out when the calendar enters the active contract's
            // delivery month.
            if month_index_of(d) >= active.month_index() {
                Some(from_month_index(month_index_of(d)).advanced(tenor.months() as i32))
            } else {
                None
            }
        }
        Tenor::M6 | Tenor::M12 => {
            // Hold while the contract ages from N to N-1 months; once it
            // would fall to N-2, re-pick (equivalently: two months forward).
            if active.tenor_months_from(d) <= tenor.months() as i32 - 2 {
                Some(best_deferred(tenor, d))
            } else {
                None
            }
        }
    }
}

/// Listed contract with the largest inclusive tenor not exceeding nominal.
fn best_deferred(tenor: Tenor, date: NaiveDate) -> ContractId {
    available_contracts(date)
        .into_iter()
        .filter(|id| id.tenor_months_from(date) <= tenor.months() as i32)
        .max_by_key(|id| id.month_index())
        .expect("June/December listings within 72 months always qualify")
}

/// Splices per-contract prices into one continuous series along `schedule`.
///
/// The series starts at the first active contract's price. Each later day
/// compounds the daily return of the day's relevant contract: the active
/// contract on ordinary days, the *outgoing* contract on roll dates (both
/// its price on the roll date and on the prior day come from the contract
/// being closed out). Errors name any contract/date whose price is missing.
pub fn continuous_series(
    schedule: &RollSchedule,
    contracts: &[FuturesContract],
) -> Result<PriceSeries> {
    let by_id: HashMap<ContractId, &FuturesContract> =
        contracts.iter().map(|c| (c.id(), c)).collect();
    let price_on = |id: ContractId, date: NaiveDate| -> Result<f64> {
        by_id
            .get(&id)
            .and_then(|c| c.prices().value_on(date))
            .ok_or_else(|| Error::MissingContractPrice {
                contract: id.to_string(),
                date,
            })
    };

    let dates = schedule.calendar().dates();
    let active = schedule.active();
    let mut values = Vec::with_capacity(dates.len());
    let mut level = price_on(active[0], dates[0])?;
    values.push(level);
    for j in 1..dates.len() {
        // On a roll date the position still earns the outgoing contract's
        // return; the incoming contract's returns start the next day.
        let earning = if active[j] != active[j - 1] {
            active[j - 1]
        } else {
            active[j]
        };
        let today = price_on(earning, dates[j])?;
        let yesterday = price_on(earning, dates[j - 1])?;
        level *= today / yesterday;
        values.push(level);
    }
    PriceSeries::new(Arc::clone(schedule.calendar()), values)
}

fn month_index_of(date: NaiveDate) -> i32 {
    date.year() * 12 + date.month() as i32 - 1
}

fn from_month_index(index: i32) -> ContractId {
    ContractId {
        year: index.div_euclid(12),
        month: index.rem_euclid(12) as u32 + 1,
    }
}

fn weekdays_of_month(year: i32, month: u32) -> Vec<NaiveDate> {
    let first = NaiveDate::from_ymd_opt(year, month, 1).expect("valid month");
    let next_month = if month == 12 {
        NaiveDate::from_ymd_opt(year + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(year, month + 1, 1)
    }
    .expect("valid month");
    let mut days = Vec::with_capacity(23);
    let mut d = first;
    while d < next_month {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            days.push(d);
        }
        d = d.succ_opt().expect("date overflow");
    }
    days
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn id(y: i32, m: u32) -> ContractId {
        ContractId::new(y, m).unwrap()
    }

    #[test]
    fn contract_id_parses_and_displays() {
        let dec12: ContractId = "Dec-12".parse().unwrap();
        assert_eq!(dec12, id(2012, 12));
        assert_eq!(dec12.to_string(), "Dec-12");
        let same: ContractId = "2012-12".parse().unwrap();
        assert_eq!(same, dec12);
        assert!("Foo-12".parse::<ContractId>().is_err());
        assert!("2012-13".parse::<ContractId>().is_err());
    }

    #[test]
    fn expiry_is_third_to_last_weekday() {
        // January 2013's weekdays end 29, 30, 31 -> expiry Jan 29.
        assert_eq!(id(2013, 1).expiry(), date(2013, 1, 29));
        // June 2012 ends Thu 28, Fri 29 -> third-to-last is Wed 27.
        assert_eq!(id(2012, 6).expiry(), date(2012, 6, 27));
    }

    #[test]
    fn listings_follow_the_monthly_cycle() {
        let listed = available_contracts(date(2012, 1, 3));
        // Front three months.
        assert!(listed.contains(&id(2012, 1)));
        assert!(listed.contains(&id(2012, 2)));
        assert!(listed.contains(&id(2012, 3)));
        // December 2012 is listed under the June/December rule...
        assert!(listed.contains(&id(2012, 12)));
        // ...but January 2013 is not listed at all.
        assert!(!listed.contains(&id(2013, 1)));
        // February cycle reaches 23 months out, June/December 72 months.
        assert!(listed.contains(&id(2013, 10)));
        assert!(!listed.contains(&id(2014, 4)));
        assert!(listed.contains(&id(2017, 12)));
        assert!(!listed.contains(&id(2018, 12)));
    }

    #[test]
    fn front_month_drops_out_after_its_expiry() {
        // Jan 2012 weekdays end 27, 30, 31 -> expiry Jan 27.
        let expiry = id(2012, 1).expiry();
        assert_eq!(expiry, date(2012, 1, 27));
        assert!(available_contracts(expiry).contains(&id(2012, 1)));
        let after = available_contracts(date(2012, 1, 30));
        assert!(!after.contains(&id(2012, 1)));
        // The front three shift forward: April appears.
        assert!(after.contains(&id(2012, 4)));
    }

    #[test]
    fn contract_calendar_unions_the_range() {
        let ids = contract_calendar(date(2012, 1, 3), date(2012, 3, 30)).unwrap();
        // The front-three window sweeps in Jan..May; cycle months follow.
        assert!(ids.contains(&id(2012, 1)));
        assert!(ids.contains(&id(2012, 5)));
        assert!(ids.contains(&id(2012, 12)));
        assert!(!ids.contains(&id(2013, 1)));
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn twelve_month_schedule_reproduces_known_sequence() {
        // From January 2012 the 12-month position is Dec-12; it ages to 11
        // months in February (Jan-13 is unlisted), then rolls to Feb-13 in
        // March, restoring a 12-month tenor.
        let cal = Arc::new(TradingCalendar::weekdays(date(2012, 1, 2), date(2012, 3, 30)).unwrap());
        let schedule = build_schedule(Tenor::M12, &cal).unwrap();
        assert_eq!(schedule.active_on(date(2012, 1, 3)).unwrap(), id(2012, 12));
        assert_eq!(schedule.active_on(date(2012, 2, 1)).unwrap(), id(2012, 12));
        assert_eq!(schedule.active_on(date(2012, 3, 1)).unwrap(), id(2013, 2));
        assert_eq!(schedule.roll_dates(), &[date(2012, 3, 1)]);
    }

    #[test]
    fn six_month_schedule_alternates_every_other_month() {
        let cal = Arc::new(TradingCalendar::weekdays(date(2012, 1, 2), date(2012, 12, 31)).unwrap());
        let schedule = build_schedule(Tenor::M6, &cal).unwrap();
        // First trading day of each month -> active contract.
        let expect = [
            (1, id(2012, 6)),
            (2, id(2012, 6)),
            (3, id(2012, 8)),
            (4, id(2012, 8)),
            (5, id(2012, 10)),
            (6, id(2012, 10)),
            (7, id(2012, 12)),
            (8, id(2012, 12)),
            (9, id(2013, 2)),
            (10, id(2013, 2)),
            (11, id(2013, 4)),
            (12, id(2013, 4)),
        ];
        for (month, want) in expect {
            let first_td = *cal
                .dates()
                .iter()
                .find(|d| d.month() == month)
                .unwrap();
            assert_eq!(schedule.active_on(first_td).unwrap(), want, "month {month}");
        }
    }

    #[test]
    fn front_tenors_roll_monthly_and_bimonthly() {
        let cal = Arc::new(TradingCalendar::weekdays(date(2012, 1, 2), date(2012, 6, 29)).unwrap());
        let m1 = build_schedule(Tenor::M1, &cal).unwrap();
        // January holds Feb-12, February holds Mar-12, and so on.
        assert_eq!(m1.active_on(date(2012, 1, 2)).unwrap(), id(2012, 2));
        assert_eq!(m1.active_on(date(2012, 2, 1)).unwrap(), id(2012, 3));
        assert_eq!(m1.active_on(date(2012, 3, 1)).unwrap(), id(2012, 4));
        assert_eq!(m1.roll_dates().len(), 5);

        let m2 = build_schedule(Tenor::M2, &cal).unwrap();
        // January acquires Mar-12 and holds it through February.
        assert_eq!(m2.active_on(date(2012, 1, 2)).unwrap(), id(2012, 3));
        assert_eq!(m2.active_on(date(2012, 2, 29)).unwrap(), id(2012, 3));
        assert_eq!(m2.active_on(date(2012, 3, 1)).unwrap(), id(2012, 5));
        assert_eq!(m2.roll_dates(), &[date(2012, 3, 1), date(2012, 5, 1)]);
    }

    #[test]
    fn schedules_satisfy_their_invariants() {
        let cal = Arc::new(TradingCalendar::weekdays(date(2012, 1, 2), date(2014, 12, 31)).unwrap());
        for tenor in Tenor::ALL {
            let schedule = build_schedule(tenor, &cal).unwrap();
            // Totality: one active contract per trading day.
            assert_eq!(schedule.active().len(), cal.len());
            for (d, a) in cal.dates().iter().zip(schedule.active()) {
                // Never hold past expiry.
                assert!(a.expiry() >= *d, "{tenor:?}: {a} expired before {d}");
                // Listed on the day it is held.
                assert!(
                    available_contracts(*d).contains(a),
                    "{tenor:?}: {a} not listed on {d}"
                );
                // Inclusive tenor within one month of nominal. Short tenors
                // sit on the far side of nominal (they roll out before the
                // delivery month), deferred tenors on the near side.
                let drift = a.tenor_months_from(*d) - tenor.months() as i32;
                assert!(
                    drift.abs() <= 1,
                    "{tenor:?}: drift {drift} on {d} holding {a}"
                );
            }
        }
    }

    #[test]
    fn front_month_rolls_land_one_to_two_months_before_expiry() {
        let cal = Arc::new(TradingCalendar::weekdays(date(2012, 1, 2), date(2014, 12, 31)).unwrap());
        let schedule = build_schedule(Tenor::M1, &cal).unwrap();
        assert!(!schedule.roll_dates().is_empty());
        for &roll in schedule.roll_dates() {
            let active = schedule.active_on(roll).unwrap();
            let gap = (active.expiry() - roll).num_days();
            assert!((31..=62).contains(&gap), "roll {roll} -> {active}, gap {gap}");
        }
    }

    fn flat_contract(cid: ContractId, days: &[(NaiveDate, f64)]) -> FuturesContract {
        let prices = PriceSeries::from_pairs(days.to_vec()).unwrap();
        FuturesContract::new(cid, prices).unwrap()
    }

    #[test]
    fn splice_takes_roll_day_return_from_outgoing_contract() {
        // Hand-built two-contract schedule around the March 2012 roll of
        // the 12-month position (Dec-12 -> Feb-13 on Mar 1).
        let cal = Arc::new(
            TradingCalendar::new(vec![
                date(2012, 2, 28),
                date(2012, 2, 29),
                date(2012, 3, 1),
                date(2012, 3, 2),
            ])
            .unwrap(),
        );
        let schedule = build_schedule(Tenor::M12, &cal).unwrap();
        assert_eq!(schedule.roll_dates(), &[date(2012, 3, 1)]);

        let outgoing = flat_contract(
            id(2012, 12),
            &[
                (date(2012, 2, 28), 98.0),
                (date(2012, 2, 29), 99.0),
                (date(2012, 3, 1), 100.0),
            ],
        );
        let incoming = flat_contract(
            id(2013, 2),
            &[
                (date(2012, 2, 29), 101.0),
                (date(2012, 3, 1), 102.0),
                (date(2012, 3, 2), 104.0),
            ],
        );
        let spliced = continuous_series(&schedule, &[outgoing, incoming]).unwrap();

        // Day 0 starts at the outgoing contract's price. The roll-day
        // return is the outgoing contract's (100/99); the next day uses the
        // incoming contract's (104/102).
        assert_relative_eq!(spliced.values()[0], 98.0);
        assert_relative_eq!(spliced.values()[1], 99.0, max_relative = 1e-12);
        assert_relative_eq!(spliced.values()[2], 100.0, max_relative = 1e-12);
        assert_relative_eq!(
            spliced.values()[3],
            100.0 * (104.0 / 102.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn splice_reports_missing_prices() {
        let cal = Arc::new(
            TradingCalendar::new(vec![date(2012, 2, 28), date(2012, 2, 29)]).unwrap(),
        );
        let schedule = build_schedule(Tenor::M12, &cal).unwrap();
        let short = flat_contract(id(2012, 12), &[(date(2012, 2, 28), 98.0)]);
        let err = continuous_series(&schedule, &[short]).unwrap_err();
        match err {
            Error::MissingContractPrice { contract, date: d } => {
                assert_eq!(contract, "Dec-12");
                assert_eq!(d, date(2012, 2, 29));
            }
            other => panic!("expected missing price, got {other:?}"),
        }
    }

    #[test]
    fn contract_rejects_prices_past_expiry() {
        let cid = id(2012, 1); // expires Jan 27
        let prices = PriceSeries::from_pairs(vec![
            (date(2012, 1, 26), 100.0),
            (date(2012, 1, 30), 101.0),
        ])
        .unwrap();
        assert!(matches!(
            FuturesContract::new(cid, prices),
            Err(Error::InvalidContract { .. })
        ));
    }
}
