//! The eight subcommands. Each one validates its whole configuration up
//! front (every problem reported in a single error), declares its output
//! files as a group (no silent overwrites), then computes and writes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use serde::Serialize;

use aurum_core::{
    align, build_schedule, generate_futures_curve, generate_rates, generate_spot,
    leveraged_benchmark,
    market_data::{common_calendar, read_price_csv_named, read_rate_csv_named, CalendarSeries, CsvSchema},
    metrics, money_market_series, normalize, ols_fit,
    roll_schedule::continuous_series,
    simple_returns, simulate, slope_test, solve_constrained_lsq,
    static_replication::portfolio_value,
    ContractId, FuturesContract, LeverageRatio, MarketScenario, PriceSeries, RateSeries, Tenor,
    TradingCalendar,
};

use crate::artifacts::{
    write_json, write_kv_csv, write_price_series, write_rate_series, write_table_csv, write_tidy,
    OutputPlan,
};

/// Report file format. Series and tidy plot files are always CSV; this
/// selects how tables and summary reports are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Shared output settings resolved by `main`.
pub struct RunContext {
    pub out_dir: PathBuf,
    pub format: Format,
    pub force: bool,
}

impl RunContext {
    fn plan(&self) -> OutputPlan {
        OutputPlan::new(&self.out_dir, self.force)
    }

    /// Report file name with the format's extension.
    fn report_name(&self, stem: &str) -> String {
        match self.format {
            Format::Csv => format!("{stem}.csv"),
            Format::Json => format!("{stem}.json"),
        }
    }
}

/// An inclusive date range written as `START:END` (ISO dates).
#[derive(Debug, Clone, Copy)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    fn disjoint_from(&self, other: &DateRange) -> bool {
        self.end < other.start || other.end < self.start
    }
}

impl FromStr for DateRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected START:END, got {s:?}"))?;
        let start: NaiveDate = a.parse().map_err(|e| format!("bad start date {a:?}: {e}"))?;
        let end: NaiveDate = b.parse().map_err(|e| format!("bad end date {b:?}: {e}"))?;
        if start > end {
            return Err(format!("range start {start} is after end {end}"));
        }
        Ok(DateRange { start, end })
    }
}

/// A `--futures MONTHS=FILE` pair.
#[derive(Debug, Clone)]
pub struct TenorFile {
    pub months: u32,
    pub path: PathBuf,
}

impl FromStr for TenorFile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (m, p) = s
            .split_once('=')
            .ok_or_else(|| format!("expected MONTHS=FILE, got {s:?}"))?;
        let months: u32 = m.parse().map_err(|e| format!("bad tenor {m:?}: {e}"))?;
        Ok(TenorFile {
            months,
            path: PathBuf::from(p),
        })
    }
}

// ---------------------------------------------------------------------------
// Shared validation and loading helpers
// ---------------------------------------------------------------------------

/// Turns a list of configuration problems into one error naming all of them.
fn finish_validation(problems: Vec<String>) -> Result<()> {
    match problems.len() {
        0 => Ok(()),
        n => Err(anyhow!(
            "invalid configuration ({n} problem{}):\n{}",
            if n == 1 { "" } else { "s" },
            problems
                .iter()
                .map(|p| format!("  - {p}"))
                .collect::<Vec<_>>()
                .join("\n")
        )),
    }
}

fn check_file(flag: &str, path: &Path, problems: &mut Vec<String>) {
    if !path.is_file() {
        problems.push(format!("--{flag}: no such file: {}", path.display()));
    }
}

fn check_leverage(beta: f64, problems: &mut Vec<String>) {
    if let Err(e) = LeverageRatio::new(beta) {
        problems.push(format!("--beta: {e}"));
    }
}

fn check_capital(flag: &str, value: f64, problems: &mut Vec<String>) {
    if !(value.is_finite() && value > 0.0) {
        problems.push(format!("--{flag}: must be positive and finite, got {value}"));
    }
}

fn load_price(flag: &str, path: &Path) -> Result<(PriceSeries, String)> {
    let file =
        File::open(path).with_context(|| format!("--{flag}: opening {}", path.display()))?;
    read_price_csv_named(file, &CsvSchema::default())
        .with_context(|| format!("--{flag}: reading {}", path.display()))
}

fn load_rates(flag: &str, path: &Path) -> Result<(RateSeries, String)> {
    let file =
        File::open(path).with_context(|| format!("--{flag}: opening {}", path.display()))?;
    read_rate_csv_named(file, &CsvSchema::default())
        .with_context(|| format!("--{flag}: reading {}", path.display()))
}

/// File stem used as an instrument's display name.
fn stem_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn tenor_label(tenor: Tenor) -> String {
    format!("m{}", tenor.months())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Generate a seeded synthetic market: spot, rates, and one rolled futures
/// series per supported tenor.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Master seed; all random streams derive from it.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Trading days to generate (>= 2).
    #[arg(long, default_value_t = 504)]
    pub days: usize,
    /// Annualized spot drift.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub mu: f64,
    /// Annualized spot volatility (>= 0).
    #[arg(long, default_value_t = 0.18, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Annualized short rate, constant over the horizon.
    #[arg(long = "r", default_value_t = 0.01, allow_negative_numbers = true)]
    pub rate: f64,
    /// Annualized futures cost of carry.
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    pub carry: f64,
    /// First calendar day; generation starts on the first weekday from here.
    #[arg(long, default_value = "2012-01-02")]
    pub start: NaiveDate,
    /// Spot level on the first day.
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub initial: f64,
}

pub fn run_simulate(args: &SimulateArgs, ctx: &RunContext) -> Result<()> {
    let mut scenario = MarketScenario::new(args.seed, args.days);
    scenario.mu = args.mu;
    scenario.sigma = args.sigma;
    scenario.rate = args.rate;
    scenario.carry = args.carry;
    scenario.initial_price = args.initial;

    let mut problems = Vec::new();
    if let Err(e) = scenario.validate() {
        problems.push(e.to_string());
    }
    finish_validation(problems)?;

    let mut plan = ctx.plan();
    let spot_path = plan.declare("spot.csv");
    let rates_path = plan.declare("rates.csv");
    let futures_paths: Vec<(Tenor, PathBuf)> = Tenor::ALL
        .iter()
        .map(|t| (*t, plan.declare(&format!("futures_{}.csv", tenor_label(*t)))))
        .collect();
    plan.check()?;

    let spot = generate_spot(&scenario, args.start)?;
    let rates = generate_rates(&scenario, &spot)?;
    write_price_series(&spot_path, &spot, "spot")?;
    write_rate_series(&rates_path, &rates, "rate")?;
    for (tenor, path) in &futures_paths {
        let curve = generate_futures_curve(&spot, &scenario, *tenor)
            .with_context(|| format!("generating the {}-month curve", tenor.months()))?;
        write_price_series(path, &curve, &format!("futures_{}", tenor_label(*tenor)))?;
    }
    println!(
        "simulated {} trading days from {} (seed {})",
        spot.len(),
        spot.calendar().first(),
        args.seed
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

/// Validate input CSVs and align them to their shared trading dates.
#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Spot price CSV (`date,<name>`).
    #[arg(long)]
    pub spot: Option<PathBuf>,
    /// Futures continuous-series CSV as MONTHS=FILE; repeatable.
    #[arg(long = "futures", value_name = "MONTHS=FILE")]
    pub futures: Vec<TenorFile>,
    /// Rate CSV (annualized decimals).
    #[arg(long)]
    pub rates: Option<PathBuf>,
    /// Fund (ETF) price CSV.
    #[arg(long)]
    pub fund: Option<PathBuf>,
}

#[derive(Serialize)]
struct IngestRow {
    series: String,
    file: String,
    rows: usize,
    aligned_rows: usize,
    start: String,
    end: String,
}

pub fn run_ingest(args: &IngestArgs, ctx: &RunContext) -> Result<()> {
    let mut problems = Vec::new();
    if args.spot.is_none() && args.futures.is_empty() && args.rates.is_none() && args.fund.is_none()
    {
        problems.push("nothing to ingest: pass --spot, --futures, --rates and/or --fund".into());
    }
    if let Some(p) = &args.spot {
        check_file("spot", p, &mut problems);
    }
    if let Some(p) = &args.rates {
        check_file("rates", p, &mut problems);
    }
    if let Some(p) = &args.fund {
        check_file("fund", p, &mut problems);
    }
    let mut seen_tenors = BTreeSet::new();
    for tf in &args.futures {
        check_file("futures", &tf.path, &mut problems);
        if Tenor::from_months(tf.months).is_err() {
            problems.push(format!(
                "--futures: {} is not a supported tenor (use 1, 2, 6 or 12)",
                tf.months
            ));
        } else if !seen_tenors.insert(tf.months) {
            problems.push(format!("--futures: tenor {} given more than once", tf.months));
        }
    }
    finish_validation(problems)?;

    // Load everything, collecting parse failures so one bad file does not
    // hide another.
    let mut problems = Vec::new();
    let mut prices: Vec<(String, PathBuf, PriceSeries, String)> = Vec::new();
    let mut rates: Option<(PathBuf, RateSeries, String)> = None;
    {
        let mut load_into = |flag: &str, out_name: String, path: &Path| match load_price(flag, path)
        {
            Ok((series, column)) => prices.push((out_name, path.to_path_buf(), series, column)),
            Err(e) => problems.push(format!("{e:#}")),
        };
        if let Some(p) = &args.spot {
            load_into("spot", "spot".into(), p);
        }
        for tf in &args.futures {
            let tenor = Tenor::from_months(tf.months).expect("validated above");
            load_into("futures", format!("futures_{}", tenor_label(tenor)), &tf.path);
        }
        if let Some(p) = &args.fund {
            load_into("fund", "fund".into(), p);
        }
    }
    if let Some(p) = &args.rates {
        match load_rates("rates", p) {
            Ok((series, column)) => rates = Some((p.clone(), series, column)),
            Err(e) => problems.push(format!("{e:#}")),
        }
    }
    finish_validation(problems)?;

    // Intersect all calendars, then restrict every series to the overlap.
    let mut calendars: Vec<&TradingCalendar> =
        prices.iter().map(|(_, _, s, _)| s.calendar().as_ref()).collect();
    if let Some((_, r, _)) = &rates {
        calendars.push(r.calendar().as_ref());
    }
    let shared = common_calendar(&calendars).context("aligning inputs")?;

    let mut plan = ctx.plan();
    let price_outs: Vec<PathBuf> = prices
        .iter()
        .map(|(name, ..)| plan.declare(&format!("aligned_{name}.csv")))
        .collect();
    let rates_out = rates.as_ref().map(|_| plan.declare("aligned_rates.csv"));
    let summary_path = plan.declare(&ctx.report_name("ingest_summary"));
    plan.check()?;

    let mut summary: Vec<IngestRow> = Vec::new();
    for ((name, file, series, column), out) in prices.iter().zip(&price_outs) {
        let aligned = series
            .restrict_to(&shared)
            .with_context(|| format!("aligning {}", file.display()))?;
        write_price_series(out, &aligned, column)?;
        summary.push(IngestRow {
            series: name.clone(),
            file: file.display().to_string(),
            rows: series.len(),
            aligned_rows: aligned.len(),
            start: shared.first().to_string(),
            end: shared.last().to_string(),
        });
    }
    if let (Some((file, series, column)), Some(out)) = (&rates, &rates_out) {
        let aligned = series
            .restrict_to(&shared)
            .with_context(|| format!("aligning {}", file.display()))?;
        write_rate_series(out, &aligned, column)?;
        summary.push(IngestRow {
            series: "rates".into(),
            file: file.display().to_string(),
            rows: series.len(),
            aligned_rows: aligned.len(),
            start: shared.first().to_string(),
            end: shared.last().to_string(),
        });
    }

    match ctx.format {
        Format::Json => write_json(&summary_path, &summary)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = summary
                .iter()
                .map(|r| {
                    vec![
                        r.series.clone(),
                        r.file.clone(),
                        r.rows.to_string(),
                        r.aligned_rows.to_string(),
                        r.start.clone(),
                        r.end.clone(),
                    ]
                })
                .collect();
            write_table_csv(
                &summary_path,
                &["series", "file", "rows", "aligned_rows", "start", "end"],
                &rows,
            )?;
        }
    }
    println!(
        "aligned {} series to {} shared trading days ({} to {})",
        summary.len(),
        shared.len(),
        shared.first(),
        shared.last()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// roll
// ---------------------------------------------------------------------------

/// Build a roll schedule from per-contract price files and splice the
/// continuous series.
#[derive(Debug, Args)]
pub struct RollArgs {
    /// Nominal tenor in months (1, 2, 6 or 12).
    #[arg(long)]
    pub tenor: u32,
    /// Directory of per-contract CSVs named after the contract
    /// (e.g. Dec-12.csv or 2012-12.csv).
    #[arg(long)]
    pub contracts_dir: PathBuf,
}

pub fn run_roll(args: &RollArgs, ctx: &RunContext) -> Result<()> {
    let mut problems = Vec::new();
    let tenor = match Tenor::from_months(args.tenor) {
        Ok(t) => Some(t),
        Err(e) => {
            problems.push(format!("--tenor: {e}"));
            None
        }
    };
    if !args.contracts_dir.is_dir() {
        problems.push(format!(
            "--contracts-dir: no such directory: {}",
            args.contracts_dir.display()
        ));
    }
    finish_validation(problems)?;
    let tenor = tenor.expect("validated above");

    // Deterministic contract discovery: *.csv files, sorted by name, with
    // the contract identity taken from the file stem. All per-file problems
    // are reported together.
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&args.contracts_dir)
        .with_context(|| format!("listing {}", args.contracts_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        bail!(
            "no contract files: {} contains no .csv files",
            args.contracts_dir.display()
        );
    }

    let mut problems = Vec::new();
    let mut contracts: Vec<FuturesContract> = Vec::new();
    for path in &entries {
        let id = match stem_name(path).parse::<ContractId>() {
            Ok(id) => id,
            Err(e) => {
                problems.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        let prices = match load_price("contracts-dir", path) {
            Ok((series, _)) => series,
            Err(e) => {
                problems.push(format!("{e:#}"));
                continue;
            }
        };
        match FuturesContract::new(id, prices) {
            Ok(c) => contracts.push(c),
            Err(e) => problems.push(format!("{}: {e}", path.display())),
        }
    }
    finish_validation(problems)?;

    // The trading calendar is the union of all contract trading dates.
    let union: BTreeSet<NaiveDate> = contracts
        .iter()
        .flat_map(|c| c.prices().calendar().dates().iter().copied())
        .collect();
    let calendar = Arc::new(TradingCalendar::new(union.into_iter().collect())?);

    let mut plan = ctx.plan();
    let schedule_path = plan.declare("schedule.csv");
    let series_path = plan.declare(&format!("continuous_{}.csv", tenor_label(tenor)));
    plan.check()?;

    let schedule = build_schedule(tenor, &calendar)?;
    let spliced = continuous_series(&schedule, &contracts)?;

    let roll_days: BTreeSet<NaiveDate> = schedule.roll_dates().iter().copied().collect();
    let rows: Vec<Vec<String>> = calendar
        .dates()
        .iter()
        .zip(schedule.active())
        .map(|(date, active)| {
            vec![
                date.to_string(),
                active.to_string(),
                roll_days.contains(date).to_string(),
            ]
        })
        .collect();
    write_table_csv(&schedule_path, &["date", "contract", "roll_flag"], &rows)?;
    write_price_series(&series_path, &spliced, &format!("futures_{}", tenor_label(tenor)))?;
    println!(
        "scheduled {} trading days across {} contracts with {} rolls",
        calendar.len(),
        contracts.len(),
        schedule.roll_dates().len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

/// Compound a daily-reset leveraged benchmark from an underlying series.
#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Daily leverage multiple (e.g. 2 or -2).
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// Underlying price CSV.
    #[arg(long)]
    pub spot: PathBuf,
    /// Benchmark level on the first day.
    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    pub l0: f64,
}

pub fn run_benchmark(args: &BenchmarkArgs, ctx: &RunContext) -> Result<()> {
    let mut problems = Vec::new();
    check_leverage(args.beta, &mut problems);
    check_capital("l0", args.l0, &mut problems);
    check_file("spot", &args.spot, &mut problems);
    finish_validation(problems)?;

    let mut plan = ctx.plan();
    let out = plan.declare("benchmark.csv");
    plan.check()?;

    let (spot, _) = load_price("spot", &args.spot)?;
    let beta = LeverageRatio::new(args.beta).expect("validated above");
    let benchmark = leveraged_benchmark(&spot, beta, args.l0)?;
    write_price_series(&out, &benchmark, "benchmark")?;
    println!(
        "benchmark of {} days ends at {} (cumulative return {})",
        benchmark.len(),
        benchmark.last_value(),
        benchmark.last_value() / args.l0 - 1.0
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// regress
// ---------------------------------------------------------------------------

/// Regress one series' returns on another's over holding-period grids.
#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Regressor price CSV (returns are computed from it).
    #[arg(long)]
    pub x: PathBuf,
    /// Response price CSV.
    #[arg(long)]
    pub y: PathBuf,
    /// Comma-separated holding periods in trading days.
    #[arg(long = "h", value_delimiter = ',', default_value = "1")]
    pub holding_periods: Vec<usize>,
    /// Null value for the slope t-test (e.g. the fund's stated leverage).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub test_slope: f64,
}

#[derive(Serialize)]
struct RegressionRow {
    h: usize,
    n: usize,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    rmse: f64,
    t_stat: f64,
    p_value: f64,
}

pub fn run_regress(args: &RegressArgs, ctx: &RunContext) -> Result<()> {
    let mut problems = Vec::new();
    check_file("x", &args.x, &mut problems);
    check_file("y", &args.y, &mut problems);
    for h in &args.holding_periods {
        if *h == 0 {
            problems.push("--h: holding periods must be >= 1 day".into());
        }
    }
    if !args.test_slope.is_finite() {
        problems.push(format!("--test-slope: must be finite, got {}", args.test_slope));
    }
    finish_validation(problems)?;

    let (x_raw, _) = load_price("x", &args.x)?;
    let (y_raw, _) = load_price("y", &args.y)?;
    let aligned = align(&[x_raw, y_raw]).context("aligning --x and --y")?;
    let (x, y) = (&aligned[0], &aligned[1]);

    // Each holding period needs at least three disjoint windows for a
    // meaningful fit; report every unusable one at once.
    let mut problems = Vec::new();
    for h in &args.holding_periods {
        let windows = (x.len() - 1) / h;
        if windows < 3 {
            problems.push(format!(
                "--h: {h}-day windows give {windows} observation(s) on {} shared days; need 3",
                x.len()
            ));
        }
    }
    finish_validation(problems)?;

    let mut plan = ctx.plan();
    let out = plan.declare(&ctx.report_name("regression"));
    plan.check()?;

    let mut table: Vec<RegressionRow> = Vec::new();
    for h in &args.holding_periods {
        let rx = simple_returns(x, *h)?;
        let ry = simple_returns(y, *h)?;
        let fit = ols_fit(rx.values(), ry.values())
            .with_context(|| format!("fitting {h}-day returns"))?;
        let test = slope_test(&fit, args.test_slope)?;
        table.push(RegressionRow {
            h: *h,
            n: fit.n,
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            rmse: fit.rmse,
            t_stat: test.t_stat,
            p_value: test.p_value,
        });
    }

    match ctx.format {
        Format::Json => write_json(&out, &table)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = table
                .iter()
                .map(|r| {
                    vec![
                        r.h.to_string(),
                        r.n.to_string(),
                        r.slope.to_string(),
                        r.intercept.to_string(),
                        r.r_squared.to_string(),
                        r.rmse.to_string(),
                        r.t_stat.to_string(),
                        r.p_value.to_string(),
                    ]
                })
                .collect();
            write_table_csv(
                &out,
                &["h", "n", "slope", "intercept", "r_squared", "rmse", "t_stat", "p_value"],
                &rows,
            )?;
        }
    }
    println!(
        "regressed {} holding period(s) on {} shared trading days (slope null {})",
        table.len(),
        x.len(),
        args.test_slope
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// replicate-static
// ---------------------------------------------------------------------------

/// Fit fixed, sum-to-one portfolio weights to a target by least squares.
#[derive(Debug, Args)]
pub struct ReplicateStaticArgs {
    /// Target price CSV (the series to track).
    #[arg(long)]
    pub target: PathBuf,
    /// Track the beta-leveraged daily-reset benchmark of --target instead
    /// of the raw series.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Rate CSV; adds a money-market account as instrument column 0.
    #[arg(long)]
    pub rates: Option<PathBuf>,
    /// Futures/instrument price CSVs (order fixes the weight order).
    #[arg(long, num_args = 1.., required = true)]
    pub instruments: Vec<PathBuf>,
    /// In-sample fitting range START:END (default: the full shared span).
    #[arg(long)]
    pub train: Option<DateRange>,
    /// Out-of-sample evaluation range START:END, disjoint from --train.
    #[arg(long)]
    pub test: Option<DateRange>,
    /// Dollar scale for reported paths and errors.
    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    pub capital: f64,
}

#[derive(Serialize)]
struct WeightEntry {
    instrument: String,
    weight: f64,
}

#[derive(Serialize)]
struct StaticReport {
    weights: Vec<WeightEntry>,
    implied_leverage: f64,
    degenerate: bool,
    /// `None` means numerically infinite (rank-deficient design).
    condition_number: Option<f64>,
    ill_conditioned: bool,
    capital: f64,
    train_start: String,
    train_end: String,
    n_train: usize,
    sse_in_sample: f64,
    rmse_in_sample: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    test_start: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    test_end: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_test: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rmse_out_of_sample: Option<f64>,
}

pub fn run_replicate_static(args: &ReplicateStaticArgs, ctx: &RunContext) -> Result<()> {
    let mut problems = Vec::new();
    check_file("target", &args.target, &mut problems);
    if let Some(beta) = args.beta {
        check_leverage(beta, &mut problems);
    }
    if let Some(p) = &args.rates {
        check_file("rates", p, &mut problems);
    }
    for p in &args.instruments {
        check_file("instruments", p, &mut problems);
    }
    check_capital("capital", args.capital, &mut problems);
    if let (Some(train), Some(test)) = (&args.train, &args.test) {
        if !train.disjoint_from(test) {
            problems.push(format!(
                "--train and --test overlap: {}:{} vs {}:{}",
                train.start, train.end, test.start, test.end
            ));
        }
    }
    finish_validation(problems)?;

    // Load and align everything to the shared calendar.
    let (target_raw, _) = load_price("target", &args.target)?;
    let mut names: Vec<String> = Vec::new();
    let mut price_inputs: Vec<PriceSeries> = vec![target_raw];
    for p in &args.instruments {
        names.push(stem_name(p));
        price_inputs.push(load_price("instruments", p)?.0);
    }
    let rates_raw = match &args.rates {
        Some(p) => Some(load_rates("rates", p)?.0),
        None => None,
    };
    let mut calendars: Vec<&TradingCalendar> =
        price_inputs.iter().map(|s| s.calendar().as_ref()).collect();
    if let Some(r) = &rates_raw {
        calendars.push(r.calendar().as_ref());
    }
    let shared = common_calendar(&calendars).context("aligning inputs")?;
    let aligned: Vec<PriceSeries> = price_inputs
        .iter()
        .map(|s| s.restrict_to(&shared))
        .collect::<aurum_core::Result<_>>()?;
    let (target_aligned, instrument_series) = aligned.split_first().expect("target present");

    // Instrument columns: money market first when rates were given. The
    // account is compounded over the full span; slicing and first-day
    // renormalization make the starting point irrelevant.
    let mut columns: Vec<(String, PriceSeries)> = Vec::new();
    if let Some(r) = &rates_raw {
        let money_market = money_market_series(&r.restrict_to(&shared)?, 1.0)?;
        columns.push(("money_market".into(), money_market));
    }
    for (name, series) in names.iter().zip(instrument_series) {
        columns.push((name.clone(), series.clone()));
    }

    // The target is either the raw series or a leveraged benchmark of it.
    let target = match args.beta {
        Some(beta) => leveraged_benchmark(
            target_aligned,
            LeverageRatio::new(beta).expect("validated above"),
            1000.0,
        )
        .context("building the leveraged target")?,
        None => target_aligned.clone(),
    };

    let train = args.train.unwrap_or(DateRange {
        start: shared.first(),
        end: shared.last(),
    });

    let slice_all = |range: &DateRange| -> Result<(Vec<PriceSeries>, PriceSeries)> {
        let cols = columns
            .iter()
            .map(|(name, s)| {
                s.slice_dates(range.start, range.end)
                    .with_context(|| format!("slicing {name} to {}:{}", range.start, range.end))
            })
            .collect::<Result<Vec<_>>>()?;
        let tgt = target
            .slice_dates(range.start, range.end)
            .with_context(|| format!("slicing the target to {}:{}", range.start, range.end))?;
        Ok((cols, tgt))
    };

    let mut plan = ctx.plan();
    let report_path = plan.declare(&ctx.report_name("static_report"));
    let paths_path = plan.declare("static_paths.csv");
    plan.check()?;

    // In-sample fit at unit scale; dollar reporting at --capital.
    let (train_cols, train_target) = slice_all(&train)?;
    let (design, d) = normalize(&train_cols, &train_target).context("building the design")?;
    let weights = solve_constrained_lsq(&design, &d)?;
    let fitted_train = portfolio_value(&weights, &design, args.capital)
        .context("materializing the in-sample portfolio")?;
    let target_train = metrics::rescale_to(&train_target, args.capital)?;
    let rmse_in = metrics::rmse(&fitted_train, &target_train)?;
    let sse_in = metrics::sse(&fitted_train, &target_train)?;

    // Out-of-sample: fixed weights on columns re-normalized to the first
    // test day.
    let mut test_eval: Option<(PriceSeries, PriceSeries, f64, usize)> = None;
    if let Some(test) = &args.test {
        let (test_cols, test_target) = slice_all(test)?;
        let (test_design, _) =
            normalize(&test_cols, &test_target).context("building the out-of-sample design")?;
        let fitted_test = portfolio_value(&weights, &test_design, args.capital)
            .context("materializing the out-of-sample portfolio")?;
        let target_test = metrics::rescale_to(&test_target, args.capital)?;
        let rmse_out = metrics::rmse(&fitted_test, &target_test)?;
        let n_test = target_test.len();
        test_eval = Some((fitted_test, target_test, rmse_out, n_test));
    }

    let weight_entries: Vec<WeightEntry> = columns
        .iter()
        .map(|(name, _)| name.clone())
        .zip(weights.all())
        .map(|(instrument, weight)| WeightEntry { instrument, weight })
        .collect();
    let report = StaticReport {
        implied_leverage: weights.implied_leverage(),
        degenerate: weights.degenerate,
        condition_number: weights.condition_number.is_finite().then_some(weights.condition_number),
        ill_conditioned: weights.is_ill_conditioned(),
        capital: args.capital,
        train_start: train_target.calendar().first().to_string(),
        train_end: train_target.calendar().last().to_string(),
        n_train: train_target.len(),
        sse_in_sample: sse_in,
        rmse_in_sample: rmse_in,
        test_start: test_eval.as_ref().map(|(_, t, _, _)| t.calendar().first().to_string()),
        test_end: test_eval.as_ref().map(|(_, t, _, _)| t.calendar().last().to_string()),
        n_test: test_eval.as_ref().map(|(_, _, _, n)| *n),
        rmse_out_of_sample: test_eval.as_ref().map(|(_, _, r, _)| *r),
        weights: weight_entries,
    };

    match ctx.format {
        Format::Json => write_json(&report_path, &report)?,
        Format::Csv => {
            let mut rows: Vec<(String, String)> = report
                .weights
                .iter()
                .map(|w| (format!("weight.{}", w.instrument), w.weight.to_string()))
                .collect();
            rows.push(("implied_leverage".into(), report.implied_leverage.to_string()));
            rows.push(("degenerate".into(), report.degenerate.to_string()));
            rows.push((
                "condition_number".into(),
                report
                    .condition_number
                    .map_or_else(|| "inf".into(), |c| c.to_string()),
            ));
            rows.push(("ill_conditioned".into(), report.ill_conditioned.to_string()));
            rows.push(("capital".into(), report.capital.to_string()));
            rows.push(("train_start".into(), report.train_start.clone()));
            rows.push(("train_end".into(), report.train_end.clone()));
            rows.push(("n_train".into(), report.n_train.to_string()));
            rows.push(("sse_in_sample".into(), report.sse_in_sample.to_string()));
            rows.push(("rmse_in_sample".into(), report.rmse_in_sample.to_string()));
            if let (Some(s), Some(e), Some(n), Some(r)) = (
                &report.test_start,
                &report.test_end,
                report.n_test,
                report.rmse_out_of_sample,
            ) {
                rows.push(("test_start".into(), s.clone()));
                rows.push(("test_end".into(), e.clone()));
                rows.push(("n_test".into(), n.to_string()));
                rows.push(("rmse_out_of_sample".into(), r.to_string()));
            }
            write_kv_csv(&report_path, &rows)?;
        }
    }

    let mut tidy: Vec<(&str, &PriceSeries)> = vec![
        ("target_train", &target_train),
        ("portfolio_train", &fitted_train),
    ];
    if let Some((fitted_test, target_test, _, _)) = &test_eval {
        tidy.push(("target_test", target_test));
        tidy.push(("portfolio_test", fitted_test));
    }
    write_tidy(&paths_path, &tidy)?;

    if weights.is_ill_conditioned() {
        println!(
            "warning: design is ill-conditioned; weights are unstable even though the fitted path is reliable"
        );
    }
    println!(
        "fitted {} instrument(s) over {} in-sample days: rmse {} per {}",
        report.weights.len(),
        report.n_train,
        report.rmse_in_sample,
        args.capital
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// replicate-dynamic
// ---------------------------------------------------------------------------

/// Simulate the daily-rebalanced leveraged futures portfolio and compare it
/// to the leveraged benchmark built from spot.
#[derive(Debug, Args)]
pub struct ReplicateDynamicArgs {
    /// Daily leverage multiple.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// Futures continuous-series CSV the portfolio trades.
    #[arg(long)]
    pub futures: PathBuf,
    /// Financing rate CSV.
    #[arg(long)]
    pub rates: PathBuf,
    /// Spot price CSV the benchmark is built from.
    #[arg(long)]
    pub spot: PathBuf,
    /// Optional fund (ETF) CSV to report alongside the paths.
    #[arg(long)]
    pub fund: Option<PathBuf>,
    /// Starting capital of portfolio and benchmark.
    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    pub capital: f64,
}

#[derive(Serialize)]
struct DynamicReport {
    beta: f64,
    capital: f64,
    n_days: usize,
    rmse_per_1000: f64,
    sse_per_1000: f64,
    portfolio_annual: BTreeMap<i32, f64>,
    benchmark_annual: BTreeMap<i32, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fund_annual: Option<BTreeMap<i32, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fund_rmse_per_1000: Option<f64>,
}

pub fn run_replicate_dynamic(args: &ReplicateDynamicArgs, ctx: &RunContext) -> Result<()> {
    let mut problems = Vec::new();
    check_leverage(args.beta, &mut problems);
    check_capital("capital", args.capital, &mut problems);
    check_file("futures", &args.futures, &mut problems);
    check_file("rates", &args.rates, &mut problems);
    check_file("spot", &args.spot, &mut problems);
    if let Some(p) = &args.fund {
        check_file("fund", p, &mut problems);
    }
    finish_validation(problems)?;

    let (futures_raw, _) = load_price("futures", &args.futures)?;
    let (spot_raw, _) = load_price("spot", &args.spot)?;
    let (rates_raw, _) = load_rates("rates", &args.rates)?;
    let fund_raw = match &args.fund {
        Some(p) => Some(load_price("fund", p)?.0),
        None => None,
    };

    let mut calendars: Vec<&TradingCalendar> = vec![
        futures_raw.calendar().as_ref(),
        spot_raw.calendar().as_ref(),
        rates_raw.calendar().as_ref(),
    ];
    if let Some(f) = &fund_raw {
        calendars.push(f.calendar().as_ref());
    }
    let shared = common_calendar(&calendars).context("aligning inputs")?;
    let futures = futures_raw.restrict_to(&shared)?;
    let spot = spot_raw.restrict_to(&shared)?;
    let rates = rates_raw.restrict_to(&shared)?;
    let fund = fund_raw.as_ref().map(|f| f.restrict_to(&shared)).transpose()?;

    let mut plan = ctx.plan();
    let report_path = plan.declare(&ctx.report_name("dynamic_report"));
    let paths_path = plan.declare("dynamic_paths.csv");
    plan.check()?;

    let beta = LeverageRatio::new(args.beta).expect("validated above");
    let portfolio = simulate(&futures, &rates, beta, args.capital)?;
    let benchmark = leveraged_benchmark(&spot, beta, args.capital)?;
    let comparison =
        aurum_core::dynamic_replication::tracking_report(portfolio.path(), &benchmark)?;

    let (fund_annual, fund_rmse) = match &fund {
        Some(f) => {
            let f_scaled = metrics::rescale_to(f, 1000.0)?;
            let b_scaled = metrics::rescale_to(&benchmark, 1000.0)?;
            (
                Some(metrics::annual_returns(f)),
                Some(metrics::rmse(&f_scaled, &b_scaled)?),
            )
        }
        None => (None, None),
    };

    let report = DynamicReport {
        beta: args.beta,
        capital: args.capital,
        n_days: shared.len(),
        rmse_per_1000: comparison.rmse,
        sse_per_1000: comparison.sse,
        portfolio_annual: comparison.portfolio_annual.clone(),
        benchmark_annual: comparison.benchmark_annual.clone(),
        fund_annual,
        fund_rmse_per_1000: fund_rmse,
    };

    match ctx.format {
        Format::Json => write_json(&report_path, &report)?,
        Format::Csv => {
            let mut rows: Vec<(String, String)> = vec![
                ("beta".into(), report.beta.to_string()),
                ("capital".into(), report.capital.to_string()),
                ("n_days".into(), report.n_days.to_string()),
                ("rmse_per_1000".into(), report.rmse_per_1000.to_string()),
                ("sse_per_1000".into(), report.sse_per_1000.to_string()),
            ];
            for (year, r) in &report.portfolio_annual {
                rows.push((format!("portfolio_annual.{year}"), r.to_string()));
            }
            for (year, r) in &report.benchmark_annual {
                rows.push((format!("benchmark_annual.{year}"), r.to_string()));
            }
            if let Some(annual) = &report.fund_annual {
                for (year, r) in annual {
                    rows.push((format!("fund_annual.{year}"), r.to_string()));
                }
            }
            if let Some(r) = report.fund_rmse_per_1000 {
                rows.push(("fund_rmse_per_1000".into(), r.to_string()));
            }
            write_kv_csv(&report_path, &rows)?;
        }
    }

    let mut tidy: Vec<(&str, &PriceSeries)> =
        vec![("portfolio", portfolio.path()), ("benchmark", &benchmark)];
    if let Some(f) = &fund {
        tidy.push(("fund", f));
    }
    write_tidy(&paths_path, &tidy)?;
    println!(
        "replicated beta {} over {} days: rmse {} per 1000",
        args.beta, report.n_days, report.rmse_per_1000
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// Tracking report of one series against a reference.
#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Series under evaluation.
    #[arg(long)]
    pub series: PathBuf,
    /// Reference series it should track.
    #[arg(long)]
    pub reference: PathBuf,
    /// Rescale both series to start at 1000 before differencing.
    #[arg(long)]
    pub per_1000: bool,
}

pub fn run_report(args: &ReportArgs, ctx: &RunContext) -> Result<()> {
    let mut problems = Vec::new();
    check_file("series", &args.series, &mut problems);
    check_file("reference", &args.reference, &mut problems);
    finish_validation(problems)?;

    let (series_raw, _) = load_price("series", &args.series)?;
    let (reference_raw, _) = load_price("reference", &args.reference)?;
    let aligned = align(&[series_raw, reference_raw]).context("aligning inputs")?;
    let report = metrics::tracking_report(&aligned[0], &aligned[1], args.per_1000)?;

    let mut plan = ctx.plan();
    let out = plan.declare(&ctx.report_name("tracking_report"));
    plan.check()?;

    match ctx.format {
        Format::Json => write_json(&out, &report)?,
        Format::Csv => {
            let mut rows: Vec<(String, String)> = vec![
                ("sse".into(), report.sse.to_string()),
                ("rmse".into(), report.rmse.to_string()),
                ("per_1000".into(), report.per_1000.to_string()),
            ];
            for (year, r) in &report.annual {
                rows.push((format!("annual.{year}"), r.to_string()));
            }
            write_kv_csv(&out, &rows)?;
        }
    }
    println!(
        "tracking report over {} shared days: rmse {}",
        aligned[0].len(),
        report.rmse
    );
    Ok(())
}
