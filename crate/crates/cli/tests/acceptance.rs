//! Acceptance suite: one test per shipping criterion. Each test pins its
//! tolerances in the assertions and prints a single `acceptance N: PASS`
//! line on success (visible with `cargo test -- --nocapture`).

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use aurum_core::dynamic_replication::{logprice_prediction_with_dt, simulate_with_dt};
use aurum_core::static_replication::kkt_residual;
use aurum_core::{
    available_contracts, build_schedule, generate_spot, leveraged_benchmark, money_market_series,
    normal_inv_cdf, normalize, ols_fit, simulate, solve_constrained_lsq, student_t_cdf,
    DesignMatrix, LeverageRatio, MarketScenario, PriceSeries, RateSeries, TargetVector, Tenor,
    TradingCalendar,
};

fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2012, 1, 2).unwrap()
}

fn weekday_series(values: &[f64]) -> PriceSeries {
    let calendar = Arc::new(TradingCalendar::weekdays_from(start_date(), values.len()).unwrap());
    PriceSeries::new(calendar, values.to_vec()).unwrap()
}

fn constant_rates(series: &PriceSeries, rate: f64) -> RateSeries {
    RateSeries::new(Arc::clone(series.calendar()), vec![rate; series.len()]).unwrap()
}

/// The seven-day oscillating fund path: the underlying ends down 0.12%
/// while both the +2x and -2x compounded benchmarks end down 0.48%.
const WORKED_PATH: [f64; 7] = [100.0, 98.0, 99.96, 97.96, 99.92, 97.92, 99.88];

#[test]
fn criterion_1_worked_example_exactness() {
    let series = weekday_series(&WORKED_PATH);
    let plus = LeverageRatio::new(2.0).unwrap();
    let minus = LeverageRatio::new(-2.0).unwrap();

    // Warm call so the timed region measures arithmetic, not first-touch
    // allocation.
    leveraged_benchmark(&series, plus, 100.0).unwrap();
    let clock = Instant::now();
    let up = leveraged_benchmark(&series, plus, 100.0).unwrap();
    let down = leveraged_benchmark(&series, minus, 100.0).unwrap();
    let elapsed = clock.elapsed();

    let up_end = up.values()[6];
    let down_end = down.values()[6];
    assert!((up_end - 99.52).abs() <= 0.005, "+2x day-6 level {up_end}");
    assert!((down_end - 99.52).abs() <= 0.005, "-2x day-6 level {down_end}");
    let fund_cum_pct = (WORKED_PATH[6] / WORKED_PATH[0] - 1.0) * 100.0;
    assert!(
        (fund_cum_pct - -0.12).abs() <= 0.005,
        "fund cumulative {fund_cum_pct}%"
    );
    assert!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    println!("acceptance 1 (worked-example exactness): PASS");
}

/// Open-unit uniform matching the library's variate mapping.
fn unit(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn uniform(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// Largest singular value of a column-major matrix by power iteration on
/// the normal matrix; plenty of iterations for 8x3 and smaller.
fn largest_singular_value(cols: &[Vec<f64>]) -> f64 {
    let m = cols.len();
    let n = cols[0].len();
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut value = 0.0;
    for _ in 0..100 {
        let mut u = vec![0.0; n];
        for (col, &vj) in cols.iter().zip(&v) {
            for (ui, &cij) in u.iter_mut().zip(col) {
                *ui += cij * vj;
            }
        }
        let mut w = vec![0.0; m];
        for (wj, col) in w.iter_mut().zip(cols) {
            *wj = col.iter().zip(&u).map(|(a, b)| a * b).sum();
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        value = norm.sqrt();
        for (vj, &wj) in v.iter_mut().zip(&w) {
            *vj = wj / norm;
        }
    }
    value
}

/// `||Cw - d||^2` as an explicit quadratic form, for fast grid evaluation.
/// Weights are completed from free coordinates: the last weight is one
/// minus the sum of the others, so every evaluated point is feasible.
struct PlaneQuadratic {
    m: usize,
    h: [[f64; 3]; 3],
    g: [f64; 3],
    dd: f64,
}

impl PlaneQuadratic {
    fn new(cols: &[Vec<f64>], d: &[f64]) -> Self {
        let m = cols.len();
        let mut h = [[0.0; 3]; 3];
        let mut g = [0.0; 3];
        for (i, ci) in cols.iter().enumerate() {
            g[i] = ci.iter().zip(d).map(|(a, b)| a * b).sum();
            for (j, cj) in cols.iter().enumerate() {
                h[i][j] = ci.iter().zip(cj).map(|(a, b)| a * b).sum();
            }
        }
        let dd = d.iter().map(|x| x * x).sum();
        PlaneQuadratic { m, h, g, dd }
    }

    fn sse(&self, free: &[f64]) -> f64 {
        let mut w = [0.0; 3];
        let mut sum = 0.0;
        for (wi, &f) in w.iter_mut().zip(free) {
            *wi = f;
            sum += f;
        }
        w[free.len()] = 1.0 - sum;
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..self.m {
            lin += self.g[i] * w[i];
            for j in 0..self.m {
                quad += w[i] * self.h[i][j] * w[j];
            }
        }
        quad - 2.0 * lin + self.dd
    }
}

/// Exhaustive box search in the free coordinates around `center`.
fn stage_best(
    q: &PlaneQuadratic,
    k: usize,
    center: &[f64],
    half: f64,
    step: f64,
) -> (Vec<f64>, f64) {
    let points = (2.0 * half / step).round() as i64;
    let mut best = (center.to_vec(), f64::INFINITY);
    match k {
        1 => {
            for i in 0..=points {
                let w1 = center[0] - half + step * i as f64;
                let sse = q.sse(&[w1]);
                if sse < best.1 {
                    best = (vec![w1], sse);
                }
            }
        }
        2 => {
            for i in 0..=points {
                let w1 = center[0] - half + step * i as f64;
                for j in 0..=points {
                    let w2 = center[1] - half + step * j as f64;
                    let sse = q.sse(&[w1, w2]);
                    if sse < best.1 {
                        best = (vec![w1, w2], sse);
                    }
                }
            }
        }
        _ => unreachable!("free dimension is 1 or 2"),
    }
    best
}

/// Grid search over the constraint plane, refining around each stage's best
/// point down to a final step of 1e-3. Each window covers the worst-case
/// distance between the previous stage's best grid point and the true
/// minimizer for condition numbers up to the instance gate below.
fn plane_grid_min(q: &PlaneQuadratic, k: usize) -> f64 {
    let mut center = vec![1.0 / q.m as f64; k];
    let mut best_sse = f64::INFINITY;
    for &(half, step) in &[(50.0, 0.5), (5.0, 0.05), (0.5, 0.005), (0.05, 0.001)] {
        let (best, sse) = stage_best(q, k, &center, half, step);
        center = best;
        best_sse = sse;
    }
    best_sse
}

#[test]
fn criterion_2_constrained_lsq_matches_grid_oracle() {
    let clock = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5EC2);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < 50 {
        attempts += 1;
        assert!(attempts < 500, "instance generation stalled");
        let k = 1 + accepted % 2;
        let m = k + 1;
        let n = 4 + (rng.next_u64() % 5) as usize;

        // Columns scaled to a largest singular value of 0.6 so the final
        // 1e-3 grid resolves SSE differences below the 1e-6 tolerance.
        let mut cols: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| uniform(&mut rng, -1.0, 1.0)).collect())
            .collect();
        let scale = 0.6 / largest_singular_value(&cols);
        for col in &mut cols {
            for x in col {
                *x *= scale;
            }
        }
        // A feasible ground truth plus small noise keeps the minimizer at
        // a modest, window-covered distance from the centroid.
        let mut w_true = vec![0.0; m];
        let mut sum = 0.0;
        for w in w_true.iter_mut().take(k) {
            *w = uniform(&mut rng, -5.0, 6.0);
            sum += *w;
        }
        w_true[k] = 1.0 - sum;
        let d: Vec<f64> = (0..n)
            .map(|i| {
                cols.iter().zip(&w_true).map(|(c, w)| c[i] * w).sum::<f64>()
                    + uniform(&mut rng, -0.02, 0.02)
            })
            .collect();

        let calendar = Arc::new(TradingCalendar::weekdays_from(start_date(), n).unwrap());
        let design = DesignMatrix::new(calendar, &cols).unwrap();
        let target = TargetVector::new(d.clone()).unwrap();
        let weights = solve_constrained_lsq(&design, &target).unwrap();
        // The staged grid assumes bounded anisotropy; re-draw the rare
        // badly conditioned instance.
        if !(weights.condition_number <= 50.0) {
            continue;
        }
        accepted += 1;

        let q = PlaneQuadratic::new(&cols, &d);
        let grid_sse = plane_grid_min(&q, k);
        let diff = (grid_sse - weights.sse).abs();
        assert!(
            diff <= 1e-6,
            "instance {accepted} (k={k}, n={n}): grid SSE {grid_sse} vs solver {}",
            weights.sse
        );
        let residual = kkt_residual(&design, &target, &weights.all()).unwrap();
        assert!(
            residual <= 1e-8,
            "instance {accepted} (k={k}, n={n}): KKT residual {residual}"
        );
    }
    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("acceptance 2 (constrained-LSQ grid oracle, 50 instances): PASS");
}

#[test]
fn criterion_3_leverage_recovery() {
    // Five days of near-flat prices: every daily return is at most 1e-6 in
    // magnitude, the regime where wild weights appear in practice.
    let prices = weekday_series(&[1.0, 1.0 + 8e-7, 1.0 + 3e-7, 1.0 + 9e-7, 1.0 + 1e-7]);
    let rates = constant_rates(&prices, 0.0);
    let money_market = money_market_series(&rates, 1.0).unwrap();
    for &beta_value in &[-3.0, -2.0, 2.0, 3.0] {
        let beta = LeverageRatio::new(beta_value).unwrap();
        let target = leveraged_benchmark(&prices, beta, 1.0).unwrap();
        let (design, d) = normalize(&[money_market.clone(), prices.clone()], &target).unwrap();
        let weights = solve_constrained_lsq(&design, &d).unwrap();
        let recovered = weights.implied_leverage();
        assert!(
            (recovered - beta_value).abs() <= 1e-3,
            "beta {beta_value}: recovered {recovered}"
        );
    }
    println!("acceptance 3 (leverage recovery from near-flat data): PASS");
}

#[test]
fn criterion_4_discretization_convergence() {
    let clock = Instant::now();
    let (mu, sigma, rate) = (0.05, 0.18, 0.01);

    // A set of one-year geometric Brownian paths at the finest resolution;
    // coarser discretizations subsample them, so every level discretizes
    // the same underlying paths and the gaps shrink coherently. The slope
    // is fit on the per-level mean of the per-path max log-gap.
    let fine_steps = 8 * 252;
    let h = 1.0 / fine_steps as f64;
    let paths: Vec<Vec<f64>> = (0..12u64)
        .map(|seed| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut fine = vec![100.0f64];
            for _ in 0..fine_steps {
                let z = normal_inv_cdf(unit(&mut rng));
                let growth = ((mu - 0.5 * sigma * sigma) * h + sigma * h.sqrt() * z).exp();
                fine.push(fine.last().unwrap() * growth);
            }
            fine
        })
        .collect();

    for &beta_value in &[2.0, -2.0] {
        let beta = LeverageRatio::new(beta_value).unwrap();
        let mut log_dt = Vec::new();
        let mut log_gap = Vec::new();
        for factor in [8usize, 4, 2, 1] {
            let dt = h * factor as f64;
            let mut mean_gap = 0.0;
            for fine in &paths {
                let values: Vec<f64> = fine.iter().copied().step_by(factor).collect();
                let futures = weekday_series(&values);
                let rates = constant_rates(&futures, rate);
                let sim = simulate_with_dt(&futures, &rates, beta, 1000.0, dt).unwrap();
                let predicted =
                    logprice_prediction_with_dt(&futures, &rates, beta, 1000.0, dt).unwrap();
                let gap = sim
                    .path()
                    .values()
                    .iter()
                    .zip(predicted.values())
                    .map(|(s, p)| (s.ln() - p.ln()).abs())
                    .fold(0.0f64, f64::max);
                mean_gap += gap;
            }
            mean_gap /= paths.len() as f64;
            log_dt.push(dt.ln());
            log_gap.push(mean_gap.ln());
        }
        let fit = ols_fit(&log_dt, &log_gap).unwrap();
        assert!(
            (0.7..=1.3).contains(&fit.slope),
            "beta {beta_value}: log-log slope {}",
            fit.slope
        );
    }
    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("acceptance 4 (first-order simulation-vs-prediction convergence): PASS");
}

#[test]
fn criterion_5_volatility_decay() {
    // 100 seeded non-constant paths under zero rates: the simulated
    // log-price must sit strictly below the naive beta-scaled move.
    for seed in 0..100u64 {
        let mut scenario = MarketScenario::new(seed, 64);
        scenario.mu = 0.05;
        scenario.sigma = 0.30;
        let futures = generate_spot(&scenario, start_date()).unwrap();
        let rates = constant_rates(&futures, 0.0);
        let naive_move = (futures.last_value() / futures.first_value()).ln();
        for &beta_value in &[-3.0, -2.0, 2.0, 3.0] {
            let beta = LeverageRatio::new(beta_value).unwrap();
            let portfolio = simulate(&futures, &rates, beta, 1000.0).unwrap();
            let bound = beta_value * naive_move + 1000.0f64.ln();
            let margin = bound - portfolio.path().last_value().ln();
            assert!(margin > -1e-6, "seed {seed} beta {beta_value}: margin {margin}");
        }
    }

    // A constructed oscillating path on which +2x and -2x lose together:
    // the underlying ends down only 0.12%, so a -2x holder "should" gain,
    // yet compounding drags both sides down 0.48%.
    let futures = weekday_series(&WORKED_PATH);
    let rates = constant_rates(&futures, 0.0);
    let up = simulate(&futures, &rates, LeverageRatio::new(2.0).unwrap(), 1000.0).unwrap();
    let down = simulate(&futures, &rates, LeverageRatio::new(-2.0).unwrap(), 1000.0).unwrap();
    assert!(futures.last_value() < futures.first_value(), "underlying must end down");
    let up_end = up.path().last_value();
    let down_end = down.path().last_value();
    assert!(
        up_end < 1000.0 && down_end < 1000.0,
        "simultaneous loss not reproduced: +2x {up_end}, -2x {down_end}"
    );
    println!("acceptance 5 (volatility-decay bound, 100 paths): PASS");
}

#[test]
fn criterion_6_regression_engine() {
    let fit = ols_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
    assert!((fit.slope - 1.5).abs() <= 1e-12, "slope {}", fit.slope);
    assert!(
        (fit.intercept - (-2.0 / 3.0)).abs() <= 1e-12,
        "intercept {}",
        fit.intercept
    );
    assert!(
        (fit.r_squared - 27.0 / 28.0).abs() <= 1e-12,
        "R^2 {}",
        fit.r_squared
    );

    for i in 0..100 {
        let t = -10.0 + 20.0 * i as f64 / 99.0;
        let cauchy = 0.5 + t.atan() / std::f64::consts::PI;
        let got1 = student_t_cdf(t, 1);
        assert!((got1 - cauchy).abs() <= 1e-10, "df=1 at t={t}: {got1} vs {cauchy}");
        let df2 = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
        let got2 = student_t_cdf(t, 2);
        assert!((got2 - df2).abs() <= 1e-10, "df=2 at t={t}: {got2} vs {df2}");
    }
    println!("acceptance 6 (regression fit and t-CDF closed forms): PASS");
}

#[test]
fn criterion_7_roll_schedule() {
    let date = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).unwrap();

    // Golden 12-month sequence: the December contract is held through
    // January and February 2012, then rolls into Feb-13 on March 1.
    let calendar =
        Arc::new(TradingCalendar::weekdays(date(2012, 1, 2), date(2012, 3, 30)).unwrap());
    let schedule = build_schedule(Tenor::M12, &calendar).unwrap();
    for (day, expected) in [
        (date(2012, 1, 2), "Dec-12"),
        (date(2012, 2, 1), "Dec-12"),
        (date(2012, 3, 1), "Feb-13"),
    ] {
        let active = schedule.active_on(day).unwrap();
        assert_eq!(active.to_string(), expected, "active contract on {day}");
    }
    assert!(
        schedule.roll_dates().contains(&date(2012, 3, 1)),
        "roll on 2012-03-01 missing: {:?}",
        schedule.roll_dates()
    );

    // Invariants over three years, every tenor: an active contract on every
    // date (totality), never expired, always currently listed, and within
    // one month of nominal tenor.
    let calendar =
        Arc::new(TradingCalendar::weekdays(date(2012, 1, 2), date(2014, 12, 31)).unwrap());
    for tenor in Tenor::ALL {
        let schedule = build_schedule(tenor, &calendar).unwrap();
        assert_eq!(schedule.active().len(), calendar.len(), "{tenor:?}: gaps in schedule");
        for (day, id) in calendar.dates().iter().zip(schedule.active()) {
            assert!(id.expiry() >= *day, "{tenor:?} on {day}: {id} already expired");
            assert!(
                available_contracts(*day).contains(id),
                "{tenor:?} on {day}: {id} not listed"
            );
            let drift = id.tenor_months_from(*day) - tenor.months() as i32;
            assert!(drift.abs() <= 1, "{tenor:?} on {day}: {id} drifts {drift} months");
        }
    }
    println!("acceptance 7 (roll schedule golden sequence and invariants): PASS");
}

fn run_ok(bin: &str, args: &[&str], out_dir: &Path) {
    let output = Command::new(bin)
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .env_remove("AURUM_OUT_DIR")
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn assert_identical_trees(a: &Path, b: &Path, files: &mut usize) {
    let list = |dir: &Path| {
        let mut names: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        names
    };
    let names = list(a);
    assert_eq!(names, list(b), "different file sets under {a:?} vs {b:?}");
    for name in names {
        let (pa, pb) = (a.join(&name), b.join(&name));
        if pa.is_dir() {
            assert_identical_trees(&pa, &pb, files);
        } else {
            let same = std::fs::read(&pa).unwrap() == std::fs::read(&pb).unwrap();
            assert!(same, "{} differs between runs", pa.display());
            *files += 1;
        }
    }
}

#[test]
fn criterion_8_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_aurum");
    let run_pipeline = |root: &Path| {
        let sim = root.join("sim");
        run_ok(bin, &["simulate", "--seed", "7", "--days", "128"], &sim);
        let spot = sim.join("spot.csv");
        let futures = sim.join("futures_m6.csv");
        let rates = sim.join("rates.csv");
        run_ok(
            bin,
            &[
                "replicate-dynamic",
                "--beta=-2",
                "--futures",
                futures.to_str().unwrap(),
                "--rates",
                rates.to_str().unwrap(),
                "--spot",
                spot.to_str().unwrap(),
                "--format",
                "json",
            ],
            &root.join("dynamic"),
        );
        run_ok(
            bin,
            &[
                "regress",
                "--x",
                spot.to_str().unwrap(),
                "--y",
                futures.to_str().unwrap(),
                "--h",
                "1,5",
            ],
            &root.join("regression"),
        );
    };

    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    run_pipeline(first.path());
    run_pipeline(second.path());

    let mut files = 0;
    assert_identical_trees(first.path(), second.path(), &mut files);
    assert!(files >= 9, "only {files} files compared");
    println!("acceptance 8 (byte-identical CLI reruns, {files} files): PASS");
}
