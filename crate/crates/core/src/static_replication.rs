//! Static buy-and-hold replication: fit fixed portfolio weights to a target
//! path by least squares, subject to the weights summing to one.
//!
//! Columns of the design matrix are candidate instruments (column 0 is the
//! money market account by convention, the rest futures), each rescaled so
//! its first observation is 1; the target is rescaled the same way. The fit
//! solves
//!
//! ```text
//! minimize ||C w - d||^2   subject to   sum(w) = 1
//! ```
//!
//! by eliminating the constraint: write `w = ones/m + Z u` with `Z` an
//! orthonormal basis of the sum-zero subspace, and solve the reduced
//! unconstrained least squares in `u` through an SVD. Working on `C Z`
//! directly (rather than forming the normal-equations KKT matrix, which
//! squares the condition number) keeps weights accurate even when the
//! instruments are nearly collinear. When the reduced matrix is
//! rank-deficient the minimizer is not unique; the SVD then yields the
//! minimum-norm minimizer and the result is flagged degenerate. First-order
//! optimality can be checked independently with [`kkt_residual`], and the
//! condition number of `C'C` is always reported so callers can warn on
//! ill-conditioned fits ([`ReplicationWeights::CONDITION_WARN_THRESHOLD`]).
//!
//! Everything is kept at unit scale internally; dollar figures (values per
//! $1000 invested) appear only when a portfolio path is materialized with
//! [`portfolio_value`].

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::market_data::{PriceSeries, TradingCalendar};

/// Instrument paths arranged as columns, tied to a trading calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    calendar: Arc<TradingCalendar>,
    matrix: DMatrix<f64>,
}

impl DesignMatrix {
    /// Builds a matrix from instrument columns. Every column must be finite
    /// and have one entry per calendar date.
    pub fn new(calendar: Arc<TradingCalendar>, columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::DimensionMismatch {
                reason: "design matrix needs at least one instrument column".into(),
            });
        }
        for col in columns {
            if col.len() != calendar.len() {
                return Err(Error::LengthMismatch {
                    values: col.len(),
                    dates: calendar.len(),
                });
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::DimensionMismatch {
                    reason: "design matrix entries must be finite".into(),
                });
            }
        }
        let n = calendar.len();
        let matrix = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
        Ok(Self { calendar, matrix })
    }

    /// Number of trading days (rows).
    pub fn n_days(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of instruments (columns).
    pub fn n_instruments(&self) -> usize {
        self.matrix.ncols()
    }

    /// The calendar rows are indexed by.
    pub fn calendar(&self) -> &Arc<TradingCalendar> {
        &self.calendar
    }

    /// Raw matrix view.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// The fitted path the portfolio should reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    values: DVector<f64>,
}

impl TargetVector {
    /// Wraps a finite target path.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch {
                reason: "target vector must be non-empty".into(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch {
                reason: "target entries must be finite".into(),
            });
        }
        Ok(Self {
            values: DVector::from_vec(values),
        })
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Targets are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Raw vector view.
    pub fn vector(&self) -> &DVector<f64> {
        &self.values
    }
}

/// Fitted weights summing to one, with fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationWeights {
    /// Weight on the money market column (column 0).
    pub money_market: f64,
    /// Weights on the futures columns, in design-matrix order.
    pub futures: Vec<f64>,
    /// Achieved sum of squared residuals at unit scale.
    pub sse: f64,
    /// Condition number of `C'C`; infinite when `C` is rank-deficient.
    pub condition_number: f64,
    /// Whether the minimizer was non-unique (minimum-norm tie-break used).
    pub degenerate: bool,
}

impl ReplicationWeights {
    /// Condition numbers above this merit a warning: weight estimates may
    /// be numerically meaningless even though the fitted path is fine.
    pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

    /// All weights in column order (money market first).
    pub fn all(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(1 + self.futures.len());
        w.push(self.money_market);
        w.extend_from_slice(&self.futures);
        w
    }

    /// Leverage implied by the fit: capital not parked in the money market,
    /// `1 - w_0`. For a fit to a beta-leveraged target this recovers beta.
    pub fn implied_leverage(&self) -> f64 {
        1.0 - self.money_market
    }

    /// Whether the fit's conditioning merits a warning.
    pub fn is_ill_conditioned(&self) -> bool {
        !(self.condition_number < Self::CONDITION_WARN_THRESHOLD)
    }
}

/// Rescales aligned instrument and target series so every column starts at
/// 1, producing solver inputs. Instrument order is preserved (pass the money
/// market account first). Requires identical calendars and more days than
/// instruments plus one.
pub fn normalize(
    instruments: &[PriceSeries],
    target: &PriceSeries,
) -> Result<(DesignMatrix, TargetVector)> {
    if instruments.is_empty() {
        return Err(Error::DimensionMismatch {
            reason: "need at least one instrument".into(),
        });
    }
    for s in instruments {
        if s.calendar().dates() != target.calendar().dates() {
            return Err(Error::CalendarMismatch);
        }
    }
    let n = target.len();
    if n <= instruments.len() + 1 {
        return Err(Error::DimensionMismatch {
            reason: format!(
                "need more than {} observations to fit {} instruments, have {n}",
                instruments.len() + 1,
                instruments.len()
            ),
        });
    }
    let columns: Vec<Vec<f64>> = instruments
        .iter()
        .map(|s| {
            let first = s.first_value();
            s.values().iter().map(|v| v / first).collect()
        })
        .collect();
    let first = target.first_value();
    let d: Vec<f64> = target.values().iter().map(|v| v / first).collect();
    Ok((
        DesignMatrix::new(Arc::clone(target.calendar()), &columns)?,
        TargetVector::new(d)?,
    ))
}

/// Minimizes `||C w - d||^2` subject to `sum(w) = 1`.
///
/// Full-rank problems have a unique minimizer; rank-deficient problems
/// return the minimum-norm minimizer and set
/// [`ReplicationWeights::degenerate`].
pub fn solve_constrained_lsq(c: &DesignMatrix, d: &TargetVector) -> Result<ReplicationWeights> {
    let n = c.n_days();
    let m = c.n_instruments();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            reason: format!("design matrix has {n} rows but target has {}", d.len()),
        });
    }
    let cm = c.matrix();
    let dv = d.vector();

    // Condition number of C'C from C's singular values. Singular values
    // under the rank tolerance count as zero, so numerically duplicated
    // instruments report an infinite condition number instead of one
    // hostage to rounding noise.
    let c_singulars = cm.clone().svd(false, false).singular_values;
    let c_smax = c_singulars.iter().cloned().fold(0.0_f64, f64::max);
    let c_smin = c_singulars.iter().cloned().fold(f64::INFINITY, f64::min);
    let rank_tol = n.max(m) as f64 * c_smax * f64::EPSILON;
    let condition_number = if c_smin > rank_tol {
        (c_smax / c_smin).powi(2)
    } else {
        f64::INFINITY
    };

    // A single instrument leaves nothing to optimize: the constraint pins
    // its weight at one.
    if m == 1 {
        let w = DVector::from_element(1, 1.0);
        let sse = (cm * &w - dv).norm_squared();
        return Ok(ReplicationWeights {
            money_market: 1.0,
            futures: vec![],
            sse,
            condition_number,
            degenerate: false,
        });
    }

    // Orthonormal basis Z of {x : sum(x) = 0} from the Householder
    // reflector mapping e_1 onto the normalized ones vector, and the
    // reduced unconstrained problem min_u ||B u - r||, B = C Z, where the
    // centroid ones/m is the particular feasible point.
    let z = sum_zero_basis(m);
    let b = cm * &z;
    let w_particular = DVector::from_element(m, 1.0 / m as f64);
    let r = dv - cm * &w_particular;

    // Rank decides uniqueness only; the SVD pseudo-inverse solve below is
    // exact in the full-rank case and minimum-norm otherwise. The
    // tolerance is scaled by C's largest singular value: directions of B
    // that are rounding-level relative to C are flat, not informative.
    let b_svd = b.clone().svd(true, true);
    let rank = b_svd
        .singular_values
        .iter()
        .filter(|s| **s > rank_tol)
        .count();
    let degenerate = rank < z.ncols();

    // Because Z is orthonormal and the centroid is orthogonal to every
    // sum-zero direction, the minimum-norm u yields the minimum-norm w.
    let u = b_svd
        .solve(&r, rank_tol)
        .map_err(|e| Error::SolveFailed { reason: e.into() })?;
    let w = w_particular + z * u;

    let sse = (cm * &w - dv).norm_squared();
    Ok(ReplicationWeights {
        money_market: w[0],
        futures: w.iter().skip(1).cloned().collect(),
        sse,
        condition_number,
        degenerate,
    })
}

/// First-order optimality violation of `w` for the constrained problem:
/// the spread of the gradient `2 C'(Cw - d)` across coordinates (stationarity
/// requires it to be a multiple of the ones vector) combined with the
/// constraint violation `|sum(w) - 1|`.
pub fn kkt_residual(c: &DesignMatrix, d: &TargetVector, weights: &[f64]) -> Result<f64> {
    if weights.len() != c.n_instruments() {
        return Err(Error::DimensionMismatch {
            reason: format!(
                "{} weights for {} instruments",
                weights.len(),
                c.n_instruments()
            ),
        });
    }
    let w = DVector::from_column_slice(weights);
    let grad = 2.0 * c.matrix().transpose() * (c.matrix() * &w - d.vector());
    let mean = grad.iter().sum::<f64>() / grad.len() as f64;
    let spread = grad.iter().map(|g| (g - mean).abs()).fold(0.0_f64, f64::max);
    let constraint = (w.iter().sum::<f64>() - 1.0).abs();
    Ok(spread.max(constraint))
}

/// Materializes the portfolio path `V_j = capital * sum_i w_i C[j,i]` as a
/// price series on the design matrix's calendar. Errors if the weighted
/// path is not strictly positive.
pub fn portfolio_value(
    weights: &ReplicationWeights,
    c: &DesignMatrix,
    capital: f64,
) -> Result<PriceSeries> {
    if !(capital.is_finite() && capital > 0.0) {
        return Err(Error::InvalidCapital { value: capital });
    }
    let all = weights.all();
    if all.len() != c.n_instruments() {
        return Err(Error::DimensionMismatch {
            reason: format!(
                "{} weights for {} instruments",
                all.len(),
                c.n_instruments()
            ),
        });
    }
    let w = DVector::from_vec(all);
    let path = c.matrix() * w * capital;
    PriceSeries::new(Arc::clone(c.calendar()), path.iter().cloned().collect())
}

/// Orthonormal basis of the sum-zero subspace of `R^m`, as columns.
fn sum_zero_basis(m: usize) -> DMatrix<f64> {
    // Householder reflector H = I - 2 v v'/(v'v) with v = e_1 - a, where
    // a = ones/sqrt(m): H maps e_1 to a, so its remaining columns span
    // the orthogonal complement of the ones direction.
    let a = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    let mut v = -a;
    v[0] += 1.0;
    let vtv = v.norm_squared();
    let mut h = DMatrix::identity(m, m);
    if vtv > 0.0 {
        h -= (&v * v.transpose()) * (2.0 / vtv);
    }
    h.columns(1, m - 1).into_owned()
}
