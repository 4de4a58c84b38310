//! Combining interval forecasts from several teams into one interval.
//!
//! Every method treats the two bounds separately. Trimming counts come from
//! [`trim_count`]; ties are dropped by sorted position, not by value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{trim_count, Beta, IntervalForecast, IntervalSpec};
use crate::stats::{mean_sorted, median_sorted, sorted};

/// The member bounds of one pool of interval forecasts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPool {
    spec: IntervalSpec,
    lowers: Vec<f64>,
    uppers: Vec<f64>,
}

impl IntervalPool {
    pub fn new(spec: IntervalSpec, lowers: Vec<f64>, uppers: Vec<f64>) -> Result<Self> {
        if lowers.len() != uppers.len() {
            return Err(Error::LengthMismatch(lowers.len(), uppers.len()));
        }
        if lowers.is_empty() {
            return Err(Error::EmptyPool);
        }
        for (&l, &u) in lowers.iter().zip(&uppers) {
            // reuses the interval invariants for each member
            IntervalForecast::new(spec, l, u)?;
        }
        Ok(IntervalPool {
            spec,
            lowers,
            uppers,
        })
    }

    pub fn from_intervals(intervals: &[IntervalForecast]) -> Result<Self> {
        let first = intervals.first().ok_or(Error::EmptyPool)?;
        if intervals.iter().any(|i| i.spec != first.spec) {
            return Err(Error::InvalidValue(
                "pool mixes interval specs".to_string(),
            ));
        }
        Self::new(
            first.spec,
            intervals.iter().map(|i| i.lower).collect(),
            intervals.iter().map(|i| i.upper).collect(),
        )
    }

    pub fn spec(&self) -> IntervalSpec {
        self.spec
    }

    pub fn lowers(&self) -> &[f64] {
        &self.lowers
    }

    pub fn uppers(&self) -> &[f64] {
        &self.uppers
    }

    pub fn len(&self) -> usize {
        self.lowers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowers.is_empty()
    }

    fn sorted_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (sorted(&self.lowers), sorted(&self.uppers))
    }

    fn forecast(&self, lower: f64, upper: f64) -> IntervalForecast {
        debug_assert!(lower <= upper, "aggregate crossed: {lower} > {upper}");
        IntervalForecast {
            spec: self.spec,
            lower,
            upper,
        }
    }
}

pub fn simple_average(pool: &IntervalPool) -> IntervalForecast {
    let (lo, hi) = pool.sorted_bounds();
    pool.forecast(mean_sorted(&lo), mean_sorted(&hi))
}

pub fn median(pool: &IntervalPool) -> IntervalForecast {
    let (lo, hi) = pool.sorted_bounds();
    pool.forecast(median_sorted(&lo), median_sorted(&hi))
}

/// Drops the `N` lowest and `N` highest values of each bound, then averages.
pub fn symmetric_trim(pool: &IntervalPool, beta: Beta) -> IntervalForecast {
    let (lo, hi) = pool.sorted_bounds();
    let m = pool.len();
    let n = trim_count(beta, m);
    pool.forecast(mean_sorted(&lo[n..m - n]), mean_sorted(&hi[n..m - n]))
}

/// Drops the `N` lowest lower bounds and the `N` highest upper bounds,
/// narrowing the interval. When the trimmed lower mean ends up above the
/// trimmed upper mean both bounds collapse to their midpoint.
pub fn exterior_trim(pool: &IntervalPool, beta: Beta) -> IntervalForecast {
    let (lo, hi) = pool.sorted_bounds();
    let m = pool.len();
    let n = trim_count(beta, m);
    let lower = mean_sorted(&lo[n..]);
    let upper = mean_sorted(&hi[..m - n]);
    if lower > upper {
        let mid = (lower + upper) / 2.0;
        pool.forecast(mid, mid)
    } else {
        pool.forecast(lower, upper)
    }
}

/// Drops the `N` highest lower bounds and the `N` lowest upper bounds,
/// widening the interval.
pub fn interior_trim(pool: &IntervalPool, beta: Beta) -> IntervalForecast {
    let (lo, hi) = pool.sorted_bounds();
    let m = pool.len();
    let n = trim_count(beta, m);
    pool.forecast(mean_sorted(&lo[..m - n]), mean_sorted(&hi[n..]))
}

/// Lowest lower bound to highest upper bound.
pub fn envelope(pool: &IntervalPool) -> IntervalForecast {
    let lower = pool.lowers.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = pool.uppers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    pool.forecast(lower, upper)
}
