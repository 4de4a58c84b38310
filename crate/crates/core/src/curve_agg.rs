//! Combining quantile curves from several teams into one curve.
//!
//! The CA ("CDF approach") trims act independently at each of the 23
//! levels. The MA ("mean approach") trims rank whole curves by the average
//! of their quantiles and drop entire forecasts. All of them average
//! quantiles, never probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GRID_SIZE;
use crate::model::{interior_keep_count, trim_count, Beta, IntervalForecast, IntervalSpec, QuantileCurve};
use crate::stats::{cmp_f64, mean_of_tails, mean_sorted, median_sorted};

/// A nonempty set of member curves. Member order is the ingestion order
/// and breaks ties between equal surrogate means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePool {
    members: Vec<QuantileCurve>,
}

impl CurvePool {
    pub fn new(members: Vec<QuantileCurve>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyPool);
        }
        Ok(CurvePool { members })
    }

    pub fn members(&self) -> &[QuantileCurve] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sorted member values at one grid level.
    fn column(&self, level: usize) -> Vec<f64> {
        let mut col: Vec<f64> = self.members.iter().map(|c| c.at(level)).collect();
        col.sort_by(cmp_f64);
        col
    }

    /// Builds a curve level by level from the sorted column at each level.
    fn levelwise(&self, f: impl Fn(&[f64]) -> f64) -> QuantileCurve {
        let mut out = [0.0; GRID_SIZE];
        for (level, slot) in out.iter_mut().enumerate() {
            *slot = f(&self.column(level));
        }
        QuantileCurve::new(out).expect("levelwise order statistics stay monotone")
    }

    /// Member indices ordered by surrogate mean, ties kept in pool order.
    fn ranked_by_mean(&self) -> Vec<usize> {
        let means: Vec<f64> = self.members.iter().map(|c| c.surrogate_mean()).collect();
        let mut idx: Vec<usize> = (0..self.members.len()).collect();
        idx.sort_by(|&a, &b| cmp_f64(&means[a], &means[b]));
        idx
    }

    fn subpool(&self, indices: impl IntoIterator<Item = usize>) -> CurvePool {
        CurvePool {
            members: indices.into_iter().map(|i| self.members[i].clone()).collect(),
        }
    }

    pub fn intervals(&self, spec: IntervalSpec) -> Vec<IntervalForecast> {
        self.members.iter().map(|c| c.interval(spec)).collect()
    }
}

/// Averages the quantiles at each level.
pub fn mean(pool: &CurvePool) -> QuantileCurve {
    pool.levelwise(mean_sorted)
}

/// Median of the quantiles at each level (mean of the central pair for an
/// even pool). This coincides with the median of the members' CDFs.
pub fn median(pool: &CurvePool) -> QuantileCurve {
    pool.levelwise(median_sorted)
}

/// At each level drops the `N` lowest and `N` highest quantiles and averages
/// the rest.
pub fn ca_exterior(pool: &CurvePool, beta: Beta) -> QuantileCurve {
    let m = pool.len();
    let n = trim_count(beta, m);
    pool.levelwise(|col| mean_sorted(&col[n..m - n]))
}

/// At each level keeps only the `N` lowest and `N` highest quantiles and
/// averages them.
pub fn ca_interior(pool: &CurvePool, beta: Beta) -> Result<QuantileCurve> {
    let m = pool.len();
    let n = interior_keep_count(beta, m);
    if n == 0 {
        return Err(Error::DegenerateTrim {
            beta: beta.get(),
            pool_size: m,
        });
    }
    assert!(2 * n <= m, "interior keep sets overlap");
    Ok(pool.levelwise(|col| mean_of_tails(col, n, n)))
}

/// Drops the `N` curves with the lowest surrogate means and the `N` with
/// the highest, then averages the survivors level by level.
pub fn ma_exterior(pool: &CurvePool, beta: Beta) -> QuantileCurve {
    let m = pool.len();
    let n = trim_count(beta, m);
    let ranked = pool.ranked_by_mean();
    mean(&pool.subpool(ranked[n..m - n].iter().copied()))
}

/// Keeps only the `N` curves with the lowest surrogate means and the `N`
/// with the highest, then averages them level by level.
pub fn ma_interior(pool: &CurvePool, beta: Beta) -> Result<QuantileCurve> {
    let m = pool.len();
    let n = interior_keep_count(beta, m);
    if n == 0 {
        return Err(Error::DegenerateTrim {
            beta: beta.get(),
            pool_size: m,
        });
    }
    assert!(2 * n <= m, "interior keep sets overlap");
    let ranked = pool.ranked_by_mean();
    let kept = ranked[..n].iter().chain(&ranked[m - n..]).copied();
    Ok(mean(&pool.subpool(kept)))
}

/// The central interval read off the curve's grid values.
pub fn curve_to_interval(curve: &QuantileCurve, alpha: f64) -> Result<IntervalForecast> {
    Ok(curve.interval(IntervalSpec::new(alpha)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> Beta {
        Beta::new(x).unwrap()
    }

    fn base() -> QuantileCurve {
        let mut v = [0.0; GRID_SIZE];
        for (i, x) in v.iter_mut().enumerate() {
            *x = 100.0 + 3.0 * i as f64 + (i * i) as f64 * 0.5;
        }
        QuantileCurve::new(v).unwrap()
    }

    fn shifted(c: &QuantileCurve, by: f64) -> QuantileCurve {
        let mut v = *c.values();
        v.iter_mut().for_each(|x| *x += by);
        QuantileCurve::new(v).unwrap()
    }

    fn pool(curves: Vec<QuantileCurve>) -> CurvePool {
        CurvePool::new(curves).unwrap()
    }

    #[test]
    fn empty_pool() {
        assert!(matches!(CurvePool::new(vec![]), Err(Error::EmptyPool)));
    }

    #[test]
    fn mean_examples() {
        let c = base();
        assert_eq!(mean(&pool(vec![c.clone(), c.clone()])), c);
        assert_eq!(mean(&pool(vec![c.clone(), shifted(&c, 10.0)])), shifted(&c, 5.0));
        assert_eq!(mean(&pool(vec![c.clone()])), c);
    }

    #[test]
    fn median_ignores_outlier() {
        let c = base();
        let p = pool(vec![shifted(&c, 1.0), c.clone(), shifted(&c, 1e6)]);
        assert_eq!(median(&p), shifted(&c, 1.0));
        assert_eq!(median(&pool(vec![c.clone()])), c);
    }

    #[test]
    fn ca_examples() {
        let members: Vec<QuantileCurve> = (1..=10)
            .map(|k| QuantileCurve::flat(k as f64).unwrap())
            .collect();
        let p = pool(members);
        assert_eq!(ca_exterior(&p, b(0.4)), QuantileCurve::flat(5.5).unwrap());
        assert_eq!(ca_interior(&p, b(0.2)).unwrap(), QuantileCurve::flat(5.5).unwrap());
        assert_eq!(ca_interior(&p, b(0.8)).unwrap(), QuantileCurve::flat(5.5).unwrap());
        let small = pool(vec![base(), shifted(&base(), 2.0), shifted(&base(), 7.0)]);
        assert_eq!(ca_exterior(&small, b(0.1)), mean(&small));
        assert!(matches!(
            ca_interior(&small, b(0.9)),
            Err(Error::DegenerateTrim { pool_size: 3, .. })
        ));
    }

    #[test]
    fn ca_interior_symmetric_pool_hits_center() {
        let c = base();
        let p = pool((-3..=3).map(|k| shifted(&c, 10.0 + 2.0 * k as f64)).collect());
        for beta in [0.2, 0.5, 0.7] {
            assert_eq!(ca_interior(&p, b(beta)).unwrap(), shifted(&c, 10.0));
        }
    }

    #[test]
    fn ma_examples() {
        let c = shifted(&base(), 50.0);
        let three = pool(vec![shifted(&c, -10.0), c.clone(), shifted(&c, 10.0)]);
        assert_eq!(ma_exterior(&three, b(0.67)), c);
        assert_eq!(ma_exterior(&three, b(0.1)), mean(&three));

        let five = pool((-2..=2).map(|k| shifted(&c, k as f64)).collect());
        assert_eq!(ma_interior(&five, b(0.6)).unwrap(), c);
        let four = pool((0..4).map(|k| shifted(&c, k as f64)).collect());
        assert!(ma_interior(&four, b(0.9)).is_err());
    }

    #[test]
    fn ma_interior_never_keeps_whole_pool() {
        // (1 - beta) / 2 * M < M / 2 for every beta in (0, 1), so 2N < M and
        // a pair of curves always degenerates to N = 0.
        for m in 1..40 {
            for beta in Beta::STANDARD.iter().chain(&[1e-9, 0.999]) {
                assert!(2 * interior_keep_count(b(*beta), m) < m);
            }
        }
        let c = base();
        let two = pool(vec![c.clone(), shifted(&c, 6.0)]);
        for beta in Beta::STANDARD {
            assert!(matches!(
                ma_interior(&two, b(beta)),
                Err(Error::DegenerateTrim { pool_size: 2, .. })
            ));
        }
    }

    #[test]
    fn ma_ties_follow_pool_order() {
        // Two curves with equal surrogate means but different shapes.
        let mut wide = [0.0; GRID_SIZE];
        let mut narrow = [0.0; GRID_SIZE];
        for i in 0..GRID_SIZE {
            let d = i as f64 - 11.0;
            wide[i] = 100.0 + 2.0 * d;
            narrow[i] = 100.0 + d;
        }
        let wide = QuantileCurve::new(wide).unwrap();
        let narrow = QuantileCurve::new(narrow).unwrap();
        assert_eq!(wide.surrogate_mean(), narrow.surrogate_mean());
        let low = shifted(&narrow, -50.0);
        let high = shifted(&narrow, 50.0);
        let a = pool(vec![low.clone(), wide.clone(), narrow.clone(), high.clone()]);
        let b_ = pool(vec![low, narrow.clone(), wide.clone(), high]);
        // N = floor(0.3 * 4) = 1 drops low and high; both ties survive.
        assert_eq!(ma_exterior(&a, b(0.6)), ma_exterior(&b_, b(0.6)));
        // Interior with N = 1 keeps one end each; ties are irrelevant there,
        // so check a pool where the tie straddles the cut instead.
        let c = pool(vec![wide.clone(), narrow.clone(), shifted(&narrow, 50.0)]);
        // N = floor(0.35 * 3) = 1 drops the lowest-ranked tie: the first one.
        assert_eq!(ma_exterior(&c, b(0.7)), narrow);
        let d = pool(vec![narrow.clone(), wide.clone(), shifted(&narrow, 50.0)]);
        assert_eq!(ma_exterior(&d, b(0.7)), wide);
    }

    #[test]
    fn interval_extraction() {
        let mut v = [0.0; GRID_SIZE];
        for (i, x) in v.iter_mut().enumerate() {
            *x = 3.0 + i as f64;
        }
        v[21] = 90.0;
        v[22] = 91.0;
        let c = QuantileCurve::new(v).unwrap();
        let i95 = curve_to_interval(&c, 0.05).unwrap();
        assert_eq!((i95.lower, i95.upper), (4.0, 90.0));
        let i50 = curve_to_interval(&c, 0.5).unwrap();
        assert_eq!((i50.lower, i50.upper), (v[6], v[16]));
        let flat = QuantileCurve::flat(12.0).unwrap();
        let f = curve_to_interval(&flat, 0.05).unwrap();
        assert_eq!((f.lower, f.upper), (12.0, 12.0));
        assert!(curve_to_interval(&c, 0.07).is_err());
    }
}
