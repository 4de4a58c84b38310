//! Scores, calibration and skill.
//!
//! `quantile_score` is the pinball loss `(theta - 1{y <= q}) (y - q)`. The
//! interval score and the 23-level CRPS approximation are both sums of it:
//! the interval score is the two bound scores divided by `alpha / 2`, and the
//! CRPS approximation is the plain sum over the grid.

use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::LEVELS;
use crate::model::QuantileCurve;

pub fn quantile_score(theta: f64, q: f64, y: f64) -> f64 {
    let hit = if y <= q { 1.0 } else { 0.0 };
    (theta - hit) * (y - q)
}

/// Width plus `2 / alpha` times the distance by which `y` falls outside.
pub fn interval_score(alpha: f64, lower: f64, upper: f64, y: f64) -> Result<f64> {
    if lower > upper {
        return Err(Error::CrossedInterval { lower, upper });
    }
    let mut score = upper - lower;
    if y <= lower {
        score += 2.0 / alpha * (lower - y);
    }
    if y >= upper {
        score += 2.0 / alpha * (y - upper);
    }
    Ok(score)
}

/// Sum of the quantile scores over the 23 grid levels.
pub fn crps(curve: &QuantileCurve, y: f64) -> f64 {
    LEVELS
        .iter()
        .zip(curve.values())
        .map(|(&theta, &q)| quantile_score(theta, q, y))
        .sum()
}

pub fn mae(forecasts: &[f64], observations: &[f64]) -> Result<f64> {
    check_lengths(forecasts, observations)?;
    let total: f64 = forecasts
        .iter()
        .zip(observations)
        .map(|(f, y)| (f - y).abs())
        .sum();
    Ok(total / forecasts.len() as f64)
}

/// Percentage of observations at or below the quantile forecast.
pub fn hit_percentage(forecasts: &[f64], observations: &[f64]) -> Result<f64> {
    check_lengths(forecasts, observations)?;
    let hits = forecasts
        .iter()
        .zip(observations)
        .filter(|(q, y)| y <= q)
        .count();
    Ok(100.0 * hits as f64 / forecasts.len() as f64)
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkillScore {
    /// `100 (1 - geomean(method / benchmark))`.
    pub pct: f64,
    /// Series used in the geometric mean.
    pub used: usize,
    /// Series skipped because either score was zero.
    pub excluded: usize,
}

/// Skill of a method against a benchmark from per-series `(method,
/// benchmark)` score pairs. Pairs with a zero score are skipped.
pub fn skill_score(pairs: &[(f64, f64)]) -> Result<SkillScore> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut log_sum = 0.0;
    let mut used = 0usize;
    for &(method, benchmark) in pairs {
        if method == 0.0 || benchmark == 0.0 {
            continue;
        }
        if method < 0.0 || benchmark < 0.0 || !method.is_finite() || !benchmark.is_finite() {
            return Err(Error::InvalidValue(format!(
                "skill score needs positive finite scores, got ({method}, {benchmark})"
            )));
        }
        log_sum += (method / benchmark).ln();
        used += 1;
    }
    let excluded = pairs.len() - used;
    if used == 0 {
        return Err(Error::NoSkillSeries);
    }
    if excluded > 0 {
        warn!("skill score: {excluded} series with zero scores excluded");
    }
    let ratio = (log_sum / used as f64).exp();
    Ok(SkillScore {
        pct: 100.0 * (1.0 - ratio),
        used,
        excluded,
    })
}

/// Competition ranks ("1, 1, 3"): lowest score ranks 1, ties share the
/// smaller rank.
pub fn rank_scores(scores: &[f64]) -> Vec<usize> {
    scores
        .iter()
        .map(|s| 1 + scores.iter().filter(|o| o.total_cmp(s).is_lt()).count())
        .collect()
}

pub fn rank_methods<K: Ord + Clone>(mean_scores: &BTreeMap<K, f64>) -> BTreeMap<K, usize> {
    let values: Vec<f64> = mean_scores.values().copied().collect();
    mean_scores
        .keys()
        .cloned()
        .zip(rank_scores(&values))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GRID_SIZE;

    #[test]
    fn quantile_score_examples() {
        assert_eq!(quantile_score(0.5, 10.0, 14.0), 2.0);
        assert!((quantile_score(0.1, 100.0, 80.0) - 18.0).abs() < 1e-12);
        assert_eq!(quantile_score(0.3, 7.0, 7.0), 0.0);
        // half the absolute error at the median
        assert_eq!(quantile_score(0.5, 3.0, 11.0), 4.0);
        assert_eq!(quantile_score(0.5, 11.0, 3.0), 4.0);
    }

    #[test]
    fn interval_score_examples() {
        assert_eq!(interval_score(0.05, 10.0, 20.0, 15.0).unwrap(), 10.0);
        assert_eq!(interval_score(0.05, 10.0, 20.0, 25.0).unwrap(), 210.0);
        assert_eq!(interval_score(0.05, 10.0, 20.0, 5.0).unwrap(), 210.0);
        assert!(interval_score(0.05, 21.0, 20.0, 5.0).is_err());
    }

    #[test]
    fn crps_examples() {
        let flat = QuantileCurve::flat(40.0).unwrap();
        assert_eq!(crps(&flat, 40.0), 0.0);
        let above = QuantileCurve::flat(45.0).unwrap();
        assert!((crps(&above, 40.0) - 5.0 * 11.5).abs() < 1e-9);
        let mut v = [0.0; GRID_SIZE];
        for (i, x) in v.iter_mut().enumerate() {
            *x = i as f64;
        }
        let c = QuantileCurve::new(v).unwrap();
        assert!(crps(&c, 11.0) > 0.0);
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[10.0, 20.0], &[12.0, 16.0]).unwrap(), 3.0);
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0], &[7.0]).unwrap(), 7.0);
        assert!(mae(&[], &[]).is_err());
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn hit_percentage_examples() {
        let h = hit_percentage(&[10.0, 10.0, 10.0], &[5.0, 10.0, 15.0]).unwrap();
        assert!((h - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(hit_percentage(&[10.0, 10.0], &[1.0, 2.0]).unwrap(), 100.0);
        assert_eq!(hit_percentage(&[10.0, 10.0], &[11.0, 12.0]).unwrap(), 0.0);
        assert!(hit_percentage(&[], &[]).is_err());
    }

    #[test]
    fn skill_examples() {
        let same = skill_score(&[(3.0, 3.0), (7.5, 7.5)]).unwrap();
        assert_eq!(same.pct, 0.0);
        let balanced = skill_score(&[(1.0, 2.0), (4.0, 2.0)]).unwrap();
        assert!(balanced.pct.abs() < 1e-12);
        let half = skill_score(&[(1.0, 2.0), (3.0, 6.0)]).unwrap();
        assert!((half.pct - 50.0).abs() < 1e-12);
        let skipped = skill_score(&[(0.0, 2.0), (3.0, 6.0)]).unwrap();
        assert_eq!((skipped.used, skipped.excluded), (1, 1));
        assert!((skipped.pct - 50.0).abs() < 1e-12);
        assert!(matches!(
            skill_score(&[(0.0, 1.0), (1.0, 0.0)]),
            Err(Error::NoSkillSeries)
        ));
    }

    #[test]
    fn skill_invariant_to_common_rescaling() {
        let pairs = [(3.0, 4.0), (10.0, 8.0), (0.5, 0.6)];
        let scaled: Vec<(f64, f64)> = pairs
            .iter()
            .zip([2.0, 1e3, 0.01])
            .map(|(&(m, b), k)| (m * k, b * k))
            .collect();
        let a = skill_score(&pairs).unwrap().pct;
        let b = skill_score(&scaled).unwrap().pct;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn ranks() {
        let m: BTreeMap<&str, f64> = [("A", 5.0), ("B", 3.0), ("C", 9.0)].into();
        let r = rank_methods(&m);
        assert_eq!((r["A"], r["B"], r["C"]), (2, 1, 3));
        let tie: BTreeMap<&str, f64> = [("A", 5.0), ("B", 5.0)].into();
        let r = rank_methods(&tie);
        assert_eq!((r["A"], r["B"]), (1, 1));
        assert_eq!(rank_scores(&[4.0]), vec![1]);
        assert_eq!(rank_scores(&[2.0, 1.0, 1.0, 3.0]), vec![3, 1, 1, 4]);
    }
}
