//! Order-statistic helpers shared by the aggregators.
//!
//! All means sum left to right over ascending values. Keeping one
//! summation order means a mean with nothing trimmed is bit-identical to
//! the plain average, whatever path produced it.

use std::cmp::Ordering;

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Mean of an already-sorted, nonempty slice. A constant slice returns its
/// value exactly; `k * x / k` can otherwise be off by one ulp.
pub(crate) fn mean_sorted(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    if values[0] == values[values.len() - 1] {
        return values[0];
    }
    let mut sum = 0.0;
    for v in values {
        sum += v;
    }
    sum / values.len() as f64
}

/// Sample median of an already-sorted, nonempty slice. Even lengths take
/// the mean of the two central values.
pub(crate) fn median_sorted(values: &[f64]) -> f64 {
    let m = values.len();
    debug_assert!(m > 0);
    if m % 2 == 1 {
        values[m / 2]
    } else {
        (values[m / 2 - 1] + values[m / 2]) / 2.0
    }
}

/// Mean of the `keep_low` smallest and `keep_high` largest of a sorted
/// slice, summed in ascending order. The two sets must not overlap.
pub(crate) fn mean_of_tails(values: &[f64], keep_low: usize, keep_high: usize) -> f64 {
    let m = values.len();
    debug_assert!(keep_low + keep_high <= m && keep_low + keep_high > 0);
    let first = if keep_low > 0 { values[0] } else { values[m - keep_high] };
    let last = if keep_high > 0 { values[m - 1] } else { values[keep_low - 1] };
    if first == last {
        return first;
    }
    let mut sum = 0.0;
    for v in &values[..keep_low] {
        sum += v;
    }
    for v in &values[m - keep_high..] {
        sum += v;
    }
    sum / (keep_low + keep_high) as f64
}

pub(crate) fn cmp_f64(a: &f64, b: &f64) -> Ordering {
    a.total_cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median_sorted(&[1.0, 2.0, 100.0]), 2.0);
        assert_eq!(median_sorted(&[1.0, 2.0, 3.0, 100.0]), 2.5);
        assert_eq!(median_sorted(&[7.0]), 7.0);
    }

    #[test]
    fn tails() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(mean_of_tails(&v, 4, 4), 5.5);
        assert_eq!(mean_of_tails(&v, 1, 1), 5.5);
        assert_eq!(mean_of_tails(&v, 10, 0), mean_sorted(&v));
    }
}
