//! The fixed 23-level probability grid used by every quantile forecast.

/// Number of probability levels in a quantile forecast.
pub const GRID_SIZE: usize = 23;

/// Index of the 0.50 level.
pub const MEDIAN_INDEX: usize = 11;

/// The probability levels, strictly increasing and symmetric about 0.5.
pub const LEVELS: [f64; GRID_SIZE] = [
    0.01, 0.025, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65,
    0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.975, 0.99,
];

/// Accessor type for the grid. It carries no state: the grid is a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProbabilityGrid;

impl ProbabilityGrid {
    pub fn levels(&self) -> &'static [f64; GRID_SIZE] {
        &LEVELS
    }

    pub fn len(&self) -> usize {
        GRID_SIZE
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid index of `theta`, matched to within 1e-9 so parsed decimals
    /// such as `0.1` or `0.975` resolve.
    pub fn index_of(&self, theta: f64) -> Option<usize> {
        index_of(theta)
    }

    /// Index of the level mirrored around 0.5.
    pub fn mirror(&self, index: usize) -> usize {
        GRID_SIZE - 1 - index
    }
}

pub fn index_of(theta: f64) -> Option<usize> {
    LEVELS.iter().position(|&l| (l - theta).abs() < 1e-9)
}

/// Sum of the levels (11.5 by symmetry).
pub fn level_sum() -> f64 {
    LEVELS.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strictly_increasing_and_in_unit_interval() {
        assert!(LEVELS.windows(2).all(|w| w[0] < w[1]));
        assert!(LEVELS.iter().all(|&l| l > 0.0 && l < 1.0));
    }

    #[test]
    fn symmetric_about_half() {
        for k in 0..GRID_SIZE {
            assert!((LEVELS[k] + LEVELS[GRID_SIZE - 1 - k] - 1.0).abs() < 1e-12);
        }
        assert_eq!(LEVELS[MEDIAN_INDEX], 0.5);
    }

    #[test]
    fn index_lookup() {
        assert_eq!(index_of(0.025), Some(1));
        assert_eq!(index_of(0.975), Some(21));
        assert_eq!(index_of("0.1".parse().unwrap()), Some(3));
        assert_eq!(index_of(0.3), Some(7));
        assert_eq!(index_of(0.12), None);
        assert!((level_sum() - 11.5).abs() < 1e-12);
    }
}
