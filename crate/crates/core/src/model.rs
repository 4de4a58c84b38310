//! Domain types shared across aggregation, scoring and ingestion.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, GRID_SIZE, LEVELS, MEDIAN_INDEX};

/// Week index: weeks since Week 0, the week ending Saturday 2019-12-21.
pub type Week = i64;

pub fn week_zero() -> NaiveDate {
    NaiveDate::from_ymd_opt(2019, 12, 21).expect("valid anchor date")
}

/// Week containing `date`: the week of the Saturday on or after it.
pub fn week_of(date: NaiveDate) -> Week {
    let days = (date - week_zero()).num_days();
    // ceil(days / 7) over all integers
    -((-days).div_euclid(7))
}

/// The Saturday that ends `week`.
pub fn week_end(week: Week) -> NaiveDate {
    let anchor = week_zero();
    let days = week * 7;
    if days >= 0 {
        anchor + Days::new(days as u64)
    } else {
        anchor - Days::new(days.unsigned_abs())
    }
}

/// A distributional forecast: 23 nondecreasing, nonnegative quantiles aligned
/// with [`grid::LEVELS`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileCurve {
    values: [f64; GRID_SIZE],
}

impl QuantileCurve {
    pub fn new(values: [f64; GRID_SIZE]) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidCurve(format!(
                "quantile value {v} is negative or not finite"
            )));
        }
        if let Some(i) = (0..GRID_SIZE - 1).find(|&i| values[i] > values[i + 1]) {
            return Err(Error::InvalidCurve(format!(
                "values decrease between levels {} ({}) and {} ({})",
                LEVELS[i],
                values[i],
                LEVELS[i + 1],
                values[i + 1]
            )));
        }
        Ok(QuantileCurve { values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let arr: [f64; GRID_SIZE] = values.try_into().map_err(|_| {
            Error::InvalidCurve(format!("expected {GRID_SIZE} values, got {}", values.len()))
        })?;
        Self::new(arr)
    }

    /// Sorts the values ascending before validating. Already-valid curves
    /// come back unchanged.
    pub fn sort_repaired(mut values: [f64; GRID_SIZE]) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        Self::new(values)
    }

    /// Every level at the same value.
    pub fn flat(value: f64) -> Result<Self> {
        Self::new([value; GRID_SIZE])
    }

    pub fn values(&self) -> &[f64; GRID_SIZE] {
        &self.values
    }

    pub fn at(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn median(&self) -> f64 {
        self.values[MEDIAN_INDEX]
    }

    /// Average of the 23 quantiles, used as a surrogate for the mean.
    pub fn surrogate_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / GRID_SIZE as f64
    }

    pub fn interval(&self, spec: IntervalSpec) -> IntervalForecast {
        let (lo, hi) = spec.grid_indices();
        IntervalForecast {
            spec,
            lower: self.values[lo],
            upper: self.values[hi],
        }
    }
}

/// A central `(1 - alpha)` interval whose bounds sit on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    alpha: f64,
    lower_index: usize,
    upper_index: usize,
}

impl IntervalSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OffGridInterval(alpha));
        }
        match (grid::index_of(alpha / 2.0), grid::index_of(1.0 - alpha / 2.0)) {
            (Some(lower_index), Some(upper_index)) if lower_index < upper_index => {
                Ok(IntervalSpec {
                    alpha,
                    lower_index,
                    upper_index,
                })
            }
            _ => Err(Error::OffGridInterval(alpha)),
        }
    }

    /// The 95% interval.
    pub fn ninety_five() -> Self {
        Self::new(0.05).expect("0.05 is on the grid")
    }

    /// The 50% interval.
    pub fn fifty() -> Self {
        Self::new(0.5).expect("0.5 is on the grid")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid_indices(&self) -> (usize, usize) {
        (self.lower_index, self.upper_index)
    }

    pub fn lower_level(&self) -> f64 {
        LEVELS[self.lower_index]
    }

    pub fn upper_level(&self) -> f64 {
        LEVELS[self.upper_index]
    }

    /// Nominal coverage as a whole percentage, e.g. 95.
    pub fn coverage_pct(&self) -> f64 {
        (1.0 - self.alpha) * 100.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalForecast {
    pub spec: IntervalSpec,
    pub lower: f64,
    pub upper: f64,
}

impl IntervalForecast {
    pub fn new(spec: IntervalSpec, lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower < 0.0 {
            return Err(Error::InvalidValue(format!(
                "interval bounds must be finite and nonnegative, got ({lower}, {upper})"
            )));
        }
        if lower > upper {
            return Err(Error::CrossedInterval { lower, upper });
        }
        Ok(IntervalForecast { spec, lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, other: &IntervalForecast) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Compartmental,
    Other,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Compartmental => "compartmental",
            Category::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    CumulativeDeaths,
}

/// One team's forecast for one (location, origin week, horizon) slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSubmission {
    pub team: String,
    pub category: Category,
    pub location: String,
    pub forecast_date: NaiveDate,
    pub origin_week: Week,
    pub horizon: u8,
    pub target: Target,
    pub curve: QuantileCurve,
    pub point_forecast: Option<f64>,
}

impl ForecastSubmission {
    pub fn target_week(&self) -> Week {
        self.origin_week + self.horizon as Week
    }

    pub fn slot(&self) -> SlotKey {
        SlotKey {
            location: self.location.clone(),
            origin_week: self.origin_week,
            horizon: self.horizon,
        }
    }
}

/// Identifies a pool: every team forecasting the same location, origin and horizon.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotKey {
    pub location: String,
    pub origin_week: Week,
    pub horizon: u8,
}

impl SlotKey {
    pub fn target_week(&self) -> Week {
        self.origin_week + self.horizon as Week
    }
}

impl fmt::Display for SlotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/week {}/h{}",
            self.location, self.origin_week, self.horizon
        )
    }
}

pub fn validate_horizon(horizon: u8) -> Result<u8> {
    if (1..=4).contains(&horizon) {
        Ok(horizon)
    } else {
        Err(Error::InvalidValue(format!(
            "horizon must be 1..=4, got {horizon}"
        )))
    }
}

/// Observed cumulative deaths for one location, keyed by week.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TruthSeries {
    pub location: String,
    pub observations: BTreeMap<Week, u64>,
}

impl TruthSeries {
    pub fn new(location: impl Into<String>) -> Self {
        TruthSeries {
            location: location.into(),
            observations: BTreeMap::new(),
        }
    }

    /// Adds an observation. Re-inserting the same value is a no-op; a
    /// different value for an existing week is an error.
    pub fn insert(&mut self, week: Week, value: u64) -> Result<()> {
        match self.observations.get(&week) {
            Some(&existing) if existing != value => Err(Error::ConflictingTruth {
                location: self.location.clone(),
                week,
                first: existing,
                second: value,
            }),
            _ => {
                self.observations.insert(week, value);
                Ok(())
            }
        }
    }

    pub fn get(&self, week: Week) -> Option<u64> {
        self.observations.get(&week).copied()
    }

    pub fn last_week(&self) -> Option<Week> {
        self.observations.keys().next_back().copied()
    }
}

/// Mortality grouping by final-week cumulative deaths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MortalityGroup {
    Low,
    Medium,
    High,
}

impl MortalityGroup {
    pub const ALL: [MortalityGroup; 3] =
        [MortalityGroup::Low, MortalityGroup::Medium, MortalityGroup::High];

    pub fn from_deaths(deaths: u64) -> Self {
        match deaths {
            0..=999 => MortalityGroup::Low,
            1_000..=9_999 => MortalityGroup::Medium,
            _ => MortalityGroup::High,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MortalityGroup::Low => "low",
            MortalityGroup::Medium => "medium",
            MortalityGroup::High => "high",
        }
    }
}

impl fmt::Display for MortalityGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_group(truth: &TruthSeries, final_week: Week) -> Result<MortalityGroup> {
    truth
        .get(final_week)
        .map(MortalityGroup::from_deaths)
        .ok_or_else(|| Error::MissingTruth {
            location: truth.location.clone(),
            week: final_week,
        })
}

/// The trimming families. The first three act on interval bounds, the
/// last four on whole quantile curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrimKind {
    SymmetricBounds,
    AsymExterior,
    AsymInterior,
    CaExterior,
    CaInterior,
    MaExterior,
    MaInterior,
}

impl TrimKind {
    pub fn id(&self) -> &'static str {
        match self {
            TrimKind::SymmetricBounds => "sym_trim",
            TrimKind::AsymExterior => "ext_trim",
            TrimKind::AsymInterior => "int_trim",
            TrimKind::CaExterior => "ca_ext_trim",
            TrimKind::CaInterior => "ca_int_trim",
            TrimKind::MaExterior => "ma_ext_trim",
            TrimKind::MaInterior => "ma_int_trim",
        }
    }

    pub fn acts_on_intervals(&self) -> bool {
        matches!(
            self,
            TrimKind::SymmetricBounds | TrimKind::AsymExterior | TrimKind::AsymInterior
        )
    }
}

impl FromStr for TrimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sym_trim" => TrimKind::SymmetricBounds,
            "ext_trim" => TrimKind::AsymExterior,
            "int_trim" => TrimKind::AsymInterior,
            "ca_ext_trim" => TrimKind::CaExterior,
            "ca_int_trim" => TrimKind::CaInterior,
            "ma_ext_trim" => TrimKind::MaExterior,
            "ma_int_trim" => TrimKind::MaInterior,
            other => return Err(Error::UnknownMethod(other.to_string())),
        })
    }
}

/// A trim fraction in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Beta(f64);

impl Beta {
    /// The nine fractions used for the published comparisons.
    pub const STANDARD: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta < 1.0 {
            Ok(Beta(beta))
        } else {
            Err(Error::InvalidBeta(beta))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrimSpec {
    pub beta: Beta,
    pub kind: TrimKind,
}

/// Floor that treats values within 1e-9 below an integer as that integer,
/// so `(1 - 0.8) / 2 * 10` counts as 1 rather than 0.
fn count_floor(x: f64) -> usize {
    (x + 1e-9).floor() as usize
}

/// `floor(beta / 2 * m)`: how many forecasts exterior and symmetric trims
/// drop from each side. Always leaves at least one forecast.
pub fn trim_count(beta: Beta, m: usize) -> usize {
    count_floor(beta.get() / 2.0 * m as f64).min(m.saturating_sub(1) / 2)
}

/// `floor((1 - beta) / 2 * m)`: how many forecasts interior trims keep on
/// each side. Never the whole pool.
pub fn interior_keep_count(beta: Beta, m: usize) -> usize {
    count_floor((1.0 - beta.get()) / 2.0 * m as f64).min(m.saturating_sub(1) / 2)
}
