use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curve_agg::CurvePool;
use crate::error::{Error, Result};
use crate::interval_agg::IntervalPool;
use crate::model::{Category, ForecastSubmission, IntervalSpec, SlotKey};

/// Restricts pools to one model family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryFilter {
    #[default]
    All,
    Compartmental,
    Other,
}

impl CategoryFilter {
    pub fn admits(&self, category: Category) -> bool {
        match self {
            CategoryFilter::All => true,
            CategoryFilter::Compartmental => category == Category::Compartmental,
            CategoryFilter::Other => category == Category::Other,
        }
    }
}

impl FromStr for CategoryFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(CategoryFilter::All),
            "compartmental" => Ok(CategoryFilter::Compartmental),
            "other" => Ok(CategoryFilter::Other),
            _ => Err(Error::Config(format!(
                "category must be all, compartmental or other, got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for CategoryFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CategoryFilter::All => "all",
            CategoryFilter::Compartmental => "compartmental",
            CategoryFilter::Other => "other",
        })
    }
}

/// Every retained team's curve for one (location, origin, horizon) slot,
/// in team-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotPool {
    pub key: SlotKey,
    pub teams: Vec<String>,
    pub curves: CurvePool,
    /// Whether each member also belongs to the Hub ensemble pool.
    pub in_ensemble: Vec<bool>,
}

impl SlotPool {
    pub fn new(key: SlotKey, members: Vec<(String, crate::model::QuantileCurve, bool)>) -> Result<Self> {
        let mut members = members;
        members.sort_by(|a, b| a.0.cmp(&b.0));
        let mut teams = Vec::with_capacity(members.len());
        let mut curves = Vec::with_capacity(members.len());
        let mut in_ensemble = Vec::with_capacity(members.len());
        for (team, curve, ens) in members {
            teams.push(team);
            curves.push(curve);
            in_ensemble.push(ens);
        }
        Ok(SlotPool {
            key,
            teams,
            curves: CurvePool::new(curves)?,
            in_ensemble,
        })
    }

    pub fn len(&self) -> usize {
        self.teams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.teams.is_empty()
    }

    /// The members that also feed the Hub ensemble.
    pub fn ensemble_pool(&self) -> Result<CurvePool> {
        let members = self
            .curves
            .members()
            .iter()
            .zip(&self.in_ensemble)
            .filter(|(_, &e)| e)
            .map(|(c, _)| c.clone())
            .collect();
        CurvePool::new(members)
    }

    pub fn interval_pool(&self, spec: IntervalSpec) -> IntervalPool {
        IntervalPool::from_intervals(&self.curves.intervals(spec))
            .expect("member curves yield valid intervals")
    }
}

/// Groups submissions into one pool per slot.
pub fn build_pools(
    submissions: &[ForecastSubmission],
    filter: CategoryFilter,
    ensemble_teams: &BTreeSet<String>,
) -> BTreeMap<SlotKey, SlotPool> {
    let mut grouped: BTreeMap<SlotKey, Vec<(String, crate::model::QuantileCurve, bool)>> =
        BTreeMap::new();
    for s in submissions.iter().filter(|s| filter.admits(s.category)) {
        grouped.entry(s.slot()).or_default().push((
            s.team.clone(),
            s.curve.clone(),
            ensemble_teams.contains(&s.team),
        ));
    }
    grouped
        .into_iter()
        .map(|(key, members)| {
            let pool = SlotPool::new(key.clone(), members).expect("grouped slots are nonempty");
            (key, pool)
        })
        .collect()
}
