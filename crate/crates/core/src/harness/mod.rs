//! End-to-end runs: pool, aggregate with every configured method, score,
//! group series by mortality, rank and write report files.
//!
//! A run is described by a TOML file:
//!
//! ```toml
//! manifest = "corpus/manifest.toml"
//! out = "reports"
//! benchmark = "simple_average"
//! category = "all"                # or "compartmental" / "other"
//! alphas = [0.05, 0.5]
//! horizons = [1, 2, 3, 4]
//! betas = [0.2, 0.4, 0.6, 0.8]    # used when a method list is omitted
//! # interval_methods = ["simple_average", "median", "ext_trim_40"]
//! # distribution_methods = []     # an empty list skips the family
//! # first_origin_week = 20
//! # last_origin_week = 29
//! # final_week = 33               # week that decides mortality groups
//! ```
//!
//! Relative paths resolve against the config file's directory.

mod report;
mod run;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CategoryFilter;
use crate::method::{Family, Method};
use crate::model::{validate_horizon, IntervalSpec, Week};

pub use report::{emit_aggregates, emit_reports, write_table_csv, ReportFiles};
pub use run::{
    aggregate_slot, evaluate, run_aggregation, run_evaluation, AggregateOutput, CalibrationRow,
    IntervalRecord, RunOutput, SkillRow, SkillTable, SlotAggregates, TeamScoreRow,
};

/// Trim fractions reported when no explicit method list is given.
pub const REPORTED_BETAS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

fn default_alphas() -> Vec<f64> {
    vec![0.05, 0.5]
}

fn default_horizons() -> Vec<u8> {
    vec![1, 2, 3, 4]
}

fn default_betas() -> Vec<f64> {
    REPORTED_BETAS.to_vec()
}

fn default_out() -> PathBuf {
    PathBuf::from("reports")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: PathBuf,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub benchmark: Method,
    #[serde(default)]
    pub category: CategoryFilter,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<u8>,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval_methods: Option<Vec<Method>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution_methods: Option<Vec<Method>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_origin_week: Option<Week>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_origin_week: Option<Week>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_week: Option<Week>,
    #[serde(default)]
    pub sort_repair: bool,
}

impl RunConfig {
    /// Full method suites at the reported trim fractions.
    pub fn new(manifest: impl Into<PathBuf>) -> Self {
        RunConfig {
            manifest: manifest.into(),
            out: default_out(),
            benchmark: Method::SimpleAverage,
            category: CategoryFilter::All,
            alphas: default_alphas(),
            horizons: default_horizons(),
            betas: default_betas(),
            interval_methods: None,
            distribution_methods: None,
            first_origin_week: None,
            last_origin_week: None,
            final_week: None,
            sort_repair: false,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if config.manifest.is_relative() {
            config.manifest = base.join(&config.manifest);
        }
        if config.out.is_relative() {
            config.out = base.join(&config.out);
        }
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("run config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("run config: {e}")))
    }

    pub fn interval_methods(&self) -> Result<Vec<Method>> {
        match &self.interval_methods {
            Some(list) => Ok(list.clone()),
            None => Method::interval_suite(&self.betas),
        }
    }

    pub fn distribution_methods(&self) -> Result<Vec<Method>> {
        match &self.distribution_methods {
            Some(list) => Ok(list.clone()),
            None => Method::distribution_suite(&self.betas),
        }
    }

    pub fn interval_specs(&self) -> Result<Vec<IntervalSpec>> {
        self.alphas.iter().map(|&a| IntervalSpec::new(a)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let interval = self.interval_methods()?;
        let distribution = self.distribution_methods()?;
        if interval.is_empty() && distribution.is_empty() {
            return bad("no methods configured".into());
        }
        for (family, list) in [(Family::Interval, &interval), (Family::Distribution, &distribution)] {
            let mut seen = BTreeSet::new();
            for m in list.iter() {
                if !m.supports(family) {
                    return bad(format!("method `{m}` does not apply to {family:?} forecasts"));
                }
                if !seen.insert(m.id()) {
                    return bad(format!("method `{m}` listed twice"));
                }
            }
            if !list.is_empty() && !list.contains(&self.benchmark) {
                return bad(format!(
                    "benchmark `{}` missing from the {family:?} method list",
                    self.benchmark
                ));
            }
        }
        if !interval.is_empty() && self.alphas.is_empty() {
            return bad("interval methods need at least one alpha".into());
        }
        self.interval_specs()?;
        if self.horizons.is_empty() {
            return bad("no horizons configured".into());
        }
        let mut seen = BTreeSet::new();
        for &h in &self.horizons {
            validate_horizon(h)?;
            if !seen.insert(h) {
                return bad(format!("horizon {h} listed twice"));
            }
        }
        if let (Some(a), Some(b)) = (self.first_origin_week, self.last_origin_week) {
            if b < a {
                return bad(format!("last_origin_week {b} precedes first_origin_week {a}"));
            }
        }
        Ok(())
    }

    pub fn admits_origin(&self, week: Week) -> bool {
        self.first_origin_week.is_none_or(|a| week >= a) && self.last_origin_week.is_none_or(|b| week <= b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml("manifest = \"m.toml\"").unwrap();
        assert_eq!(c.benchmark, Method::SimpleAverage);
        assert_eq!(c.alphas, [0.05, 0.5]);
        assert_eq!(c.interval_methods().unwrap().len(), 3 + 3 * 4 + 1);
        assert_eq!(c.distribution_methods().unwrap().len(), 3 + 4 * 4);
        let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn benchmark_must_be_listed() {
        let text = r#"
            manifest = "m.toml"
            benchmark = "median"
            interval_methods = ["simple_average"]
            distribution_methods = []
        "#;
        assert!(RunConfig::from_toml(text).is_err());
        let ok = text.replace("[\"simple_average\"]", "[\"median\"]");
        assert!(RunConfig::from_toml(&ok).is_ok());
    }

    #[test]
    fn rejects_bad_lists() {
        let base = "manifest = \"m.toml\"\n";
        for extra in [
            "interval_methods = []\ndistribution_methods = []",
            "interval_methods = [\"simple_average\", \"ca_ext_trim_20\"]",
            "distribution_methods = [\"simple_average\", \"envelope\"]",
            "interval_methods = [\"simple_average\", \"simple_average\"]",
            "horizons = [5]",
            "alphas = [0.07]",
            "first_origin_week = 25\nlast_origin_week = 20",
            "colour = \"red\"",
        ] {
            assert!(RunConfig::from_toml(&format!("{base}{extra}")).is_err(), "{extra}");
        }
    }
}
