//! Corpus manifest: which teams exist, their model category, where their
//! files live, the truth file, and the origin-week window.
//!
//! ```toml
//! truth = "truth.csv"
//! eligibility = "ineligible.csv"   # optional
//! first_origin_week = 18
//! last_origin_week = 29            # optional
//! # locations = ["US", "36"]       # optional, defaults to the 52 Hub series
//!
//! [[team]]
//! name = "UMass-MechBayes"
//! category = "other"
//! files = ["data-processed/UMass-MechBayes/*.csv"]
//! ensemble = true                  # optional, defaults to true
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Category, Week};

/// Earliest origin week the study window admits.
pub const EARLIEST_ORIGIN_WEEK: Week = 18;

/// The 50 states and the District of Columbia as 2-digit FIPS codes.
pub const STATE_FIPS: [&str; 51] = [
    "01", "02", "04", "05", "06", "08", "09", "10", "11", "12", "13", "15", "16", "17", "18",
    "19", "20", "21", "22", "23", "24", "25", "26", "27", "28", "29", "30", "31", "32", "33",
    "34", "35", "36", "37", "38", "39", "40", "41", "42", "44", "45", "46", "47", "48", "49",
    "50", "51", "53", "54", "55", "56",
];

pub const NATIONAL: &str = "US";

/// The national series plus the 51 state-level series.
pub fn hub_locations() -> BTreeSet<String> {
    std::iter::once(NATIONAL)
        .chain(STATE_FIPS)
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamEntry {
    pub name: String,
    pub category: Category,
    pub files: Vec<String>,
    #[serde(default = "default_true")]
    pub ensemble: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub truth: PathBuf,
    #[serde(default)]
    pub eligibility: Option<PathBuf>,
    pub first_origin_week: Week,
    #[serde(default)]
    pub last_origin_week: Option<Week>,
    #[serde(default)]
    pub locations: Option<Vec<String>>,
    #[serde(rename = "team", default)]
    pub teams: Vec<TeamEntry>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl Manifest {
    pub fn new(truth: impl Into<PathBuf>, first_origin_week: Week) -> Result<Self> {
        let manifest = Manifest {
            truth: truth.into(),
            eligibility: None,
            first_origin_week,
            last_origin_week: None,
            locations: None,
            teams: Vec::new(),
            base_dir: PathBuf::new(),
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest = Self::from_toml(&text)?;
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(manifest)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let manifest: Manifest =
            toml::from_str(text).map_err(|e| Error::Config(format!("manifest: {e}")))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = dir.into();
        self
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("manifest: {e}")))
    }

    fn validate(&self) -> Result<()> {
        if self.first_origin_week < EARLIEST_ORIGIN_WEEK {
            return Err(Error::Config(format!(
                "first_origin_week must be at least {EARLIEST_ORIGIN_WEEK}, got {}",
                self.first_origin_week
            )));
        }
        if let Some(last) = self.last_origin_week {
            if last < self.first_origin_week {
                return Err(Error::Config(format!(
                    "last_origin_week {last} precedes first_origin_week {}",
                    self.first_origin_week
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for team in &self.teams {
            if !seen.insert(team.name.as_str()) {
                return Err(Error::Config(format!("team `{}` listed twice", team.name)));
            }
        }
        Ok(())
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn truth_path(&self) -> PathBuf {
        self.resolve(&self.truth)
    }

    pub fn eligibility_path(&self) -> Option<PathBuf> {
        self.eligibility.as_deref().map(|p| self.resolve(p))
    }

    pub fn locations(&self) -> BTreeSet<String> {
        match &self.locations {
            Some(list) => list.iter().cloned().collect(),
            None => hub_locations(),
        }
    }

    pub fn ensemble_teams(&self) -> BTreeSet<String> {
        self.teams
            .iter()
            .filter(|t| t.ensemble)
            .map(|t| t.name.clone())
            .collect()
    }

    /// Files matched by a team's globs, sorted and deduplicated.
    pub fn team_files(&self, team: &TeamEntry) -> Result<Vec<PathBuf>> {
        let mut files = BTreeSet::new();
        for pattern in &team.files {
            let full = self.resolve(Path::new(pattern));
            let full = full.to_string_lossy();
            let paths = glob::glob(&full)
                .map_err(|e| Error::Config(format!("team `{}`: bad glob `{full}`: {e}", team.name)))?;
            for p in paths {
                let p = p.map_err(|e| Error::Config(format!("team `{}`: {e}", team.name)))?;
                if p.is_file() {
                    files.insert(p);
                }
            }
        }
        Ok(files.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hub_location_set() {
        let locs = hub_locations();
        assert_eq!(locs.len(), 52);
        assert!(locs.contains("US") && locs.contains("11") && locs.contains("56"));
        assert!(!locs.contains("72")); // Puerto Rico
    }

    #[test]
    fn parse_manifest() {
        let m = Manifest::from_toml(
            r#"
            truth = "truth.csv"
            first_origin_week = 18
            [[team]]
            name = "A"
            category = "compartmental"
            files = ["a/*.csv"]
            [[team]]
            name = "B"
            category = "other"
            files = ["b.csv"]
            ensemble = false
            "#,
        )
        .unwrap();
        assert_eq!(m.teams.len(), 2);
        assert_eq!(m.teams[0].category, Category::Compartmental);
        assert_eq!(m.ensemble_teams().into_iter().collect::<Vec<_>>(), ["A"]);
        assert_eq!(m.locations().len(), 52);
    }

    #[test]
    fn rejects_early_window_and_duplicates() {
        let early = "truth = \"t.csv\"\nfirst_origin_week = 17\n";
        assert!(Manifest::from_toml(early).is_err());
        let dup = r#"
            truth = "t.csv"
            first_origin_week = 18
            [[team]]
            name = "A"
            category = "other"
            files = []
            [[team]]
            name = "A"
            category = "other"
            files = []
        "#;
        assert!(Manifest::from_toml(dup).is_err());
    }
}
