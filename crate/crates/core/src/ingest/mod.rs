//! Loading a forecast corpus from Hub-layout files.

pub mod eligibility;
pub mod inclusion;
pub mod manifest;
pub mod pools;
pub mod submission;
pub mod truth;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::model::{ForecastSubmission, Week};

pub use eligibility::{parse_eligibility_file, EligibilityList};
pub use inclusion::{apply_inclusion_criteria, Inclusion, InclusionCriteria};
pub use manifest::{hub_locations, Manifest, TeamEntry};
pub use pools::{build_pools, CategoryFilter, SlotPool};
pub use submission::{parse_submission_file, parse_submissions, write_submissions, ParseOptions};
pub use truth::{parse_truth_file, write_truth, TruthTable};

/// Retained submissions plus truth, ready to be pooled.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    /// Sorted by (location, origin, horizon, team).
    pub submissions: Vec<ForecastSubmission>,
    pub truth: TruthTable,
    pub ensemble_teams: BTreeSet<String>,
    pub diagnostics: Diagnostics,
    /// Submission slots that parsed cleanly, before inclusion criteria.
    pub parsed_slots: usize,
    pub dropped_slots: usize,
}

impl Corpus {
    /// Parses every team file named by the manifest, the truth file and the
    /// optional screening file, then applies the inclusion criteria.
    pub fn load(manifest: &Manifest, options: ParseOptions) -> Result<Self> {
        let mut jobs = Vec::new();
        for team in &manifest.teams {
            for file in manifest.team_files(team)? {
                jobs.push((team, file));
            }
        }
        let parsed: Vec<_> = jobs
            .par_iter()
            .map(|(team, file)| parse_submission_file(file, &team.name, team.category, options))
            .collect::<Result<_>>()?;

        let mut diagnostics = Diagnostics::new();
        let mut submissions = Vec::new();
        for p in parsed {
            diagnostics.extend(p.diagnostics);
            submissions.extend(p.submissions);
        }

        let (truth, truth_diags) = parse_truth_file(&manifest.truth_path())?;
        diagnostics.extend(truth_diags);

        let eligibility = match manifest.eligibility_path() {
            Some(path) => parse_eligibility_file(&path)?,
            None => EligibilityList::new(),
        };
        let mut corpus = Self::from_parts(
            submissions,
            truth,
            manifest.ensemble_teams(),
            &eligibility,
            &InclusionCriteria::from_manifest(manifest),
        );
        diagnostics.extend(std::mem::take(&mut corpus.diagnostics));
        corpus.diagnostics = diagnostics;
        Ok(corpus)
    }

    pub fn from_parts(
        submissions: Vec<ForecastSubmission>,
        truth: TruthTable,
        ensemble_teams: BTreeSet<String>,
        eligibility: &EligibilityList,
        criteria: &InclusionCriteria,
    ) -> Self {
        let parsed_slots = submissions.len();
        let inclusion = apply_inclusion_criteria(submissions, eligibility, criteria);
        let mut retained = inclusion.retained;
        retained.sort_by(|a, b| {
            (&a.location, a.origin_week, a.horizon, &a.team)
                .cmp(&(&b.location, b.origin_week, b.horizon, &b.team))
        });
        Corpus {
            submissions: retained,
            truth,
            ensemble_teams,
            diagnostics: inclusion.diagnostics,
            parsed_slots,
            dropped_slots: inclusion.dropped.len(),
        }
    }

    pub fn teams(&self) -> BTreeSet<&str> {
        self.submissions.iter().map(|s| s.team.as_str()).collect()
    }

    pub fn origin_weeks(&self) -> BTreeSet<Week> {
        self.submissions.iter().map(|s| s.origin_week).collect()
    }

    /// SHA-256 over a canonical CSV rendering of the retained submissions
    /// (grouped by team) and the truth table. Independent of file layout.
    pub fn fingerprint(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        for team in self.teams() {
            let subs: Vec<ForecastSubmission> = self
                .submissions
                .iter()
                .filter(|s| s.team == team)
                .cloned()
                .collect();
            hasher.update(format!("team,{team},{}\n", subs[0].category).as_bytes());
            let mut buf = Vec::new();
            write_submissions(&mut buf, &subs)?;
            hasher.update(&buf);
        }
        let mut buf = Vec::new();
        write_truth(&mut buf, &self.truth)?;
        hasher.update(&buf);
        Ok(hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    /// Writes the corpus as `forecasts/<team>.csv`, `truth.csv` and a
    /// `manifest.toml` that loads it back. Returns the manifest path.
    pub fn export(&self, dir: &Path, first_origin_week: Week, last_origin_week: Option<Week>) -> Result<PathBuf> {
        let forecasts = dir.join("forecasts");
        fs::create_dir_all(&forecasts).map_err(|e| Error::io(&forecasts, e))?;
        let mut teams = Vec::new();
        for team in self.teams() {
            let subs: Vec<ForecastSubmission> = self
                .submissions
                .iter()
                .filter(|s| s.team == team)
                .cloned()
                .collect();
            let path = forecasts.join(format!("{team}.csv"));
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_submissions(file, &subs)?;
            teams.push(TeamEntry {
                name: team.to_string(),
                category: subs[0].category,
                files: vec![format!("forecasts/{team}.csv")],
                ensemble: self.ensemble_teams.contains(team),
            });
        }
        let truth_path = dir.join("truth.csv");
        let file = fs::File::create(&truth_path).map_err(|e| Error::io(&truth_path, e))?;
        write_truth(file, &self.truth)?;

        let locations: BTreeSet<String> = self
            .submissions
            .iter()
            .map(|s| s.location.clone())
            .chain(self.truth.keys().cloned())
            .collect();
        let mut manifest = Manifest::new("truth.csv", first_origin_week)?;
        manifest.last_origin_week = last_origin_week;
        if !locations.is_subset(&hub_locations()) {
            manifest.locations = Some(locations.into_iter().collect());
        }
        manifest.teams = teams;
        let manifest_path = dir.join("manifest.toml");
        fs::write(&manifest_path, manifest.to_toml()?).map_err(|e| Error::io(&manifest_path, e))?;
        Ok(manifest_path)
    }
}
