use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Why a row, slot, submission or series was dropped or flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    OffGridQuantile,
    IncompleteQuantiles,
    DuplicateQuantile,
    NonMonotoneCurve,
    SortRepaired,
    NonSaturdayTruth,
    Superseded,
    LocationNotListed,
    OriginBeforeFirst,
    OriginAfterLast,
    Ineligible,
    MissingLeadTime,
    EmptyPool,
    MissingTruth,
    DegenerateTrim,
    ZeroScoreExcluded,
    EmptyGroup,
}

impl Reason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reason::OffGridQuantile => "off_grid_quantile",
            Reason::IncompleteQuantiles => "incomplete_quantiles",
            Reason::DuplicateQuantile => "duplicate_quantile",
            Reason::NonMonotoneCurve => "non_monotone_curve",
            Reason::SortRepaired => "sort_repaired",
            Reason::NonSaturdayTruth => "non_saturday_truth",
            Reason::Superseded => "superseded",
            Reason::LocationNotListed => "location_not_listed",
            Reason::OriginBeforeFirst => "origin_before_first",
            Reason::OriginAfterLast => "origin_after_last",
            Reason::Ineligible => "ineligible",
            Reason::MissingLeadTime => "missing_lead_time",
            Reason::EmptyPool => "empty_pool",
            Reason::MissingTruth => "missing_truth",
            Reason::DegenerateTrim => "degenerate_trim",
            Reason::ZeroScoreExcluded => "zero_score_excluded",
            Reason::EmptyGroup => "empty_group",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub reason: Reason,
    /// What was affected: a file and line, a slot, a team, a series.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.reason, self.subject, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub entries: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, reason: Reason, subject: impl Into<String>, detail: impl Into<String>) {
        let d = Diagnostic {
            reason,
            subject: subject.into(),
            detail: detail.into(),
        };
        log::debug!("{d}");
        self.entries.push(d);
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.entries.extend(other.entries);
    }

    pub fn count(&self, reason: Reason) -> usize {
        self.entries.iter().filter(|d| d.reason == reason).count()
    }

    pub fn counts(&self) -> BTreeMap<Reason, usize> {
        let mut out = BTreeMap::new();
        for d in &self.entries {
            *out.entry(d.reason).or_insert(0) += 1;
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.entries.iter()
    }
}
