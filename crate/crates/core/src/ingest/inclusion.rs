//! Selection of the submissions that enter the pools.
//!
//! Checks run in a fixed order and each dropped submission is logged once,
//! with the first check it fails:
//!
//! 1. superseded: a later file from the same team covers the same slot;
//! 2. the location is not one of the listed series;
//! 3. the origin week falls outside the window;
//! 4. the (team, location) pair was screened out for that origin week;
//! 5. the team did not forecast all four horizons for that location and
//!    origin (slots missing any of the 23 quantiles were already rejected
//!    while parsing, so they count as missing here).
//!
//! Teams that never appear in a screening file are kept.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostics::{Diagnostics, Reason};
use crate::ingest::eligibility::EligibilityList;
use crate::ingest::manifest::Manifest;
use crate::model::{ForecastSubmission, Week};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionCriteria {
    pub first_origin_week: Week,
    pub last_origin_week: Option<Week>,
    pub locations: BTreeSet<String>,
}

impl InclusionCriteria {
    pub fn from_manifest(manifest: &Manifest) -> Self {
        InclusionCriteria {
            first_origin_week: manifest.first_origin_week,
            last_origin_week: manifest.last_origin_week,
            locations: manifest.locations(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Inclusion {
    pub retained: Vec<ForecastSubmission>,
    pub dropped: Vec<(ForecastSubmission, Reason)>,
    pub diagnostics: Diagnostics,
}

fn describe(s: &ForecastSubmission) -> String {
    format!("{} {}", s.team, s.slot())
}

pub fn apply_inclusion_criteria(
    submissions: Vec<ForecastSubmission>,
    eligibility: &EligibilityList,
    criteria: &InclusionCriteria,
) -> Inclusion {
    let mut out = Inclusion::default();
    let drop = |out: &mut Inclusion, s: ForecastSubmission, reason: Reason, detail: String| {
        out.diagnostics.push(reason, describe(&s), detail);
        out.dropped.push((s, reason));
    };

    // Latest forecast date wins; among equal dates the later input wins.
    let mut latest: BTreeMap<(String, String, Week, u8), usize> = BTreeMap::new();
    for (i, s) in submissions.iter().enumerate() {
        let key = (s.team.clone(), s.location.clone(), s.origin_week, s.horizon);
        match latest.get(&key) {
            Some(&j) if submissions[j].forecast_date > s.forecast_date => {}
            _ => {
                latest.insert(key, i);
            }
        }
    }

    let mut candidates = Vec::with_capacity(submissions.len());
    for (i, s) in submissions.into_iter().enumerate() {
        let key = (s.team.clone(), s.location.clone(), s.origin_week, s.horizon);
        if latest[&key] != i {
            drop(&mut out, s, Reason::Superseded, "a later forecast covers this slot".into());
        } else if !criteria.locations.contains(&s.location) {
            let detail = format!("location `{}` is not a listed series", s.location);
            drop(&mut out, s, Reason::LocationNotListed, detail);
        } else if s.origin_week < criteria.first_origin_week {
            let detail = format!(
                "origin week {} precedes week {}",
                s.origin_week, criteria.first_origin_week
            );
            drop(&mut out, s, Reason::OriginBeforeFirst, detail);
        } else if criteria.last_origin_week.is_some_and(|last| s.origin_week > last) {
            let detail = format!("origin week {} is after the window", s.origin_week);
            drop(&mut out, s, Reason::OriginAfterLast, detail);
        } else if eligibility.is_ineligible(s.origin_week, &s.team, &s.location) {
            drop(&mut out, s, Reason::Ineligible, "screened out of the ensemble".into());
        } else {
            candidates.push(s);
        }
    }

    let mut horizons: BTreeMap<(String, String, Week), BTreeSet<u8>> = BTreeMap::new();
    for s in &candidates {
        horizons
            .entry((s.team.clone(), s.location.clone(), s.origin_week))
            .or_default()
            .insert(s.horizon);
    }
    for s in candidates {
        let have = &horizons[&(s.team.clone(), s.location.clone(), s.origin_week)];
        if have.len() == 4 {
            out.retained.push(s);
        } else {
            let detail = format!("only horizons {have:?} of 1-4 available");
            drop(&mut out, s, Reason::MissingLeadTime, detail);
        }
    }
    out
}
