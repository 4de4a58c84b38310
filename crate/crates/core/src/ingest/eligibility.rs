//! Lists of (team, location) forecasts screened out of the Hub ensemble for
//! a given origin week. Screening only exists from week 20 onwards.
//!
//! File layout: `origin_week,team,location`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Week;

pub const FIRST_SCREENED_WEEK: Week = 20;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EligibilityList {
    ineligible: BTreeMap<Week, BTreeSet<(String, String)>>,
}

impl EligibilityList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark_ineligible(
        &mut self,
        origin_week: Week,
        team: impl Into<String>,
        location: impl Into<String>,
    ) -> Result<()> {
        if origin_week < FIRST_SCREENED_WEEK {
            return Err(Error::InvalidValue(format!(
                "eligibility screening starts at week {FIRST_SCREENED_WEEK}, got week {origin_week}"
            )));
        }
        self.ineligible
            .entry(origin_week)
            .or_default()
            .insert((team.into(), location.into()));
        Ok(())
    }

    pub fn is_ineligible(&self, origin_week: Week, team: &str, location: &str) -> bool {
        self.ineligible.get(&origin_week).is_some_and(|set| {
            set.contains(&(team.to_string(), location.to_string()))
        })
    }

    pub fn len(&self) -> usize {
        self.ineligible.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn parse_eligibility_file(path: &Path) -> Result<EligibilityList> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_eligibility(file, &path.display().to_string())
}

pub fn parse_eligibility<R: Read>(reader: R, source: &str) -> Result<EligibilityList> {
    #[derive(Deserialize)]
    struct Row {
        origin_week: Week,
        team: String,
        location: String,
    }
    let mut list = EligibilityList::new();
    let mut rdr = csv::Reader::from_reader(reader);
    for row in rdr.deserialize() {
        let row: Row = row?;
        list.mark_ineligible(row.origin_week, row.team, row.location)
            .map_err(|e| Error::Parse {
                path: source.into(),
                line: 0,
                message: e.to_string(),
            })?;
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_query() {
        let list = parse_eligibility(
            "origin_week,team,location\n21,TeamA,36\n22,TeamB,US\n".as_bytes(),
            "e.csv",
        )
        .unwrap();
        assert!(list.is_ineligible(21, "TeamA", "36"));
        assert!(!list.is_ineligible(21, "TeamA", "12"));
        assert!(!list.is_ineligible(22, "TeamA", "36"));
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn weeks_before_screening_rejected() {
        assert!(parse_eligibility("origin_week,team,location\n19,T,US\n".as_bytes(), "e.csv").is_err());
    }
}
