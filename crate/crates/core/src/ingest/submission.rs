//! Reading and writing forecast files in the Hub "data-processed" layout:
//!
//! ```text
//! forecast_date,target,target_end_date,location,type,quantile,value
//! 2020-07-20,1 wk ahead cum death,2020-07-25,US,quantile,0.025,141002
//! ```
//!
//! Only `N wk ahead cum death` targets (N in 1..=4) are read; any other
//! target is skipped. The origin week of a row is the week of its
//! `target_end_date` minus the horizon.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use crate::diagnostics::{Diagnostics, Reason};
use crate::error::{Error, Result};
use crate::grid::{self, GRID_SIZE, LEVELS};
use crate::model::{week_end, week_of, Category, ForecastSubmission, QuantileCurve, Target, Week};

pub const SUBMISSION_HEADER: [&str; 7] = [
    "forecast_date",
    "target",
    "target_end_date",
    "location",
    "type",
    "quantile",
    "value",
];

const TARGET_SUFFIX: &str = " wk ahead cum death";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Sort non-monotone curves into order instead of rejecting them.
    pub sort_repair: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedFile {
    pub submissions: Vec<ForecastSubmission>,
    pub diagnostics: Diagnostics,
    /// Rows whose target is not a cumulative-death horizon.
    pub skipped_rows: usize,
}

/// Horizon of an in-scope target string, `None` for anything else.
pub fn parse_target(target: &str) -> Option<u8> {
    let prefix = target.strip_suffix(TARGET_SUFFIX)?;
    match prefix {
        "1" => Some(1),
        "2" => Some(2),
        "3" => Some(3),
        "4" => Some(4),
        _ => None,
    }
}

pub fn format_target(horizon: u8) -> String {
    format!("{horizon}{TARGET_SUFFIX}")
}

#[derive(Default)]
struct SlotRows {
    forecast_date: Option<NaiveDate>,
    first_line: u64,
    quantiles: [Option<f64>; GRID_SIZE],
    duplicate: Option<f64>,
    point: Option<f64>,
}

pub fn parse_submission_file(
    path: &Path,
    team: &str,
    category: Category,
    options: ParseOptions,
) -> Result<ParsedFile> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_submissions(file, &path.display().to_string(), team, category, options)
}

/// Parses submission rows from any reader. `source` names the input in
/// error messages and diagnostics.
pub fn parse_submissions<R: Read>(
    reader: R,
    source: &str,
    team: &str,
    category: Category,
    options: ParseOptions,
) -> Result<ParsedFile> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: source.into(),
        line,
        message,
    };

    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut cols = [0usize; 7];
    for (slot, name) in cols.iter_mut().zip(SUBMISSION_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| parse_err(1, format!("missing column `{name}`")))?;
    }
    let [c_date, c_target, c_end, c_loc, c_type, c_quantile, c_value] = cols;

    let mut out = ParsedFile::default();
    let mut slots: BTreeMap<(String, Week, u8), SlotRows> = BTreeMap::new();

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("").trim();

        let Some(horizon) = parse_target(field(c_target)) else {
            out.skipped_rows += 1;
            continue;
        };
        let date = |i: usize| {
            NaiveDate::parse_from_str(field(i), "%Y-%m-%d")
                .map_err(|e| parse_err(line, format!("bad date `{}`: {e}", field(i))))
        };
        let forecast_date = date(c_date)?;
        let end_date = date(c_end)?;
        let location = field(c_loc).to_string();
        if location.is_empty() {
            return Err(parse_err(line, "empty location".into()));
        }
        let value: f64 = field(c_value)
            .parse()
            .map_err(|_| parse_err(line, format!("bad value `{}`", field(c_value))))?;
        if !value.is_finite() || value < 0.0 {
            return Err(parse_err(line, format!("value must be nonnegative, got {value}")));
        }
        let origin = week_of(end_date) - horizon as Week;
        let entry = slots
            .entry((location.clone(), origin, horizon))
            .or_insert_with(|| SlotRows {
                first_line: line,
                ..SlotRows::default()
            });
        entry.forecast_date = Some(entry.forecast_date.map_or(forecast_date, |d| d.max(forecast_date)));

        match field(c_type) {
            "point" => {
                let q = field(c_quantile);
                if !(q.is_empty() || q == "NA") {
                    return Err(parse_err(line, format!("point row carries quantile `{q}`")));
                }
                entry.point = Some(value);
            }
            "quantile" => {
                let raw = field(c_quantile);
                let theta: f64 = raw
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad quantile `{raw}`")))?;
                match grid::index_of(theta) {
                    Some(i) => match entry.quantiles[i] {
                        Some(prev) if prev != value => entry.duplicate = Some(theta),
                        _ => entry.quantiles[i] = Some(value),
                    },
                    None => out.diagnostics.push(
                        Reason::OffGridQuantile,
                        format!("{source}:{line}"),
                        format!("quantile {raw} is not on the 23-level grid"),
                    ),
                }
            }
            other => return Err(parse_err(line, format!("unknown row type `{other}`"))),
        }
    }

    for ((location, origin_week, horizon), rows) in slots {
        let subject = format!(
            "{source}:{} {team} {location}/week {origin_week}/h{horizon}",
            rows.first_line
        );
        if let Some(theta) = rows.duplicate {
            out.diagnostics.push(
                Reason::DuplicateQuantile,
                subject,
                format!("conflicting values for quantile {theta}"),
            );
            continue;
        }
        let present = rows.quantiles.iter().filter(|q| q.is_some()).count();
        if present < GRID_SIZE {
            out.diagnostics.push(
                Reason::IncompleteQuantiles,
                subject,
                format!("{present} of {GRID_SIZE} quantiles"),
            );
            continue;
        }
        let values = rows.quantiles.map(|q| q.expect("all present"));
        let curve = match QuantileCurve::new(values) {
            Ok(c) => c,
            Err(e) if options.sort_repair => {
                let repaired = QuantileCurve::sort_repaired(values)?;
                out.diagnostics.push(Reason::SortRepaired, subject, e.to_string());
                repaired
            }
            Err(e) => {
                out.diagnostics
                    .push(Reason::NonMonotoneCurve, subject, e.to_string());
                continue;
            }
        };
        out.submissions.push(ForecastSubmission {
            team: team.to_string(),
            category,
            location,
            forecast_date: rows.forecast_date.expect("slot has rows"),
            origin_week,
            horizon,
            target: Target::CumulativeDeaths,
            curve,
            point_forecast: rows.point,
        });
    }
    Ok(out)
}

/// Writes submissions in the Hub layout: the point row (if any) followed by
/// the 23 quantile rows for each submission.
pub fn write_submissions<W: Write>(writer: W, submissions: &[ForecastSubmission]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUBMISSION_HEADER)?;
    for s in submissions {
        let forecast_date = s.forecast_date.to_string();
        let target = format_target(s.horizon);
        let end = week_end(s.target_week()).to_string();
        if let Some(p) = s.point_forecast {
            w.write_record([
                forecast_date.as_str(),
                &target,
                &end,
                &s.location,
                "point",
                "",
                &p.to_string(),
            ])?;
        }
        for (theta, value) in LEVELS.iter().zip(s.curve.values()) {
            w.write_record([
                forecast_date.as_str(),
                &target,
                &end,
                &s.location,
                "quantile",
                &theta.to_string(),
                &value.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
