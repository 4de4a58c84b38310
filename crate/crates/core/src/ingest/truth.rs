//! Observed cumulative deaths: `date,location,value` with ISO dates.
//!
//! Only Saturday rows carry week-ending totals. Rows on other days (as in a
//! daily truth file) are skipped and counted in a single diagnostic.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::diagnostics::{Diagnostics, Reason};
use crate::error::{Error, Result};
use crate::model::{week_end, week_of, TruthSeries};

pub type TruthTable = BTreeMap<String, TruthSeries>;

pub fn parse_truth_file(path: &Path) -> Result<(TruthTable, Diagnostics)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_truth(file, &path.display().to_string())
}

pub fn parse_truth<R: Read>(reader: R, source: &str) -> Result<(TruthTable, Diagnostics)> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: source.into(),
        line,
        message,
    };
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| parse_err(1, format!("missing column `{name}`")))
    };
    let (c_date, c_loc, c_value) = (col("date")?, col("location")?, col("value")?);

    let mut table = TruthTable::new();
    let mut diagnostics = Diagnostics::new();
    let mut off_day = 0usize;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(field(c_date), "%Y-%m-%d")
            .map_err(|e| parse_err(line, format!("bad date `{}`: {e}", field(c_date))))?;
        if date.weekday() != Weekday::Sat {
            off_day += 1;
            continue;
        }
        let raw = field(c_value);
        let value: f64 = raw
            .parse()
            .map_err(|_| parse_err(line, format!("bad value `{raw}`")))?;
        if !value.is_finite() || value < 0.0 || value.fract() != 0.0 {
            return Err(parse_err(
                line,
                format!("cumulative deaths must be a nonnegative integer, got `{raw}`"),
            ));
        }
        let location = field(c_loc).to_string();
        table
            .entry(location.clone())
            .or_insert_with(|| TruthSeries::new(location))
            .insert(week_of(date), value as u64)?;
    }
    if off_day > 0 {
        diagnostics.push(
            Reason::NonSaturdayTruth,
            source,
            format!("{off_day} rows not dated on a Saturday were skipped"),
        );
    }
    Ok((table, diagnostics))
}

pub fn write_truth<W: Write>(writer: W, table: &TruthTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "location", "value"])?;
    for series in table.values() {
        for (&week, &value) in &series.observations {
            w.write_record([
                week_end(week).to_string(),
                series.location.clone(),
                value.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
