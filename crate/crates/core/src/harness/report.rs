use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::write_submissions;
use crate::model::{week_end, Category, ForecastSubmission, MortalityGroup, Target, Week};

use super::run::{AggregateOutput, CalibrationRow, RunOutput, SkillTable, TeamScoreRow};
use super::RunConfig;

/// Paths written by a report, in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportFiles {
    pub paths: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// One decimal place, with negative zero printed as `0.0`.
fn one_decimal(v: f64) -> String {
    let s = format!("{v:.1}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

pub fn write_table_csv<W: Write>(writer: W, table: &SkillTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["method", "group", "mean_score", "rank", "skill_pct"])?;
    for r in &table.rows {
        w.write_record([
            r.method.as_str(),
            r.group.name(),
            &r.mean_score.to_string(),
            &r.rank.to_string(),
            &r.skill_pct.map_or("NA".into(), one_decimal),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

fn write_calibration_csv<W: Write>(writer: W, rows: &[CalibrationRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["method", "group", "theta", "hit_pct"])?;
    for r in rows {
        w.write_record([
            r.method.as_str(),
            r.group.name(),
            &r.theta.to_string(),
            &r.hit_pct.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

fn write_team_scores_csv<W: Write>(writer: W, rows: &[TeamScoreRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["team", "group", "metric", "slots", "mean_score", "benchmark_score", "skill_pct"])?;
    for r in rows {
        w.write_record([
            r.team.as_str(),
            r.group.name(),
            &r.metric,
            &r.slots.to_string(),
            &r.mean_score.to_string(),
            &r.benchmark_score.to_string(),
            &r.skill_pct.map_or("NA".into(), one_decimal),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Aggregates are stamped with the Monday after the origin week.
fn aggregate_submissions(out: &AggregateOutput, mi: usize) -> Vec<ForecastSubmission> {
    let id = out.distribution_methods[mi].id();
    out.slots
        .iter()
        .map(|s| {
            let curve = s.curves[mi].clone();
            ForecastSubmission {
                team: id.clone(),
                category: Category::Other,
                location: s.key.location.clone(),
                forecast_date: week_end(s.key.origin_week) + chrono::Days::new(2),
                origin_week: s.key.origin_week,
                horizon: s.key.horizon,
                target: Target::CumulativeDeaths,
                point_forecast: Some(curve.median()),
                curve,
            }
        })
        .collect()
}

/// Writes `aggregates/<method>.csv` for every distributional method, in
/// the submission format, and `interval_aggregates.csv`.
pub fn emit_aggregates(out: &AggregateOutput, dir: &Path) -> Result<ReportFiles> {
    let mut files = ReportFiles::default();
    if !out.distribution_methods.is_empty() {
        let agg_dir = dir.join("aggregates");
        ensure_dir(&agg_dir)?;
        for (mi, m) in out.distribution_methods.iter().enumerate() {
            let path = agg_dir.join(format!("{}.csv", m.id()));
            write_submissions(create(&path)?, &aggregate_submissions(out, mi))?;
            files.paths.push(path);
        }
    }
    if !out.interval_methods.is_empty() {
        ensure_dir(dir)?;
        let path = dir.join("interval_aggregates.csv");
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["method", "location", "origin_week", "horizon", "alpha", "lower", "upper"])?;
        for r in out.interval_records() {
            w.write_record([
                r.method,
                r.location,
                r.origin_week.to_string(),
                r.horizon.to_string(),
                r.alpha.to_string(),
                r.lower.to_string(),
                r.upper.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        files.paths.push(path);
    }
    Ok(files)
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a RunConfig,
    corpus_fingerprint: &'a str,
    final_week: Week,
    slots_aggregated: usize,
    slots_scored: usize,
    groups: Vec<MortalityGroup>,
    empty_groups: &'a [MortalityGroup],
    series_groups: &'a BTreeMap<String, MortalityGroup>,
    tables: Vec<&'a str>,
    warnings: &'a [String],
    diagnostic_counts: BTreeMap<String, usize>,
    diagnostics: &'a [crate::diagnostics::Diagnostic],
}

/// Writes every table, both calibration files, `team_scores.csv`, the
/// aggregates and `summary.json` into `dir`.
pub fn emit_reports(output: &RunOutput, dir: &Path) -> Result<ReportFiles> {
    ensure_dir(dir)?;
    let mut files = ReportFiles::default();
    for table in &output.tables {
        let path = dir.join(format!("{}.csv", table.name));
        write_table_csv(create(&path)?, table)?;
        files.paths.push(path);
    }
    for (name, rows, present) in [
        (
            "calibration_interval.csv",
            &output.interval_calibration,
            !output.aggregates.interval_methods.is_empty(),
        ),
        (
            "calibration_distribution.csv",
            &output.distribution_calibration,
            !output.aggregates.distribution_methods.is_empty(),
        ),
    ] {
        if present {
            let path = dir.join(name);
            write_calibration_csv(create(&path)?, rows)?;
            files.paths.push(path);
        }
    }
    if !output.team_scores.is_empty() {
        let path = dir.join("team_scores.csv");
        write_team_scores_csv(create(&path)?, &output.team_scores)?;
        files.paths.push(path);
    }
    files.paths.extend(emit_aggregates(&output.aggregates, dir)?.paths);

    let groups = output.tables.first().map(|t| t.groups.clone()).unwrap_or_default();
    let summary = Summary {
        config: &output.config,
        corpus_fingerprint: &output.fingerprint,
        final_week: output.final_week,
        slots_aggregated: output.aggregates.slots.len(),
        slots_scored: output.slots_scored,
        groups,
        empty_groups: &output.empty_groups,
        series_groups: &output.series_groups,
        tables: output.tables.iter().map(|t| t.name.as_str()).collect(),
        warnings: &output.warnings,
        diagnostic_counts: output
            .diagnostics
            .counts()
            .into_iter()
            .map(|(r, n)| (r.to_string(), n))
            .collect(),
        diagnostics: &output.diagnostics.entries,
    };
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.paths.push(path);
    Ok(files)
}
