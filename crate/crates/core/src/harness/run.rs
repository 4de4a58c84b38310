use std::collections::{BTreeMap, BTreeSet};

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{Diagnostics, Reason};
use crate::error::{Error, Result};
use crate::grid::LEVELS;
use crate::ingest::{build_pools, Corpus, Manifest, ParseOptions, SlotPool};
use crate::method::{percent, Family, Method};
use crate::model::{
    classify_group, ForecastSubmission, IntervalForecast, IntervalSpec, MortalityGroup, QuantileCurve,
    SlotKey, Week,
};
use crate::scoring;

use super::RunConfig;

/// Every configured method's output for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotAggregates {
    pub key: SlotKey,
    pub members: usize,
    /// `intervals[method][alpha]`, in config order.
    pub intervals: Vec<Vec<IntervalForecast>>,
    /// `curves[method]`, in config order.
    pub curves: Vec<QuantileCurve>,
}

/// Runs every method on one pool. Fails if any method fails, so that all
/// methods are always scored on the same slots.
pub fn aggregate_slot(
    pool: &SlotPool,
    interval_methods: &[Method],
    distribution_methods: &[Method],
    specs: &[IntervalSpec],
) -> Result<SlotAggregates> {
    let intervals = interval_methods
        .iter()
        .map(|m| specs.iter().map(|&s| m.aggregate_intervals(pool, s)).collect())
        .collect::<Result<_>>()?;
    let curves = distribution_methods
        .iter()
        .map(|m| m.aggregate_curves(pool))
        .collect::<Result<_>>()?;
    Ok(SlotAggregates {
        key: pool.key.clone(),
        members: pool.len(),
        intervals,
        curves,
    })
}

#[derive(Debug, Clone)]
pub struct AggregateOutput {
    pub interval_methods: Vec<Method>,
    pub distribution_methods: Vec<Method>,
    pub specs: Vec<IntervalSpec>,
    /// In slot-key order.
    pub slots: Vec<SlotAggregates>,
    pub diagnostics: Diagnostics,
}

/// Flattened view of one interval aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalRecord {
    pub method: String,
    pub location: String,
    pub origin_week: Week,
    pub horizon: u8,
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
}

impl AggregateOutput {
    pub fn interval_records(&self) -> Vec<IntervalRecord> {
        let mut out = Vec::new();
        for (mi, m) in self.interval_methods.iter().enumerate() {
            for slot in &self.slots {
                for f in &slot.intervals[mi] {
                    out.push(IntervalRecord {
                        method: m.id(),
                        location: slot.key.location.clone(),
                        origin_week: slot.key.origin_week,
                        horizon: slot.key.horizon,
                        alpha: f.spec.alpha(),
                        lower: f.lower,
                        upper: f.upper,
                    });
                }
            }
        }
        out
    }

    /// The aggregate curves of one distributional method, in slot order.
    pub fn curves_of(&self, method: &Method) -> Option<Vec<(&SlotKey, &QuantileCurve)>> {
        let mi = self.distribution_methods.iter().position(|m| m == method)?;
        Some(self.slots.iter().map(|s| (&s.key, &s.curves[mi])).collect())
    }
}

fn select_pools(config: &RunConfig, corpus: &Corpus) -> Vec<SlotPool> {
    let subs: Vec<_> = corpus
        .submissions
        .iter()
        .filter(|s| config.admits_origin(s.origin_week) && config.horizons.contains(&s.horizon))
        .cloned()
        .collect();
    build_pools(&subs, config.category, &corpus.ensemble_teams)
        .into_values()
        .collect()
}

/// Pools the corpus and aggregates every slot with every configured method.
pub fn run_aggregation(config: &RunConfig, corpus: &Corpus) -> Result<AggregateOutput> {
    config.validate()?;
    let interval_methods = config.interval_methods()?;
    let distribution_methods = config.distribution_methods()?;
    let specs = config.interval_specs()?;
    let pools = select_pools(config, corpus);
    if pools.is_empty() {
        return Err(Error::EmptyPool);
    }

    info!(
        "aggregating {} slots with {} interval and {} distribution methods",
        pools.len(),
        interval_methods.len(),
        distribution_methods.len()
    );
    let results: Vec<Result<SlotAggregates>> = pools
        .par_iter()
        .map(|p| aggregate_slot(p, &interval_methods, &distribution_methods, &specs))
        .collect();

    let mut diagnostics = Diagnostics::new();
    let mut slots = Vec::with_capacity(results.len());
    for (pool, result) in pools.iter().zip(results) {
        match result {
            Ok(s) => slots.push(s),
            Err(e @ Error::DegenerateTrim { .. }) => {
                diagnostics.push(Reason::DegenerateTrim, pool.key.to_string(), e.to_string())
            }
            Err(Error::EmptyPool) => diagnostics.push(
                Reason::EmptyPool,
                pool.key.to_string(),
                "no ensemble team in the pool",
            ),
            Err(e) => return Err(e),
        }
    }
    Ok(AggregateOutput {
        interval_methods,
        distribution_methods,
        specs,
        slots,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkillRow {
    pub method: String,
    pub group: MortalityGroup,
    pub mean_score: f64,
    pub rank: usize,
    /// `None` when every series had a zero score.
    pub skill_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkillTable {
    /// File stem, e.g. `interval_score_95` or `crps`.
    pub name: String,
    pub family: Family,
    pub groups: Vec<MortalityGroup>,
    /// Method-major, groups in Low, Medium, High order.
    pub rows: Vec<SkillRow>,
}

impl SkillTable {
    pub fn row(&self, method: &str, group: MortalityGroup) -> Option<&SkillRow> {
        self.rows.iter().find(|r| r.method == method && r.group == group)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub method: String,
    pub group: MortalityGroup,
    pub theta: f64,
    pub hit_pct: f64,
}

/// One team's score on one metric within a group, over the scored slots
/// it submitted, next to the benchmark aggregate on those same slots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamScoreRow {
    pub team: String,
    pub group: MortalityGroup,
    /// `interval_score_<coverage>`, `crps` or `mae`.
    pub metric: String,
    pub slots: usize,
    pub mean_score: f64,
    pub benchmark_score: f64,
    pub skill_pct: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub fingerprint: String,
    pub final_week: Week,
    pub series_groups: BTreeMap<String, MortalityGroup>,
    pub empty_groups: Vec<MortalityGroup>,
    pub tables: Vec<SkillTable>,
    pub interval_calibration: Vec<CalibrationRow>,
    pub distribution_calibration: Vec<CalibrationRow>,
    /// Individual teams against the benchmark, team-major.
    pub team_scores: Vec<TeamScoreRow>,
    pub aggregates: AggregateOutput,
    pub slots_scored: usize,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&SkillTable> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Scores of every method on one slot, against observation `y`.
struct SlotScores {
    key: SlotKey,
    y: f64,
    /// `[method][alpha]`
    interval: Vec<Vec<f64>>,
    crps: Vec<f64>,
    abs_error: Vec<f64>,
}

fn score_slot(slot: &SlotAggregates, y: f64) -> Result<SlotScores> {
    let interval = slot
        .intervals
        .iter()
        .map(|per_alpha| {
            per_alpha
                .iter()
                .map(|f| scoring::interval_score(f.spec.alpha(), f.lower, f.upper, y))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(SlotScores {
        key: slot.key.clone(),
        y,
        interval,
        crps: slot.curves.iter().map(|c| scoring::crps(c, y)).collect(),
        abs_error: slot.curves.iter().map(|c| (c.median() - y).abs()).collect(),
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Averages one metric over horizons, then origins, per series.
fn series_scores<'a>(scored: impl Iterator<Item = (&'a SlotKey, f64)>) -> BTreeMap<String, f64> {
    let mut cells: BTreeMap<&str, BTreeMap<Week, Vec<f64>>> = BTreeMap::new();
    for (key, value) in scored {
        cells
            .entry(key.location.as_str())
            .or_default()
            .entry(key.origin_week)
            .or_default()
            .push(value);
    }
    cells
        .into_iter()
        .map(|(loc, origins)| {
            let per_origin: Vec<f64> = origins.values().map(|h| mean(h)).collect();
            (loc.to_string(), mean(&per_origin))
        })
        .collect()
}

struct Grouping<'a> {
    groups: Vec<MortalityGroup>,
    by_group: BTreeMap<MortalityGroup, Vec<&'a SlotScores>>,
}

struct TableBuilder<'a> {
    grouping: &'a Grouping<'a>,
    benchmark: String,
    diagnostics: &'a mut Diagnostics,
    warnings: &'a mut Vec<String>,
}

impl TableBuilder<'_> {
    fn build(
        &mut self,
        name: String,
        family: Family,
        methods: &[Method],
        metric: impl Fn(&SlotScores, usize) -> f64,
    ) -> Result<SkillTable> {
        let bench = methods
            .iter()
            .position(|m| m.id() == self.benchmark)
            .expect("config validation puts the benchmark in every list");
        let mut cells: BTreeMap<(usize, MortalityGroup), (f64, usize, Option<f64>)> = BTreeMap::new();
        for &g in &self.grouping.groups {
            let slots = &self.grouping.by_group[&g];
            let per_method: Vec<BTreeMap<String, f64>> = (0..methods.len())
                .map(|mi| series_scores(slots.iter().map(|s| (&s.key, metric(s, mi)))))
                .collect();
            let means: Vec<f64> = per_method
                .iter()
                .map(|series| mean(&series.values().copied().collect::<Vec<_>>()))
                .collect();
            let ranks = scoring::rank_scores(&means);
            for (mi, series) in per_method.iter().enumerate() {
                let pairs: Vec<(f64, f64)> = series
                    .iter()
                    .map(|(loc, &v)| (v, per_method[bench][loc]))
                    .collect();
                let skill = match scoring::skill_score(&pairs) {
                    Ok(s) => {
                        if s.excluded > 0 {
                            self.diagnostics.push(
                                Reason::ZeroScoreExcluded,
                                format!("{name}/{}/{g}", methods[mi]),
                                format!("{} of {} series excluded from skill", s.excluded, pairs.len()),
                            );
                        }
                        Some(s.pct)
                    }
                    Err(Error::NoSkillSeries) => {
                        self.warnings.push(format!(
                            "{name}: no skill for {} in the {g} group, every series scored zero",
                            methods[mi]
                        ));
                        None
                    }
                    Err(e) => return Err(e),
                };
                cells.insert((mi, g), (means[mi], ranks[mi], skill));
            }
        }
        let mut rows = Vec::with_capacity(cells.len());
        for ((mi, group), (mean_score, rank, skill_pct)) in cells {
            rows.push(SkillRow {
                method: methods[mi].id(),
                group,
                mean_score,
                rank,
                skill_pct,
            });
        }
        Ok(SkillTable {
            name,
            family,
            groups: self.grouping.groups.clone(),
            rows,
        })
    }
}

fn calibration(
    grouping: &Grouping<'_>,
    methods: &[Method],
    thetas: &[f64],
    quantile: impl Fn(&SlotScores, usize, usize) -> f64,
) -> Result<Vec<CalibrationRow>> {
    let mut rows = Vec::new();
    for (mi, m) in methods.iter().enumerate() {
        for &g in &grouping.groups {
            let slots = &grouping.by_group[&g];
            let observations: Vec<f64> = slots.iter().map(|s| s.y).collect();
            for (ti, &theta) in thetas.iter().enumerate() {
                let forecasts: Vec<f64> = slots.iter().map(|s| quantile(s, mi, ti)).collect();
                rows.push(CalibrationRow {
                    method: m.id(),
                    group: g,
                    theta,
                    hit_pct: scoring::hit_percentage(&forecasts, &observations)?,
                });
            }
        }
    }
    Ok(rows)
}

/// A team's metric and the benchmark's on one slot.
type PairedMetric<'a> = Box<dyn Fn(&ForecastSubmission, &SlotScores) -> Result<(f64, f64)> + 'a>;

/// Scores every team's own forecasts on the slots that were scored for the
/// aggregates, with the same averaging order as the method tables.
fn team_scores(
    config: &RunConfig,
    corpus: &Corpus,
    aggregates: &AggregateOutput,
    kept: &[SlotScores],
    series_groups: &BTreeMap<String, MortalityGroup>,
) -> Result<Vec<TeamScoreRow>> {
    let bench_of = |methods: &[Method]| methods.iter().position(|m| *m == config.benchmark);
    let mut metrics: Vec<(String, PairedMetric)> = Vec::new();
    if let Some(b) = bench_of(&aggregates.interval_methods) {
        for (ai, spec) in aggregates.specs.iter().enumerate() {
            let spec = *spec;
            metrics.push((
                format!("interval_score_{}", percent(1.0 - spec.alpha())),
                Box::new(move |sub, s| {
                    let iv = sub.curve.interval(spec);
                    Ok((scoring::interval_score(spec.alpha(), iv.lower, iv.upper, s.y)?, s.interval[b][ai]))
                }),
            ));
        }
    }
    if let Some(b) = bench_of(&aggregates.distribution_methods) {
        metrics.push(("crps".into(), Box::new(move |sub, s| Ok((scoring::crps(&sub.curve, s.y), s.crps[b])))));
        metrics.push((
            "mae".into(),
            Box::new(move |sub, s| Ok(((sub.curve.median() - s.y).abs(), s.abs_error[b]))),
        ));
    }

    let by_key: BTreeMap<&SlotKey, &SlotScores> = kept.iter().map(|s| (&s.key, s)).collect();
    let mut cells: BTreeMap<(&str, MortalityGroup), Vec<(&ForecastSubmission, &SlotScores)>> = BTreeMap::new();
    for sub in corpus.submissions.iter().filter(|s| config.category.admits(s.category)) {
        if let Some(s) = by_key.get(&sub.slot()) {
            let group = series_groups[&sub.location];
            cells.entry((sub.team.as_str(), group)).or_default().push((sub, s));
        }
    }

    let mut rows = Vec::new();
    for ((team, group), pairs) in cells {
        for (name, metric) in &metrics {
            let mut own = Vec::with_capacity(pairs.len());
            let mut bench = Vec::with_capacity(pairs.len());
            for (sub, s) in &pairs {
                let (t, b) = metric(sub, s)?;
                own.push((&s.key, t));
                bench.push((&s.key, b));
            }
            let own = series_scores(own.into_iter());
            let bench = series_scores(bench.into_iter());
            let skill_pairs: Vec<(f64, f64)> = own.iter().map(|(loc, &v)| (v, bench[loc])).collect();
            let skill_pct = match scoring::skill_score(&skill_pairs) {
                Ok(sk) => Some(sk.pct),
                Err(Error::NoSkillSeries) => None,
                Err(e) => return Err(e),
            };
            rows.push(TeamScoreRow {
                team: team.to_string(),
                group,
                metric: name.clone(),
                slots: pairs.len(),
                mean_score: mean(&own.values().copied().collect::<Vec<_>>()),
                benchmark_score: mean(&bench.values().copied().collect::<Vec<_>>()),
                skill_pct,
            });
        }
    }
    Ok(rows)
}

/// Loads the manifest named by the config and evaluates its corpus.
pub fn evaluate(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let manifest = Manifest::load(&config.manifest)?;
    let corpus = Corpus::load(
        &manifest,
        ParseOptions {
            sort_repair: config.sort_repair,
        },
    )?;
    info!(
        "loaded {} submissions from {} teams, {} dropped slots",
        corpus.submissions.len(),
        corpus.teams().len(),
        corpus.dropped_slots
    );
    run_evaluation(config, &corpus)
}

/// Aggregates, scores, groups and ranks an in-memory corpus.
pub fn run_evaluation(config: &RunConfig, corpus: &Corpus) -> Result<RunOutput> {
    let aggregates = run_aggregation(config, corpus)?;
    let mut diagnostics = corpus.diagnostics.clone();
    diagnostics.extend(aggregates.diagnostics.clone());
    let mut warnings = Vec::new();

    let final_week = match config.final_week {
        Some(w) => w,
        None => corpus
            .truth
            .values()
            .filter_map(|t| t.last_week())
            .max()
            .ok_or(Error::NothingScored)?,
    };

    let locations: BTreeSet<&str> = aggregates.slots.iter().map(|s| s.key.location.as_str()).collect();
    let mut series_groups = BTreeMap::new();
    for loc in locations {
        match corpus.truth.get(loc).map(|t| classify_group(t, final_week)) {
            Some(Ok(g)) => {
                series_groups.insert(loc.to_string(), g);
            }
            _ => diagnostics.push(
                Reason::MissingTruth,
                loc,
                format!("no observation in final week {final_week}, series not grouped"),
            ),
        }
    }

    let scored: Vec<Option<SlotScores>> = aggregates
        .slots
        .par_iter()
        .map(|slot| {
            if !series_groups.contains_key(&slot.key.location) {
                return Ok(None);
            }
            let truth = &corpus.truth[&slot.key.location];
            match truth.get(slot.key.target_week()) {
                Some(y) => score_slot(slot, y as f64).map(Some),
                None => Ok(None),
            }
        })
        .collect::<Result<_>>()?;
    let mut kept = Vec::with_capacity(scored.len());
    for (slot, s) in aggregates.slots.iter().zip(scored) {
        match s {
            Some(s) => kept.push(s),
            None if series_groups.contains_key(&slot.key.location) => diagnostics.push(
                Reason::MissingTruth,
                slot.key.to_string(),
                format!("no observation for target week {}", slot.key.target_week()),
            ),
            None => {}
        }
    }
    if kept.is_empty() {
        return Err(Error::NothingScored);
    }

    let mut by_group: BTreeMap<MortalityGroup, Vec<&SlotScores>> = BTreeMap::new();
    for s in &kept {
        by_group.entry(series_groups[&s.key.location]).or_default().push(s);
    }
    let groups: Vec<MortalityGroup> = MortalityGroup::ALL
        .into_iter()
        .filter(|g| by_group.contains_key(g))
        .collect();
    let empty_groups: Vec<MortalityGroup> = MortalityGroup::ALL
        .into_iter()
        .filter(|g| !by_group.contains_key(g))
        .collect();
    for g in &empty_groups {
        diagnostics.push(Reason::EmptyGroup, g.name(), "no scored series, group omitted");
    }
    let grouping = Grouping { groups, by_group };

    let mut tables = Vec::new();
    let mut builder = TableBuilder {
        grouping: &grouping,
        benchmark: config.benchmark.id(),
        diagnostics: &mut diagnostics,
        warnings: &mut warnings,
    };
    let im = &aggregates.interval_methods;
    let dm = &aggregates.distribution_methods;
    if !im.is_empty() {
        for (ai, spec) in aggregates.specs.iter().enumerate() {
            let name = format!("interval_score_{}", percent(1.0 - spec.alpha()));
            tables.push(builder.build(name, Family::Interval, im, |s, mi| s.interval[mi][ai])?);
        }
    }
    if !dm.is_empty() {
        tables.push(builder.build("crps".into(), Family::Distribution, dm, |s, mi| s.crps[mi])?);
        tables.push(builder.build("mae".into(), Family::Distribution, dm, |s, mi| s.abs_error[mi])?);
    }

    // bounds of every configured interval, ordered by level
    let mut bounds: Vec<(f64, usize, bool)> = Vec::new();
    for (ai, spec) in aggregates.specs.iter().enumerate() {
        bounds.push((spec.lower_level(), ai, false));
        bounds.push((spec.upper_level(), ai, true));
    }
    bounds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let thetas: Vec<f64> = bounds.iter().map(|b| b.0).collect();
    let slot_index: BTreeMap<&SlotKey, &SlotAggregates> =
        aggregates.slots.iter().map(|s| (&s.key, s)).collect();
    let interval_calibration = if im.is_empty() {
        Vec::new()
    } else {
        calibration(&grouping, im, &thetas, |s, mi, ti| {
            let (_, ai, upper) = bounds[ti];
            let f = &slot_index[&s.key].intervals[mi][ai];
            if upper {
                f.upper
            } else {
                f.lower
            }
        })?
    };
    let distribution_calibration = if dm.is_empty() {
        Vec::new()
    } else {
        calibration(&grouping, dm, &LEVELS, |s, mi, ti| slot_index[&s.key].curves[mi].at(ti))?
    };

    let team_scores = team_scores(config, corpus, &aggregates, &kept, &series_groups)?;
    let slots_scored = kept.len();
    info!("scored {slots_scored} slots");
    Ok(RunOutput {
        config: config.clone(),
        fingerprint: corpus.fingerprint()?,
        final_week,
        series_groups,
        empty_groups,
        tables,
        interval_calibration,
        distribution_calibration,
        team_scores,
        slots_scored,
        aggregates,
        diagnostics,
        warnings,
    })
}
