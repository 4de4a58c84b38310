//! End-to-end runs of the evaluation harness on synthetic corpora.

mod common;

use std::collections::BTreeMap;

use common::*;
use crowdcast::diagnostics::Reason;
use crowdcast::harness::{emit_aggregates, run_aggregation, run_evaluation, RunConfig};
use crowdcast::ingest::{parse_submission_file, ParseOptions};
use crowdcast::scoring::crps;
use crowdcast::synth::{generate_corpus, SynthLocation};
use crowdcast::{Category, Method, MortalityGroup};

fn noisy_corpus(seed: u64) -> crowdcast::ingest::Corpus {
    generate_corpus(&corpus_spec(noisy_crowd(12, 1.5, 0.1, seed))).unwrap()
}

#[test]
fn runs_are_deterministic() {
    let corpus = noisy_corpus(1);
    let config = RunConfig::new("unused.toml");
    let a = run_evaluation(&config, &corpus).unwrap();
    let b = run_evaluation(&config, &noisy_corpus(1)).unwrap();
    assert_eq!(a.tables, b.tables);
    assert_eq!(a.distribution_calibration, b.distribution_calibration);
    assert_eq!(a.fingerprint, b.fingerprint);
}

#[test]
fn every_table_ranks_each_group() {
    let out = run_evaluation(&RunConfig::new("unused.toml"), &noisy_corpus(2)).unwrap();
    let names: Vec<_> = out.tables.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(names, ["interval_score_95", "interval_score_50", "crps", "mae"]);
    for table in &out.tables {
        assert_eq!(table.groups, MortalityGroup::ALL.to_vec());
        for g in &table.groups {
            let rows: Vec<_> = table.rows.iter().filter(|r| r.group == *g).collect();
            assert!(rows.iter().any(|r| r.rank == 1), "{} {g}: no rank 1", table.name);
            let bench = rows.iter().find(|r| r.method == "simple_average").unwrap();
            assert_eq!(bench.skill_pct, Some(0.0));
        }
    }
    assert_eq!(out.series_groups.len(), 3);
}

#[test]
fn re_ingested_aggregates_match_memory() {
    let corpus = noisy_corpus(3);
    let mut config = RunConfig::new("unused.toml");
    config.interval_methods = Some(vec![]);
    config.distribution_methods = Some(vec![Method::SimpleAverage, Method::Median]);
    let agg = run_aggregation(&config, &corpus).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_aggregates(&agg, dir.path()).unwrap();

    for method in [Method::SimpleAverage, Method::Median] {
        let path = dir.path().join("aggregates").join(format!("{}.csv", method.id()));
        let parsed = parse_submission_file(&path, &method.id(), Category::Other, ParseOptions::default()).unwrap();
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let memory: BTreeMap<_, _> = agg.curves_of(&method).unwrap().into_iter().collect();
        assert_eq!(parsed.submissions.len(), memory.len());
        for s in &parsed.submissions {
            assert_eq!(&&s.curve, memory.get(&s.slot()).expect("slot present"));
        }
    }
}

#[test]
fn groups_without_series_are_omitted_and_noted() {
    let mut spec = corpus_spec(noisy_crowd(12, 1.0, 0.0, 4));
    spec.locations = vec![SynthLocation {
        code: "01".into(),
        level: 300.0,
    }];
    let corpus = generate_corpus(&spec).unwrap();
    let out = run_evaluation(&RunConfig::new("unused.toml"), &corpus).unwrap();
    assert_eq!(out.empty_groups, [MortalityGroup::Medium, MortalityGroup::High]);
    assert_eq!(out.diagnostics.count(Reason::EmptyGroup), 2);
    for table in &out.tables {
        assert_eq!(table.groups, [MortalityGroup::Low]);
        assert!(table.rows.iter().all(|r| r.group == MortalityGroup::Low));
    }
}

#[test]
fn benchmark_alone_ties_itself() {
    let mut config = RunConfig::new("unused.toml");
    config.interval_methods = Some(vec![Method::SimpleAverage]);
    config.distribution_methods = Some(vec![Method::SimpleAverage]);
    let out = run_evaluation(&config, &noisy_corpus(5)).unwrap();
    for table in &out.tables {
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows.iter().all(|r| r.rank == 1 && r.skill_pct == Some(0.0)));
    }
}

#[test]
fn median_beats_mean_in_crps_with_outliers() {
    let corpus = generate_corpus(&corpus_spec(noisy_crowd(15, 1.0, 0.2, 6))).unwrap();
    let mut config = RunConfig::new("unused.toml");
    config.interval_methods = Some(vec![]);
    config.distribution_methods = Some(vec![Method::SimpleAverage, Method::Median]);
    let out = run_evaluation(&config, &corpus).unwrap();
    let table = out.table("crps").unwrap();
    for g in &table.groups {
        let median = table.row("median", *g).unwrap();
        assert_eq!(median.rank, 1, "{g}");
        assert!(median.skill_pct.unwrap() > 0.0, "{g}");
    }
}

#[test]
fn table_scores_match_direct_scoring() {
    // one series, so the table mean is the plain average over slots
    let mut spec = corpus_spec(noisy_crowd(7, 1.0, 0.1, 7));
    spec.locations.truncate(1);
    let corpus = generate_corpus(&spec).unwrap();
    let mut config = RunConfig::new("unused.toml");
    config.interval_methods = Some(vec![]);
    config.distribution_methods = Some(vec![Method::SimpleAverage]);
    let out = run_evaluation(&config, &corpus).unwrap();

    let truth = &corpus.truth["01"];
    let mut by_origin: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for (key, curve) in out.aggregates.curves_of(&Method::SimpleAverage).unwrap() {
        let y = truth.observations[&(key.origin_week + key.horizon as i64)] as f64;
        by_origin.entry(key.origin_week).or_default().push(crps(curve, y));
    }
    let per_origin: Vec<f64> = by_origin.values().map(|v| avg(v)).collect();
    let expected = avg(&per_origin);
    let got = out.table("crps").unwrap().row("simple_average", MortalityGroup::Low).unwrap().mean_score;
    assert!(rel_err(got, expected) < 1e-12, "{got} vs {expected}");
}

#[test]
fn config_paths_resolve_against_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "manifest = \"corpus/manifest.toml\"\nbenchmark = \"median\"\n").unwrap();
    let config = RunConfig::load(&path).unwrap();
    assert_eq!(config.manifest, dir.path().join("corpus/manifest.toml"));
    assert_eq!(config.out, dir.path().join("reports"));
    assert_eq!(config.benchmark, Method::Median);
    assert!(RunConfig::from_toml("manifest = \"m.toml\"\nbogus = 1\n").is_err());
}

#[test]
fn teams_in_an_identity_crowd_match_the_benchmark() {
    let corpus = generate_corpus(&corpus_spec(crowdcast::synth::CrowdSpec::identity(4, logistic_truth(), 12))).unwrap();
    let mut config = RunConfig::new("unused.toml");
    config.interval_methods = Some(vec![Method::SimpleAverage]);
    config.distribution_methods = Some(vec![Method::SimpleAverage]);
    let out = run_evaluation(&config, &corpus).unwrap();
    // 4 teams x 3 groups x (2 interval metrics + crps + mae)
    assert_eq!(out.team_scores.len(), 4 * 3 * 4);
    for r in &out.team_scores {
        assert_eq!(r.mean_score, r.benchmark_score, "{r:?}");
        assert_eq!(r.skill_pct, Some(0.0));
        assert_eq!(r.slots, 12 * 4);
    }
}

#[test]
fn team_scores_match_direct_scoring() {
    let mut spec = corpus_spec(noisy_crowd(5, 1.0, 0.0, 13));
    spec.locations.truncate(1);
    let corpus = generate_corpus(&spec).unwrap();
    let mut config = RunConfig::new("unused.toml");
    config.interval_methods = Some(vec![]);
    config.distribution_methods = Some(vec![Method::SimpleAverage]);
    let out = run_evaluation(&config, &corpus).unwrap();

    let truth = &corpus.truth["01"];
    let mut by_origin: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for s in corpus.submissions.iter().filter(|s| s.team == "team02") {
        let y = truth.observations[&s.target_week()] as f64;
        by_origin.entry(s.origin_week).or_default().push(crps(&s.curve, y));
    }
    let expected = avg(&by_origin.values().map(|v| avg(v)).collect::<Vec<_>>());
    let row = out
        .team_scores
        .iter()
        .find(|r| r.team == "team02" && r.metric == "crps")
        .unwrap();
    assert!(rel_err(row.mean_score, expected) < 1e-12, "{} vs {expected}", row.mean_score);
    let bench = out.table("crps").unwrap().row("simple_average", MortalityGroup::Low).unwrap();
    assert_eq!(row.benchmark_score, bench.mean_score);
    let skill = 100.0 * (1.0 - row.mean_score / row.benchmark_score);
    assert!((row.skill_pct.unwrap() - skill).abs() < 1e-9);
}
