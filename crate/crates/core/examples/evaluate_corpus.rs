//! Builds a synthetic Hub corpus on disk, evaluates it end to end and
//! prints the skill tables.
//!
//! Run with `cargo run --example evaluate_corpus [-- <out_dir>]`.

use std::path::PathBuf;

use crowdcast::harness::{emit_reports, evaluate, RunConfig};
use crowdcast::synth::{generate_corpus, CrowdSpec, SynthCorpusSpec, SynthLocation, TruthDistribution};

fn main() -> crowdcast::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("crowdcast-example"));
    let mut crowd = CrowdSpec::identity(10, TruthDistribution::logistic(1_000.0, 40.0), 2020);
    crowd.bias.sd = 1.0;
    crowd.bias.jitter_sd = 0.5;
    crowd.outlier_rate = 0.1;
    let spec = SynthCorpusSpec {
        crowd,
        locations: ["01", "36", "US"]
            .iter()
            .zip([300.0, 4_000.0, 60_000.0])
            .map(|(code, level)| SynthLocation {
                code: code.to_string(),
                level,
            })
            .collect(),
        first_origin_week: 18,
        n_origins: 10,
    };
    let corpus = generate_corpus(&spec)?;
    let manifest = corpus.export(&out.join("corpus"), spec.first_origin_week, Some(spec.last_origin_week()))?;

    let mut config = RunConfig::new(manifest);
    config.final_week = Some(spec.final_week());
    let output = evaluate(&config)?;
    let files = emit_reports(&output, &out.join("reports"))?;

    for name in ["interval_score_95", "crps"] {
        let table = output.table(name).expect("table present");
        println!("{name}");
        for row in table.rows.iter().filter(|r| r.rank <= 3) {
            let skill = row.skill_pct.map_or("NA".to_string(), |s| format!("{s:.1}"));
            println!("  {:>8} {:>22} rank {} skill {skill}%", row.group.name(), row.method, row.rank);
        }
    }
    println!("{} slots scored, {} files in {}", output.slots_scored, files.paths.len(), out.join("reports").display());
    Ok(())
}
