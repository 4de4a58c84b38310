//! Pooled hit percentages of the combined quantiles, per method.
//!
//! Run with `cargo run --example calibration`.

use crowdcast::harness::{run_evaluation, RunConfig};
use crowdcast::synth::{generate_corpus, CrowdSpec, SynthCorpusSpec, SynthLocation, TruthDistribution};
use crowdcast::Method;

fn main() -> crowdcast::Result<()> {
    let mut crowd = CrowdSpec::identity(12, TruthDistribution::logistic(1_000.0, 40.0), 7);
    crowd.bias.sd = 1.0;
    crowd.confidence.min = 0.4;
    crowd.confidence.max = 0.8;
    let spec = SynthCorpusSpec {
        crowd,
        locations: vec![SynthLocation {
            code: "US".into(),
            level: 60_000.0,
        }],
        first_origin_week: 18,
        n_origins: 30,
    };
    let corpus = generate_corpus(&spec)?;
    let mut config = RunConfig::new("in-memory");
    config.interval_methods = Some(vec![]);
    config.distribution_methods = Some(vec![Method::SimpleAverage, Method::Median]);
    let out = run_evaluation(&config, &corpus)?;

    println!("overconfident crowd: nominal vs observed hit %");
    for row in out.distribution_calibration.iter().filter(|r| [0.025, 0.25, 0.5, 0.75, 0.975].contains(&r.theta)) {
        println!("  {:>15} theta {:>5}: {:5.1}%", row.method, row.theta, row.hit_pct);
    }
    Ok(())
}
