//! Scores one forecast with the quantile, interval and CRPS scores.
//!
//! Run with `cargo run --example score_forecasts`.

use crowdcast::grid::LEVELS;
use crowdcast::scoring::{crps, interval_score, quantile_score};
use crowdcast::synth::TruthDistribution;
use crowdcast::IntervalSpec;

fn main() -> crowdcast::Result<()> {
    let curve = TruthDistribution::logistic(1_000.0, 40.0).curve();
    let observed = 1_090.0;

    println!("{:>6} {:>10} {:>8}", "theta", "quantile", "score");
    for (i, theta) in LEVELS.iter().enumerate() {
        let q = curve.at(i);
        println!("{theta:>6} {q:>10.1} {:>8.2}", quantile_score(*theta, q, observed));
    }

    for spec in [IntervalSpec::fifty(), IntervalSpec::ninety_five()] {
        let iv = curve.interval(spec);
        let score = interval_score(spec.alpha(), iv.lower, iv.upper, observed)?;
        println!(
            "{}% interval [{:.1}, {:.1}] scores {score:.2}",
            spec.coverage_pct(),
            iv.lower,
            iv.upper
        );
    }
    println!("CRPS (23 quantiles): {:.2}", crps(&curve, observed));
    Ok(())
}
