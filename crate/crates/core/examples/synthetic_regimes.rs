//! Compares aggregators on seeded synthetic crowds: underconfident,
//! overconfident and outlier-prone.
//!
//! Run with `cargo run --example synthetic_regimes`.

use crowdcast::curve_agg;
use crowdcast::interval_agg::{self, IntervalPool};
use crowdcast::scoring::{crps, interval_score};
use crowdcast::synth::{generate_crowd, BiasSpec, ConfidenceSpec, CrowdSpec, TruthDistribution};
use crowdcast::{Beta, IntervalSpec};

fn crowd(multiplier: f64, outlier_rate: f64, seed: u64) -> CrowdSpec {
    CrowdSpec {
        members: 15,
        truth: TruthDistribution::logistic(1_000.0, 40.0),
        growth: 0.0,
        bias: BiasSpec {
            mean: 0.0,
            sd: 1.0,
            jitter_sd: 0.5,
        },
        confidence: ConfidenceSpec::fixed(multiplier),
        outlier_rate,
        outlier_shift: 10.0,
        seed,
    }
}

fn main() -> crowdcast::Result<()> {
    let spec = IntervalSpec::ninety_five();
    let beta = Beta::new(0.2)?;
    let periods = 300;

    for (name, regime) in [
        ("underconfident", crowd(2.0, 0.0, 1)),
        ("overconfident", crowd(0.5, 0.0, 2)),
        ("outliers", crowd(1.0, 0.2, 3)),
    ] {
        let c = generate_crowd(&regime, periods)?;
        let (mut avg, mut ext, mut int, mut mean_crps, mut median_crps) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (pool, (_, &y)) in c.pools.iter().zip(&c.truth.observations) {
            let y = y as f64;
            let ivs = IntervalPool::from_intervals(&pool.intervals(spec))?;
            let is = |iv: crowdcast::IntervalForecast| interval_score(spec.alpha(), iv.lower, iv.upper, y);
            avg += is(interval_agg::simple_average(&ivs))?;
            ext += is(interval_agg::exterior_trim(&ivs, beta))?;
            int += is(interval_agg::interior_trim(&ivs, beta))?;
            mean_crps += crps(&curve_agg::mean(pool), y);
            median_crps += crps(&curve_agg::median(pool), y);
        }
        let n = periods as f64;
        println!(
            "{name:>15}: IS95 avg {:.1} ext {:.1} int {:.1} | CRPS mean {:.1} median {:.1}",
            avg / n,
            ext / n,
            int / n,
            mean_crps / n,
            median_crps / n
        );
    }
    Ok(())
}
