//! Combines whole quantile curves: per-level trims (CA) and whole-curve
//! trims ranked by curve mean (MA).
//!
//! Run with `cargo run --example aggregate_distributions`.

use crowdcast::curve_agg::{self, CurvePool};
use crowdcast::scoring::crps;
use crowdcast::synth::TruthDistribution;
use crowdcast::Beta;

fn main() -> crowdcast::Result<()> {
    let members = [(950.0, 30.0), (990.0, 45.0), (1_010.0, 35.0), (1_030.0, 60.0), (1_600.0, 20.0)]
        .iter()
        .map(|&(loc, scale)| TruthDistribution::logistic(loc, scale).curve())
        .collect();
    let pool = CurvePool::new(members)?;
    let beta = Beta::new(0.4)?;
    let observed = 1_005.0;

    let rows = [
        ("mean", curve_agg::mean(&pool)),
        ("median", curve_agg::median(&pool)),
        ("CA exterior 40%", curve_agg::ca_exterior(&pool, beta)),
        ("CA interior 40%", curve_agg::ca_interior(&pool, beta)?),
        ("MA exterior 40%", curve_agg::ma_exterior(&pool, beta)),
        ("MA interior 40%", curve_agg::ma_interior(&pool, beta)?),
    ];
    for (name, curve) in rows {
        let iv = curve_agg::curve_to_interval(&curve, 0.05)?;
        println!(
            "{name:>16}: median {:7.1}  95% [{:7.1}, {:7.1}]  CRPS {:6.2}",
            curve.median(),
            iv.lower,
            iv.upper,
            crps(&curve, observed)
        );
    }
    Ok(())
}
