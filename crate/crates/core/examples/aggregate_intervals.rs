//! Combines a small crowd of 95% intervals with every interval method.
//!
//! Run with `cargo run --example aggregate_intervals`.

use crowdcast::interval_agg::{self, IntervalPool};
use crowdcast::{Beta, IntervalSpec};

fn main() -> crowdcast::Result<()> {
    // one forecaster is far too high and one far too narrow
    let pool = IntervalPool::new(
        IntervalSpec::ninety_five(),
        vec![880.0, 910.0, 925.0, 940.0, 960.0, 1_400.0],
        vec![1_120.0, 1_090.0, 1_110.0, 1_060.0, 965.0, 1_900.0],
    )?;
    let beta = Beta::new(1.0 / 3.0)?;

    let rows = [
        ("simple average", interval_agg::simple_average(&pool)),
        ("median", interval_agg::median(&pool)),
        ("symmetric trim", interval_agg::symmetric_trim(&pool, beta)),
        ("exterior trim", interval_agg::exterior_trim(&pool, beta)),
        ("interior trim", interval_agg::interior_trim(&pool, beta)),
        ("envelope", interval_agg::envelope(&pool)),
    ];
    for (name, iv) in rows {
        println!("{name:>15}: [{:8.1}, {:8.1}] width {:7.1}", iv.lower, iv.upper, iv.width());
    }
    Ok(())
}
