//! Combining and evaluating quantile forecasts of cumulative deaths.
//!
//! A forecast is 23 quantiles on a fixed probability grid. A crowd of such
//! forecasts is combined with simple averaging, medians, trimmed means or the
//! envelope, either bound-by-bound on central intervals ([`interval_agg`])
//! or on whole curves ([`curve_agg`]). Combined forecasts are scored with
//! the quantile, interval and 23-point CRPS scores ([`scoring`]).
//!
//! [`ingest`] reads Hub-layout CSV corpora, [`harness`] runs the full
//! evaluation and writes report tables, and [`synth`] builds seeded
//! synthetic crowds with a known truth.
//!
//! ```
//! use crowdcast::{interval_agg, model::{Beta, IntervalSpec}};
//!
//! let pool = interval_agg::IntervalPool::new(
//!     IntervalSpec::ninety_five(),
//!     vec![90.0, 100.0, 110.0, 0.0],
//!     vec![130.0, 140.0, 150.0, 400.0],
//! )?;
//! let agg = interval_agg::symmetric_trim(&pool, Beta::new(0.5)?);
//! assert_eq!((agg.lower, agg.upper), (95.0, 145.0));
//! # Ok::<(), crowdcast::Error>(())
//! ```

pub mod curve_agg;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod ingest;
pub mod interval_agg;
pub mod method;
pub mod model;
pub mod scoring;
mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use method::{Family, Method};
pub use model::{
    Beta, Category, ForecastSubmission, IntervalForecast, IntervalSpec, MortalityGroup,
    QuantileCurve, SlotKey, TrimKind, TrimSpec, TruthSeries, Week,
};
