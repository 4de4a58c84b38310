//! Synthetic forecaster crowds with a known truth distribution.
//!
//! Each period has a true location-scale distribution. Every forecaster
//! reports that distribution's quantiles shifted by a persistent bias plus
//! per-period jitter and stretched about its center by a fixed confidence
//! multiplier (above 1 is too wide, below 1 too narrow). With probability
//! `outlier_rate` a forecast is also pushed `outlier_shift` scales up or down.
//!
//! Randomness comes from one ChaCha8 seed split into streams: forecaster
//! `i` draws only from stream `base + i` and the truth from stream
//! `u64::MAX`, so adding a forecaster leaves the others' draws untouched.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::curve_agg::CurvePool;
use crate::error::{Error, Result};
use crate::grid::{GRID_SIZE, LEVELS};
use crate::ingest::Corpus;
use crate::model::{
    week_end, Category, ForecastSubmission, QuantileCurve, Target, TruthSeries, Week,
};
use crate::scoring;

const TRUTH_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistFamily {
    Logistic,
    Laplace,
}

/// A location-scale distribution with a closed-form quantile function.
/// `scale = 0` is a point mass at `location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthDistribution {
    pub family: DistFamily,
    pub location: f64,
    pub scale: f64,
}

impl TruthDistribution {
    pub fn logistic(location: f64, scale: f64) -> Self {
        TruthDistribution {
            family: DistFamily::Logistic,
            location,
            scale,
        }
    }

    /// Quantile at `p` of the standardized family.
    fn standard_quantile(&self, p: f64) -> f64 {
        match self.family {
            DistFamily::Logistic => (p / (1.0 - p)).ln(),
            DistFamily::Laplace => {
                if p < 0.5 {
                    (2.0 * p).ln()
                } else {
                    -(2.0 - 2.0 * p).ln()
                }
            }
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.location + self.scale * self.standard_quantile(p)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // open interval keeps the quantile finite
        let u: f64 = rng.random_range(f64::EPSILON..1.0);
        self.quantile(u)
    }

    /// The true quantiles at the grid levels, floored at zero.
    pub fn curve(&self) -> QuantileCurve {
        let values = LEVELS.map(|p| self.quantile(p).max(0.0));
        QuantileCurve::new(values).expect("quantile function is monotone")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasSpec {
    /// Mean of the persistent offset, in truth scales.
    pub mean: f64,
    /// Spread of the persistent offset across forecasters, in truth scales.
    pub sd: f64,
    /// Spread of the per-period offset, in truth scales.
    #[serde(default)]
    pub jitter_sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceSpec {
    /// Multipliers are uniform on `[min, max]`.
    pub min: f64,
    pub max: f64,
}

impl ConfidenceSpec {
    pub fn fixed(multiplier: f64) -> Self {
        ConfidenceSpec {
            min: multiplier,
            max: multiplier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrowdSpec {
    pub members: usize,
    pub truth: TruthDistribution,
    /// Per-period drift of the truth location, as a fraction of `truth.location`.
    #[serde(default)]
    pub growth: f64,
    pub bias: BiasSpec,
    pub confidence: ConfidenceSpec,
    #[serde(default)]
    pub outlier_rate: f64,
    #[serde(default = "default_outlier_shift")]
    pub outlier_shift: f64,
    pub seed: u64,
}

fn default_outlier_shift() -> f64 {
    10.0
}

impl CrowdSpec {
    /// A crowd that reports the truth exactly.
    pub fn identity(members: usize, truth: TruthDistribution, seed: u64) -> Self {
        CrowdSpec {
            members,
            truth,
            growth: 0.0,
            bias: BiasSpec {
                mean: 0.0,
                sd: 0.0,
                jitter_sd: 0.0,
            },
            confidence: ConfidenceSpec::fixed(1.0),
            outlier_rate: 0.0,
            outlier_shift: default_outlier_shift(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("crowd spec: {m}")));
        if self.members == 0 {
            return bad("members must be at least 1");
        }
        if !(0.0..1.0).contains(&self.outlier_rate) {
            return bad("outlier_rate must lie in [0, 1)");
        }
        if !(self.confidence.min > 0.0 && self.confidence.min <= self.confidence.max) {
            return bad("confidence multipliers must satisfy 0 < min <= max");
        }
        if self.truth.scale.is_nan() || self.truth.scale < 0.0 || self.bias.sd < 0.0 || self.bias.jitter_sd < 0.0 {
            return bad("scales and spreads must be nonnegative");
        }
        Ok(())
    }

    /// Truth distribution in period `t`.
    pub fn truth_at(&self, t: usize) -> TruthDistribution {
        TruthDistribution {
            location: self.truth.location * (1.0 + self.growth * t as f64),
            ..self.truth
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCrowd {
    /// One pool per period, members in forecaster order.
    pub pools: Vec<CurvePool>,
    /// Realized truth, keyed by period index.
    pub truth: TruthSeries,
}

pub fn generate_crowd(spec: &CrowdSpec, n_periods: usize) -> Result<SyntheticCrowd> {
    generate_streams(spec, n_periods, 0)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("sd validated nonnegative")
}

/// Generates with forecaster streams starting at `stream_base`. The truth
/// stream does not depend on `stream_base`.
fn generate_streams(spec: &CrowdSpec, n_periods: usize, stream_base: u64) -> Result<SyntheticCrowd> {
    spec.validate()?;
    let scale = spec.truth.scale;

    let mut truth_rng = stream_rng(spec.seed, TRUTH_STREAM);
    let mut truth = TruthSeries::new("SYN");
    for t in 0..n_periods {
        let y = spec.truth_at(t).sample(&mut truth_rng).max(0.0).round();
        truth.insert(t as Week, y as u64)?;
    }

    let mut members: Vec<Vec<QuantileCurve>> = vec![Vec::with_capacity(spec.members); n_periods];
    for i in 0..spec.members {
        let mut rng = stream_rng(spec.seed, stream_base + i as u64);
        let bias = spec.bias.mean + normal(spec.bias.sd).sample(&mut rng);
        let multiplier = rng.random_range(spec.confidence.min..=spec.confidence.max);
        for (t, period) in members.iter_mut().enumerate() {
            let jitter = normal(spec.bias.jitter_sd).sample(&mut rng);
            let outlier = rng.random_bool(spec.outlier_rate);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let mut offset = bias + jitter;
            if outlier {
                offset += sign * spec.outlier_shift;
            }
            let dist = spec.truth_at(t);
            let center = dist.location + scale * offset;
            let mut values = [0.0; GRID_SIZE];
            for (v, &p) in values.iter_mut().zip(&LEVELS) {
                *v = (center + multiplier * (dist.quantile(p) - dist.location)).max(0.0);
            }
            period.push(QuantileCurve::new(values)?);
        }
    }
    let pools = members
        .into_iter()
        .map(CurvePool::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticCrowd { pools, truth })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScoreKind {
    Crps,
    Interval { alpha: f64 },
    Quantile { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub draws: usize,
}

/// Monte Carlo estimate of a curve's expected score when outcomes follow
/// `truth`.
pub fn expected_score_oracle(
    curve: &QuantileCurve,
    truth: &TruthDistribution,
    score: ScoreKind,
    n_draws: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if n_draws == 0 {
        return Err(Error::EmptyInput);
    }
    let interval = match score {
        ScoreKind::Interval { alpha } => Some(curve.interval(crate::model::IntervalSpec::new(alpha)?)),
        _ => None,
    };
    let mut rng = stream_rng(seed, 0);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..n_draws {
        let y = truth.sample(&mut rng);
        let s = match score {
            ScoreKind::Crps => scoring::crps(curve, y),
            ScoreKind::Interval { alpha } => {
                let i = interval.expect("set above");
                scoring::interval_score(alpha, i.lower, i.upper, y)?
            }
            ScoreKind::Quantile { theta } => {
                let idx = crate::grid::index_of(theta).ok_or(Error::OffGridInterval(theta))?;
                scoring::quantile_score(theta, curve.at(idx), y)
            }
        };
        // Welford update
        let delta = s - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (s - mean);
    }
    let var = if n_draws > 1 { m2 / (n_draws - 1) as f64 } else { 0.0 };
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / n_draws as f64).sqrt(),
        draws: n_draws,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthLocation {
    pub code: String,
    /// Truth location in the first period; the crowd's truth scale is
    /// rescaled in proportion.
    pub level: f64,
}

/// A multi-location corpus in the Hub layout built from one crowd spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCorpusSpec {
    pub crowd: CrowdSpec,
    pub locations: Vec<SynthLocation>,
    pub first_origin_week: Week,
    pub n_origins: usize,
}

impl SynthCorpusSpec {
    pub fn last_origin_week(&self) -> Week {
        self.first_origin_week + self.n_origins as Week - 1
    }

    /// Last week with an observation, which decides the mortality groups.
    pub fn final_week(&self) -> Week {
        self.last_origin_week() + 4
    }
}

pub fn team_name(i: usize) -> String {
    format!("team{:02}", i + 1)
}

/// Even-numbered teams are compartmental. Every fourth team sits outside
/// the Hub ensemble.
pub fn team_category(i: usize) -> Category {
    if i.is_multiple_of(2) {
        Category::Compartmental
    } else {
        Category::Other
    }
}

pub fn generate_corpus(spec: &SynthCorpusSpec) -> Result<Corpus> {
    if spec.n_origins == 0 || spec.locations.is_empty() {
        return Err(Error::Config("synthetic corpus needs origins and locations".into()));
    }
    let n_periods = spec.n_origins + 4;
    let mut submissions = Vec::new();
    let mut truth_table = crate::ingest::TruthTable::new();
    for (j, loc) in spec.locations.iter().enumerate() {
        let ratio = loc.level / spec.crowd.truth.location;
        let crowd = CrowdSpec {
            truth: TruthDistribution {
                location: loc.level,
                scale: spec.crowd.truth.scale * ratio,
                ..spec.crowd.truth
            },
            seed: spec.crowd.seed.wrapping_add((j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            ..spec.crowd
        };
        let mut truth = None;
        for horizon in 1..=4u8 {
            let generated = generate_streams(&crowd, n_periods, (horizon as u64 - 1) << 32)?;
            for origin_idx in 0..spec.n_origins {
                let origin = spec.first_origin_week + origin_idx as Week;
                let t = origin_idx + horizon as usize;
                for (i, curve) in generated.pools[t].members().iter().enumerate() {
                    submissions.push(ForecastSubmission {
                        team: team_name(i),
                        category: team_category(i),
                        location: loc.code.clone(),
                        forecast_date: week_end(origin) + chrono::Days::new(2),
                        origin_week: origin,
                        horizon,
                        target: Target::CumulativeDeaths,
                        point_forecast: Some(curve.median()),
                        curve: curve.clone(),
                    });
                }
            }
            truth.get_or_insert(generated.truth);
        }
        let mut series = TruthSeries::new(loc.code.clone());
        for (&t, &y) in &truth.expect("four horizons generated").observations {
            series.insert(spec.first_origin_week + t, y)?;
        }
        truth_table.insert(loc.code.clone(), series);
    }
    let ensemble = (0..spec.crowd.members)
        .filter(|i| i % 4 != 3)
        .map(team_name)
        .collect();
    let locations = spec.locations.iter().map(|l| l.code.clone()).collect();
    Ok(Corpus::from_parts(
        submissions,
        truth_table,
        ensemble,
        &crate::ingest::EligibilityList::new(),
        &crate::ingest::InclusionCriteria {
            first_origin_week: spec.first_origin_week,
            last_origin_week: Some(spec.last_origin_week()),
            locations,
        },
    ))
}
