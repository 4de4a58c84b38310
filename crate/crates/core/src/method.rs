//! Named aggregation methods and their dispatch onto a slot's pool.
//!
//! Method ids are the strings used in configs and report files:
//!
//! | id              | intervals | curves |
//! |-----------------|-----------|--------|
//! | `ensemble`      | yes       | yes    |
//! | `simple_average`| yes       | yes    |
//! | `median`        | yes       | yes    |
//! | `envelope`      | yes       |        |
//! | `sym_trim_<p>`  | yes       |        |
//! | `ext_trim_<p>`  | yes       |        |
//! | `int_trim_<p>`  | yes       |        |
//! | `ca_ext_trim_<p>` |         | yes    |
//! | `ca_int_trim_<p>` |         | yes    |
//! | `ma_ext_trim_<p>` |         | yes    |
//! | `ma_int_trim_<p>` |         | yes    |
//!
//! `<p>` is the trim fraction in percent, e.g. `sym_trim_40`. `ensemble` is
//! the simple average over the members flagged as Hub-ensemble teams.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve_agg;
use crate::error::{Error, Result};
use crate::ingest::SlotPool;
use crate::interval_agg;
use crate::model::{Beta, IntervalForecast, IntervalSpec, QuantileCurve, TrimKind, TrimSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Interval,
    Distribution,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum Method {
    Ensemble,
    #[default]
    SimpleAverage,
    Median,
    Envelope,
    Trim(TrimSpec),
}

impl Method {
    pub fn trim(kind: TrimKind, beta: f64) -> Result<Self> {
        Ok(Method::Trim(TrimSpec {
            beta: Beta::new(beta)?,
            kind,
        }))
    }

    pub fn supports(&self, family: Family) -> bool {
        match self {
            Method::Ensemble | Method::SimpleAverage | Method::Median => true,
            Method::Envelope => family == Family::Interval,
            Method::Trim(t) => t.kind.acts_on_intervals() == (family == Family::Interval),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Method::Ensemble => "ensemble".into(),
            Method::SimpleAverage => "simple_average".into(),
            Method::Median => "median".into(),
            Method::Envelope => "envelope".into(),
            Method::Trim(t) => format!("{}_{}", t.kind.id(), percent(t.beta.get())),
        }
    }

    /// Human-readable row label, e.g. "CA ext trim 40%".
    pub fn label(&self) -> String {
        match self {
            Method::Ensemble => "Ensemble".into(),
            Method::SimpleAverage => "Simple average".into(),
            Method::Median => "Median".into(),
            Method::Envelope => "Envelope".into(),
            Method::Trim(t) => {
                let name = match t.kind {
                    TrimKind::SymmetricBounds => "Sym trim",
                    TrimKind::AsymExterior => "Ext trim",
                    TrimKind::AsymInterior => "Int trim",
                    TrimKind::CaExterior => "CA ext trim",
                    TrimKind::CaInterior => "CA int trim",
                    TrimKind::MaExterior => "MA ext trim",
                    TrimKind::MaInterior => "MA int trim",
                };
                format!("{name} {}%", percent(t.beta.get()))
            }
        }
    }

    /// Aggregates the pool's curves into one curve.
    pub fn aggregate_curves(&self, slot: &SlotPool) -> Result<QuantileCurve> {
        let pool = &slot.curves;
        match self {
            Method::Ensemble => Ok(curve_agg::mean(&slot.ensemble_pool()?)),
            Method::SimpleAverage => Ok(curve_agg::mean(pool)),
            Method::Median => Ok(curve_agg::median(pool)),
            Method::Trim(TrimSpec { beta, kind }) => match kind {
                TrimKind::CaExterior => Ok(curve_agg::ca_exterior(pool, *beta)),
                TrimKind::CaInterior => curve_agg::ca_interior(pool, *beta),
                TrimKind::MaExterior => Ok(curve_agg::ma_exterior(pool, *beta)),
                TrimKind::MaInterior => curve_agg::ma_interior(pool, *beta),
                _ => Err(self.unsupported(Family::Distribution)),
            },
            Method::Envelope => Err(self.unsupported(Family::Distribution)),
        }
    }

    /// Aggregates the members' central intervals into one interval.
    pub fn aggregate_intervals(&self, slot: &SlotPool, spec: IntervalSpec) -> Result<IntervalForecast> {
        let pool = slot.interval_pool(spec);
        Ok(match self {
            Method::Ensemble => {
                let ens = slot.ensemble_pool()?;
                interval_agg::simple_average(&interval_agg::IntervalPool::from_intervals(
                    &ens.intervals(spec),
                )?)
            }
            Method::SimpleAverage => interval_agg::simple_average(&pool),
            Method::Median => interval_agg::median(&pool),
            Method::Envelope => interval_agg::envelope(&pool),
            Method::Trim(TrimSpec { beta, kind }) => match kind {
                TrimKind::SymmetricBounds => interval_agg::symmetric_trim(&pool, *beta),
                TrimKind::AsymExterior => interval_agg::exterior_trim(&pool, *beta),
                TrimKind::AsymInterior => interval_agg::interior_trim(&pool, *beta),
                _ => return Err(self.unsupported(Family::Interval)),
            },
        })
    }

    fn unsupported(&self, family: Family) -> Error {
        Error::Config(format!("method `{}` does not apply to {family:?} forecasts", self.id()))
    }

    /// The methods compared for interval forecasts, at the given trim fractions.
    pub fn interval_suite(betas: &[f64]) -> Result<Vec<Method>> {
        let mut out = vec![Method::Ensemble, Method::SimpleAverage, Method::Median];
        for kind in [TrimKind::SymmetricBounds, TrimKind::AsymExterior, TrimKind::AsymInterior] {
            for &b in betas {
                out.push(Method::trim(kind, b)?);
            }
        }
        out.push(Method::Envelope);
        Ok(out)
    }

    /// The methods compared for distributional forecasts.
    pub fn distribution_suite(betas: &[f64]) -> Result<Vec<Method>> {
        let mut out = vec![Method::Ensemble, Method::SimpleAverage, Method::Median];
        for kind in [
            TrimKind::CaExterior,
            TrimKind::CaInterior,
            TrimKind::MaExterior,
            TrimKind::MaInterior,
        ] {
            for &b in betas {
                out.push(Method::trim(kind, b)?);
            }
        }
        Ok(out)
    }
}

/// `0.4` as `40`, `0.125` as `12.5`.
pub(crate) fn percent(fraction: f64) -> String {
    let p = fraction * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}", p.round() as i64)
    } else {
        format!("{p}")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "ensemble" => return Ok(Method::Ensemble),
            "simple_average" => return Ok(Method::SimpleAverage),
            "median" => return Ok(Method::Median),
            "envelope" => return Ok(Method::Envelope),
            _ => {}
        }
        let (kind, pct) = s
            .rsplit_once('_')
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))?;
        let kind: TrimKind = kind.parse().map_err(|_| Error::UnknownMethod(s.to_string()))?;
        let pct: f64 = pct.parse().map_err(|_| Error::UnknownMethod(s.to_string()))?;
        Method::trim(kind, pct / 100.0)
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        let betas = Beta::STANDARD;
        let all: Vec<Method> = Method::interval_suite(&betas)
            .unwrap()
            .into_iter()
            .chain(Method::distribution_suite(&betas).unwrap())
            .collect();
        for m in all {
            assert_eq!(m.id().parse::<Method>().unwrap(), m, "{}", m.id());
        }
        assert_eq!(Method::trim(TrimKind::CaExterior, 0.4).unwrap().id(), "ca_ext_trim_40");
        assert_eq!(Method::trim(TrimKind::SymmetricBounds, 0.125).unwrap().id(), "sym_trim_12.5");
        assert_eq!(
            Method::trim(TrimKind::MaInterior, 0.2).unwrap().label(),
            "MA int trim 20%"
        );
    }

    #[test]
    fn bad_ids() {
        assert!("mode".parse::<Method>().is_err());
        assert!("sym_trim_abc".parse::<Method>().is_err());
        assert!("sym_trim_100".parse::<Method>().is_err());
        assert!("foo_trim_20".parse::<Method>().is_err());
    }

    #[test]
    fn families() {
        let ca = Method::trim(TrimKind::CaExterior, 0.2).unwrap();
        let sym = Method::trim(TrimKind::SymmetricBounds, 0.2).unwrap();
        assert!(ca.supports(Family::Distribution) && !ca.supports(Family::Interval));
        assert!(sym.supports(Family::Interval) && !sym.supports(Family::Distribution));
        assert!(Method::Median.supports(Family::Interval));
        assert!(!Method::Envelope.supports(Family::Distribution));
        assert_eq!(Method::interval_suite(&[0.2, 0.4]).unwrap().len(), 10);
        assert_eq!(Method::distribution_suite(&[0.2, 0.4]).unwrap().len(), 11);
    }
}
