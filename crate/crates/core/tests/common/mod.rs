//! Naive reference aggregators and fixtures shared by the integration tests.
//!
//! The references sort, slice and sum left to right, the same order the
//! library documents, so results must agree bit for bit. Trim counts use
//! integer arithmetic on the trim fraction in tenths, which avoids binary
//! rounding altogether.
#![allow(dead_code)]

use crowdcast::grid::{GRID_SIZE, LEVELS};
use crowdcast::synth::{
    BiasSpec, ConfidenceSpec, CrowdSpec, SynthCorpusSpec, SynthLocation, TruthDistribution,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The nine trim fractions as tenths.
pub const TENTHS: [usize; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

pub fn beta_of(tenths: usize) -> f64 {
    crowdcast::Beta::STANDARD[tenths - 1]
}

/// `floor(beta / 2 * m)` for `beta = tenths / 10`.
pub fn drop_n(tenths: usize, m: usize) -> usize {
    tenths * m / 20
}

/// `floor((1 - beta) / 2 * m)` for `beta = tenths / 10`.
pub fn keep_n(tenths: usize, m: usize) -> usize {
    (10 - tenths) * m / 20
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// Left-to-right mean; a run of equal values averages to that value.
pub fn avg(v: &[f64]) -> f64 {
    if v.iter().all(|x| *x == v[0]) {
        return v[0];
    }
    let mut total = 0.0;
    for x in v {
        total += *x;
    }
    total / v.len() as f64
}

pub fn med(v: &[f64]) -> f64 {
    let s = sorted(v);
    let m = s.len();
    if m % 2 == 1 {
        s[m / 2]
    } else {
        (s[m / 2 - 1] + s[m / 2]) / 2.0
    }
}

// interval references: (lowers, uppers) -> (lower, upper)

pub fn ref_iv_mean(lo: &[f64], hi: &[f64]) -> (f64, f64) {
    (avg(&sorted(lo)), avg(&sorted(hi)))
}

pub fn ref_iv_median(lo: &[f64], hi: &[f64]) -> (f64, f64) {
    (med(lo), med(hi))
}

pub fn ref_iv_sym(lo: &[f64], hi: &[f64], tenths: usize) -> (f64, f64) {
    let m = lo.len();
    let n = drop_n(tenths, m);
    let (l, u) = (sorted(lo), sorted(hi));
    (avg(&l[n..m - n]), avg(&u[n..m - n]))
}

pub fn ref_iv_ext(lo: &[f64], hi: &[f64], tenths: usize) -> (f64, f64) {
    let m = lo.len();
    let n = drop_n(tenths, m);
    let (l, u) = (sorted(lo), sorted(hi));
    let lower = avg(&l[n..]);
    let upper = avg(&u[..m - n]);
    if lower > upper {
        let mid = (lower + upper) / 2.0;
        (mid, mid)
    } else {
        (lower, upper)
    }
}

pub fn ref_iv_int(lo: &[f64], hi: &[f64], tenths: usize) -> (f64, f64) {
    let m = lo.len();
    let n = drop_n(tenths, m);
    let (l, u) = (sorted(lo), sorted(hi));
    (avg(&l[..m - n]), avg(&u[n..]))
}

pub fn ref_iv_envelope(lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let l = sorted(lo);
    let u = sorted(hi);
    (l[0], u[u.len() - 1])
}

// curve references: members as raw arrays

pub type Raw = [f64; GRID_SIZE];

fn column(members: &[Raw], level: usize) -> Vec<f64> {
    sorted(&members.iter().map(|c| c[level]).collect::<Vec<_>>())
}

fn per_level(members: &[Raw], f: impl Fn(&[f64]) -> f64) -> Raw {
    let mut out = [0.0; GRID_SIZE];
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(&column(members, i));
    }
    out
}

pub fn ref_curve_mean(members: &[Raw]) -> Raw {
    per_level(members, avg)
}

pub fn ref_curve_median(members: &[Raw]) -> Raw {
    per_level(members, med)
}

pub fn ref_ca_ext(members: &[Raw], tenths: usize) -> Raw {
    let m = members.len();
    let n = drop_n(tenths, m);
    per_level(members, |col| avg(&col[n..m - n]))
}

pub fn ref_ca_int(members: &[Raw], tenths: usize) -> Option<Raw> {
    let m = members.len();
    let n = keep_n(tenths, m);
    if n == 0 {
        return None;
    }
    Some(per_level(members, |col| {
        let kept: Vec<f64> = col[..n].iter().chain(&col[m - n..]).copied().collect();
        avg(&kept)
    }))
}

/// Member indices by average of the 23 values, stable on ties.
fn by_mean(members: &[Raw]) -> Vec<usize> {
    let means: Vec<f64> = members.iter().map(|c| c.iter().sum::<f64>() / GRID_SIZE as f64).collect();
    let mut idx: Vec<usize> = (0..members.len()).collect();
    idx.sort_by(|&a, &b| means[a].partial_cmp(&means[b]).unwrap());
    idx
}

pub fn ref_ma_ext(members: &[Raw], tenths: usize) -> Raw {
    let m = members.len();
    let n = drop_n(tenths, m);
    let order = by_mean(members);
    let kept: Vec<Raw> = order[n..m - n].iter().map(|&i| members[i]).collect();
    ref_curve_mean(&kept)
}

pub fn ref_ma_int(members: &[Raw], tenths: usize) -> Option<Raw> {
    let m = members.len();
    let n = keep_n(tenths, m);
    if n == 0 {
        return None;
    }
    let order = by_mean(members);
    let kept: Vec<Raw> = order[..n]
        .iter()
        .chain(&order[m - n..])
        .map(|&i| members[i])
        .collect();
    Some(ref_curve_mean(&kept))
}

/// Inverts the per-x median of the members' step CDFs at the grid levels.
/// Only odd pool sizes.
pub fn ref_median_of_cdfs(members: &[Raw]) -> Raw {
    assert!(members.len() % 2 == 1);
    let mut xs: Vec<f64> = members.iter().flat_map(|c| c.iter().copied()).collect();
    xs = sorted(&xs);
    xs.dedup();
    let cdf = |c: &Raw, x: f64| {
        let mut f = 0.0;
        for (theta, q) in LEVELS.iter().zip(c) {
            if *q <= x {
                f = *theta;
            }
        }
        f
    };
    let mut out = [0.0; GRID_SIZE];
    for (i, theta) in LEVELS.iter().enumerate() {
        // the median CDF only steps at member values
        out[i] = *xs
            .iter()
            .find(|&&x| med(&members.iter().map(|c| cdf(c, x)).collect::<Vec<_>>()) >= *theta)
            .expect("median CDF reaches every level at the largest value");
    }
    out
}

/// A random monotone curve. With `integers`, values are whole numbers so
/// ties across members are common.
pub fn random_curve<R: Rng>(rng: &mut R, integers: bool) -> Raw {
    let mut v: f64 = rng.random_range(0.0..500.0);
    let mut out = [0.0; GRID_SIZE];
    for o in out.iter_mut() {
        v += rng.random_range(0.0..40.0);
        *o = if integers { v.floor() } else { v };
    }
    if integers {
        // floors of a nondecreasing sequence stay nondecreasing
        debug_assert!(out.windows(2).all(|w| w[0] <= w[1]));
    }
    out
}

/// Random member intervals; with `integers`, whole-number bounds.
pub fn random_intervals<R: Rng>(rng: &mut R, m: usize, integers: bool) -> (Vec<f64>, Vec<f64>) {
    let mut lo = Vec::with_capacity(m);
    let mut hi = Vec::with_capacity(m);
    for _ in 0..m {
        let mut l: f64 = rng.random_range(0.0..1000.0);
        let mut w: f64 = rng.random_range(0.0..300.0);
        if integers {
            l = l.floor() / 10.0;
            w = w.floor() / 10.0;
        }
        lo.push(l);
        hi.push(l + w);
    }
    (lo, hi)
}

pub fn logistic_truth() -> TruthDistribution {
    TruthDistribution::logistic(1000.0, 40.0)
}

/// A crowd with spread-out persistent biases and per-period jitter.
pub fn noisy_crowd(members: usize, multiplier: f64, outlier_rate: f64, seed: u64) -> CrowdSpec {
    CrowdSpec {
        members,
        truth: logistic_truth(),
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

/// Three series, one per mortality group.
pub fn corpus_spec(crowd: CrowdSpec) -> SynthCorpusSpec {
    SynthCorpusSpec {
        crowd,
        locations: vec![
            SynthLocation {
                code: "01".into(),
                level: 300.0,
            },
            SynthLocation {
                code: "36".into(),
                level: 4_000.0,
            },
            SynthLocation {
                code: "US".into(),
                level: 60_000.0,
            },
        ],
        first_origin_week: 18,
        n_origins: 12,
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
