//! The three one-parameter-at-a-time sweep series.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::classic::Weight;
use crate::grid::{Cost, C_HV};
use crate::rstar::{max_successors, min_budget, RStarParams, MIN_SUCCESSORS};

/// Start-goal distance the unscaled series values were chosen for.
pub const REFERENCE_DIST: Cost = 5000;
/// Heuristic weight used by every series.
pub const SERIES_WEIGHT: u64 = 3;

pub const M_VALUES: [u64; 8] = [50, 75, 100, 200, 300, 500, 750, 1000];
pub const K_VALUES: [u64; 8] = [3, 5, 7, 10, 25, 50, 70, 100];
pub const DELTA_VALUES: [u64; 9] = [50, 100, 200, 300, 500, 750, 1000, 1500, 2500];
const BASE_DELTA: u64 = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesName {
    MSeries,
    KSeries,
    DeltaSeries,
}

impl SeriesName {
    pub const ALL: [SeriesName; 3] = [
        SeriesName::MSeries,
        SeriesName::KSeries,
        SeriesName::DeltaSeries,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeriesName::MSeries => "m_series",
            SeriesName::KSeries => "k_series",
            SeriesName::DeltaSeries => "delta_series",
        }
    }

    pub fn varying(self) -> Param {
        match self {
            SeriesName::MSeries => Param::M,
            SeriesName::KSeries => Param::K,
            SeriesName::DeltaSeries => Param::Delta,
        }
    }
}

impl fmt::Display for SeriesName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SeriesName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                format!("unknown series `{s}` (expected m_series, k_series or delta_series)")
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Delta,
    K,
    M,
}

impl Param {
    pub fn as_str(self) -> &'static str {
        match self {
            Param::Delta => "delta",
            Param::K => "k_succ",
            Param::M => "m_budget",
        }
    }

    pub fn of(self, p: &RStarParams) -> u64 {
        match self {
            Param::Delta => p.delta,
            Param::K => p.k_succ as u64,
            Param::M => p.m_budget,
        }
    }
}

/// One sweep series: a resolved parameter set per point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSeries {
    pub name: SeriesName,
    pub varying: Param,
    /// Value of the varying parameter at each point.
    pub values: Vec<u64>,
    pub configs: Vec<RStarParams>,
    /// Points whose scaled value was raised or lowered to a parameter bound.
    pub clamped: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("scale must be a positive finite number (got {0})")]
    BadScale(String),
    #[error("scale {scale} collapses {series} onto its bounds: clamped points {points:?} leave {distinct} distinct values of {total}")]
    Collapsed {
        scale: String,
        series: SeriesName,
        points: Vec<u64>,
        distinct: usize,
        total: usize,
    },
}

fn scale_value(v: u64, sigma: f64) -> u64 {
    (v as f64 * sigma + 0.5).floor().max(0.0) as u64
}

fn div_round(v: u64, d: u64) -> u64 {
    (2 * v + d) / (2 * d)
}

fn clamp_k(k: u64, delta: Cost) -> u64 {
    k.clamp(MIN_SUCCESSORS as u64, max_successors(delta) as u64)
}

fn clamp_m(m: u64, delta: Cost) -> u64 {
    m.max(min_budget(delta))
}

fn params(delta: Cost, k: u64, m: u64) -> RStarParams {
    RStarParams::new(delta, k as u32, m, Weight::from_ratio(SERIES_WEIGHT, 1))
}

/// The m, K and Δ series scaled from the 5000-unit reference distance by `sigma`.
///
/// Every value is multiplied by `sigma`, rounded half up and clamped to its parameter
/// bound. A series whose clamping leaves fewer than half of its points distinct is an error.
pub fn default_series_scaled(sigma: f64) -> Result<Vec<SweepSeries>, SeriesError> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(SeriesError::BadScale(sigma.to_string()));
    }
    let base_delta = scale_value(BASE_DELTA, sigma).max(C_HV);

    let mut out = Vec::new();

    // m varies; delta = dist/10, K = delta/10
    let k_fixed = clamp_k(div_round(base_delta, 10), base_delta);
    out.push(build(SeriesName::MSeries, &M_VALUES, sigma, |raw| {
        let m = clamp_m(raw, base_delta);
        (params(base_delta, k_fixed, m), m != raw)
    }));

    // K varies; delta = dist/10, m = delta/5
    let m_fixed = clamp_m(div_round(base_delta, 5), base_delta);
    out.push(build(SeriesName::KSeries, &K_VALUES, sigma, |raw| {
        let k = clamp_k(raw, base_delta);
        (params(base_delta, k, m_fixed), k != raw)
    }));

    // delta varies; m = delta/5, K = delta/20
    out.push(build(
        SeriesName::DeltaSeries,
        &DELTA_VALUES,
        sigma,
        |raw| {
            let delta = raw.max(C_HV);
            let p = params(
                delta,
                clamp_k(div_round(delta, 20), delta),
                clamp_m(div_round(delta, 5), delta),
            );
            (p, delta != raw)
        },
    ));

    for s in &out {
        let mut distinct = s.values.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() * 2 < s.values.len() {
            return Err(SeriesError::Collapsed {
                scale: sigma.to_string(),
                series: s.name,
                points: s.clamped.iter().map(|&i| s.values[i]).collect(),
                distinct: distinct.len(),
                total: s.values.len(),
            });
        }
    }
    Ok(out)
}

/// [`default_series_scaled`] with `sigma = reference_dist / 5000`.
pub fn default_series(reference_dist: Cost) -> Result<Vec<SweepSeries>, SeriesError> {
    if reference_dist == 0 {
        return Err(SeriesError::BadScale("0".into()));
    }
    default_series_scaled(reference_dist as f64 / REFERENCE_DIST as f64)
}

fn build(
    name: SeriesName,
    raw_values: &[u64],
    sigma: f64,
    mut point: impl FnMut(u64) -> (RStarParams, bool),
) -> SweepSeries {
    let varying = name.varying();
    let mut series = SweepSeries {
        name,
        varying,
        values: Vec::new(),
        configs: Vec::new(),
        clamped: Vec::new(),
    };
    for (idx, &v) in raw_values.iter().enumerate() {
        let (p, clamped) = point(scale_value(v, sigma));
        if clamped {
            series.clamped.push(idx);
        }
        series.values.push(varying.of(&p));
        series.configs.push(p);
    }
    series
}

/// Total configurations over a list of series.
pub fn config_count(series: &[SweepSeries]) -> usize {
    series.iter().map(|s| s.configs.len()).sum()
}
