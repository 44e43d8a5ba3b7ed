//! ε selection from the distribution of consecutive drifts `|Δx| / |Δt|`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::{check_stream, Epsilon, Sample};

/// Floor used when every drift is zero.
pub const EPSILON_FLOOR: f64 = 1e-9;

/// Coverage levels of the three candidates.
pub const COVERAGE_PERCENTILES: [u32; 3] = [90, 95, 99];

/// Sorted drift values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftCdf {
    sorted: Vec<f64>,
}

impl DriftCdf {
    /// Builds a CDF from raw drift values; negative or non-finite values are
    /// rejected.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("invalid drift {v}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(DriftCdf { sorted: values })
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Nearest-rank percentile: the value at rank `ceil(p/100 * n)`.
    pub fn percentile(&self, p: u32) -> Result<f64> {
        if self.sorted.is_empty() {
            return Err(Error::TooFewSamples { required: 1, got: 0 });
        }
        let n = self.sorted.len();
        let rank = ((p as usize * n).div_ceil(100)).clamp(1, n);
        Ok(self.sorted[rank - 1])
    }

    /// `(value, cumulative fraction)` pairs for plotting.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(move |(i, &v)| (v, (i + 1) as f64 / n))
    }
}

pub fn drifts(samples: &[Sample]) -> Result<DriftCdf> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: samples.len(),
        });
    }
    check_stream(samples)?;
    DriftCdf::from_values(
        samples
            .windows(2)
            .map(|w| (w[1].x - w[0].x).abs() / (w[1].t - w[0].t).abs())
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonCandidates {
    pub p90: f64,
    pub p95: f64,
    pub p99: f64,
}

impl EpsilonCandidates {
    pub fn as_epsilons(&self) -> [Epsilon; 3] {
        [self.p90, self.p95, self.p99].map(|v| Epsilon::new(v).expect("candidates are positive"))
    }
}

/// 90th / 95th / 99th nearest-rank drift percentiles. A zero percentile is
/// lifted to the smallest positive drift, or [`EPSILON_FLOOR`] if there is
/// none.
pub fn epsilon_candidates(cdf: &DriftCdf) -> Result<EpsilonCandidates> {
    let smallest_positive = cdf
        .values()
        .iter()
        .copied()
        .find(|&v| v > 0.0)
        .unwrap_or(EPSILON_FLOOR);
    let pick = |p| cdf.percentile(p).map(|v| if v > 0.0 { v } else { smallest_positive });
    Ok(EpsilonCandidates {
        p90: pick(90)?,
        p95: pick(95)?,
        p99: pick(99)?,
    })
}
