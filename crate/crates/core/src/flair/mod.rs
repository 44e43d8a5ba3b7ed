//! Online ε-bounded piecewise-linear model of a univariate stream.
//!
//! The model keeps the list of persisted breakpoints (`history`), the slope of
//! the segment currently being grown, and the cone of slopes `(slope_min,
//! slope_max)` that keeps every sample absorbed by that segment within ε of
//! it. A sample whose gradient from the segment origin falls strictly inside
//! the cone is absorbed; otherwise the previous sample is persisted and a new
//! segment starts from it.

mod codec;

pub use codec::{deserialize, serialize};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::{Epsilon, Sample};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlairModel {
    history: Vec<Sample>,
    slope_current: f64,
    slope_min: f64,
    slope_max: f64,
    last: Option<Sample>,
    epsilon: Epsilon,
    count_inserted: u64,
}

/// Fixed per-model state counted by [`FlairModel::footprint_64bit`]:
/// current slope, both cone bounds and the last sample's pair.
const FIXED_STATE_WORDS: usize = 5;

impl FlairModel {
    pub fn new(epsilon: Epsilon) -> Self {
        FlairModel {
            history: Vec::new(),
            slope_current: 0.0,
            slope_min: f64::NEG_INFINITY,
            slope_max: f64::INFINITY,
            last: None,
            epsilon,
            count_inserted: 0,
        }
    }

    /// Builds a model from a raw epsilon value.
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Ok(Self::new(Epsilon::new(epsilon)?))
    }

    pub(crate) fn from_parts(
        history: Vec<Sample>,
        slope_current: f64,
        slope_min: f64,
        slope_max: f64,
        last: Option<Sample>,
        epsilon: Epsilon,
        count_inserted: u64,
    ) -> Self {
        FlairModel {
            history,
            slope_current,
            slope_min,
            slope_max,
            last,
            epsilon,
            count_inserted,
        }
    }

    pub fn history(&self) -> &[Sample] {
        &self.history
    }

    pub fn slope_current(&self) -> f64 {
        self.slope_current
    }

    pub fn slope_min(&self) -> f64 {
        self.slope_min
    }

    pub fn slope_max(&self) -> f64 {
        self.slope_max
    }

    pub fn last(&self) -> Option<Sample> {
        self.last
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn count_inserted(&self) -> u64 {
        self.count_inserted
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    pub fn insert(&mut self, p: Sample) -> Result<()> {
        p.validate()?;
        let origin = match (self.history.last(), self.last) {
            (Some(&origin), Some(last)) => {
                if p.t <= last.t {
                    return Err(Error::NonMonotonicTimestamp {
                        previous: last.t,
                        t: p.t,
                    });
                }
                origin
            }
            _ => {
                // First sample opens the history; the unbounded cone lets the
                // next one through unconditionally.
                self.history.push(p);
                self.last = Some(p);
                self.count_inserted += 1;
                return Ok(());
            }
        };
        let last = self.last.expect("non-empty model has a last sample");
        let eps = self.epsilon.value();

        let dt = p.t - origin.t;
        let dx = p.x - origin.x;
        let gradient = dx / dt;

        if self.slope_min < gradient && gradient < self.slope_max {
            self.slope_current = gradient;
            self.slope_min = self.slope_min.max((dx - eps) / dt);
            self.slope_max = self.slope_max.min((dx + eps) / dt);
        } else {
            self.history.push(last);
            let dt = p.t - last.t;
            let dx = p.x - last.x;
            self.slope_current = dx / dt;
            self.slope_min = (dx - eps) / dt;
            self.slope_max = (dx + eps) / dt;
        }

        self.last = Some(p);
        self.count_inserted += 1;
        Ok(())
    }

    /// Inserts every sample in order, stopping at the first error.
    pub fn extend<I: IntoIterator<Item = Sample>>(&mut self, samples: I) -> Result<()> {
        samples.into_iter().try_for_each(|s| self.insert(s))
    }

    /// Approximate value at `t`.
    ///
    /// Timestamps up to the last breakpoint are answered by interpolating the
    /// persisted segment `[H[k].t, H[k+1].t)` found by binary search; later
    /// timestamps extrapolate the current segment.
    pub fn read(&self, t: f64) -> Result<f64> {
        let (first, origin) = match (self.history.first(), self.history.last()) {
            (Some(f), Some(o)) => (*f, *o),
            _ => return Err(Error::EmptyModel),
        };
        if t.is_nan() {
            return Err(Error::NonFiniteSample { t, x: f64::NAN });
        }
        if t < first.t {
            return Err(Error::TimestampBeforeHistory { t, first: first.t });
        }
        if t >= origin.t {
            return Ok(self.slope_current * (t - origin.t) + origin.x);
        }
        let k = self.history.partition_point(|h| h.t <= t) - 1;
        let (a, b) = (self.history[k], self.history[k + 1]);
        let slope = (b.x - a.x) / (b.t - a.t);
        Ok(slope * (t - a.t) + a.x)
    }

    /// Number of 64-bit words needed to hold the model: two per breakpoint
    /// plus the fixed state (current slope, cone bounds, last sample).
    pub fn footprint_64bit(&self) -> usize {
        2 * self.history.len() + FIXED_STATE_WORDS
    }

    /// Start timestamps of every segment, persisted or current.
    pub fn segment_starts(&self) -> Vec<f64> {
        self.history.iter().map(|h| h.t).collect()
    }

    /// Bitwise state comparison; `PartialEq` would treat `-0.0 == 0.0`.
    pub fn bit_identical(&self, other: &FlairModel) -> bool {
        fn same(a: f64, b: f64) -> bool {
            a.to_bits() == b.to_bits()
        }
        fn same_sample(a: &Sample, b: &Sample) -> bool {
            same(a.t, b.t) && same(a.x, b.x)
        }
        self.history.len() == other.history.len()
            && self
                .history
                .iter()
                .zip(&other.history)
                .all(|(a, b)| same_sample(a, b))
            && same(self.slope_current, other.slope_current)
            && same(self.slope_min, other.slope_min)
            && same(self.slope_max, other.slope_max)
            && match (&self.last, &other.last) {
                (Some(a), Some(b)) => same_sample(a, b),
                (None, None) => true,
                _ => false,
            }
            && self.count_inserted == other.count_inserted
    }
}
