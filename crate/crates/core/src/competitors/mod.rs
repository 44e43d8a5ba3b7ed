//! Storage competitors: offline bottom-up segmentation, SWAB and a
//! degree-escalating polynomial store.

mod bottom_up;
mod poly;
mod swab;

pub use bottom_up::{bottom_up_ranges, bottom_up_segment};
pub use poly::{PolyPiece, PolyStore, DEFAULT_MAX_DEGREE};
pub use swab::{SwabStore, DEFAULT_WINDOW};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::Sample;

/// One linear piece joining two raw samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub x_start: f64,
    pub x_end: f64,
}

impl Segment {
    pub fn between(a: Sample, b: Sample) -> Self {
        Segment {
            t_start: a.t,
            t_end: b.t,
            x_start: a.x,
            x_end: b.x,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        interpolate(self.t_start, self.x_start, self.t_end, self.x_end, t)
    }
}

#[inline]
pub(crate) fn interpolate(t0: f64, x0: f64, t1: f64, x1: f64, t: f64) -> f64 {
    x0 + (x1 - x0) * (t - t0) / (t1 - t0)
}

/// Contiguous, time-ordered linear pieces.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SegmentList(pub Vec<Segment>);

impl SegmentList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.0
    }

    /// Walks the list from the front until the covering piece is found.
    pub fn read(&self, t: f64) -> Result<f64> {
        let first = self.0.first().ok_or(Error::EmptyModel)?;
        if t < first.t_start {
            return Err(Error::TimestampBeforeHistory {
                t,
                first: first.t_start,
            });
        }
        let seg = self
            .0
            .iter()
            .find(|s| t <= s.t_end)
            .unwrap_or_else(|| self.0.last().unwrap());
        Ok(seg.eval(t))
    }

    pub fn is_contiguous(&self) -> bool {
        self.0.windows(2).all(|w| w[0].t_end == w[1].t_start)
            && self.0.iter().all(|s| s.t_start < s.t_end)
    }

    /// Largest absolute deviation between the pieces and `samples`.
    pub fn max_deviation(&self, samples: &[Sample]) -> Result<f64> {
        samples.iter().try_fold(0.0f64, |acc, s| {
            Ok(acc.max((self.read(s.t)? - s.x).abs()))
        })
    }
}
