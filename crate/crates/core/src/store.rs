//! Uniform store interface used by the benchmark harness.

use std::fmt;
use std::str::FromStr;

use crate::competitors::{PolyStore, SwabStore};
use crate::error::{Error, Result};
use crate::flair::FlairModel;
use crate::sample::{Epsilon, Sample};

pub trait Store: Send {
    fn name(&self) -> &'static str;

    fn insert(&mut self, sample: Sample) -> Result<()>;

    /// Flushes buffered state. Online stores that hold nothing back keep the
    /// default no-op.
    fn finalize(&mut self) -> Result<()> {
        Ok(())
    }

    fn read(&self, t: f64) -> Result<f64>;

    fn footprint_64bit(&self) -> usize;

    /// Start timestamps of each model piece, ascending.
    fn model_starts(&self) -> Vec<f64>;
}

impl Store for FlairModel {
    fn name(&self) -> &'static str {
        "flair"
    }

    fn insert(&mut self, sample: Sample) -> Result<()> {
        FlairModel::insert(self, sample)
    }

    fn read(&self, t: f64) -> Result<f64> {
        FlairModel::read(self, t)
    }

    fn footprint_64bit(&self) -> usize {
        FlairModel::footprint_64bit(self)
    }

    fn model_starts(&self) -> Vec<f64> {
        self.segment_starts()
    }
}

/// Lossless append-only baseline: two 64-bit words per sample.
#[derive(Debug, Clone, Default)]
pub struct RawStore {
    samples: Vec<Sample>,
}

impl RawStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }
}

impl Store for RawStore {
    fn name(&self) -> &'static str {
        "raw"
    }

    fn insert(&mut self, sample: Sample) -> Result<()> {
        sample.validate()?;
        if let Some(prev) = self.samples.last() {
            if sample.t <= prev.t {
                return Err(Error::NonMonotonicTimestamp {
                    previous: prev.t,
                    t: sample.t,
                });
            }
        }
        self.samples.push(sample);
        Ok(())
    }

    /// Exact at stored timestamps, linear in between, flat after the end.
    fn read(&self, t: f64) -> Result<f64> {
        let first = self.samples.first().ok_or(Error::EmptyModel)?;
        if t < first.t {
            return Err(Error::TimestampBeforeHistory { t, first: first.t });
        }
        let k = self.samples.partition_point(|s| s.t <= t) - 1;
        match self.samples.get(k + 1) {
            Some(b) => {
                let a = self.samples[k];
                Ok(a.x + (b.x - a.x) * (t - a.t) / (b.t - a.t))
            }
            None => Ok(self.samples[k].x),
        }
    }

    fn footprint_64bit(&self) -> usize {
        2 * self.samples.len()
    }

    fn model_starts(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StoreKind {
    Flair,
    Swab,
    Poly,
    Raw,
}

impl StoreKind {
    pub const ALL: [StoreKind; 4] = [
        StoreKind::Flair,
        StoreKind::Swab,
        StoreKind::Poly,
        StoreKind::Raw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StoreKind::Flair => "flair",
            StoreKind::Swab => "swab",
            StoreKind::Poly => "poly",
            StoreKind::Raw => "raw",
        }
    }

    /// A fresh store with default configuration for this kind.
    pub fn build(self, epsilon: Epsilon) -> Box<dyn Store> {
        match self {
            StoreKind::Flair => Box::new(FlairModel::new(epsilon)),
            StoreKind::Swab => Box::new(SwabStore::new(epsilon)),
            StoreKind::Poly => Box::new(PolyStore::new(epsilon)),
            StoreKind::Raw => Box::new(RawStore::new()),
        }
    }
}

impl fmt::Display for StoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StoreKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown store `{s}`")))
    }
}
