use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One timestamped scalar observation. `t` is in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
}

impl Sample {
    pub const fn new(t: f64, x: f64) -> Self {
        Sample { t, x }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t.is_finite() && self.x.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteSample {
                t: self.t,
                x: self.x,
            })
        }
    }
}

impl From<(f64, f64)> for Sample {
    fn from((t, x): (f64, f64)) -> Self {
        Sample { t, x }
    }
}

/// Maximum tolerated absolute error, in the unit of [`Sample::x`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Epsilon(value))
        } else {
            Err(Error::InvalidEpsilon(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Epsilon::new(value)
    }
}

/// Checks that `samples` are finite with strictly increasing timestamps.
pub fn check_stream(samples: &[Sample]) -> Result<()> {
    let mut previous: Option<f64> = None;
    for s in samples {
        s.validate()?;
        if let Some(p) = previous {
            if s.t <= p {
                return Err(Error::NonMonotonicTimestamp { previous: p, t: s.t });
            }
        }
        previous = Some(s.t);
    }
    Ok(())
}
