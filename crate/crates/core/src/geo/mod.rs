//! Mobility traces, stay / POI extraction and constant-speed resampling.

mod point;
mod poi;
mod promesse;
mod stays;

pub use point::{haversine, GeoPoint, GeoTrace, LatLon, EARTH_RADIUS_M};
pub use poi::{merge_stays, Poi, PoiRecord};
pub use promesse::{promesse, PromesseParams, DEFAULT_DELTA_M};
pub use stays::{
    divided_stay, divided_stay_with, get_stays, AttackParams, DividedStayOptions, Stay,
    StayScan,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which stay extractor feeds the POI merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// One anchor-based scan over the whole trace.
    Linear,
    /// Divide-and-conquer over index halves, discarding halves that cannot
    /// hold a stay.
    Divided,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Engine::Linear),
            "divided" => Ok(Engine::Divided),
            _ => Err(Error::InvalidParameter(format!("unknown engine `{s}`"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Linear => "linear",
            Engine::Divided => "divided",
        })
    }
}

#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub pois: Vec<Poi>,
    pub stays: Vec<Stay>,
    /// Distinct trace indices the extractor looked at.
    pub visited: usize,
}

/// Stay extraction followed by merging into POIs.
pub fn poi_attack(
    trace: &GeoTrace,
    params: &AttackParams,
    engine: Engine,
    merge_radius: f64,
    parallel: bool,
) -> Result<AttackOutcome> {
    if !(merge_radius > 0.0 && merge_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "merge radius must be positive, got {merge_radius}"
        )));
    }
    if trace.is_empty() {
        return Ok(AttackOutcome {
            pois: Vec::new(),
            stays: Vec::new(),
            visited: 0,
        });
    }
    let scan = match engine {
        Engine::Linear => get_stays(trace.points(), params)?,
        Engine::Divided => divided_stay_with(
            trace,
            0,
            trace.len() - 1,
            params,
            DividedStayOptions { parallel },
        )?,
    };
    Ok(AttackOutcome {
        pois: merge_stays(&scan.stays, merge_radius),
        stays: scan.stays,
        visited: scan.visited,
    })
}
