use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A position in decimal degrees (WGS84).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub const fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }

    pub fn validate(&self) -> Result<()> {
        if (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon) {
            Ok(())
        } else {
            Err(Error::InvalidCoordinate {
                lat: self.lat,
                lon: self.lon,
            })
        }
    }

    pub(crate) fn to_unit_vector(self) -> [f64; 3] {
        let (lat, lon) = (self.lat.to_radians(), self.lon.to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    }

    pub(crate) fn from_unit_vector(v: [f64; 3]) -> Self {
        let lat = v[2].atan2(v[0].hypot(v[1]));
        let lon = v[1].atan2(v[0]);
        LatLon::new(lat.to_degrees(), lon.to_degrees())
    }
}

/// Great-circle distance in meters.
pub fn haversine(a: LatLon, b: LatLon) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub t: f64,
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub const fn new(t: f64, lat: f64, lon: f64) -> Self {
        GeoPoint { t, lat, lon }
    }

    #[inline]
    pub fn pos(&self) -> LatLon {
        LatLon::new(self.lat, self.lon)
    }

    #[inline]
    pub fn distance(&self, other: &GeoPoint) -> f64 {
        haversine(self.pos(), other.pos())
    }
}

/// Time-ordered GPS points with strictly increasing timestamps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeoTrace {
    points: Vec<GeoPoint>,
}

impl GeoTrace {
    pub fn new(points: Vec<GeoPoint>) -> Result<Self> {
        let mut previous: Option<f64> = None;
        for p in &points {
            if !p.t.is_finite() {
                return Err(Error::NonFiniteSample { t: p.t, x: p.lat });
            }
            p.pos().validate()?;
            if let Some(prev) = previous {
                if p.t <= prev {
                    return Err(Error::NonMonotonicTimestamp { previous: prev, t: p.t });
                }
            }
            previous = Some(p.t);
        }
        if let Some(w) = points.windows(2).find(|w| (w[1].lon - w[0].lon).abs() > 180.0) {
            return Err(Error::InvalidParameter(format!(
                "trace crosses the antimeridian between t={} and t={}",
                w[0].t, w[1].t
            )));
        }
        Ok(GeoTrace { points })
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<GeoPoint> {
        self.points
    }

    /// Sum of consecutive great-circle distances.
    pub fn path_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}
