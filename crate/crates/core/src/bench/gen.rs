use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, GeoTrace, LatLon, EARTH_RADIUS_M};
use crate::par;
use crate::sample::Sample;

/// Value range of [`gen_random`].
pub const RANDOM_RANGE: (f64, f64) = (-1000.0, 1000.0);

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform i.i.d. values at unit-spaced timestamps `0, 1, …`.
pub fn gen_random(n: usize, seed: u64) -> Vec<Sample> {
    let mut rng = rng(seed, 0);
    (0..n)
        .map(|i| Sample::new(i as f64, rng.random_range(RANDOM_RANGE.0..=RANDOM_RANGE.1)))
        .collect()
}

pub fn gen_constant(n: usize, value: f64) -> Vec<Sample> {
    (0..n).map(|i| Sample::new(i as f64, value)).collect()
}

/// `n_knots` linear pieces of equal length joined end to end, unit-spaced.
///
/// Slopes are small integers and consecutive slopes differ, so every value
/// is an exact integer and each junction is a true corner.
pub fn gen_piecewise_linear(n: usize, n_knots: usize, seed: u64) -> Vec<Sample> {
    let n_knots = n_knots.max(1);
    let mut rng = rng(seed, 1);
    let len = n.div_ceil(n_knots).max(1);
    let mut slopes: Vec<i64> = Vec::with_capacity(n_knots);
    for _ in 0..n_knots {
        let slope = loop {
            let s = rng.random_range(-5i64..=5);
            if slopes.last() != Some(&s) {
                break s;
            }
        };
        slopes.push(slope);
    }
    let mut base = rng.random_range(-100i64..=100);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let piece = (i / len).min(n_knots - 1);
        let offset = (i - piece * len) as i64;
        if offset == 0 && piece > 0 {
            base += slopes[piece - 1] * len as i64;
        }
        out.push(Sample::new(i as f64, (base + slopes[piece] * offset) as f64));
    }
    out
}

/// Named univariate workloads used by the harness and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workload {
    Random,
    Constant,
    Piecewise,
}

impl Workload {
    pub fn generate(self, n: usize, seed: u64) -> Vec<Sample> {
        match self {
            Workload::Random => gen_random(n, seed),
            Workload::Constant => gen_constant(n, 1.0),
            Workload::Piecewise => gen_piecewise_linear(n, 3, seed),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Workload::Random => "random",
            Workload::Constant => "constant",
            Workload::Piecewise => "piecewise",
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Workload {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Workload::Random),
            "constant" => Ok(Workload::Constant),
            "piecewise" => Ok(Workload::Piecewise),
            _ => Err(Error::InvalidParameter(format!("unknown workload `{s}`"))),
        }
    }
}

/// Shape of synthetic mobility traces: dwells joined by straight transit
/// legs. Dwell fixes are sparse (phones throttle when still), transit fixes
/// dense.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellSpec {
    pub dwells: (usize, usize),
    pub dwell_minutes: (f64, f64),
    pub dwell_radius_m: f64,
    pub dwell_period_s: f64,
    pub transit_km: (f64, f64),
    pub transit_speed_mps: (f64, f64),
    pub transit_period_s: f64,
    /// Max heading change between consecutive legs, degrees.
    pub max_turn_deg: f64,
    pub origin: LatLon,
}

impl Default for DwellSpec {
    fn default() -> Self {
        DwellSpec {
            dwells: (2, 3),
            dwell_minutes: (45.0, 90.0),
            dwell_radius_m: 20.0,
            dwell_period_s: 15.0,
            transit_km: (20.0, 40.0),
            transit_speed_mps: (15.0, 30.0),
            transit_period_s: 1.0,
            max_turn_deg: 80.0,
            origin: LatLon::new(45.19, 5.72),
        }
    }
}

impl DwellSpec {
    pub fn with_dwells(mut self, n: usize) -> Self {
        self.dwells = (n, n);
        self
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticTrace {
    pub trace: GeoTrace,
    /// Dwell centers in visiting order: the ground-truth POIs.
    pub dwell_centers: Vec<LatLon>,
}

/// East/north offset in meters, flat approximation around `origin`.
fn offset(origin: LatLon, east: f64, north: f64) -> LatLon {
    LatLon::new(
        origin.lat + (north / EARTH_RADIUS_M).to_degrees(),
        origin.lon + (east / (EARTH_RADIUS_M * origin.lat.to_radians().cos())).to_degrees(),
    )
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn one_trace(spec: &DwellSpec, seed: u64, index: usize) -> SyntheticTrace {
    let mut rng = rng(seed, 2 + index as u64);
    let n_dwells = rng.random_range(spec.dwells.0..=spec.dwells.1.max(spec.dwells.0));
    let origin = spec.origin;

    // Dwell centers as east/north meters from the origin.
    let mut centers = vec![(0.0f64, 0.0f64)];
    let mut heading = rng.random_range(0.0..TAU);
    for _ in 1..n_dwells {
        let turn = spec.max_turn_deg.to_radians();
        heading += rng.random_range(-turn..=turn);
        let d = uniform(&mut rng, spec.transit_km) * 1000.0;
        let (e, n) = *centers.last().unwrap();
        centers.push((e + d * heading.cos(), n + d * heading.sin()));
    }

    let mut points = Vec::new();
    let mut t = 0.0;
    for (k, &(ce, cn)) in centers.iter().enumerate() {
        if k > 0 {
            let (pe, pn) = centers[k - 1];
            let dist = (ce - pe).hypot(cn - pn);
            let speed = uniform(&mut rng, spec.transit_speed_mps);
            let steps = (dist / speed / spec.transit_period_s).floor() as usize;
            for s in 1..=steps {
                let f = (s as f64 * spec.transit_period_s * speed / dist).min(1.0);
                let p = offset(origin, pe + f * (ce - pe), pn + f * (cn - pn));
                points.push(GeoPoint::new(t + s as f64 * spec.transit_period_s, p.lat, p.lon));
            }
            t += (steps + 1) as f64 * spec.transit_period_s;
        }
        let minutes = uniform(&mut rng, spec.dwell_minutes);
        let fixes = ((minutes * 60.0) / spec.dwell_period_s).round().max(1.0) as usize;
        for i in 0..fixes {
            let r = spec.dwell_radius_m * rng.random::<f64>().sqrt();
            let a = rng.random_range(0.0..TAU);
            let p = offset(origin, ce + r * a.cos(), cn + r * a.sin());
            points.push(GeoPoint::new(t + i as f64 * spec.dwell_period_s, p.lat, p.lon));
        }
        t += fixes as f64 * spec.dwell_period_s;
    }

    SyntheticTrace {
        trace: GeoTrace::new(points).expect("generated trace is valid"),
        dwell_centers: centers.iter().map(|&(e, n)| offset(origin, e, n)).collect(),
    }
}

/// `n_traces` independent traces; trace `i` depends only on `(spec, seed, i)`.
pub fn gen_mobility(n_traces: usize, spec: &DwellSpec, seed: u64) -> Vec<SyntheticTrace> {
    par::map_range(n_traces, |i| one_trace(spec, seed, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flair::FlairModel;
    use crate::geo::haversine;

    #[test]
    fn random_is_seeded_and_bounded() {
        let a = gen_random(1000, 42);
        assert_eq!(a, gen_random(1000, 42));
        assert_ne!(a, gen_random(1000, 43));
        assert!(a.iter().all(|s| (-1000.0..=1000.0).contains(&s.x)));
        assert!(gen_random(0, 1).is_empty());
    }

    #[test]
    fn constant_values() {
        let c = gen_constant(10, 5.0);
        assert_eq!(c.len(), 10);
        assert!(c.iter().all(|s| s.x == 5.0));
    }

    #[test]
    fn piecewise_is_continuous_with_three_breakpoints_at_most() {
        for seed in 0..20 {
            let s = gen_piecewise_linear(3000, 3, seed);
            assert_eq!(s.len(), 3000);
            for eps in [1e-9, 1e-3, 0.4] {
                let mut m = FlairModel::with_epsilon(eps).unwrap();
                m.extend(s.iter().copied()).unwrap();
                assert!(m.history().len() <= 3);
            }
            // Junction values continue the previous line.
            assert_eq!(s[1000].x - s[999].x, s[999].x - s[998].x);
        }
    }

    #[test]
    fn mobility_ground_truth() {
        let spec = DwellSpec::default().with_dwells(2);
        let traces = gen_mobility(3, &spec, 7);
        for t in &traces {
            assert_eq!(t.dwell_centers.len(), 2);
            assert!(haversine(t.dwell_centers[0], t.dwell_centers[1]) >= 7_900.0);
        }
        let again = gen_mobility(3, &spec, 7);
        assert_eq!(traces[2].trace, again[2].trace);
        assert_eq!(gen_mobility(1, &spec, 7)[0].trace, traces[0].trace);
    }
}
