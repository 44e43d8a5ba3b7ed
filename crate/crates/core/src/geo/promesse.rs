use super::point::{haversine, GeoPoint, GeoTrace, LatLon};
use crate::error::{Error, Result};

pub const DEFAULT_DELTA_M: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PromesseParams {
    /// Distance between consecutive output points, meters.
    pub delta: f64,
}

impl PromesseParams {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta.is_finite() {
            Ok(PromesseParams { delta })
        } else {
            Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")))
        }
    }
}

impl Default for PromesseParams {
    fn default() -> Self {
        PromesseParams {
            delta: DEFAULT_DELTA_M,
        }
    }
}

/// Point at fraction `f` of the great-circle arc from `a` to `b`.
fn slerp(a: LatLon, b: LatLon, f: f64) -> LatLon {
    if f == 0.0 {
        return a;
    }
    if f == 1.0 {
        return b;
    }
    let (va, vb) = (a.to_unit_vector(), b.to_unit_vector());
    let dot = (va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2]).clamp(-1.0, 1.0);
    let omega = dot.acos();
    let (wa, wb) = if omega < 1e-12 {
        (1.0 - f, f)
    } else {
        let s = omega.sin();
        (((1.0 - f) * omega).sin() / s, (f * omega).sin() / s)
    };
    LatLon::from_unit_vector([
        wa * va[0] + wb * vb[0],
        wa * va[1] + wb * vb[1],
        wa * va[2] + wb * vb[2],
    ])
}

/// Bisects `f` in `[lo, hi]` on the arc `a → b` for the point exactly
/// `delta` meters from `center`; distance is below `delta` at `lo` and at
/// least `delta` at `hi`.
fn crossing(center: LatLon, a: LatLon, b: LatLon, mut lo: f64, mut hi: f64, delta: f64) -> (f64, LatLon) {
    let mut best = (hi, slerp(a, b, hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = slerp(a, b, mid);
        let d = haversine(center, p);
        if d < delta {
            lo = mid;
        } else {
            hi = mid;
            best = (mid, p);
        }
        if (d - delta).abs() < 1e-9 {
            return (mid, p);
        }
    }
    best
}

/// Constant-speed resampling.
///
/// Walks the input polyline and emits, from each output point, the first
/// point further along the path lying exactly `delta` meters away, so dwells
/// collapse to a single crossing. The input's end point closes the output.
/// Timestamps are spread evenly between the input's first and last
/// timestamps, which are kept unchanged.
pub fn promesse(trace: &GeoTrace, params: &PromesseParams) -> Result<GeoTrace> {
    let pts = trace.points();
    if pts.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: pts.len(),
        });
    }
    let path = trace.path_length();
    if path == 0.0 {
        return Err(Error::DegeneratePath("all points coincide".into()));
    }
    if path < params.delta {
        return Err(Error::DegeneratePath(format!(
            "path length {path:.3} m is shorter than delta {} m",
            params.delta
        )));
    }

    let delta = params.delta;
    let mut out: Vec<LatLon> = vec![pts[0].pos()];
    let mut current = pts[0].pos();
    // Current output point lies on segment `seg` at fraction `frac`.
    let (mut seg, mut frac) = (0usize, 0.0f64);
    'walk: loop {
        while seg + 1 < pts.len() {
            let (a, b) = (pts[seg].pos(), pts[seg + 1].pos());
            if haversine(current, b) >= delta {
                let lo_d = haversine(current, slerp(a, b, frac));
                debug_assert!(lo_d < delta);
                let (f, p) = crossing(current, a, b, frac, 1.0, delta);
                out.push(p);
                current = p;
                frac = f;
                continue 'walk;
            }
            seg += 1;
            frac = 0.0;
        }
        break;
    }
    let end = pts[pts.len() - 1].pos();
    if haversine(current, end) > 1e-6 {
        out.push(end);
    }

    let (t0, t1) = (pts[0].t, pts[pts.len() - 1].t);
    let m = out.len();
    let step = (t1 - t0) / (m - 1) as f64;
    let points = out
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let t = if i + 1 == m { t1 } else { t0 + step * i as f64 };
            GeoPoint::new(t, p.lat, p.lon)
        })
        .collect();
    GeoTrace::new(points)
}
