use serde::Serialize;

use super::point::{GeoPoint, GeoTrace, LatLon};
use crate::error::{Error, Result};
use crate::par;

/// Stay thresholds: minimum dwell time (seconds), maximum radius (meters) and
/// the sub-trace size under which divide-and-conquer falls back to a linear
/// scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackParams {
    pub t_min: f64,
    pub d_max: f64,
    pub s_max: usize,
}

impl AttackParams {
    pub fn new(t_min: f64, d_max: f64, s_max: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_min must be positive, got {t_min}")));
        }
        if !(d_max > 0.0 && d_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("d_max must be positive, got {d_max}")));
        }
        if s_max < 2 {
            return Err(Error::InvalidParameter(format!("s_max must be at least 2, got {s_max}")));
        }
        Ok(AttackParams { t_min, d_max, s_max })
    }
}

impl Default for AttackParams {
    fn default() -> Self {
        AttackParams {
            t_min: 900.0,
            d_max: 200.0,
            s_max: 256,
        }
    }
}

/// A dwell: consecutive points all within `d_max` of the first one, spanning
/// at least `t_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stay {
    pub centroid: LatLon,
    pub t_start: f64,
    pub t_end: f64,
    pub support: usize,
    /// Inclusive index range of the member points in the scanned trace.
    pub first: usize,
    pub last: usize,
}

impl Stay {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

#[derive(Debug, Clone, Default)]
pub struct StayScan {
    pub stays: Vec<Stay>,
    /// Distinct trace indices inspected.
    pub visited: usize,
}

fn centroid(points: &[GeoPoint]) -> LatLon {
    let n = points.len() as f64;
    let (lat, lon) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.lat, b + p.lon));
    LatLon::new(lat / n, lon / n)
}

/// Anchor scan over `points`, pushing stays with indices shifted by `offset`.
fn scan(points: &[GeoPoint], offset: usize, params: &AttackParams, out: &mut Vec<Stay>) {
    let n = points.len();
    let mut i = 0;
    while i < n {
        let anchor = points[i];
        let mut j = i + 1;
        while j < n && anchor.distance(&points[j]) <= params.d_max {
            j += 1;
        }
        if points[j - 1].t - anchor.t >= params.t_min {
            out.push(Stay {
                centroid: centroid(&points[i..j]),
                t_start: anchor.t,
                t_end: points[j - 1].t,
                support: j - i,
                first: offset + i,
                last: offset + j - 1,
            });
            i = j;
        } else {
            i += 1;
        }
    }
}

/// Linear stay extraction over a window of points.
pub fn get_stays(window: &[GeoPoint], params: &AttackParams) -> Result<StayScan> {
    if window.is_empty() {
        return Err(Error::TooFewSamples { required: 1, got: 0 });
    }
    let mut stays = Vec::new();
    scan(window, 0, params, &mut stays);
    Ok(StayScan {
        stays,
        visited: window.len(),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DividedStayOptions {
    /// Run the two halves of each split concurrently.
    pub parallel: bool,
}

struct Partial {
    stays: Vec<Stay>,
    /// Inclusive index ranges that were inspected; may overlap.
    touched: Vec<(usize, usize)>,
}

/// A half whose endpoints are more than `d_max` apart yet less than `t_min`
/// apart in time cannot contain a stay.
fn cannot_hold_stay(a: &GeoPoint, b: &GeoPoint, params: &AttackParams) -> bool {
    a.distance(b) > params.d_max && b.t - a.t <= params.t_min
}

fn divide(
    points: &[GeoPoint],
    first: usize,
    last: usize,
    params: &AttackParams,
    parallel: bool,
) -> Partial {
    if last - first <= params.s_max {
        let mut stays = Vec::new();
        scan(&points[first..=last], first, params, &mut stays);
        return Partial {
            stays,
            touched: vec![(first, last)],
        };
    }
    let split = (first + last) / 2;
    let keep_left = !cannot_hold_stay(&points[first], &points[split], params);
    let keep_right = !cannot_hold_stay(&points[split], &points[last], params);
    debug_assert!(
        keep_left
            || (points[first].distance(&points[split]) > params.d_max
                && points[split].t - points[first].t <= params.t_min)
    );

    let recurse = |keep: bool, a: usize, b: usize| keep.then(|| divide(points, a, b, params, parallel));
    let (left, right) = if parallel {
        par::join(
            || recurse(keep_left, first, split),
            || recurse(keep_right, split, last),
        )
    } else {
        (
            recurse(keep_left, first, split),
            recurse(keep_right, split, last),
        )
    };

    let mut out = Partial {
        stays: Vec::new(),
        touched: vec![(first, first), (split, split), (last, last)],
    };
    for half in [left, right].into_iter().flatten() {
        out.stays.extend(half.stays);
        out.touched.extend(half.touched);
    }
    out
}

fn union_size(mut ranges: Vec<(usize, usize)>) -> usize {
    ranges.sort_unstable();
    let mut total = 0;
    let mut covered_to: Option<usize> = None;
    for (a, b) in ranges {
        let start = match covered_to {
            Some(c) if a <= c => c + 1,
            _ => a,
        };
        if start <= b {
            total += b - start + 1;
        }
        covered_to = Some(covered_to.map_or(b, |c| c.max(b)));
    }
    total
}

/// Divide-and-conquer stay extraction over `trace[i_first..=i_last]`.
///
/// Windows of at most `s_max + 1` points are scanned linearly. Larger ones are
/// split at their midpoint index and each half is explored only if its
/// endpoints do not prove it stay-free. Left-half stays come before
/// right-half stays. Stays straddling a split point may be missed or found
/// as two shorter stays.
pub fn divided_stay(
    trace: &GeoTrace,
    i_first: usize,
    i_last: usize,
    params: &AttackParams,
) -> Result<StayScan> {
    divided_stay_with(trace, i_first, i_last, params, DividedStayOptions::default())
}

pub fn divided_stay_with(
    trace: &GeoTrace,
    i_first: usize,
    i_last: usize,
    params: &AttackParams,
    options: DividedStayOptions,
) -> Result<StayScan> {
    if i_first > i_last || i_last >= trace.len() {
        return Err(Error::IndexOutOfRange {
            first: i_first,
            last: i_last,
            len: trace.len(),
        });
    }
    let partial = divide(trace.points(), i_first, i_last, params, options.parallel);
    Ok(StayScan {
        stays: partial.stays,
        visited: union_size(partial.touched),
    })
}
