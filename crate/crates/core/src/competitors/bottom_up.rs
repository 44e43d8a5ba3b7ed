use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{interpolate, Segment, SegmentList};
use crate::error::{Error, Result};
use crate::sample::{check_stream, Epsilon, Sample};

/// Max absolute deviation of `samples[a..=b]` from the line joining the two
/// endpoints.
pub(crate) fn span_deviation(samples: &[Sample], a: usize, b: usize) -> f64 {
    let (p, q) = (samples[a], samples[b]);
    samples[a + 1..b]
        .iter()
        .map(|s| (interpolate(p.t, p.x, q.t, q.x, s.t) - s.x).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, PartialEq)]
struct Candidate {
    cost: f64,
    left: usize,
    version: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // Min-heap on cost, then on leftmost start index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.left.cmp(&self.left))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bottom-up merge over `samples`, returning the inclusive sample-index
/// ranges of the final pieces. Starts from one piece per consecutive pair and
/// repeatedly merges the adjacent pair whose merged piece has the smallest
/// max deviation, as long as that deviation stays within `epsilon`.
///
/// Caller guarantees at least two samples with increasing timestamps.
pub fn bottom_up_ranges(samples: &[Sample], epsilon: Epsilon) -> Vec<(usize, usize)> {
    let n = samples.len();
    debug_assert!(n >= 2);
    let eps = epsilon.value();
    // Piece i initially covers samples [i, i+1]; pieces are keyed by their
    // start index, which never changes for a surviving piece.
    let pieces = n - 1;
    let mut end: Vec<usize> = (1..n).collect();
    let mut next: Vec<usize> = (1..=pieces).collect();
    let mut prev: Vec<usize> = (0..pieces).map(|i| i.wrapping_sub(1)).collect();
    let mut alive = vec![true; pieces];
    let mut version = vec![0u32; pieces];
    let mut heap = BinaryHeap::with_capacity(pieces);

    let push = |heap: &mut BinaryHeap<Candidate>, left: usize, right: usize, end: &[usize], version: u32| {
        let cost = span_deviation(samples, left, end[right]);
        if cost <= eps {
            heap.push(Candidate { cost, left, version });
        }
    };

    for i in 0..pieces.saturating_sub(1) {
        push(&mut heap, i, i + 1, &end, 0);
    }

    while let Some(Candidate { left, version: v, .. }) = heap.pop() {
        if !alive[left] || version[left] != v {
            continue;
        }
        let right = next[left];
        debug_assert!(right < pieces && alive[right]);
        end[left] = end[right];
        alive[right] = false;
        next[left] = next[right];
        if next[left] < pieces {
            prev[next[left]] = left;
        }
        version[left] += 1;
        if next[left] < pieces {
            push(&mut heap, left, next[left], &end, version[left]);
        }
        let p = prev[left];
        if p < pieces {
            version[p] += 1;
            push(&mut heap, p, left, &end, version[p]);
        }
    }

    let mut out = Vec::new();
    let mut i = 0;
    while i < pieces {
        out.push((i, end[i]));
        i = next[i];
    }
    out
}

/// Offline bottom-up segmentation with max-deviation merge cost.
pub fn bottom_up_segment(samples: &[Sample], epsilon: Epsilon) -> Result<SegmentList> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: samples.len(),
        });
    }
    check_stream(samples)?;
    Ok(SegmentList(
        bottom_up_ranges(samples, epsilon)
            .into_iter()
            .map(|(a, b)| Segment::between(samples[a], samples[b]))
            .collect(),
    ))
}
