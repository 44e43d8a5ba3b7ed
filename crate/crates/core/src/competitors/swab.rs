use super::bottom_up::bottom_up_ranges;
use super::{interpolate, Segment, SegmentList};
use crate::error::{Error, Result};
use crate::sample::{Epsilon, Sample};
use crate::store::Store;

pub const DEFAULT_WINDOW: usize = 512;

/// Slopes from the open tail segment's start that keep every sample it
/// covers within ε. Lets a freshly emitted segment be folded into the tail
/// without retaining the tail's raw samples.
#[derive(Debug, Clone, Copy)]
struct TailCone {
    origin: Sample,
    lo: f64,
    hi: f64,
}

impl TailCone {
    fn empty(origin: Sample) -> Self {
        TailCone {
            origin,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    fn absorb(&mut self, s: Sample, eps: f64) {
        let dt = s.t - self.origin.t;
        let dx = s.x - self.origin.x;
        self.lo = self.lo.max((dx - eps) / dt);
        self.hi = self.hi.min((dx + eps) / dt);
    }

    fn admits(&self, end: Sample) -> bool {
        let slope = (end.x - self.origin.x) / (end.t - self.origin.t);
        self.lo < slope && slope < self.hi
    }
}

/// Sliding-window-and-bottom-up store.
///
/// Samples accumulate in a window of `window` samples. Each time it fills,
/// bottom-up segmentation runs over the window and its oldest piece is
/// emitted; the samples it covered leave the window, except the shared end
/// sample. An emitted piece is folded into the previous one when the merged
/// piece still fits every covered sample within ε.
#[derive(Debug, Clone)]
pub struct SwabStore {
    epsilon: Epsilon,
    window: usize,
    buffer: Vec<Sample>,
    segments: Vec<Segment>,
    starts: Vec<f64>,
    tail: Option<TailCone>,
    flushes: usize,
}

impl SwabStore {
    pub fn new(epsilon: Epsilon) -> Self {
        Self::with_window(epsilon, DEFAULT_WINDOW).expect("default window is valid")
    }

    pub fn with_window(epsilon: Epsilon, window: usize) -> Result<Self> {
        if window < 2 {
            return Err(Error::InvalidParameter(format!(
                "SWAB window must hold at least 2 samples, got {window}"
            )));
        }
        Ok(SwabStore {
            epsilon,
            window,
            buffer: Vec::with_capacity(window),
            segments: Vec::new(),
            starts: Vec::new(),
            tail: None,
            flushes: 0,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Emitted pieces so far. Buffered samples are not included until
    /// [`Store::finalize`].
    pub fn segments(&self) -> SegmentList {
        SegmentList(self.segments.clone())
    }

    /// Number of times a full window forced an emission.
    pub fn flushes(&self) -> usize {
        self.flushes
    }

    pub fn buffered(&self) -> &[Sample] {
        &self.buffer
    }

    fn emit(&mut self, a: usize, b: usize) {
        let eps = self.epsilon.value();
        let (start, end) = (self.buffer[a], self.buffer[b]);
        let covered = &self.buffer[a + 1..b];

        if let (Some(tail), Some(last)) = (self.tail.as_mut(), self.segments.last_mut()) {
            let o = tail.origin;
            let fits_new = covered
                .iter()
                .chain(std::iter::once(&start))
                .all(|s| (interpolate(o.t, o.x, end.t, end.x, s.t) - s.x).abs() <= eps);
            if fits_new && tail.admits(end) {
                tail.absorb(start, eps);
                covered.iter().for_each(|s| tail.absorb(*s, eps));
                last.t_end = end.t;
                last.x_end = end.x;
                return;
            }
        }

        let mut cone = TailCone::empty(start);
        covered.iter().for_each(|s| cone.absorb(*s, eps));
        self.tail = Some(cone);
        self.segments.push(Segment::between(start, end));
        self.starts.push(start.t);
    }

    fn read_buffer(&self, t: f64) -> Option<f64> {
        let first = self.buffer.first()?;
        if t < first.t {
            return None;
        }
        let k = self.buffer.partition_point(|s| s.t <= t) - 1;
        Some(match self.buffer.get(k + 1) {
            Some(b) => {
                let a = self.buffer[k];
                interpolate(a.t, a.x, b.t, b.x, t)
            }
            None => self.buffer[k].x,
        })
    }
}

impl Store for SwabStore {
    fn name(&self) -> &'static str {
        "swab"
    }

    fn insert(&mut self, sample: Sample) -> Result<()> {
        sample.validate()?;
        if let Some(prev) = self.buffer.last() {
            if sample.t <= prev.t {
                return Err(Error::NonMonotonicTimestamp {
                    previous: prev.t,
                    t: sample.t,
                });
            }
        }
        self.buffer.push(sample);
        if self.buffer.len() >= self.window {
            let ranges = bottom_up_ranges(&self.buffer, self.epsilon);
            let (a, b) = ranges[0];
            self.emit(a, b);
            self.buffer.drain(..b);
            self.flushes += 1;
        }
        Ok(())
    }

    fn finalize(&mut self) -> Result<()> {
        if self.buffer.len() >= 2 {
            for (a, b) in bottom_up_ranges(&self.buffer, self.epsilon) {
                self.emit(a, b);
            }
            let last = *self.buffer.last().unwrap();
            self.buffer.clear();
            self.buffer.push(last);
        }
        Ok(())
    }

    /// Linear walk over the emitted pieces, then the raw window.
    fn read(&self, t: f64) -> Result<f64> {
        match self.starts.first() {
            Some(&first) if t < first => {
                return Err(Error::TimestampBeforeHistory { t, first });
            }
            Some(_) => {
                let idx = self.starts.iter().take_while(|&&s| s <= t).count() - 1;
                let seg = &self.segments[idx];
                if t <= seg.t_end {
                    return Ok(seg.eval(t));
                }
            }
            None => {}
        }
        match self.read_buffer(t) {
            Some(v) => Ok(v),
            None => match self.buffer.first() {
                Some(f) => Err(Error::TimestampBeforeHistory { t, first: f.t }),
                None => Err(Error::EmptyModel),
            },
        }
    }

    /// Four words per emitted piece, two per buffered sample, two for the
    /// open tail's cone.
    fn footprint_64bit(&self) -> usize {
        4 * self.segments.len() + 2 * self.buffer.len() + if self.tail.is_some() { 2 } else { 0 }
    }

    fn model_starts(&self) -> Vec<f64> {
        self.starts.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::competitors::bottom_up_segment;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    fn run(samples: &[Sample], e: f64, window: usize) -> SwabStore {
        let mut s = SwabStore::with_window(eps(e), window).unwrap();
        for p in samples {
            s.insert(*p).unwrap();
        }
        s.finalize().unwrap();
        s
    }

    fn random_stream(n: usize, seed: u64) -> Vec<Sample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| Sample::new(i as f64, rng.random_range(-1000.0..1000.0)))
            .collect()
    }

    #[test]
    fn constant_stream_is_one_segment() {
        let w = 64;
        let samples: Vec<_> = (0..10 * w).map(|i| Sample::new(i as f64, 2.5)).collect();
        let s = run(&samples, 0.01, w);
        assert_eq!(s.segments().len(), 1);
        assert!(s.flushes() > 0);
    }

    #[test]
    fn break_example_reads_back_within_epsilon() {
        let samples = [(0.0, 0.0), (1.0, 0.0), (2.0, 10.0)].map(Sample::from);
        for w in [2, 3, 512] {
            let s = run(&samples, 1.0, w);
            for p in &samples {
                assert!((s.read(p.t).unwrap() - p.x).abs() <= 1.0);
            }
        }
    }

    #[test]
    fn window_of_two_emits_raw_pairs() {
        let samples = random_stream(50, 3);
        let s = run(&samples, 0.01, 2);
        let segs = s.segments();
        assert_eq!(segs.len(), samples.len() - 1);
        for (seg, w) in segs.segments().iter().zip(samples.windows(2)) {
            assert_eq!(*seg, Segment::between(w[0], w[1]));
        }
    }

    #[test]
    fn unbounded_window_matches_offline() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..400);
            let samples: Vec<_> = (0..n)
                .map(|i| Sample::new(i as f64, (i as f64 * 0.1).sin() * 5.0 + rng.random_range(0.0..0.05)))
                .collect();
            let offline = bottom_up_segment(&samples, eps(0.1)).unwrap();
            let online = run(&samples, 0.1, n);
            assert_eq!(online.segments().len(), offline.len());
        }
    }

    #[test]
    fn output_within_epsilon_and_contiguous() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut t = 0.0;
        let samples: Vec<_> = (0..3000)
            .map(|i| {
                t += rng.random_range(0.1..2.0);
                Sample::new(t, (i as f64 * 0.01).sin() * 20.0 + rng.random_range(-0.2..0.2))
            })
            .collect();
        for e in [1e-3, 0.1, 1.0] {
            let s = run(&samples, e, 128);
            let segs = s.segments();
            assert!(segs.is_contiguous());
            assert!(segs.max_deviation(&samples).unwrap() <= e);
            for p in &samples {
                assert!((s.read(p.t).unwrap() - p.x).abs() <= e);
            }
            let offline = bottom_up_segment(&samples, eps(e)).unwrap();
            assert!(segs.len() <= offline.len() + s.flushes());
        }
    }

    #[test]
    fn reads_before_finalize_use_the_window() {
        let mut s = SwabStore::with_window(eps(0.1), 16).unwrap();
        let samples = random_stream(40, 8);
        for p in &samples {
            s.insert(*p).unwrap();
        }
        for p in &samples {
            assert!((s.read(p.t).unwrap() - p.x).abs() <= 0.1);
        }
        assert!(s.read(-1.0).is_err());
    }
}
