use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::{Epsilon, Sample};
use crate::store::Store;

pub const DEFAULT_MAX_DEGREE: usize = 14;

/// Polynomial over normalized time `u = (t - t_start) / t_scale`, with values
/// stored as `x_offset + x_scale * p(u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyPiece {
    pub t_start: f64,
    pub t_end: f64,
    pub t_scale: f64,
    pub x_offset: f64,
    pub x_scale: f64,
    pub coefficients: Vec<f64>,
    /// Max error at the points the piece was fitted on.
    pub fit_error: f64,
    /// Acceptance threshold the fit was held to.
    pub tolerance: f64,
}

impl PolyPiece {
    fn constant(s: Sample) -> Self {
        PolyPiece {
            t_start: s.t,
            t_end: s.t,
            t_scale: 1.0,
            x_offset: s.x,
            x_scale: 1.0,
            coefficients: vec![0.0],
            fit_error: 0.0,
            tolerance: 0.0,
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.t_start) / self.t_scale;
        let p = self
            .coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * u + c);
        self.x_offset + self.x_scale * p
    }

    /// `count` points spread evenly over the covered interval.
    fn regenerate(&self, count: usize) -> Vec<Sample> {
        if count == 1 {
            return vec![Sample::new(self.t_start, self.eval(self.t_start))];
        }
        let span = self.t_end - self.t_start;
        (0..count)
            .map(|i| {
                let t = if i + 1 == count {
                    self.t_end
                } else {
                    self.t_start + span * i as f64 / (count - 1) as f64
                };
                Sample::new(t, self.eval(t))
            })
            .collect()
    }

    fn fit(points: &[Sample], degree: usize, tolerance: f64) -> Option<PolyPiece> {
        let t_start = points[0].t;
        let t_end = points.last().unwrap().t;
        let t_scale = t_end - t_start;
        let mean = points.iter().map(|p| p.x).sum::<f64>() / points.len() as f64;
        let spread = points.iter().map(|p| (p.x - mean).abs()).fold(0.0, f64::max);
        let x_scale = if spread > 0.0 { spread } else { 1.0 };

        let vander = DMatrix::from_fn(points.len(), degree + 1, |r, c| {
            ((points[r].t - t_start) / t_scale).powi(c as i32)
        });
        let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| (p.x - mean) / x_scale));
        let coefficients = vander.svd(true, true).solve(&rhs, 1e-14).ok()?;
        let mut piece = PolyPiece {
            t_start,
            t_end,
            t_scale,
            x_offset: mean,
            x_scale,
            coefficients: coefficients.iter().copied().collect(),
            fit_error: 0.0,
            tolerance,
        };
        piece.fit_error = points
            .iter()
            .map(|p| (piece.eval(p.t) - p.x).abs())
            .fold(0.0, f64::max);
        (piece.fit_error <= tolerance).then_some(piece)
    }
}

/// Polynomial store that escalates the degree of the current piece instead
/// of starting a new one.
///
/// A sample within ε of the current piece only extends its interval. On a
/// misfit, degrees `d+1, d+2, …` are tried in turn: for degree `k`, `k`
/// points are regenerated from the current piece and a degree-`k` least
/// squares fit over them plus the new sample is accepted if its error at
/// those points is at most `ε / 2^k`. When no degree up to the cap fits, the
/// current piece is persisted and a new one starts at the sample.
///
/// Raw samples are not re-checked after a refit, so reads may exceed ε.
#[derive(Debug, Clone)]
pub struct PolyStore {
    epsilon: Epsilon,
    max_degree: usize,
    pieces: Vec<PolyPiece>,
    current: Option<PolyPiece>,
}

impl PolyStore {
    pub fn new(epsilon: Epsilon) -> Self {
        Self::with_max_degree(epsilon, DEFAULT_MAX_DEGREE)
    }

    pub fn with_max_degree(epsilon: Epsilon, max_degree: usize) -> Self {
        PolyStore {
            epsilon,
            max_degree,
            pieces: Vec::new(),
            current: None,
        }
    }

    /// Persisted pieces followed by the current one.
    pub fn pieces(&self) -> impl Iterator<Item = &PolyPiece> {
        self.pieces.iter().chain(self.current.as_ref())
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len() + usize::from(self.current.is_some())
    }

    fn escalate(&self, current: &PolyPiece, p: Sample) -> Option<PolyPiece> {
        let eps = self.epsilon.value();
        (current.degree() + 1..=self.max_degree).find_map(|degree| {
            let mut points = current.regenerate(degree);
            points.push(p);
            PolyPiece::fit(&points, degree, eps / 2f64.powi(degree as i32))
        })
    }
}

impl Store for PolyStore {
    fn name(&self) -> &'static str {
        "poly"
    }

    fn insert(&mut self, p: Sample) -> Result<()> {
        p.validate()?;
        let Some(current) = self.current.as_mut() else {
            self.current = Some(PolyPiece::constant(p));
            return Ok(());
        };
        if p.t <= current.t_end {
            return Err(Error::NonMonotonicTimestamp {
                previous: current.t_end,
                t: p.t,
            });
        }
        if (current.eval(p.t) - p.x).abs() <= self.epsilon.value() {
            current.t_end = p.t;
            return Ok(());
        }
        let current = self.current.take().unwrap();
        match self.escalate(&current, p) {
            Some(refit) => self.current = Some(refit),
            None => {
                self.pieces.push(current);
                self.current = Some(PolyPiece::constant(p));
            }
        }
        Ok(())
    }

    /// Evaluates the last piece starting at or before `t`; timestamps in a gap
    /// between pieces extend the earlier one.
    fn read(&self, t: f64) -> Result<f64> {
        let first = self.pieces().next().ok_or(Error::EmptyModel)?;
        if t < first.t_start {
            return Err(Error::TimestampBeforeHistory {
                t,
                first: first.t_start,
            });
        }
        let k = self.pieces.partition_point(|p| p.t_start <= t);
        let piece = match &self.current {
            Some(c) if t >= c.t_start => c,
            _ => &self.pieces[k - 1],
        };
        Ok(piece.eval(t))
    }

    /// Coefficients plus five words of bounds and normalization per piece.
    fn footprint_64bit(&self) -> usize {
        self.pieces().map(|p| p.coefficients.len() + 5).sum()
    }

    fn model_starts(&self) -> Vec<f64> {
        self.pieces().map(|p| p.t_start).collect()
    }
}
