use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FootprintPoint {
    pub n: usize,
    pub footprint_64bit: usize,
    pub raw_footprint_64bit: usize,
}

/// Samples and seconds covered by one model piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSpan {
    pub samples: usize,
    pub duration: f64,
}

/// Wall-clock figures; the only non-reproducible part of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub n_insert: usize,
    pub n_reads: usize,
    pub repetitions: usize,
    pub insert_iops: f64,
    pub read_iops: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub store: String,
    pub workload: String,
    pub epsilon: f64,
    pub n_inserted: usize,
    pub final_footprint_64bit: usize,
    /// `100 * (1 - footprint / raw footprint)`.
    pub gain_percent: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub footprint_series: Vec<FootprintPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stability: Vec<ModelSpan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl BenchReport {
    pub(crate) fn new(store: &str, workload: &str, epsilon: f64) -> Self {
        BenchReport {
            store: store.to_owned(),
            workload: workload.to_owned(),
            epsilon,
            n_inserted: 0,
            final_footprint_64bit: 0,
            gain_percent: 0.0,
            footprint_series: Vec::new(),
            stability: Vec::new(),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Median samples per model piece.
    pub fn median_samples_per_model(&self) -> Option<usize> {
        let mut v: Vec<usize> = self.stability.iter().map(|s| s.samples).collect();
        v.sort_unstable();
        v.get(v.len().checked_sub(1)? / 2).copied()
    }

    /// `n,footprint_64bit,raw_footprint_64bit`
    pub fn write_footprint_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,footprint_64bit,raw_footprint_64bit")?;
        for p in &self.footprint_series {
            writeln!(out, "{},{},{}", p.n, p.footprint_64bit, p.raw_footprint_64bit)?;
        }
        Ok(())
    }

    /// `model,samples,duration`
    pub fn write_stability_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "model,samples,duration")?;
        for (i, s) in self.stability.iter().enumerate() {
            writeln!(out, "{},{},{}", i, s.samples, s.duration)?;
        }
        Ok(())
    }
}
