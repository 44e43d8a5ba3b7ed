//! CSV formats: univariate streams (`t,x`) and GPS traces (`t,lat,lon`).

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, GeoTrace};
use crate::sample::{check_stream, Sample};

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?;
    if header.iter().eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(Error::parse(
            1,
            format!("expected header `{}`, got `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ))
    }
}

fn records<R: Read, const N: usize>(input: R, header: [&str; N]) -> Result<Vec<[f64; N]>> {
    let mut reader = csv_reader(input);
    check_header(&mut reader, &header)?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::parse(line, e.to_string()))?;
        if record.len() != N {
            return Err(Error::parse(line, format!("expected {N} fields, got {}", record.len())));
        }
        let mut row = [0.0; N];
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(line, format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::parse(line, format!("`{field}` is not finite")));
            }
            row[k] = v;
        }
        out.push(row);
    }
    Ok(out)
}

/// Reads a `t,x` CSV. Timestamps must be strictly increasing.
pub fn read_samples<R: Read>(input: R) -> Result<Vec<Sample>> {
    let samples: Vec<Sample> = records(input, ["t", "x"])?
        .into_iter()
        .map(|[t, x]| Sample::new(t, x))
        .collect();
    check_stream(&samples)?;
    Ok(samples)
}

pub fn write_samples<W: Write>(out: W, samples: &[Sample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x"]).map_err(csv_io)?;
    for s in samples {
        w.write_record([s.t.to_string(), s.x.to_string()]).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `t,lat,lon` CSV into a validated trace.
pub fn read_trace<R: Read>(input: R) -> Result<GeoTrace> {
    let points = records(input, ["t", "lat", "lon"])?
        .into_iter()
        .map(|[t, lat, lon]| GeoPoint::new(t, lat, lon))
        .collect();
    GeoTrace::new(points)
}

pub fn write_trace<W: Write>(out: W, trace: &GeoTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "lat", "lon"]).map_err(csv_io)?;
    for p in trace.points() {
        w.write_record([p.t.to_string(), p.lat.to_string(), p.lon.to_string()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
