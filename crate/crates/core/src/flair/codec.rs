//! Line-oriented text persistence.
//!
//! ```text
//! # flair-model v1 <count_inserted>
//! <t> <x>                                  one line per breakpoint
//! ## <slope> <slope_min> <slope_max> <t_last> <x_last>
//! ```
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! yields bit-identical state. Unbounded cone sides are written as the
//! tokens `inf` / `-inf`. An empty model is the header line alone.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::flair::FlairModel;
use crate::sample::{Epsilon, Sample};

const MAGIC: &str = "# flair-model v1";

pub fn serialize(model: &FlairModel) -> String {
    let mut out = String::with_capacity(32 * (model.history().len() + 2));
    writeln!(out, "{MAGIC} {}", model.count_inserted()).unwrap();
    if let Some(last) = model.last() {
        for h in model.history() {
            writeln!(out, "{} {}", h.t, h.x).unwrap();
        }
        writeln!(
            out,
            "## {} {} {} {} {}",
            model.slope_current(),
            bound_token(model.slope_min()),
            bound_token(model.slope_max()),
            last.t,
            last.x
        )
        .unwrap();
    }
    out
}

fn bound_token(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_owned()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        v.to_string()
    }
}

fn parse_finite(token: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{token}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::parse(line, format!("{what} must be finite, got `{token}`")))
    }
}

fn parse_bound(token: &str, line: usize, what: &str) -> Result<f64> {
    match token {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => parse_finite(token, line, what),
    }
}

pub fn deserialize(input: &str, epsilon: Epsilon) -> Result<FlairModel> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let count_inserted: u64 = header
        .strip_prefix(MAGIC)
        .map(str::trim)
        .ok_or_else(|| Error::parse(1, format!("expected `{MAGIC} <count>` header")))?
        .parse()
        .map_err(|_| Error::parse(1, "bad sample count in header"))?;

    let mut history: Vec<Sample> = Vec::new();
    for (line_no, line) in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("## ") {
            let fields: Vec<&str> = rest.split(' ').collect();
            if fields.len() != 5 {
                return Err(Error::parse(line_no, "trailer needs 5 fields"));
            }
            let slope = parse_finite(fields[0], line_no, "slope")?;
            let slope_min = parse_bound(fields[1], line_no, "slope_min")?;
            let slope_max = parse_bound(fields[2], line_no, "slope_max")?;
            let last = Sample::new(
                parse_finite(fields[3], line_no, "t_last")?,
                parse_finite(fields[4], line_no, "x_last")?,
            );
            if history.is_empty() {
                return Err(Error::parse(line_no, "trailer without breakpoints"));
            }
            if last.t < history.last().unwrap().t {
                return Err(Error::parse(line_no, "last sample precedes history"));
            }
            if let Some((extra, _)) = lines.find(|(_, l)| !l.is_empty()) {
                return Err(Error::parse(extra, "data after trailer"));
            }
            return Ok(FlairModel::from_parts(
                history,
                slope,
                slope_min,
                slope_max,
                Some(last),
                epsilon,
                count_inserted,
            ));
        }
        let mut fields = line.split(' ');
        let (Some(t), Some(x), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(line_no, "expected `t x` record"));
        };
        let s = Sample::new(
            parse_finite(t, line_no, "t")?,
            parse_finite(x, line_no, "x")?,
        );
        if let Some(prev) = history.last() {
            if s.t <= prev.t {
                return Err(Error::parse(line_no, "breakpoint timestamps not increasing"));
            }
        }
        history.push(s);
    }

    if history.is_empty() {
        if count_inserted != 0 {
            return Err(Error::parse(1, "header counts samples but none follow"));
        }
        Ok(FlairModel::new(epsilon))
    } else {
        Err(Error::parse(
            input.lines().count() + 1,
            "truncated file: missing trailer",
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn empty_model_is_header_only() {
        let m = FlairModel::new(eps(0.01));
        let text = serialize(&m);
        assert_eq!(text, "# flair-model v1 0\n");
        let back = deserialize(&text, eps(0.01)).unwrap();
        assert!(back.bit_identical(&m));
    }

    #[test]
    fn break_state_round_trips() {
        let mut m = FlairModel::new(eps(1.0));
        m.extend([(0.0, 0.0), (1.0, 0.0), (2.0, 10.0)].map(Sample::from))
            .unwrap();
        let text = serialize(&m);
        assert_eq!(text, "# flair-model v1 3\n0 0\n1 0\n## 10 9 11 2 10\n");
        assert!(deserialize(&text, eps(1.0)).unwrap().bit_identical(&m));
    }

    #[test]
    fn unbounded_cone_uses_tokens() {
        let mut m = FlairModel::new(eps(1.0));
        m.insert(Sample::new(0.5, -0.0)).unwrap();
        let text = serialize(&m);
        assert!(text.ends_with("## 0 -inf inf 0.5 -0\n"), "{text}");
        assert!(deserialize(&text, eps(1.0)).unwrap().bit_identical(&m));
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let text = "# flair-model v1 3\n0 0\n1 0\n";
        assert!(matches!(
            deserialize(text, eps(1.0)),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            deserialize("# flair-model v1 3\n0 0\n1", eps(1.0)),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(deserialize("", eps(1.0)), Err(Error::Parse { .. })));
        assert!(matches!(
            deserialize("hello\n", eps(1.0)),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            deserialize("# flair-model v1 1\n0 nan\n## 0 -inf inf 0 0\n", eps(1.0)),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            xs in prop::collection::vec(-1e6f64..1e6, 0..200),
            e in 1e-6f64..10.0,
        ) {
            let mut m = FlairModel::new(eps(e));
            m.extend(xs.iter().enumerate().map(|(i, &x)| Sample::new(i as f64 * 0.37, x))).unwrap();
            let back = deserialize(&serialize(&m), eps(e)).unwrap();
            prop_assert!(back.bit_identical(&m));
        }
    }
}
