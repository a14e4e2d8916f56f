//! Plain-text raw value files.
//!
//! ```text
//! # optional comment lines
//! d 2
//! L 4.0
//! N 16
//! 0.0 0.125 ...        (N^d values, row-major, last axis fastest)
//! ```
//!
//! The three header keys must appear once each, in any order, before the
//! first value. Values are whitespace separated and may span any number of
//! lines.

use std::fmt::Write as _;

use super::{Domain, SampledFunction};
use crate::error::{Error, Result};

pub fn parse_raw_values(text: &str) -> Result<SampledFunction> {
    let mut d: Option<usize> = None;
    let mut l: Option<f64> = None;
    let mut n: Option<usize> = None;
    let mut values: Vec<f64> = Vec::new();
    let mut domain: Option<Domain> = None;
    let mut last_line = 0;

    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        if domain.is_none() {
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let val = parts.next().ok_or_else(|| perr(format!("missing value for `{key}`")))?;
            if parts.next().is_some() {
                return Err(perr("expected `key value`".into()));
            }
            match key {
                "d" if d.is_none() => d = Some(val.parse().map_err(|_| perr(format!("bad dimension `{val}`")))?),
                "L" if l.is_none() => l = Some(val.parse().map_err(|_| perr(format!("bad half-width `{val}`")))?),
                "N" if n.is_none() => n = Some(val.parse().map_err(|_| perr(format!("bad cell count `{val}`")))?),
                "d" | "L" | "N" => return Err(perr(format!("duplicate header key `{key}`"))),
                _ => return Err(perr(format!("unknown header key `{key}`"))),
            }
            if let (Some(d), Some(l), Some(n)) = (d, l, n) {
                domain = Some(Domain::new(d, l, n).map_err(|e| perr(e.to_string()))?);
            }
            continue;
        }
        let expected = domain.as_ref().map_or(0, Domain::len);
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| perr(format!("bad value `{tok}`")))?;
            if !v.is_finite() {
                return Err(perr(format!("non-finite value `{tok}`")));
            }
            if values.len() == expected {
                return Err(perr(format!("more than {expected} values")));
            }
            values.push(v);
        }
    }

    let domain = domain.ok_or(Error::Parse {
        line: last_line,
        message: "incomplete header: need `d`, `L` and `N`".into(),
    })?;
    if values.len() != domain.len() {
        return Err(Error::Parse {
            line: last_line,
            message: format!("expected {} values, found {}", domain.len(), values.len()),
        });
    }
    SampledFunction::from_values(domain, values)
}

/// Serializes in the format read by [`parse_raw_values`]; round-trips exactly.
pub fn write_raw_values(f: &SampledFunction) -> String {
    let dom = f.domain();
    let mut s = format!("d {}\nL {:e}\nN {}\n", dom.dim(), dom.half_width(), dom.cells());
    for row in f.values().chunks(dom.cells()) {
        let mut first = true;
        for v in row {
            if !first {
                s.push(' ');
            }
            first = false;
            let _ = write!(s, "{v:e}");
        }
        s.push('\n');
    }
    s
}
