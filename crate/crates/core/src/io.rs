//! CSV and JSON formats shared by the command line tool and the browser demo.
//!
//! Floats are written with Rust's `Display`, which is the shortest decimal
//! string that parses back to the same `f64`.

use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::ProcessSpec;
use crate::sampler::{Method, SamplePath, SamplerDiagnostics, TimeGrid};

/// Version stamped into every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A JSON document carrying the schema version next to its fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Self { schema: SCHEMA_VERSION, body }
    }
}

/// Serialises with the schema field; output ends with a newline.
pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Versioned::new(body))
        .map_err(|e| Error::Format(format!("cannot serialise report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Path CSV: header `t,value`, one row per grid point.
pub fn path_csv(times: &[f64], values: &[f64]) -> String {
    let mut out = String::with_capacity(24 * values.len() + 8);
    out.push_str("t,value\n");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(out, "{t},{v}");
    }
    out
}

/// Parses a path CSV. Errors name the offending line (header is line 1).
pub fn read_path_csv<R: Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("line 1: {e}")))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Format("empty file".into()));
    }
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != ["t", "value"] {
        return Err(Error::Format(format!("line 1: expected header `t,value`, found `{}`", names.join(","))));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Format(format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::Format(format!("line {line}: expected 2 fields, found {}", record.len())));
        }
        let parse = |i: usize, name: &str| -> Result<f64> {
            let raw = record[i].trim();
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Format(format!("line {line}: {name} `{raw}` is not a finite number"))),
            }
        };
        let t = parse(0, "t")?;
        let v = parse(1, "value")?;
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(Error::Format(format!("line {line}: times must increase, {t} follows {prev}")));
            }
        }
        times.push(t);
        values.push(v);
    }
    if times.is_empty() {
        return Err(Error::Format("no data rows".into()));
    }
    Ok((times, values))
}

/// Covariance CSV: first row and column hold the times.
pub fn covariance_csv(times: &[f64], entries: impl Fn(usize, usize) -> f64) -> String {
    let mut out = String::new();
    out.push('t');
    for t in times {
        let _ = write!(out, ",{t}");
    }
    out.push('\n');
    for (i, t) in times.iter().enumerate() {
        let _ = write!(out, "{t}");
        for j in 0..times.len() {
            let _ = write!(out, ",{}", entries(i, j));
        }
        out.push('\n');
    }
    out
}

/// One simulated replicate in the metadata sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub file: String,
    pub seed: u64,
}

/// Sidecar describing a batch of simulated paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationMetadata {
    pub spec: ProcessSpec,
    pub grid: TimeGrid,
    pub seed: u64,
    pub method: Method,
    pub diagnostics: SamplerDiagnostics,
    pub replicates: Vec<ReplicateRecord>,
}

impl SimulationMetadata {
    pub fn single(path: &SamplePath, file: &str) -> Self {
        Self {
            spec: path.spec.clone(),
            grid: path.grid,
            seed: path.seed,
            method: path.method,
            diagnostics: path.diagnostics.clone(),
            replicates: vec![ReplicateRecord { file: file.into(), seed: path.seed }],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_round_trip_is_exact() {
        let t = [0.0, 0.1, 0.2];
        let v = [1.0 / 3.0, -2.5e-17, f64::MAX];
        let (t2, v2) = read_path_csv(path_csv(&t, &v).as_bytes()).unwrap();
        assert_eq!(t2, t);
        assert_eq!(v2, v);
    }

    #[test]
    fn malformed_rows_are_named() {
        let e = read_path_csv("t,value\n0,1\n0.1,abc\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = read_path_csv("t,value\n0,1\n0.1\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = read_path_csv("t,value\n0,1\n0,2\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = read_path_csv("time,x\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        assert!(matches!(read_path_csv("".as_bytes()), Err(Error::Format(_))));
        assert!(matches!(read_path_csv("t,value\n".as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn covariance_layout() {
        let s = covariance_csv(&[0.5, 1.0], |i, j| (i * 2 + j) as f64);
        assert_eq!(s, "t,0.5,1\n0.5,0,1\n1,2,3\n");
    }

    #[test]
    fn json_carries_schema() {
        let s = to_json(&ReplicateRecord { file: "a.csv".into(), seed: 3 }).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["seed"], 3);
    }
}
