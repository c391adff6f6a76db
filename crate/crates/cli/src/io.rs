use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

/// Command failure mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Invalid or infeasible arguments (exit 2).
    Usage(String),
    /// Malformed input data (exit 3).
    Data(String),
    /// Numerical or I/O failure (exit 1).
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Data(_) => 3,
            Self::Internal(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Data(m) | Self::Internal(m) => f.write_str(m),
        }
    }
}

impl From<gic_core::Error> for Failure {
    fn from(e: gic_core::Error) -> Self {
        use gic_core::Error::*;
        match e {
            Data(_) => Self::Data(e.to_string()),
            Numeric(_) | Convergence(_) => Self::Internal(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Internal(e.to_string())
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub timestamp: String,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, params: impl Serialize, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            params: to_value(params),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            warnings: Vec::new(),
        }
    }
}

/// Serializes into a key-sorted JSON tree; non-finite floats become null.
pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

/// Prints `result` with a `manifest` member as pretty JSON on stdout.
pub fn emit_json(result: impl Serialize, manifest: &Manifest) -> Outcome {
    let mut obj = match to_value(result) {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("manifest".into(), to_value(manifest));
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &Value::Object(obj))
        .map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Writes a standalone manifest to `path`, or to stderr when `None`.
pub fn write_manifest(manifest: &Manifest, path: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(&to_value(manifest))
        .map_err(|e| Failure::Internal(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => eprintln!("{text}"),
    }
    Ok(())
}

pub fn sidecar(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn open(path: &Path) -> Outcome<csv::Reader<File>> {
    let f = File::open(path)
        .map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(f))
}

fn field(rec: &csv::StringRecord, j: usize, line: u64) -> Outcome<f64> {
    let raw = &rec[j];
    let v: f64 = raw.parse().map_err(|_| {
        Failure::Data(format!(
            "line {line}, column {}: `{raw}` is not a number",
            j + 1
        ))
    })?;
    if !v.is_finite() {
        return Err(Failure::Data(format!(
            "line {line}, column {}: non-finite value",
            j + 1
        )));
    }
    Ok(v)
}

fn records(reader: &mut csv::Reader<File>) -> Outcome<Vec<(u64, csv::StringRecord)>> {
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| Failure::Data(format!("malformed CSV: {e}")))?;
            let line = r.position().map_or(0, |p| p.line());
            Ok((line, r))
        })
        .collect()
}

/// Array snapshots: returns (p, n, samples) with samples stored per sensor.
pub fn read_snapshots(path: &Path) -> Outcome<(usize, usize, Vec<Complex64>)> {
    let mut rd = open(path)?;
    let header = rd
        .headers()
        .map_err(|e| Failure::Data(format!("malformed CSV header: {e}")))?
        .clone();
    if header.is_empty() || header.len() % 2 != 0 {
        return Err(Failure::Data(format!(
            "header has {} columns; expected re_0,im_0,… pairs",
            header.len()
        )));
    }
    let p = header.len() / 2;
    for i in 0..p {
        if header[2 * i] != format!("re_{i}") || header[2 * i + 1] != format!("im_{i}") {
            return Err(Failure::Data(format!(
                "header columns {} and {} must be re_{i},im_{i}, found {},{}",
                2 * i + 1,
                2 * i + 2,
                &header[2 * i],
                &header[2 * i + 1]
            )));
        }
    }
    let rows = records(&mut rd)?;
    let n = rows.len();
    let mut samples = vec![Complex64::new(0.0, 0.0); p * n];
    for (t, (line, rec)) in rows.iter().enumerate() {
        for i in 0..p {
            samples[i * n + t] =
                Complex64::new(field(rec, 2 * i, *line)?, field(rec, 2 * i + 1, *line)?);
        }
    }
    Ok((p, n, samples))
}

/// Single-channel series with header re,im.
pub fn read_series(path: &Path) -> Outcome<Vec<Complex64>> {
    let mut rd = open(path)?;
    let header = rd
        .headers()
        .map_err(|e| Failure::Data(format!("malformed CSV header: {e}")))?
        .clone();
    if header.len() != 2 || &header[0] != "re" || &header[1] != "im" {
        return Err(Failure::Data("header must be exactly re,im".into()));
    }
    records(&mut rd)?
        .iter()
        .map(|(line, rec)| Ok(Complex64::new(field(rec, 0, *line)?, field(rec, 1, *line)?)))
        .collect()
}
