//! Run reports, certificate files, CSV rows and number formatting.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use opsysdual::certificate::Certificate;

use crate::{CliError, GlobalArgs, EXIT_CHECK_FAILED, EXIT_OK, EXIT_UNDECIDED};

/// Significant digits of every printed or reported float.
pub const DIGITS: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A check ran and failed.
    Failed,
    Undecided,
}

/// What a command computed, before files are written.
#[derive(Debug)]
pub struct Outcome {
    pub inputs: Value,
    pub outputs: Map<String, Value>,
    pub certificates: Vec<Certificate>,
    pub status: Status,
    pub csv: Vec<CsvRow>,
    pub csv_path: Option<PathBuf>,
    /// Other files the command wrote.
    pub files: Vec<String>,
}

impl Outcome {
    pub fn new(inputs: Value) -> Self {
        Self {
            inputs,
            outputs: Map::new(),
            certificates: Vec::new(),
            status: Status::Ok,
            csv: Vec::new(),
            csv_path: None,
            files: Vec::new(),
        }
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.outputs.insert(key.to_string(), v.into());
    }

    pub fn put_num(&mut self, key: &str, x: f64) {
        self.outputs.insert(key.to_string(), num(x));
    }

    pub fn cert(&mut self, c: Certificate) {
        self.certificates.push(c);
    }

    pub fn undecided(&mut self) {
        if self.status == Status::Ok {
            self.status = Status::Undecided;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the canonical inputs and settings.
    pub inputs_digest: String,
    pub outputs: Value,
    pub certificates: Vec<String>,
    pub files: Vec<String>,
    pub wall_time_s: f64,
    pub level: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub system: String,
    #[serde(rename = "functional-digest")]
    pub functional_digest: String,
    pub dual_norm: String,
    pub d_norm: String,
    pub ratio: String,
    pub level: usize,
    pub method: String,
    pub residual: String,
}

/// Rounds to [`DIGITS`] significant digits.
pub fn sig(x: f64) -> f64 {
    if x.is_finite() {
        format!("{:.*e}", DIGITS - 1, x)
            .parse()
            .expect("formatted float parses")
    } else {
        x
    }
}

/// A rounded JSON number, or `"inf"`, `"-inf"`, `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(sig(x))
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Text form: nine decimals at moderate magnitudes, otherwise exponent form.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let a = x.abs();
    if a == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{:.*}", DIGITS, sig(x))
    } else {
        format!("{:.*e}", DIGITS - 1, x)
    }
}

fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, v)| (k.clone(), round_value(v))).collect()),
        other => other.clone(),
    }
}

pub fn digest(command: &str, g: &GlobalArgs, inputs: &Value) -> String {
    let canonical = json!({
        "command": command,
        "inputs": inputs,
        "level": g.level,
        "tol": g.tol,
        "restarts": g.restarts,
        "seed": g.seed,
    });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

fn write_certificates(dir: &Path, stem: &str, certs: &[Certificate]) -> Result<Vec<String>, CliError> {
    if certs.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", dir.display())))?;
    let mut paths = Vec::with_capacity(certs.len());
    for (i, c) in certs.iter().enumerate() {
        let path = dir.join(format!("{stem}-{i:02}-{}.json", c.kind.as_str()));
        c.write(&path)?;
        paths.push(path.display().to_string());
    }
    Ok(paths)
}

pub fn append_csv(path: &Path, rows: &[CsvRow]) -> Result<(), CliError> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Invalid(format!("cannot open {}: {e}", path.display())))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Invalid(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| CliError::Invalid(format!("csv: {e}")))
}

/// Writes certificates and CSV rows and assembles the report.
pub fn finish(command: &str, g: &GlobalArgs, outcome: Outcome, wall: f64) -> Result<RunReport, CliError> {
    let inputs_digest = digest(command, g, &outcome.inputs);
    let stem = format!("{command}-{}", &inputs_digest[..12]);
    let certificates = write_certificates(&g.cert_dir, &stem, &outcome.certificates)?;
    let mut files = outcome.files;
    if let Some(p) = &outcome.csv_path {
        append_csv(p, &outcome.csv)?;
        files.push(p.display().to_string());
    }
    Ok(RunReport {
        command: command.to_string(),
        inputs_digest,
        outputs: round_value(&Value::Object(outcome.outputs)),
        certificates,
        files,
        wall_time_s: wall,
        level: g.level,
        tol: g.tol,
        restarts: g.restarts,
        seed: g.seed,
        exit_code: match outcome.status {
            Status::Ok => EXIT_OK,
            Status::Failed => EXIT_CHECK_FAILED,
            Status::Undecided => EXIT_UNDECIDED,
        },
    })
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_num(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| x.is_object()) && !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(text_value).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        other => out.push((prefix.to_string(), text_value(other))),
    }
}

pub fn render_text(r: &RunReport) -> String {
    let mut lines = vec![("command".to_string(), r.command.clone())];
    flatten("", &r.outputs, &mut lines);
    for c in &r.certificates {
        lines.push(("certificate".into(), c.clone()));
    }
    for f in &r.files {
        lines.push(("file".into(), f.clone()));
    }
    lines.push(("inputs".into(), r.inputs_digest[..16].to_string()));
    lines.push(("wall_time".into(), format!("{:.3} s", r.wall_time_s)));
    let mut s = String::new();
    for (k, v) in lines {
        s.push_str(&format!("{k}: {v}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(sig(1.0 / 3.0), 0.333333333);
        assert_eq!(fmt_num(1.0), "1.000000000");
        assert_eq!(fmt_num(12345.678912345), "12345.678900000");
        assert_eq!(fmt_num(2.5e-7), "2.50000000e-7");
        assert_eq!(num(f64::INFINITY), json!("inf"));
    }

    #[test]
    fn nested_outputs_flatten() {
        let mut out = Vec::new();
        flatten("", &json!({"a": {"b": 0.5}, "c": [1, 2], "d": [{"e": "x"}]}), &mut out);
        let keys: Vec<&str> = out.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["a.b", "c", "d[0].e"]);
    }
}
