//! Deterministic serialization: CSV, PGM heatmaps, run manifest records.
//!
//! Every byte here is a pure function of the numbers: floats print through
//! a fixed 17-significant-digit scientific format, line endings are LF,
//! orderings are fixed. Repeated runs must produce identical files.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use sha2::{Digest, Sha256};

use qwalk2_core::numfmt::f64_repr;
use qwalk2_core::CoWalkAmplitudes;

use crate::error::{io_error, Result};

/// Square matrix over labels -L..L as CSV: empty corner cell, then label
/// row; each data row starts with its label.
pub fn matrix_csv(l_max: i32, m: &DMatrix<f64>) -> String {
    let labels: Vec<String> = (-l_max..=l_max).map(|l| l.to_string()).collect();
    let mut out = String::new();
    out.push(',');
    out.push_str(&labels.join(","));
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for j in 0..m.ncols() {
            out.push(',');
            out.push_str(&f64_repr(m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

/// Real vector over labels -L..L as two-column CSV.
pub fn vector_csv(value_name: &str, l_max: i32, v: &DVector<f64>) -> String {
    let mut out = format!("q,{value_name}\n");
    for (i, l) in (-l_max..=l_max).enumerate() {
        out.push_str(&format!("{l},{}\n", f64_repr(v[i])));
    }
    out
}

/// Complex bond amplitudes as a three-column CSV.
pub fn cowalk_csv(c: &CoWalkAmplitudes) -> String {
    let mut out = String::from("q,re,im\n");
    for (i, q) in (-c.l_max..=c.l_max).enumerate() {
        out.push_str(&format!(
            "{q},{},{}\n",
            f64_repr(c.c[i].re),
            f64_repr(c.c[i].im)
        ));
    }
    out
}

/// Two-column CSV of per-sample scalar traces (deviations, bound mass, ...).
pub fn trace_csv(value_name: &str, samples: &[(f64, f64)]) -> String {
    let mut out = format!("jt,{value_name}\n");
    for &(jt, v) in samples {
        out.push_str(&format!("{},{}\n", f64_repr(jt), f64_repr(v)));
    }
    out
}

/// Binary P5 grayscale heatmap of a non-negative matrix, scaled so the
/// matrix maximum maps to 255. Rows run q = -L..L top to bottom (storage
/// order). Returns the bytes and the maximum used for the scale.
pub fn pgm_bytes(m: &DMatrix<f64>) -> (Vec<u8>, f64) {
    let max = m.iter().cloned().fold(0.0_f64, f64::max);
    let mut out = format!("P5\n{} {}\n255\n", m.ncols(), m.nrows()).into_bytes();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let px = if max > 0.0 {
                (255.0 * m[(i, j)] / max).round() as u8
            } else {
                0
            };
            out.push(px);
        }
    }
    (out, max)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// One line of the `run.jsonl` manifest: what was written where, with a
/// checksum and the scalar metadata a reader needs to interpret the file.
#[derive(Clone, Debug, Serialize)]
pub struct Artifact {
    pub kind: String,
    pub statistics: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jt: Option<f64>,
    pub file: String,
    pub sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
}

impl Artifact {
    pub fn new(kind: &str, statistics: &str, jt: Option<f64>, file: &str, bytes: &[u8]) -> Self {
        Artifact {
            kind: kind.into(),
            statistics: statistics.into(),
            jt,
            file: file.into(),
            sha256: sha256_hex(bytes),
            gamma_max: None,
            p_bound: None,
            max_deviation: None,
        }
    }
}

pub fn manifest_jsonl(artifacts: &[Artifact]) -> String {
    let mut out = String::new();
    for a in artifacts {
        out.push_str(&serde_json::to_string(a).expect("manifest record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io_error(path, e))
}

/// Short, unambiguous time tag for filenames: the shortest decimal that
/// round-trips the f64 (e.g. 4 -> "4", 0.5 -> "0.5").
pub fn jt_tag(jt: f64) -> String {
    format!("{jt}")
}
