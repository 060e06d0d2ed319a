//! Matrix files, CSV reports and atomic output.
//!
//! Matrices use `{"dim": n, "entries": [[re, im], ...], "label": "..."}`
//! with entries in row-major order. CSV reports may start with
//! `#key=value` metadata lines.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::BoundCurve;
use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, C64};
use crate::recursion::RecursionState;
use crate::resolvent::ResolventProfile;
use crate::split::SplitRow;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixFile {
    pub fn from_operator(a: &OperatorMatrix) -> Self {
        Self {
            dim: a.dim(),
            entries: a.entries().iter().map(|z| [z.re, z.im]).collect(),
            label: a.label().map(str::to_string),
        }
    }

    pub fn into_operator(self) -> Result<OperatorMatrix> {
        let entries = self.entries.iter().map(|e| C64::new(e[0], e[1])).collect();
        let a = OperatorMatrix::new(self.dim, entries)?;
        Ok(match self.label {
            Some(l) => a.with_label(l),
            None => a,
        })
    }
}

pub fn matrix_from_json(text: &str) -> Result<OperatorMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    file.into_operator()
}

pub fn matrix_to_json(a: &OperatorMatrix) -> String {
    serde_json::to_string(&MatrixFile::from_operator(a)).expect("matrix serializes")
}

pub fn read_matrix(path: &Path) -> Result<OperatorMatrix> {
    matrix_from_json(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, a: &OperatorMatrix) -> Result<()> {
    atomic_write(path, matrix_to_json(a).as_bytes())
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Structural(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp.{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finish(w: csv::Writer<Vec<u8>>, mut head: String) -> Result<String> {
    let body = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    head.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
    Ok(head)
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// `omega, r_lo, r_hi, argmin_y, window_Y`.
pub fn profile_csv(p: &ResolventProfile) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["omega", "r_lo", "r_hi", "argmin_y", "window_Y"]).map_err(csv_error)?;
    for k in 0..p.len() {
        w.write_record([
            num(p.omega_grid[k]),
            num(p.r_lo[k]),
            num(p.r_hi[k]),
            num(p.argmin_y[k]),
            num(p.window_y[k]),
        ])
        .map_err(csv_error)?;
    }
    finish(w, String::new())
}

/// `t, bound, method` after `#key=value` parameter lines.
pub fn curve_csv(c: &BoundCurve) -> Result<String> {
    let mut head = format!("#method={}\n", c.method);
    for (k, v) in &c.params {
        head.push_str(&format!("#{k}={v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "bound", "method"]).map_err(csv_error)?;
    for (t, v) in c.t.iter().zip(&c.values) {
        w.write_record([num(*t), num(*v), c.method.tag().to_string()]).map_err(csv_error)?;
    }
    finish(w, head)
}

/// Reads a curve written by [`curve_csv`].
pub fn curve_from_csv(text: &str) -> Result<BoundCurve> {
    let mut params = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix('#') {
            Some(kv) => {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Structural(format!("bad metadata line '{line}'")))?;
                params.push((k.to_string(), v.to_string()));
            }
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let mut t = Vec::new();
    let mut values = Vec::new();
    let mut method = None;
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Structural(format!("bad number in row {rec:?}")))
        };
        t.push(parse(0)?);
        values.push(parse(1)?);
        method = rec.get(2).map(str::to_string);
    }
    let method = method.ok_or_else(|| Error::Structural("curve file has no rows".into()))?;
    let method = serde_json::from_value(serde_json::Value::String(method))?;
    let mut c = BoundCurve::new(t, values, method)?;
    for (k, v) in params {
        if k != "method" {
            c.params.insert(k, v);
        }
    }
    Ok(c)
}

/// `t, R_true, R_bound, leading_term_norm`.
pub fn split_csv(rows: &[SplitRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "R_true", "R_bound", "leading_term_norm"]).map_err(csv_error)?;
    for r in rows {
        w.write_record([num(r.t), num(r.r_true), num(r.r_bound), num(r.leading_term_norm)])
            .map_err(csv_error)?;
    }
    finish(w, String::new())
}

/// Decimal rendering of `e^x` that stays exact in exponent when `e^x`
/// overflows or underflows a double.
pub fn format_exp(x: f64) -> String {
    let v = x.exp();
    if v.is_normal() {
        return num(v);
    }
    if x.is_nan() || x == f64::INFINITY || x == f64::NEG_INFINITY {
        return num(v);
    }
    let l10 = x / std::f64::consts::LN_10;
    let mut e = l10.floor();
    let mut mantissa = 10f64.powf(l10 - e);
    if format!("{mantissa:.15}").starts_with("10") {
        mantissa /= 10.0;
        e += 1.0;
    }
    format!("{mantissa:.15}e{}", e as i64)
}

/// `t, f_tilde, m_tilde, dyadic_block_index`, every `stride`-th node.
pub fn recursion_csv(s: &RecursionState, stride: usize) -> Result<String> {
    let stride = stride.max(1);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "f_tilde", "m_tilde", "dyadic_block_index"]).map_err(csv_error)?;
    let last = s.len() - 1;
    let mut j = 0;
    loop {
        w.write_record([
            num(s.t(j)),
            format_exp(s.log_f[j]),
            format_exp(s.log_m(j)),
            s.block_index(j).to_string(),
        ])
        .map_err(csv_error)?;
        if j == last {
            break;
        }
        j = (j + stride).min(last);
    }
    let head = format!(
        "#T={}\n#omega={}\n#r={}\n#h={}\n#k0={}\n",
        s.horizon, s.omega, s.r_omega, s.h, s.k0
    );
    finish(w, head)
}
