//! Plain-text file formats.
//!
//! Matrices: the first line is `rows cols`, followed by `rows` lines of `cols`
//! space-separated floats written with 17 significant digits, which
//! round-trips every `f64` exactly.
//!
//! Metadata: one `key=value` per line, in a fixed key order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{JiveError, Result};
use crate::matrixkit::Matrix;
use crate::model::{GroundTruth, JiveConfig};

pub fn format_matrix(m: &Matrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| JiveError::Parse("empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| JiveError::Parse(format!("bad matrix header `{header}`")))
        })
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(JiveError::Parse(format!(
            "matrix header must be `rows cols`, got `{header}`"
        )));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| JiveError::Parse(format!("expected {rows} rows, found {i}")))?;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| JiveError::Parse(format!("row {i}: bad number `{tok}`")))?,
            );
        }
        if data.len() - before != cols {
            return Err(JiveError::Parse(format!(
                "row {i} has {} entries, expected {cols}",
                data.len() - before
            )));
        }
    }
    if lines.next().is_some() {
        return Err(JiveError::Parse(format!("more than {rows} rows")));
    }
    Matrix::new(rows, cols, data)
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    std::fs::write(path, format_matrix(m)).map_err(|e| JiveError::Io(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path).map_err(|e| JiveError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        JiveError::Parse(msg) => JiveError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// `key=value` lines describing a generated instance.
pub fn format_meta(config: &JiveConfig, truth: &GroundTruth) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "measured_theta={:.16e}", truth.measured_theta);
    let _ = writeln!(s, "sigma_min={:.16e}", truth.sigma_min);
    let _ = writeln!(s, "sigma_max={:.16e}", truth.sigma_max);
    let _ = writeln!(s, "kappa={:.16e}", truth.kappa);
    let _ = writeln!(s, "identifiability_violated={}", truth.identifiability_violated);
    let _ = writeln!(s, "n={}", config.n);
    let _ = writeln!(s, "d={}", config.d);
    let _ = writeln!(s, "K={}", config.num_matrices);
    let _ = writeln!(s, "r={}", config.r);
    let _ = writeln!(s, "r_k={}", config.r_k);
    let _ = writeln!(s, "theta={:.16e}", config.theta);
    let _ = writeln!(s, "sigma={:.16e}", config.sigma);
    let _ = writeln!(s, "gamma={:.16e}", config.gamma);
    let _ = writeln!(s, "misalign_scheme={}", config.misalign_scheme);
    let _ = writeln!(s, "loading_scheme={}", config.loading_scheme);
    let _ = writeln!(s, "seed={}", config.seed);
    s
}

pub fn parse_meta(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| JiveError::Parse(format!("meta line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Rebuilds the configuration stored in a metadata map.
pub fn config_from_meta(meta: &BTreeMap<String, String>) -> Result<JiveConfig> {
    fn get<T: std::str::FromStr>(meta: &BTreeMap<String, String>, key: &str) -> Result<T> {
        let raw = meta
            .get(key)
            .ok_or_else(|| JiveError::Parse(format!("meta is missing `{key}`")))?;
        raw.parse()
            .map_err(|_| JiveError::Parse(format!("meta `{key}` has bad value `{raw}`")))
    }
    Ok(JiveConfig {
        n: get(meta, "n")?,
        d: get(meta, "d")?,
        num_matrices: get(meta, "K")?,
        r: get(meta, "r")?,
        r_k: get(meta, "r_k")?,
        theta: get(meta, "theta")?,
        sigma: get(meta, "sigma")?,
        gamma: get(meta, "gamma")?,
        misalign_scheme: meta
            .get("misalign_scheme")
            .ok_or_else(|| JiveError::Parse("meta is missing `misalign_scheme`".into()))?
            .parse()?,
        loading_scheme: meta
            .get("loading_scheme")
            .ok_or_else(|| JiveError::Parse("meta is missing `loading_scheme`".into()))?
            .parse()?,
        seed: get(meta, "seed")?,
    })
}
