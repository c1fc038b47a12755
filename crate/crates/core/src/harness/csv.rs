use std::io::Write;

use super::{Method, SweepRecord};
use crate::error::{JiveError, Result};

pub const CSV_HEADER: &str = "axis,axis_value,method,mean_error,std_error,trials,measured_theta_mean,wall_ms,status";

/// Writes records as CSV with 17 significant digits for every float.
pub fn write_csv<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{:.16e},{},{:.16e},{:.16e},{},{:.16e},{:.16e},{}",
            r.axis,
            r.axis_value,
            r.method,
            r.mean_error,
            r.std_error,
            r.trials,
            r.measured_theta_mean,
            r.wall_ms,
            r.status
        )?;
    }
    Ok(())
}

fn field<T: std::str::FromStr>(raw: &str, name: &str, line: usize) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| JiveError::Parse(format!("line {line}: bad {name} `{raw}`")))
}

/// Reads CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(JiveError::Parse(format!("expected header `{CSV_HEADER}`"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let no = i + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(JiveError::Parse(format!(
                "line {no}: expected 9 fields, got {}",
                f.len()
            )));
        }
        out.push(SweepRecord {
            axis: f[0].trim().parse()?,
            axis_value: field(f[1], "axis_value", no)?,
            method: f[2].trim().parse()?,
            mean_error: field(f[3], "mean_error", no)?,
            std_error: field(f[4], "std_error", no)?,
            trials: field(f[5], "trials", no)?,
            measured_theta_mean: field(f[6], "measured_theta_mean", no)?,
            wall_ms: field(f[7], "wall_ms", no)?,
            status: f[8].trim().parse()?,
        });
    }
    Ok(out)
}

/// Gnuplot-style table: the axis value followed by a `mean std` column pair
/// per method. Missing cells are written as `nan`.
pub fn write_plot_data<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let mut values: Vec<f64> = records.iter().map(|r| r.axis_value).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let axis = records.first().map(|r| r.axis.to_string()).unwrap_or_default();
    write!(out, "# {axis}")?;
    for m in &methods {
        write!(out, " {m}_mean {m}_std")?;
    }
    writeln!(out)?;
    for v in values {
        write!(out, "{v:.16e}")?;
        for m in &methods {
            match records.iter().find(|r| r.axis_value == v && r.method == *m) {
                Some(r) => write!(out, " {:.16e} {:.16e}", r.mean_error, r.std_error)?,
                None => write!(out, " nan nan")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
