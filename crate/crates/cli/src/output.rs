//! Machine-readable outputs: the structured S-matrix text document, its
//! parser (for round-trip checks), and CSV trace rows.
//!
//! All numbers print in scientific notation with a configured digit count
//! and '.' as the decimal separator, so identical configs produce
//! byte-identical files.

use num_complex::Complex64;

use cylwave::scattering::ScatteringMatrix;

use crate::CliError;

pub fn fmt(x: f64, precision: usize) -> String {
    format!("{x:.precision$e}")
}

/// Structured text document for one scattering matrix.
pub fn write_smatrix(s: &ScatteringMatrix, label: &str, precision: usize) -> String {
    let mut out = String::new();
    out.push_str("cylwave-smatrix v1\n");
    out.push_str(&format!("label = {label}\n"));
    out.push_str(&format!("k = {}\n", fmt(s.k, precision)));
    out.push_str(&format!("dim = {}\n", s.dim()));
    out.push_str(&format!("truncation = {}\n", s.truncation));
    out.push_str(&format!(
        "unitarity_residual = {}\n",
        fmt(s.unitarity_residual, precision)
    ));
    match s.condition {
        Some(c) => out.push_str(&format!("condition = {}\n", fmt(c, precision))),
        None => out.push_str("condition = none\n"),
    }
    out.push_str("channels:\n");
    for (i, c) in s.channels.iter().enumerate() {
        out.push_str(&format!(
            "{i} end={} family={} mode={} lambda={}\n",
            c.end + 1,
            c.family,
            c.mode,
            fmt(c.lambda, precision)
        ));
    }
    out.push_str("entries:\n");
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            let e = s.entries[(i, j)];
            out.push_str(&format!(
                "{i} {j} {} {}\n",
                fmt(e.re, precision),
                fmt(e.im, precision)
            ));
        }
    }
    out.push_str("end\n");
    out
}

/// Parsed form of the structured document, for round-trip verification.
#[derive(Debug)]
pub struct ParsedSmatrix {
    pub k: f64,
    pub dim: usize,
    pub truncation: usize,
    pub unitarity_residual: f64,
    pub entries: Vec<Vec<Complex64>>,
}

pub fn parse_smatrix(text: &str) -> Result<ParsedSmatrix, CliError> {
    let bad = |msg: &str| CliError::Config(format!("smatrix parse: {msg}"));
    let mut lines = text.lines();
    if lines.next() != Some("cylwave-smatrix v1") {
        return Err(bad("missing header"));
    }
    let mut k = None;
    let mut dim = None;
    let mut truncation = None;
    let mut unitarity = None;
    for line in lines.by_ref() {
        if line == "channels:" {
            break;
        }
        if let Some((key, value)) = line.split_once('=') {
            let (key, value) = (key.trim(), value.trim());
            match key {
                "k" => k = Some(value.parse().map_err(|_| bad("bad k"))?),
                "dim" => dim = Some(value.parse().map_err(|_| bad("bad dim"))?),
                "truncation" => {
                    truncation = Some(value.parse().map_err(|_| bad("bad truncation"))?)
                }
                "unitarity_residual" => {
                    unitarity = Some(value.parse().map_err(|_| bad("bad residual"))?)
                }
                _ => {}
            }
        }
    }
    let dim: usize = dim.ok_or_else(|| bad("missing dim"))?;
    // skip channel lines
    let mut lines = lines.skip_while(|l| *l != "entries:");
    if lines.next() != Some("entries:") {
        return Err(bad("missing entries section"));
    }
    let mut entries = vec![vec![Complex64::ZERO; dim]; dim];
    for line in lines {
        if line == "end" {
            break;
        }
        let mut it = line.split_whitespace();
        let i: usize = it.next().ok_or_else(|| bad("short entry row"))?.parse().map_err(|_| bad("bad i"))?;
        let j: usize = it.next().ok_or_else(|| bad("short entry row"))?.parse().map_err(|_| bad("bad j"))?;
        let re: f64 = it.next().ok_or_else(|| bad("short entry row"))?.parse().map_err(|_| bad("bad re"))?;
        let im: f64 = it.next().ok_or_else(|| bad("short entry row"))?.parse().map_err(|_| bad("bad im"))?;
        if i >= dim || j >= dim {
            return Err(bad("entry index out of range"));
        }
        entries[i][j] = Complex64::new(re, im);
    }
    Ok(ParsedSmatrix {
        k: k.ok_or_else(|| bad("missing k"))?,
        dim,
        truncation: truncation.unwrap_or(0),
        unitarity_residual: unitarity.unwrap_or(0.0),
        entries,
    })
}

/// Flat CSV trace rows: `k,i,j,re,im` per entry.
pub fn trace_csv_rows(s: &ScatteringMatrix, precision: usize, out: &mut String) {
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            let e = s.entries[(i, j)];
            out.push_str(&format!(
                "{},{i},{j},{},{}\n",
                fmt(s.k, precision),
                fmt(e.re, precision),
                fmt(e.im, precision)
            ));
        }
    }
}
