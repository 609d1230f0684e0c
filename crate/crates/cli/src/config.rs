//! Flat `section.key = value` run configuration.
//!
//! The format is line oriented: one assignment per line, `#` starts a
//! comment, whitespace is free. Unknown keys are rejected with the line
//! number so typos surface immediately.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use cylwave::cross_section::BoundaryCondition;

use crate::CliError;

#[derive(Debug, Clone)]
pub enum GeometryConfig {
    Rectangle { a: f64, b: f64 },
    Disc { radius: f64 },
    Mesh { path: PathBuf },
    Straight { a: f64, b: f64, length: f64 },
    Step { a1: f64, a2: f64, offset: f64, depth: f64 },
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub bcs: Vec<BoundaryCondition>,
    pub cutoff: f64,
    /// FEM mesh size; 0 selects the analytic backend.
    pub h: f64,
    pub truncation: usize,
    pub quadrature: usize,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub k_start: f64,
    pub k_end: f64,
    pub samples: usize,
    pub skip_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<PathBuf>,
    pub precision: usize,
}

#[derive(Debug, Clone)]
pub struct SourceConfig {
    pub mode: usize,
    pub window_t0: f64,
    pub window_t1: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub solve: SolveConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
    pub source: SourceConfig,
}

struct Raw {
    values: HashMap<String, (usize, String)>,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.values.get(key)
    }

    fn f64(&self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        match self.get(key) {
            None => default.ok_or_else(|| {
                CliError::Config(format!("missing required key '{key}'"))
            }),
            Some((line, v)) => v.parse().map_err(|_| {
                CliError::Config(format!("line {line}: '{key}' expects a number, got '{v}'"))
            }),
        }
    }

    fn usize(&self, key: &str, default: Option<usize>) -> Result<usize, CliError> {
        match self.get(key) {
            None => default.ok_or_else(|| {
                CliError::Config(format!("missing required key '{key}'"))
            }),
            Some((line, v)) => v.parse().map_err(|_| {
                CliError::Config(format!("line {line}: '{key}' expects an integer, got '{v}'"))
            }),
        }
    }

    fn string(&self, key: &str, default: Option<&str>) -> Result<String, CliError> {
        match self.get(key) {
            None => default.map(str::to_owned).ok_or_else(|| {
                CliError::Config(format!("missing required key '{key}'"))
            }),
            Some((_, v)) => Ok(v.clone()),
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "geometry.kind",
    "geometry.a",
    "geometry.b",
    "geometry.radius",
    "geometry.mesh",
    "geometry.length",
    "geometry.a1",
    "geometry.a2",
    "geometry.offset",
    "geometry.depth",
    "solve.bc",
    "solve.cutoff",
    "solve.h",
    "solve.truncation",
    "solve.quadrature",
    "sweep.k_start",
    "sweep.k_end",
    "sweep.samples",
    "sweep.skip_radius",
    "output.format",
    "output.path",
    "output.precision",
    "source.mode",
    "source.window_t0",
    "source.window_t1",
    "source.amplitude_re",
    "source.amplitude_im",
];

pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let mut values = HashMap::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "line {}: expected 'section.key = value', got '{line}'",
                lineno + 1
            ))
        })?;
        let key = key.trim().to_owned();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        values.insert(key, (lineno + 1, value.trim().to_owned()));
    }
    let raw = Raw { values };

    let kind = raw.string("geometry.kind", None)?;
    let geometry = match kind.as_str() {
        "rectangle" => GeometryConfig::Rectangle {
            a: raw.f64("geometry.a", None)?,
            b: raw.f64("geometry.b", None)?,
        },
        "disc" => GeometryConfig::Disc { radius: raw.f64("geometry.radius", None)? },
        "mesh" => GeometryConfig::Mesh {
            path: base_dir.join(raw.string("geometry.mesh", None)?),
        },
        "straight" => GeometryConfig::Straight {
            a: raw.f64("geometry.a", None)?,
            b: raw.f64("geometry.b", None)?,
            length: raw.f64("geometry.length", Some(1.0))?,
        },
        "step" => GeometryConfig::Step {
            a1: raw.f64("geometry.a1", None)?,
            a2: raw.f64("geometry.a2", None)?,
            offset: raw.f64("geometry.offset", Some(0.0))?,
            depth: raw.f64("geometry.depth", Some(1.0))?,
        },
        other => {
            let line = raw.get("geometry.kind").map(|(l, _)| *l).unwrap_or(0);
            return Err(CliError::Config(format!(
                "line {line}: unknown geometry.kind '{other}'"
            )));
        }
    };

    let bcs = match raw.string("solve.bc", Some("both"))?.as_str() {
        "dirichlet" => vec![BoundaryCondition::Dirichlet],
        "neumann" => vec![BoundaryCondition::Neumann],
        "both" => vec![BoundaryCondition::Dirichlet, BoundaryCondition::Neumann],
        other => {
            return Err(CliError::Config(format!(
                "solve.bc must be dirichlet, neumann or both, got '{other}'"
            )))
        }
    };
    let solve = SolveConfig {
        bcs,
        cutoff: raw.f64("solve.cutoff", Some(60.0))?,
        h: raw.f64("solve.h", Some(0.0))?,
        truncation: raw.usize("solve.truncation", Some(40))?,
        quadrature: raw.usize("solve.quadrature", Some(16))?,
    };
    if solve.cutoff <= 0.0 {
        return Err(CliError::Config("solve.cutoff must be positive".into()));
    }

    let sweep = SweepConfig {
        k_start: raw.f64("sweep.k_start", Some(3.5))?,
        k_end: raw.f64("sweep.k_end", Some(4.4))?,
        samples: raw.usize("sweep.samples", Some(1))?,
        skip_radius: raw.f64("sweep.skip_radius", Some(0.05))?,
    };
    if sweep.k_start >= sweep.k_end && sweep.samples > 1 {
        return Err(CliError::Config(format!(
            "sweep requires k_start < k_end, got {} >= {}",
            sweep.k_start, sweep.k_end
        )));
    }
    if sweep.samples < 1 {
        return Err(CliError::Config("sweep.samples must be >= 1".into()));
    }
    if sweep.skip_radius <= 0.0 {
        return Err(CliError::Config("sweep.skip_radius must be positive".into()));
    }

    let format = match raw.string("output.format", Some("text"))?.as_str() {
        "text" => OutputFormat::Text,
        "csv" => OutputFormat::Csv,
        other => {
            return Err(CliError::Config(format!(
                "output.format must be text or csv, got '{other}'"
            )))
        }
    };
    let output = OutputConfig {
        format,
        path: raw.get("output.path").map(|(_, v)| base_dir.join(v)),
        precision: raw.usize("output.precision", Some(12))?,
    };
    if !(6..=17).contains(&output.precision) {
        return Err(CliError::Config(format!(
            "output.precision must lie in 6..17, got {}",
            output.precision
        )));
    }

    let source = SourceConfig {
        mode: raw.usize("source.mode", Some(0))?,
        window_t0: raw.f64("source.window_t0", Some(0.0))?,
        window_t1: raw.f64("source.window_t1", Some(1.0))?,
        amplitude_re: raw.f64("source.amplitude_re", Some(1.0))?,
        amplitude_im: raw.f64("source.amplitude_im", Some(0.0))?,
    };
    if source.window_t1 <= source.window_t0 {
        return Err(CliError::Config(
            "source window requires window_t0 < window_t1".into(),
        ));
    }

    Ok(RunConfig { geometry, solve, sweep, output, source })
}

/// Sweep samples with threshold skipping: returns `(retained, dropped)`.
pub fn sweep_points(sweep: &SweepConfig, thresholds: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let ks: Vec<f64> = if sweep.samples == 1 {
        vec![sweep.k_start]
    } else {
        (0..sweep.samples)
            .map(|i| {
                sweep.k_start
                    + (sweep.k_end - sweep.k_start) * i as f64 / (sweep.samples - 1) as f64
            })
            .collect()
    };
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for k in ks {
        if thresholds.iter().any(|t| (k - t).abs() < sweep.skip_radius) {
            dropped.push(k);
        } else {
            kept.push(k);
        }
    }
    (kept, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_rectangle_config() {
        let cfg = parse_config(
            "geometry.kind = rectangle\ngeometry.a = 1.0\ngeometry.b = 1.0\n",
            Path::new("."),
        )
        .unwrap();
        assert!(matches!(cfg.geometry, GeometryConfig::Rectangle { .. }));
        assert_eq!(cfg.output.precision, 12);
    }

    #[test]
    fn missing_geometry_reports_field() {
        let err = parse_config("solve.cutoff = 10\n", Path::new(".")).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("geometry.kind"), "{msg}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config(
            "geometry.kind = rectangle\ngeometry.a = 1\ngeometry.b = 1\ntypo.key = 3\n",
            Path::new("."),
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn threshold_skipping_reports_dropped_points() {
        let sweep = SweepConfig { k_start: 3.0, k_end: 3.3, samples: 4, skip_radius: 0.05 };
        let (kept, dropped) = sweep_points(&sweep, &[std::f64::consts::PI]);
        assert_eq!(kept.len(), 3);
        assert_eq!(dropped.len(), 1);
        assert!((dropped[0] - 3.1).abs() < 1e-12);
    }
}
