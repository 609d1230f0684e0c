//! The five subcommands: modes, thresholds, ledger, scatter, radiate.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64 as C;
use rayon::prelude::*;

use cylwave::cross_section::{BoundaryCondition, CrossSection, TriMesh};
use cylwave::pencil::thresholds;
use cylwave::scattering::{
    assemble_sigma, maxwell_step_smatrix, radiation::radiation_channels, radiation_coefficients,
    compatibility_residual, step_smatrix, straight_smatrix, windowed_mode_source, FamilyFilter,
    ScatteringMatrix, SeparableStep, StraightGuide,
};
use cylwave::waves::{build_ledger, CutoffProfile, LedgerOptions};

use crate::config::{GeometryConfig, OutputFormat, RunConfig};
use crate::output::{fmt, trace_csv_rows, write_smatrix};
use crate::CliError;

/// Cross-section from the geometry block (for `modes`/`thresholds`/`ledger`).
fn cross_section_of(config: &RunConfig) -> Result<CrossSection, CliError> {
    let build = |a: f64, b: f64| -> Result<CrossSection, CliError> {
        if config.solve.h > 0.0 {
            CrossSection::rectangle_fem(a, b, config.solve.h).map_err(CliError::Solver)
        } else {
            CrossSection::rectangle(a, b).map_err(CliError::Solver)
        }
    };
    match &config.geometry {
        GeometryConfig::Rectangle { a, b } => build(*a, *b),
        GeometryConfig::Straight { a, b, .. } => build(*a, *b),
        GeometryConfig::Disc { radius } => {
            CrossSection::disc(*radius).map_err(CliError::Solver)
        }
        GeometryConfig::Mesh { path } => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read mesh file {}: {e}", path.display()))
            })?;
            let mesh = TriMesh::parse(&text).map_err(CliError::Solver)?;
            CrossSection::from_mesh(mesh).map_err(CliError::Solver)
        }
        GeometryConfig::Step { .. } => Err(CliError::Config(
            "this command needs a cross-section geometry, not a step junction".into(),
        )),
    }
}

fn emit(out_path: &Option<PathBuf>, name: &str, content: &str) -> Result<(), CliError> {
    match out_path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
            let file = dir.join(name);
            fs::write(&file, content)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", file.display())))
        }
    }
}

/// `modes`: eigenvalue table per boundary condition; for FEM rectangles a
/// relative-error column against the separable eigenvalues.
pub fn cmd_modes(config: &RunConfig, verbose: bool) -> Result<(), CliError> {
    let cs = cross_section_of(config)?;
    let p = config.output.precision;
    let mut out = String::new();
    writeln!(out, "# modes cutoff = {}", fmt(config.solve.cutoff, p)).unwrap();
    for &bc in &config.solve.bcs {
        let eigs = cs.helmholtz_eigs(bc, config.solve.cutoff).map_err(CliError::Solver)?;
        writeln!(out, "# bc = {bc}, count = {}", eigs.len()).unwrap();
        let reference = analytic_reference(config, bc);
        for (i, e) in eigs.iter().enumerate() {
            match reference.as_ref().and_then(|r| r.get(i)) {
                Some(&exact) if exact > 0.0 => {
                    let rel = (e.mu() - exact).abs() / exact;
                    writeln!(out, "{i} {} {}", fmt(e.mu(), p), fmt(rel, p)).unwrap();
                }
                _ => writeln!(out, "{i} {}", fmt(e.mu(), p)).unwrap(),
            }
        }
    }
    if verbose {
        eprintln!("modes: wrote table for {:?}", config.geometry);
    }
    emit(&config.output.path, "modes.txt", &out)
}

/// Separable reference eigenvalues for FEM rectangles.
fn analytic_reference(config: &RunConfig, bc: BoundaryCondition) -> Option<Vec<f64>> {
    if config.solve.h <= 0.0 {
        return None;
    }
    let (a, b) = match config.geometry {
        GeometryConfig::Rectangle { a, b } | GeometryConfig::Straight { a, b, .. } => (a, b),
        _ => return None,
    };
    let exact = CrossSection::rectangle(a, b).ok()?;
    let eigs = exact.helmholtz_eigs(bc, config.solve.cutoff * 1.5).ok()?;
    Some(eigs.iter().map(|e| e.mu()).collect())
}

/// `thresholds`: rows `(k, end, bc, multiplicity)`, merged and sorted.
pub fn cmd_thresholds(config: &RunConfig, _verbose: bool) -> Result<(), CliError> {
    let ends = junction_cross_sections(config)?;
    let refs: Vec<&CrossSection> = ends.iter().collect();
    let k_max = config.sweep.k_end.max(config.sweep.k_start);
    let list = thresholds(&refs, k_max).map_err(CliError::Solver)?;
    let p = config.output.precision;
    let mut out = String::new();
    writeln!(out, "# thresholds up to k_max = {}", fmt(k_max, p)).unwrap();
    writeln!(out, "# k end bc multiplicity").unwrap();
    for entry in &list {
        for origin in &entry.origins {
            writeln!(
                out,
                "{} {} {} {}",
                fmt(entry.k, p),
                origin.end + 1,
                origin.bc,
                origin.multiplicity
            )
            .unwrap();
        }
    }
    emit(&config.output.path, "thresholds.txt", &out)
}

/// Cross-sections of the geometry's ends (straight guide: two identical).
fn junction_cross_sections(config: &RunConfig) -> Result<Vec<CrossSection>, CliError> {
    match &config.geometry {
        GeometryConfig::Straight { .. } => {
            let cs = cross_section_of(config)?;
            Ok(vec![cs.clone(), cs])
        }
        GeometryConfig::Step { .. } => Err(CliError::Config(
            "step junctions use interval cross-sections; use `scatter` for step geometries"
                .into(),
        )),
        _ => Ok(vec![cross_section_of(config)?]),
    }
}

/// `ledger`: per-frequency wave inventory over the sweep.
pub fn cmd_ledger(config: &RunConfig, _verbose: bool) -> Result<(), CliError> {
    let ends = junction_cross_sections(config)?;
    let refs: Vec<&CrossSection> = ends.iter().collect();
    let k_max = config.sweep.k_end + 1.0;
    let th: Vec<f64> = thresholds(&refs, k_max)
        .map_err(CliError::Solver)?
        .iter()
        .map(|e| e.k)
        .collect();
    let (kept, dropped) = crate::config::sweep_points(&config.sweep, &th);
    let p = config.output.precision;
    let mut out = String::new();
    for k in dropped {
        writeln!(out, "# dropped k = {} (threshold within skip radius)", fmt(k, p)).unwrap();
    }
    for k in kept {
        let ledger =
            build_ledger(&refs, k, &LedgerOptions::default()).map_err(CliError::Solver)?;
        writeln!(
            out,
            "k = {} upsilon = {} t_total = {} delta = {} threshold_distance = {}",
            fmt(k, p),
            ledger.upsilon,
            ledger.t_total,
            fmt(ledger.delta, p),
            fmt(ledger.threshold_distance, p)
        )
        .unwrap();
        for w in ledger.e_waves.iter().chain(&ledger.gamma_waves) {
            writeln!(
                out,
                "  end {} family {} lambda {} {}",
                w.end_index + 1,
                w.family,
                fmt(w.lambda, p),
                w.direction
            )
            .unwrap();
        }
        for (end, point) in &ledger.evanescent {
            writeln!(
                out,
                "  end {} evanescent mu {} im_lambda {}",
                end + 1,
                fmt(point.mu, p),
                fmt(point.lambda.im, p)
            )
            .unwrap();
        }
    }
    emit(&config.output.path, "ledger.txt", &out)
}

/// One sweep point's scattering output.
struct ScatterPoint {
    k: f64,
    maxwell: ScatteringMatrix,
    scalar: ScatteringMatrix,
    sigma: ScatteringMatrix,
}

/// `scatter`: S-matrix exports over the sweep plus a unitarity summary CSV
/// and a flat trace CSV.
pub fn cmd_scatter(config: &RunConfig, verbose: bool) -> Result<(), CliError> {
    let p = config.output.precision;
    let th: Vec<f64> = match &config.geometry {
        GeometryConfig::Step { a1, a2, .. } => {
            // interval thresholds m pi / a of both sides
            let mut t = Vec::new();
            for &a in &[*a1, *a2] {
                let mut m = 1.0;
                while m * PI / a <= config.sweep.k_end + 1.0 {
                    t.push(m * PI / a);
                    m += 1.0;
                }
            }
            t
        }
        _ => {
            let ends = junction_cross_sections(config)?;
            let refs: Vec<&CrossSection> = ends.iter().collect();
            thresholds(&refs, config.sweep.k_end + 1.0)
                .map_err(CliError::Solver)?
                .iter()
                .map(|e| e.k)
                .collect()
        }
    };
    let (kept, dropped) = crate::config::sweep_points(&config.sweep, &th);
    for k in &dropped {
        eprintln!("scatter: dropped k = {} (threshold within skip radius)", fmt(*k, p));
    }
    if kept.is_empty() {
        return Err(CliError::EmptyBand);
    }

    // sweep points go to a worker pool; results are written in k order
    let points: Vec<Result<ScatterPoint, CliError>> = kept
        .par_iter()
        .map(|&k| scatter_point(config, k))
        .collect();

    let mut summary = String::from("k,dim_s,unitarity_s,dim_upsilon,unitarity_upsilon,dim_sigma,unitarity_sigma\n");
    let mut trace = String::from("k,i,j,re,im\n");
    for point in points {
        let point = point?;
        summary.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(point.k, p),
            point.maxwell.dim(),
            fmt(point.maxwell.unitarity_residual, p),
            point.scalar.dim(),
            fmt(point.scalar.unitarity_residual, p),
            point.sigma.dim(),
            fmt(point.sigma.unitarity_residual, p),
        ));
        trace_csv_rows(&point.sigma, p, &mut trace);
        if config.output.format == OutputFormat::Text {
            let tag = format!("{:.6}", point.k).replace('.', "_");
            emit(
                &config.output.path,
                &format!("smatrix_maxwell_k{tag}.txt"),
                &write_smatrix(&point.maxwell, "maxwell", p),
            )?;
            emit(
                &config.output.path,
                &format!("smatrix_upsilon_k{tag}.txt"),
                &write_smatrix(&point.scalar, "upsilon", p),
            )?;
            emit(
                &config.output.path,
                &format!("smatrix_sigma_k{tag}.txt"),
                &write_smatrix(&point.sigma, "sigma", p),
            )?;
        }
    }
    emit(&config.output.path, "unitarity.csv", &summary)?;
    emit(&config.output.path, "trace.csv", &trace)?;
    if verbose {
        eprintln!("scatter: {} sweep points written", kept.len());
    }
    Ok(())
}

fn scatter_point(config: &RunConfig, k: f64) -> Result<ScatterPoint, CliError> {
    match &config.geometry {
        GeometryConfig::Straight { length, .. } => {
            let cs = cross_section_of(config)?;
            let guide = StraightGuide::new(cs, *length).map_err(CliError::Solver)?;
            let maxwell =
                straight_smatrix(&guide, k, FamilyFilter::Maxwell).map_err(CliError::Solver)?;
            let scalar =
                straight_smatrix(&guide, k, FamilyFilter::Augmented).map_err(CliError::Solver)?;
            let sigma = assemble_sigma(&maxwell, &scalar).map_err(CliError::Solver)?;
            Ok(ScatterPoint { k, maxwell, scalar, sigma })
        }
        GeometryConfig::Step { a1, a2, offset, depth } => {
            let geom =
                SeparableStep::new(*a1, *a2, *offset, *depth).map_err(CliError::Solver)?;
            let m = config.solve.truncation;
            let maxwell = maxwell_step_smatrix(&geom, k, m).map_err(CliError::Solver)?;
            let scalar = step_smatrix(&geom, k, BoundaryCondition::Neumann, m)
                .map_err(CliError::Solver)?;
            let sigma = assemble_sigma(&maxwell, &scalar).map_err(CliError::Solver)?;
            Ok(ScatterPoint { k, maxwell, scalar, sigma })
        }
        _ => Err(CliError::Config(
            "scatter needs geometry.kind = straight or step".into(),
        )),
    }
}

/// `radiate`: radiation coefficients of a windowed-mode source in a
/// straight guide.
pub fn cmd_radiate(config: &RunConfig, _verbose: bool) -> Result<(), CliError> {
    let cs = match &config.geometry {
        GeometryConfig::Straight { .. } => cross_section_of(config)?,
        _ => {
            return Err(CliError::Config(
                "radiate needs geometry.kind = straight".into(),
            ))
        }
    };
    let p = config.output.precision;
    let k = config.sweep.k_start;
    let channels = radiation_channels(&cs, k).map_err(CliError::Solver)?;
    let sc = &config.source;
    if sc.mode >= channels.len() {
        return Err(CliError::Config(format!(
            "source.mode = {} but only {} propagating channels at k = {k}",
            sc.mode,
            channels.len()
        )));
    }
    let window = CutoffProfile { t_inner: sc.window_t0, t_outer: sc.window_t1 };
    let descending = channels[sc.mode].lambda < 0.0;
    let amplitude = C::new(sc.amplitude_re, sc.amplitude_im);
    let source = windowed_mode_source(&channels[sc.mode].section, window, descending, amplitude)
        .map_err(CliError::Solver)?;
    let (r1, r2, r3) = compatibility_residual(&source, &cs, k, config.solve.quadrature);
    let c = radiation_coefficients(&source, &cs, k, config.solve.quadrature)
        .map_err(CliError::Solver)?;

    let mut out = String::new();
    writeln!(out, "# radiate k = {}", fmt(k, p)).unwrap();
    writeln!(
        out,
        "# compatibility residuals: {} {} {}",
        fmt(r1, p),
        fmt(r2, p),
        fmt(r3, p)
    )
    .unwrap();
    writeln!(out, "# j end lambda re(c) im(c)").unwrap();
    for (j, (wave, cj)) in channels.iter().zip(&c).enumerate() {
        writeln!(
            out,
            "{j} {} {} {} {}",
            wave.end_index + 1,
            fmt(wave.lambda, p),
            fmt(cj.re, p),
            fmt(cj.im, p)
        )
        .unwrap();
    }
    emit(&config.output.path, "radiate.txt", &out)
}

/// Shared entry: run one subcommand against a parsed config.
pub fn run_command(
    name: &str,
    config: &RunConfig,
    verbose: bool,
) -> Result<(), CliError> {
    match name {
        "modes" => cmd_modes(config, verbose),
        "thresholds" => cmd_thresholds(config, verbose),
        "ledger" => cmd_ledger(config, verbose),
        "scatter" => cmd_scatter(config, verbose),
        "radiate" => cmd_radiate(config, verbose),
        other => Err(CliError::Config(format!("unknown subcommand {other}"))),
    }
}
