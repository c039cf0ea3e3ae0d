//! Batch execution of forward solves and probe sweeps, persisting the
//! plot-ready CSV files and field blobs described in the README.

use crate::config::{Experiment, Medium, PhysicsConfig};
use crate::manifest::ManifestWriter;
use lsprobe_core::acoustic::AcousticSolver;
use lsprobe_core::elastic::ElasticSolver;
use lsprobe_core::error::{Error, Result};
use lsprobe_core::geometry::ShapeKind;
use lsprobe_core::io;
use lsprobe_core::oracle;
use lsprobe_core::probe::{fit_log_blowup, run_probe_acoustic, run_probe_elastic, ProbeConfig};
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

/// Forward solve: far-field CSV plus the total-field blob.
pub fn run_forward(exp: &Experiment, manifest: &mut ManifestWriter, out: &Path) -> Result<()> {
    let tol = exp.config.solver.tol;
    match &exp.medium {
        Medium::Acoustic(medium) => {
            let k = medium.wavenumber;
            let solver = AcousticSolver::new(medium.clone(), exp.grid)?;
            let incident = exp.acoustic_incident()?;
            let solution = solver.solve(&incident, tol)?;
            manifest.task(
                "solve",
                format!(
                    "residual {:.3e} after {} iterations",
                    solution.residual, solution.iterations
                ),
            )?;

            let far = solver.far_field(&solution, &exp.directions);
            let mut w = BufWriter::new(File::create(out.join("far_field.csv"))?);
            io::write_far_field_scalar(&mut w, &far)?;
            drop(w);
            manifest.file("far_field.csv")?;

            io::write_scalar_field(&out.join("total_field"), &solution.total, k)?;
            manifest.file("total_field.json")?;
            manifest.file("total_field.bin")?;

            if exp.config.validate_against_series {
                let report = series_comparison(exp, &solver, &solution, &far)?;
                println!(
                    "series comparison: rel. L2 far-field error = {:.6e}",
                    report.rel_error
                );
                let mut w = BufWriter::new(File::create(out.join("series_comparison.csv"))?);
                io::append_oracle_reports(&mut w, true, &[report])?;
                drop(w);
                manifest.file("series_comparison.csv")?;
            }
        }
        Medium::Elastic(medium) => {
            let solver = ElasticSolver::new(medium.clone(), exp.grid)?;
            let incident = exp.elastic_incident()?;
            let solution = solver.solve(&incident, tol)?;
            manifest.task(
                "solve",
                format!(
                    "residual {:.3e} after {} iterations",
                    solution.residual, solution.iterations
                ),
            )?;

            let far = solver.far_field(&solution, &exp.directions);
            let mut w = BufWriter::new(File::create(out.join("far_field.csv"))?);
            io::write_far_field_vector(&mut w, &far)?;
            drop(w);
            manifest.file("far_field.csv")?;

            io::write_vector_field(&out.join("total_field"), &solution.total, medium.ks())?;
            manifest.file("total_field.json")?;
            manifest.file("total_field.bin")?;
        }
    }
    Ok(())
}

/// L2 comparison of a constant-index acoustic ball against the
/// separation-of-variables reference.
fn series_comparison(
    exp: &Experiment,
    solver: &AcousticSolver,
    solution: &lsprobe_core::acoustic::AcousticSolution,
    far: &lsprobe_core::sphere::FarFieldScalar,
) -> Result<oracle::OracleReport> {
    let medium = match &exp.medium {
        Medium::Acoustic(m) => m,
        _ => unreachable!(),
    };
    let radius = match medium.shape.kind {
        ShapeKind::Ball { radius } => radius,
        _ => {
            return Err(Error::Config(
                "series validation requires a ball-shaped scatterer".into(),
            ))
        }
    };
    let n_inside = match &medium.index {
        lsprobe_core::acoustic::IndexProfile::Constant(n) if n.im == 0.0 => n.re,
        _ => {
            return Err(Error::Config(
                "series validation requires a constant real index".into(),
            ))
        }
    };
    let d = match &solution.incident {
        lsprobe_core::acoustic::AcousticIncident::PlaneWave { direction } => *direction,
        _ => unreachable!("forward runs use plane waves"),
    };
    let reference = oracle::mie_far_field(radius, n_inside, medium.wavenumber, &exp.directions, &d)?;
    let rel = far.rel_l2_error(&reference);
    let _ = solver;
    let mut report = oracle::OracleReport::new(
        "far_field_vs_series",
        reference.values[0],
        far.values[0],
        reference.values.len(),
    );
    // record the global L2 error rather than the single-direction one
    report.rel_error = rel;
    report.abs_error = rel;
    Ok(report)
}

/// Probe sweep: per-anchor indicator CSV plus the blow-up fit JSON.
pub fn run_probe(exp: &Experiment, manifest: &mut ManifestWriter, out: &Path) -> Result<()> {
    let block = exp
        .config
        .probe
        .as_ref()
        .ok_or_else(|| Error::Config("field 'probe' is required for probe runs".into()))?;
    let probe_cfg = ProbeConfig {
        solver_tol: exp.config.solver.tol,
        delta: block.delta,
    };

    if block.anchors.is_empty() {
        manifest.task("probe", "empty anchor list")?;
        return Ok(());
    }

    match &exp.medium {
        Medium::Acoustic(medium) => {
            let solver = AcousticSolver::new(medium.clone(), exp.grid)?;
            for (i, anchor_cfg) in block.anchors.iter().enumerate() {
                let anchor = exp.resolve_anchor(anchor_cfg)?;
                let series =
                    run_probe_acoustic(&solver, &anchor, block.j_min, block.j_max, &probe_cfg)?;
                let fit = fit_log_blowup(&series, block.delta)?;
                write_probe_outputs(manifest, out, i, &series, &fit)?;
            }
        }
        Medium::Elastic(medium) => {
            let solver = ElasticSolver::new(medium.clone(), exp.grid)?;
            for (i, anchor_cfg) in block.anchors.iter().enumerate() {
                let anchor = exp.resolve_anchor(anchor_cfg)?;
                let series =
                    run_probe_elastic(&solver, &anchor, block.j_min, block.j_max, &probe_cfg)?;
                let fit = fit_log_blowup(&series, block.delta)?;
                write_probe_outputs(manifest, out, i, &series, &fit)?;
            }
        }
    }
    Ok(())
}

fn write_probe_outputs(
    manifest: &mut ManifestWriter,
    out: &Path,
    index: usize,
    series: &lsprobe_core::probe::ProbeSeries,
    fit: &lsprobe_core::probe::BlowupFit,
) -> Result<()> {
    let csv_name = format!("probe_anchor_{index}.csv");
    let mut w = BufWriter::new(File::create(out.join(&csv_name))?);
    io::write_probe_series(&mut w, series)?;
    drop(w);
    manifest.file(&csv_name)?;

    let json_name = format!("probe_anchor_{index}.json");
    std::fs::write(out.join(&json_name), io::fit_to_json(fit))?;
    manifest.file(&json_name)?;

    manifest.task(
        &format!("probe anchor {index}"),
        format!(
            "classification {:?}, slope {:.4e}, contrast {:.4}",
            fit.classification, fit.slope, fit.contrast_estimate
        ),
    )?;
    println!(
        "anchor {index}: {}",
        io::fit_to_json(fit)
    );
    Ok(())
}

/// What kind of run a config describes (used by main to sanity-check).
pub fn describe(exp: &Experiment) -> &'static str {
    match exp.config.physics {
        PhysicsConfig::Acoustic { .. } => "acoustic",
        PhysicsConfig::Elastic { .. } => "elastic",
    }
}
