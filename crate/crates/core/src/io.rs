//! Result serialization: far-field and probe CSV files, grid-field blobs
//! with a small JSON header, and the oracle-report ledger.
//!
//! Column orders are frozen; see the README for the exact formats.

use crate::error::Result;
use crate::grid::{GridSpec, ScalarGridField, VectorGridField};
use crate::oracle::OracleReport;
use crate::probe::{BlowupFit, ProbeSeries};
use crate::sphere::{FarFieldScalar, FarFieldVector};
use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

fn fmt_complex(v: Complex64) -> String {
    format!("{}{}{}i", fmt(v.re), if v.im < 0.0 { "-" } else { "+" }, fmt(v.im.abs()))
}

/// CSV columns: theta, phi, re, im, weight.
pub fn write_far_field_scalar(w: &mut impl Write, ff: &FarFieldScalar) -> Result<()> {
    writeln!(w, "theta,phi,re,im,weight")?;
    for i in 0..ff.values.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt(ff.grid.theta[i]),
            fmt(ff.grid.phi[i]),
            fmt(ff.values[i].re),
            fmt(ff.values[i].im),
            fmt(ff.grid.weights[i]),
        )?;
    }
    Ok(())
}

/// CSV columns: theta, phi, re1..re3, im1..im3, part (total|p|s), weight;
/// three rows per direction.
pub fn write_far_field_vector(w: &mut impl Write, ff: &FarFieldVector) -> Result<()> {
    writeln!(w, "theta,phi,re1,re2,re3,im1,im2,im3,part,weight")?;
    for i in 0..ff.values.len() {
        for (part, v) in [
            ("total", &ff.values[i]),
            ("p", &ff.p_part[i]),
            ("s", &ff.s_part[i]),
        ] {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt(ff.grid.theta[i]),
                fmt(ff.grid.phi[i]),
                fmt(v[0].re),
                fmt(v[1].re),
                fmt(v[2].re),
                fmt(v[0].im),
                fmt(v[1].im),
                fmt(v[2].im),
                part,
                fmt(ff.grid.weights[i]),
            )?;
        }
    }
    Ok(())
}

/// CSV columns: j, zx, zy, zz, re_v, im_v, abs_v.
pub fn write_probe_series(w: &mut impl Write, series: &ProbeSeries) -> Result<()> {
    writeln!(w, "j,zx,zy,zz,re_v,im_v,abs_v")?;
    for s in &series.samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            s.j,
            fmt(s.source[0]),
            fmt(s.source[1]),
            fmt(s.source[2]),
            fmt(s.indicator.re),
            fmt(s.indicator.im),
            fmt(s.indicator.norm()),
        )?;
    }
    Ok(())
}

/// JSON summary of a blow-up fit.
pub fn fit_to_json(fit: &BlowupFit) -> String {
    format!(
        "{{\"slope\":{},\"intercept\":{},\"r2\":{},\"classification\":\"{}\",\"contrast_estimate\":{}}}",
        fit.slope,
        fit.intercept,
        fit.r_squared,
        match fit.classification {
            crate::probe::Classification::Boundary => "boundary",
            crate::probe::Classification::Exterior => "exterior",
        },
        fit.contrast_estimate
    )
}

/// Append rows to the oracle-report ledger; writes the header when the
/// stream is at offset zero. Columns: name, ref, test, abs_err, rel_err,
/// budget.
pub fn append_oracle_reports(w: &mut impl Write, header: bool, rows: &[OracleReport]) -> Result<()> {
    if header {
        writeln!(w, "name,ref,test,abs_err,rel_err,budget")?;
    }
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.name,
            fmt_complex(r.reference_value),
            fmt_complex(r.test_value),
            fmt(r.abs_error),
            fmt(r.rel_error),
            r.budget,
        )?;
    }
    Ok(())
}

/// Field blob header, stored next to the raw samples.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FieldHeader {
    pub dims: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: f64,
    pub wavenumber: f64,
    /// 1 for scalar fields, 3 for displacement fields.
    pub components: usize,
}

/// Write a scalar field as `<base>.json` (header) + `<base>.bin`
/// (little-endian f64 re/im pairs in node order).
pub fn write_scalar_field(base: &Path, field: &ScalarGridField, wavenumber: f64) -> Result<()> {
    let header = FieldHeader {
        dims: field.grid.dims,
        origin: field.grid.origin,
        spacing: field.grid.spacing,
        wavenumber,
        components: 1,
    };
    write_header(base, &header)?;
    let mut bytes = Vec::with_capacity(field.values.len() * 16);
    for v in &field.values {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    std::fs::write(base.with_extension("bin"), bytes)?;
    Ok(())
}

/// Vector fields store the three components consecutively per node.
pub fn write_vector_field(base: &Path, field: &VectorGridField, wavenumber: f64) -> Result<()> {
    let header = FieldHeader {
        dims: field.grid.dims,
        origin: field.grid.origin,
        spacing: field.grid.spacing,
        wavenumber,
        components: 3,
    };
    write_header(base, &header)?;
    let n = field.grid.len();
    let mut bytes = Vec::with_capacity(n * 48);
    for i in 0..n {
        for c in 0..3 {
            let v = field.components[c][i];
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    std::fs::write(base.with_extension("bin"), bytes)?;
    Ok(())
}

fn write_header(base: &Path, header: &FieldHeader) -> Result<()> {
    let json = serde_json::to_string_pretty(header)
        .map_err(|e| crate::error::Error::Config(format!("header serialization failed: {e}")))?;
    std::fs::write(base.with_extension("json"), json)?;
    Ok(())
}

/// Read a scalar field blob back.
pub fn read_scalar_field(base: &Path) -> Result<(ScalarGridField, FieldHeader)> {
    let json = std::fs::read_to_string(base.with_extension("json"))?;
    let header: FieldHeader = serde_json::from_str(&json)
        .map_err(|e| crate::error::Error::Config(format!("bad field header: {e}")))?;
    let grid = GridSpec::new(header.origin, header.spacing, header.dims)?;
    let bytes = std::fs::read(base.with_extension("bin"))?;
    let mut values = Vec::with_capacity(grid.len());
    for chunk in bytes.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    if values.len() != grid.len() {
        return Err(crate::error::Error::Config(format!(
            "field blob holds {} samples but the header promises {}",
            values.len(),
            grid.len()
        )));
    }
    Ok((ScalarGridField { grid, values }, header))
}
