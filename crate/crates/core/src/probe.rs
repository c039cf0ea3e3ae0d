//! The singular-source boundary probe: march point sources toward a
//! candidate boundary point along its normal, evaluate the normal-derivative
//! indicator of the scattered field at each source, fit the logarithmic
//! blow-up and recover the boundary contrast from the slope.
//!
//! At a true boundary point the indicator grows like
//!   slope * ln(delta j + 1)
//! while at exterior points it stays bounded. The asymptotic slope per unit
//! contrast carries the solid-angle average of the kernel's angular factor
//! over the half space the scatterer fills near the anchor:
//!   acoustic: k^2 / (16 pi)          (mean of cos(theta) over the
//!                                     hemisphere is 1/2),
//!   elastic:  omega^2 * 2 pi S, S = (2 alpha^2 + alpha beta + beta^2)/4
//!                                    (mean of the Kelvin angular
//!                                     polynomial).
//! Both constants are validated against direct quadrature of the
//! boundary-layer integral (see the oracle module and the acceptance
//! suite). At probe-experiment scale the finite-j transients of the
//! indicator are significant, so recovery normalizes the fitted slope by
//! the slope of an independently integrated unit-contrast reference series
//! over the same source window rather than by the raw asymptotic constant.

use crate::acoustic::{AcousticIncident, AcousticMedium, AcousticSolver};
use crate::elastic::{kelvin_constants, ElasticIncident, ElasticMedium, ElasticSolver};
use crate::error::{Error, Result};
use crate::geometry::{probe_path, ProbePath, SurfacePoint};
use crate::grid::GridSpec;
use crate::linalg::{norm, rcdot, sub, Vec3};
use crate::oracle::{adaptive_region_integral, Region};
use num_complex::Complex64;
use serde::Serialize;

/// Which physics produced a probe series, with the constants the recovery
/// formulas need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbePhysics {
    Acoustic { wavenumber: f64 },
    Elastic { omega: f64, lambda: f64, mu: f64 },
}

impl ProbePhysics {
    /// Asymptotic indicator slope (per unit ln(delta j + 1)) for a given
    /// boundary contrast magnitude, with the hemispherical average of the
    /// kernel's angular factor included.
    pub fn theoretical_slope(&self, contrast: f64) -> f64 {
        match self {
            ProbePhysics::Acoustic { wavenumber } => {
                contrast * wavenumber * wavenumber / (16.0 * std::f64::consts::PI)
            }
            ProbePhysics::Elastic { omega, lambda, mu } => {
                let c = kelvin_constants(*lambda, *mu).expect("admissible Lame constants");
                contrast * omega * omega * 2.0 * std::f64::consts::PI * kelvin_angular_mean(c.alpha, c.beta)
            }
        }
    }

    /// Inverse of `theoretical_slope`: contrast recovered from a slope.
    pub fn contrast_from_slope(&self, slope: f64) -> f64 {
        slope / self.theoretical_slope(1.0)
    }
}

/// Mean of the magnitude of the Kelvin angular polynomial
/// |alpha^2 c - (alpha beta - (3 alpha beta + beta^2) c^2) c| over the
/// hemisphere c = cos(theta) in (0, 1]:
///   S = (2 alpha^2 + alpha beta + beta^2)/4.
/// The value at c = 1 is (alpha+beta)^2; averaging matters because every
/// octave of source distance draws on the full hemisphere.
pub fn kelvin_angular_mean(alpha: f64, beta: f64) -> f64 {
    (2.0 * alpha * alpha + alpha * beta + beta * beta) / 4.0
}

/// One source position of the probe sequence and its indicator value.
#[derive(Debug, Clone)]
pub struct ProbeSample {
    pub j: u32,
    pub source: crate::linalg::Vec3,
    pub indicator: Complex64,
    /// Unit-contrast reference indicator at the same source (octree
    /// quadrature of the incident-driven integral; no solve involved).
    pub reference: Complex64,
    /// Max norm of the scattered part over the grid (uniform-bound check).
    pub scattered_sup: f64,
    pub residual: f64,
}

/// The indicator sequence along one approach path.
#[derive(Debug, Clone)]
pub struct ProbeSeries {
    pub path: ProbePath,
    pub physics: ProbePhysics,
    pub samples: Vec<ProbeSample>,
    /// Fit offset parameter used by default when fitting this series.
    pub delta: f64,
}

impl ProbeSeries {
    /// max_j ||w_j||_inf / min_j ||w_j||_inf; near 1 when the regular part
    /// stays uniformly bounded along the path.
    pub fn sup_norm_ratio(&self) -> f64 {
        let max = self.samples.iter().map(|s| s.scattered_sup).fold(0.0, f64::max);
        let min = self
            .samples
            .iter()
            .map(|s| s.scattered_sup)
            .fold(f64::INFINITY, f64::min);
        max / min.max(1e-300)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Boundary,
    Exterior,
}

/// Least-squares fit of |indicator| against ln(delta j + 1).
#[derive(Debug, Clone, Serialize)]
pub struct BlowupFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Fitted slope of the unit-contrast reference series over the same
    /// source window (the calibration denominator for recovery).
    pub reference_slope: f64,
    pub classification: Classification,
    /// slope / reference_slope for boundary classifications; 0 for
    /// exterior ones.
    pub contrast_estimate: f64,
}

/// Probe solver settings.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub solver_tol: f64,
    pub delta: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            solver_tol: 1e-8,
            delta: 0.3,
        }
    }
}

/// Classification threshold: a quarter of the theoretical slope at
/// contrast 0.1 for the experiment's wavenumber.
pub fn classification_threshold(physics: &ProbePhysics) -> f64 {
    0.25 * physics.theoretical_slope(0.1)
}

fn check_resolvable(j_max: u32, grid: &GridSpec) -> Result<()> {
    let cap = (1.0 / (2.0 * grid.spacing)).floor() as u32;
    if 1.0 / (j_max as f64) < 2.0 * grid.spacing {
        return Err(Error::Config(format!(
            "probe index j_max = {j_max} violates the resolvability cap 1/j >= 2h \
             (h = {}, largest admissible j = {cap})",
            grid.spacing
        )));
    }
    Ok(())
}

/// Unit-contrast reference indicator for one acoustic source position:
/// the incident-driven part of v_j with the contrast replaced by 1,
///   B(j) = -k^2 integral_D (grad_x Phi(z_j,y).nu) Phi(y,z_j) dy,
/// integrated by the adaptive octree. The probe indicator satisfies
/// v_j = (1-n) B(j) + O(|1-n|^2) for constant contrast, which is what
/// recovery inverts.
fn acoustic_reference(
    shape: &crate::geometry::ShapeSpec,
    k: f64,
    nu: &Vec3,
    z: &Vec3,
) -> Complex64 {
    let (lo, hi) = shape.bounding_box();
    let contains = |y: &Vec3| shape.contains(y);
    let region = Region {
        contains: &contains,
        lo,
        hi,
    };
    let nu = *nu;
    let z = *z;
    let integrand = move |y: &Vec3| {
        let g = crate::acoustic::grad_phi(k, &z, y).expect("source is exterior");
        let u_in = crate::acoustic::phi(k, y, &z).expect("source is exterior");
        -(k * k) * rcdot(&nu, &g) * u_in
    };
    adaptive_region_integral(&region, &z, &integrand).value
}

/// Elastic analog of `acoustic_reference`: the unit-contrast
/// incident-driven part of nu . upsilon_j,
///   B(j) = -omega^2 integral_D nu^T grad_x[Pi(z_j,y) (Pi(y,z_j) nu)] nu dy.
fn elastic_reference(
    kernel: &crate::elastic::kernels::NavierKernel,
    shape: &crate::geometry::ShapeSpec,
    omega: f64,
    nu: &Vec3,
    z: &Vec3,
) -> Complex64 {
    let (lo, hi) = shape.bounding_box();
    let contains = |y: &Vec3| shape.contains(y);
    let region = Region {
        contains: &contains,
        lo,
        hi,
    };
    let nu = *nu;
    let z = *z;
    let nu_c = crate::linalg::to_cvec(&nu);
    let integrand = move |y: &Vec3| {
        let d_yz = sub(y, &z);
        let r_yz = norm(&d_yz).max(1e-300);
        let w_in = kernel.apply_raw(&d_yz, r_yz, &nu_c);
        let d_zy = sub(&z, y);
        let r_zy = norm(&d_zy).max(1e-300);
        let g = kernel.grad_apply_raw(&d_zy, r_zy, &w_in);
        let mut out = Complex64::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out += g[i][j] * (nu[i] * nu[j]);
            }
        }
        out * (-omega * omega)
    };
    adaptive_region_integral(&region, &z, &integrand).value
}

/// Acoustic probe: for each j solve the point-source scattering problem and
/// evaluate v_j(z_j) = grad w_j(z_j) . nu(z*).
pub fn run_probe_acoustic(
    solver: &AcousticSolver,
    anchor: &SurfacePoint,
    j_min: u32,
    j_max: u32,
    config: &ProbeConfig,
) -> Result<ProbeSeries> {
    check_resolvable(j_max, &solver.grid)?;
    let path = probe_path(&solver.medium.shape, anchor, j_min, j_max)?;
    let k = solver.medium.wavenumber;
    let mut samples = Vec::with_capacity(path.points.len());
    for (idx, &j) in path.indices.iter().enumerate() {
        let z = path.points[idx];
        let solution = solver.solve(
            &AcousticIncident::PointSource { location: z },
            config.solver_tol,
        )?;
        let (grad, _capped) = solver.eval_grad_scattered(&solution, &z)?;
        let indicator = rcdot(&anchor.normal, &grad);
        let reference = acoustic_reference(&solver.medium.shape, k, &anchor.normal, &z);
        samples.push(ProbeSample {
            j,
            source: z,
            indicator,
            reference,
            scattered_sup: solution.scattered.max_abs(),
            residual: solution.residual,
        });
    }
    Ok(ProbeSeries {
        path,
        physics: ProbePhysics::Acoustic {
            wavenumber: solver.medium.wavenumber,
        },
        samples,
        delta: config.delta,
    })
}

/// Elastic probe with source polarization nu(z*): the indicator is
/// nu . grad[w_j^sc . nu](z_j).
pub fn run_probe_elastic(
    solver: &ElasticSolver,
    anchor: &SurfacePoint,
    j_min: u32,
    j_max: u32,
    config: &ProbeConfig,
) -> Result<ProbeSeries> {
    check_resolvable(j_max, &solver.grid)?;
    let path = probe_path(&solver.medium.shape, anchor, j_min, j_max)?;
    let mut samples = Vec::with_capacity(path.points.len());
    for (idx, &j) in path.indices.iter().enumerate() {
        let z = path.points[idx];
        let solution = solver.solve(
            &ElasticIncident::PointSource {
                location: z,
                polarization: anchor.normal,
            },
            config.solver_tol,
        )?;
        let (grad, _capped) = solver.eval_grad_scattered(&solution, &z)?;
        // nu^T G nu with G[i][j] = d_j w_i
        let nu = anchor.normal;
        let mut indicator = Complex64::ZERO;
        for i in 0..3 {
            for jj in 0..3 {
                indicator += grad[i][jj] * (nu[i] * nu[jj]);
            }
        }
        let reference = elastic_reference(
            solver.kernel(),
            &solver.medium.shape,
            solver.medium.omega,
            &nu,
            &z,
        );
        samples.push(ProbeSample {
            j,
            source: z,
            indicator,
            reference,
            scattered_sup: solution.scattered.max_abs(),
            residual: solution.residual,
        });
    }
    Ok(ProbeSeries {
        path,
        physics: ProbePhysics::Elastic {
            omega: solver.medium.omega,
            lambda: solver.medium.lambda,
            mu: solver.medium.mu,
        },
        samples,
        delta: config.delta,
    })
}

/// Fit |indicator_j| = slope * ln(delta j + 1) + intercept by least squares
/// and classify the anchor.
pub fn fit_log_blowup(series: &ProbeSeries, delta: f64) -> Result<BlowupFit> {
    if delta <= 0.0 {
        return Err(Error::Precondition("fit offset delta must be positive".into()));
    }
    if series.samples.len() < 4 {
        return Err(Error::Precondition(format!(
            "need at least 4 probe samples for a fit, got {}",
            series.samples.len()
        )));
    }
    let xs: Vec<f64> = series
        .samples
        .iter()
        .map(|s| (delta * s.j as f64 + 1.0).ln())
        .collect();
    let ys: Vec<f64> = series.samples.iter().map(|s| s.indicator.norm()).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    let refs: Vec<f64> = series.samples.iter().map(|s| s.reference.norm()).collect();
    let (reference_slope, _, _) = linear_fit(&xs, &refs);

    // Logarithmic growth keeps its rate across the window (late/early
    // half-window slope ratio stays near 0.8 at probe scale); the bounded
    // indicator of an exterior anchor saturates instead (ratio near 0.5),
    // even when its full-window fit clears the magnitude threshold.
    let half = xs.len() / 2;
    let (early_slope, _, _) = linear_fit(&xs[..=half], &ys[..=half]);
    let (late_slope, _, _) = linear_fit(&xs[half..], &ys[half..]);
    let persistent = early_slope > 0.0 && late_slope >= 0.65 * early_slope;

    let threshold = classification_threshold(&series.physics);
    let classification = if slope > threshold && r_squared >= 0.8 && persistent {
        Classification::Boundary
    } else {
        Classification::Exterior
    };
    let contrast_estimate = match classification {
        Classification::Boundary => {
            if reference_slope > 0.0 {
                slope / reference_slope
            } else {
                // no usable reference (should not happen for boundary
                // anchors); fall back to the asymptotic constant
                series.physics.contrast_from_slope(slope)
            }
        }
        Classification::Exterior => 0.0,
    };
    Ok(BlowupFit {
        slope,
        intercept,
        r_squared,
        reference_slope,
        classification,
        contrast_estimate,
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if syy < 1e-28 || sxx < 1e-28 {
        // degenerate (constant) series
        (0.0, mean_y, 0.0)
    } else {
        let slope = sxy / sxx;
        (slope, mean_y - slope * mean_x, (sxy * sxy) / (sxx * syy))
    }
}

/// Boundary value of the contrast from a boundary-classified fit:
/// |1 - n(z*)| (acoustic) or |1 - rho(z*)| (elastic). The sign is not
/// determined by the blow-up rate; only the magnitude is recovered.
pub fn recover_boundary_value(fit: &BlowupFit, physics: &ProbePhysics) -> Result<f64> {
    if fit.classification != Classification::Boundary {
        return Err(Error::Precondition(
            "recovery is only applicable to boundary-classified fits".into(),
        ));
    }
    let _ = physics;
    Ok(fit.contrast_estimate)
}

/// Medium handed to the boundary scan as a black box.
pub enum ProbeMedium<'a> {
    Acoustic(&'a AcousticMedium),
    Elastic(&'a ElasticMedium),
}

/// Run the probe at every candidate point (position + candidate normal)
/// and classify each one. The boundary estimate is the set of candidates
/// classified `Boundary`.
pub fn scan_boundary(
    medium: &ProbeMedium,
    grid: &GridSpec,
    candidates: &[SurfacePoint],
    j_min: u32,
    j_max: u32,
    config: &ProbeConfig,
) -> Result<Vec<(SurfacePoint, BlowupFit)>> {
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(candidates.len());
    match medium {
        ProbeMedium::Acoustic(m) => {
            let solver = AcousticSolver::new((*m).clone(), *grid)?;
            for cand in candidates {
                let series = run_probe_acoustic(&solver, cand, j_min, j_max, config)?;
                let fit = fit_log_blowup(&series, config.delta)?;
                out.push((*cand, fit));
            }
        }
        ProbeMedium::Elastic(m) => {
            let solver = ElasticSolver::new((*m).clone(), *grid)?;
            for cand in candidates {
                let series = run_probe_elastic(&solver, cand, j_min, j_max, config)?;
                let fit = fit_log_blowup(&series, config.delta)?;
                out.push((*cand, fit));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;

    fn synthetic_series(values: Vec<f64>, references: Vec<f64>, delta: f64) -> ProbeSeries {
        let shape = ShapeSpec::ball([0.0; 3], 0.8);
        let anchor = SurfacePoint::new([0.0, 0.0, 0.8], [0.0, 0.0, 1.0]).unwrap();
        let path = probe_path(&shape, &anchor, 2, (values.len() + 1) as u32).unwrap();
        let samples = values
            .iter()
            .zip(&references)
            .enumerate()
            .map(|(i, (v, r))| ProbeSample {
                j: path.indices[i],
                source: path.points[i],
                indicator: Complex64::new(*v, 0.0),
                reference: Complex64::new(*r, 0.0),
                scattered_sup: 1.0,
                residual: 0.0,
            })
            .collect();
        ProbeSeries {
            path,
            physics: ProbePhysics::Acoustic { wavenumber: 1.0 },
            samples,
            delta,
        }
    }

    #[test]
    fn exact_linear_model_is_recovered() {
        let delta = 0.3;
        let values: Vec<f64> = (2..=12)
            .map(|j| 3.0 * (delta * j as f64 + 1.0).ln() + 0.7)
            .collect();
        // unit-contrast reference with slope 6: recovered contrast 1/2
        let references: Vec<f64> = (2..=12)
            .map(|j| 6.0 * (delta * j as f64 + 1.0).ln() + 1.0)
            .collect();
        let series = synthetic_series(values, references, delta);
        let fit = fit_log_blowup(&series, delta).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept - 0.7).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.reference_slope - 6.0).abs() < 1e-12);
        assert_eq!(fit.classification, Classification::Boundary);
        assert!((fit.contrast_estimate - 0.5).abs() < 1e-12);
        let recovered = recover_boundary_value(&fit, &series.physics).unwrap();
        assert!((recovered - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_series_classifies_exterior() {
        let series = synthetic_series(vec![0.42; 10], vec![0.1; 10], 0.3);
        let fit = fit_log_blowup(&series, 0.3).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.classification, Classification::Exterior);
        assert_eq!(fit.contrast_estimate, 0.0);
        assert!(recover_boundary_value(&fit, &series.physics).is_err());
    }

    #[test]
    fn recovery_inverts_the_leading_coefficient() {
        let sixteen_pi = 16.0 * std::f64::consts::PI;
        let physics = ProbePhysics::Acoustic { wavenumber: 1.0 };
        let slope = 0.5 / sixteen_pi; // contrast 0.5 at k = 1
        assert!((physics.contrast_from_slope(slope) - 0.5).abs() < 1e-14);
        assert!((physics.theoretical_slope(0.5) - slope).abs() < 1e-18);
        // per-unit-contrast slope at k = 1: 1/(16 pi)
        assert!((physics.theoretical_slope(1.0) - 0.019894).abs() < 1e-6);

        // elastic at lambda = mu = 1: angular mean S = 11/(576 pi^2),
        // unit-contrast slope 2 pi S = 11/(288 pi)
        let elastic = ProbePhysics::Elastic {
            omega: 1.0,
            lambda: 1.0,
            mu: 1.0,
        };
        let expect = 11.0 / (288.0 * std::f64::consts::PI);
        assert!((elastic.theoretical_slope(1.0) - expect).abs() < 1e-15);
        assert!((elastic.contrast_from_slope(0.5 * expect) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn short_series_is_rejected() {
        let series = synthetic_series(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], 0.3);
        assert!(fit_log_blowup(&series, 0.3).is_err());
        assert!(fit_log_blowup(&synthetic_series(vec![1.0; 10], vec![1.0; 10], 0.3), -1.0).is_err());
    }

    #[test]
    fn empty_candidate_scan_is_empty() {
        let medium = AcousticMedium::ball([0.0; 3], 0.8, 1.5, 1.0).unwrap();
        let grid = GridSpec::cube_around(&medium.shape, 1.0, 32).unwrap();
        let out = scan_boundary(
            &ProbeMedium::Acoustic(&medium),
            &grid,
            &[],
            2,
            6,
            &ProbeConfig::default(),
        )
        .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn resolvability_cap_is_reported() {
        let medium = AcousticMedium::ball([0.0; 3], 0.8, 1.5, 1.0).unwrap();
        let grid = GridSpec::cube_around(&medium.shape, 1.0, 32).unwrap(); // h = 0.0625, cap j <= 8
        let solver = AcousticSolver::new(medium, grid).unwrap();
        let anchor = SurfacePoint::new([0.0, 0.0, 0.8], [0.0, 0.0, 1.0]).unwrap();
        let err = run_probe_acoustic(&solver, &anchor, 2, 16, &ProbeConfig::default()).unwrap_err();
        assert!(err.to_string().contains("1/j >= 2h"), "{err}");
    }
}
