//! Python bindings: shapes, media, forward solves, far fields and the
//! singular-source probe, exposed as a small extension module.

use lsprobe_core::acoustic::{
    mixed_reciprocity_residual, AcousticIncident, AcousticMedium, AcousticSolver, IndexProfile,
};
use lsprobe_core::elastic::{
    elastic_mixed_reciprocity_residual, DensityProfile, ElasticIncident, ElasticMedium,
    ElasticSolver,
};
use lsprobe_core::geometry::{ShapeSpec, SurfacePoint};
use lsprobe_core::grid::GridSpec;
use lsprobe_core::linalg::Vec3;
use lsprobe_core::oracle;
use lsprobe_core::probe::{
    fit_log_blowup, run_probe_acoustic, run_probe_elastic, Classification, ProbeConfig,
};
use lsprobe_core::sphere::DirectionGrid;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: lsprobe_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Scatterer geometry with inside/outside tests and surface normals.
#[pyclass(name = "Shape", from_py_object)]
#[derive(Clone)]
struct PyShape {
    inner: ShapeSpec,
}

#[pymethods]
impl PyShape {
    #[staticmethod]
    fn ball(center: Vec3, radius: f64) -> PyResult<Self> {
        let inner = ShapeSpec::ball(center, radius);
        inner.validate().map_err(err)?;
        Ok(PyShape { inner })
    }

    #[staticmethod]
    fn ellipsoid(center: Vec3, semi_axes: Vec3) -> PyResult<Self> {
        let inner = ShapeSpec::ellipsoid(center, semi_axes);
        inner.validate().map_err(err)?;
        Ok(PyShape { inner })
    }

    #[staticmethod]
    fn peanut(center: Vec3, radius: f64, half_separation: f64) -> PyResult<Self> {
        let inner = ShapeSpec::peanut(center, radius, half_separation);
        inner.validate().map_err(err)?;
        Ok(PyShape { inner })
    }

    fn signed_distance(&self, x: Vec3) -> f64 {
        self.inner.signed_distance(&x)
    }

    fn contains(&self, x: Vec3) -> bool {
        self.inner.contains(&x)
    }

    fn normal_at(&self, x: Vec3) -> PyResult<Vec3> {
        self.inner.normal_at(&x).map_err(err)
    }

    /// Boundary point and outward normal hit by a ray from the center.
    fn surface_point(&self, direction: Vec3) -> PyResult<(Vec3, Vec3)> {
        let sp = self.inner.surface_point_along(&direction).map_err(err)?;
        Ok((sp.position, sp.normal))
    }

    fn __repr__(&self) -> String {
        format!("Shape({:?})", self.inner.kind)
    }
}

/// Acoustic penetrable-medium problem on a cubic grid.
#[pyclass(name = "AcousticProblem")]
struct PyAcousticProblem {
    solver: AcousticSolver,
}

#[pymethods]
impl PyAcousticProblem {
    #[new]
    #[pyo3(signature = (shape, n_inside, wavenumber, half_extent=1.0, n=32))]
    fn new(shape: &PyShape, n_inside: f64, wavenumber: f64, half_extent: f64, n: usize) -> PyResult<Self> {
        let medium = AcousticMedium::new(
            wavenumber,
            shape.inner.clone(),
            IndexProfile::constant(n_inside),
            0.0,
        )
        .map_err(err)?;
        let grid = GridSpec::cube_around(&shape.inner, half_extent, n).map_err(err)?;
        let solver = AcousticSolver::new(medium, grid).map_err(err)?;
        Ok(PyAcousticProblem { solver })
    }

    /// Solve for a unit plane wave and return far-field rows
    /// (theta, phi, re, im, weight).
    #[pyo3(signature = (direction, n_polar=16, n_azimuth=32, tol=1e-8))]
    fn far_field(
        &self,
        direction: Vec3,
        n_polar: usize,
        n_azimuth: usize,
        tol: f64,
    ) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
        let sol = self
            .solver
            .solve(&AcousticIncident::PlaneWave { direction }, tol)
            .map_err(err)?;
        let dirs = DirectionGrid::gauss_legendre(n_polar, n_azimuth).map_err(err)?;
        let ff = self.solver.far_field(&sol, &dirs);
        Ok((0..ff.values.len())
            .map(|i| {
                (
                    dirs.theta[i],
                    dirs.phi[i],
                    ff.values[i].re,
                    ff.values[i].im,
                    dirs.weights[i],
                )
            })
            .collect())
    }

    /// Scattered field at an exterior point for plane-wave incidence.
    #[pyo3(signature = (direction, x, tol=1e-8))]
    fn scattered_at(&self, direction: Vec3, x: Vec3, tol: f64) -> PyResult<Complex64> {
        let sol = self
            .solver
            .solve(&AcousticIncident::PlaneWave { direction }, tol)
            .map_err(err)?;
        self.solver.eval_scattered(&sol, &x).map_err(err)
    }

    /// Residual of the mixed reciprocity identity at source z, incidence d.
    #[pyo3(signature = (z, d, tol=1e-8))]
    fn mixed_reciprocity(&self, z: Vec3, d: Vec3, tol: f64) -> PyResult<f64> {
        mixed_reciprocity_residual(&self.solver, &z, &d, tol).map_err(err)
    }

    /// March sources toward a boundary anchor and fit the blow-up.
    #[pyo3(signature = (anchor_direction, j_min=2, j_max=8, delta=0.3, tol=1e-8))]
    fn probe<'py>(
        &self,
        py: Python<'py>,
        anchor_direction: Vec3,
        j_min: u32,
        j_max: u32,
        delta: f64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let anchor = self
            .solver
            .medium
            .shape
            .surface_point_along(&anchor_direction)
            .map_err(err)?;
        let cfg = ProbeConfig {
            solver_tol: tol,
            delta,
        };
        let series = run_probe_acoustic(&self.solver, &anchor, j_min, j_max, &cfg).map_err(err)?;
        let fit = fit_log_blowup(&series, delta).map_err(err)?;
        fit_to_dict(py, &series, &fit)
    }
}

/// Elastic penetrable-medium problem on a cubic grid.
#[pyclass(name = "ElasticProblem")]
struct PyElasticProblem {
    solver: ElasticSolver,
}

#[pymethods]
impl PyElasticProblem {
    #[new]
    #[pyo3(signature = (shape, rho_inside, lam, mu, omega, half_extent=1.0, n=24))]
    fn new(
        shape: &PyShape,
        rho_inside: f64,
        lam: f64,
        mu: f64,
        omega: f64,
        half_extent: f64,
        n: usize,
    ) -> PyResult<Self> {
        let medium = ElasticMedium::new(
            lam,
            mu,
            omega,
            shape.inner.clone(),
            DensityProfile::Constant(rho_inside),
            0.0,
        )
        .map_err(err)?;
        let grid = GridSpec::cube_around(&shape.inner, half_extent, n).map_err(err)?;
        let solver = ElasticSolver::new(medium, grid).map_err(err)?;
        Ok(PyElasticProblem { solver })
    }

    /// P/S far-field rows (theta, phi, |p|, |s|, weight) for a plane wave.
    #[pyo3(signature = (direction, polarization, n_polar=8, n_azimuth=16, tol=1e-8))]
    fn far_field(
        &self,
        direction: Vec3,
        polarization: Vec3,
        n_polar: usize,
        n_azimuth: usize,
        tol: f64,
    ) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
        let sol = self
            .solver
            .solve(&ElasticIncident::plane_wave(direction, polarization), tol)
            .map_err(err)?;
        let dirs = DirectionGrid::gauss_legendre(n_polar, n_azimuth).map_err(err)?;
        let ff = self.solver.far_field(&sol, &dirs);
        Ok((0..ff.values.len())
            .map(|i| {
                let p = &ff.p_part[i];
                let s = &ff.s_part[i];
                (
                    dirs.theta[i],
                    dirs.phi[i],
                    (p[0].norm_sqr() + p[1].norm_sqr() + p[2].norm_sqr()).sqrt(),
                    (s[0].norm_sqr() + s[1].norm_sqr() + s[2].norm_sqr()).sqrt(),
                    dirs.weights[i],
                )
            })
            .collect())
    }

    /// Residual of the elastic mixed reciprocity identity.
    #[pyo3(signature = (y, a, d, q, tol=1e-8))]
    fn mixed_reciprocity(&self, y: Vec3, a: Vec3, d: Vec3, q: Vec3, tol: f64) -> PyResult<f64> {
        elastic_mixed_reciprocity_residual(&self.solver, &y, &a, &d, &q, tol).map_err(err)
    }

    /// Probe toward a boundary anchor and fit the blow-up.
    #[pyo3(signature = (anchor_direction, j_min=2, j_max=6, delta=0.3, tol=1e-8))]
    fn probe<'py>(
        &self,
        py: Python<'py>,
        anchor_direction: Vec3,
        j_min: u32,
        j_max: u32,
        delta: f64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let anchor = self
            .solver
            .medium
            .shape
            .surface_point_along(&anchor_direction)
            .map_err(err)?;
        let cfg = ProbeConfig {
            solver_tol: tol,
            delta,
        };
        let series = run_probe_elastic(&self.solver, &anchor, j_min, j_max, &cfg).map_err(err)?;
        let fit = fit_log_blowup(&series, delta).map_err(err)?;
        fit_to_dict(py, &series, &fit)
    }
}

fn fit_to_dict<'py>(
    py: Python<'py>,
    series: &lsprobe_core::probe::ProbeSeries,
    fit: &lsprobe_core::probe::BlowupFit,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("slope", fit.slope)?;
    d.set_item("intercept", fit.intercept)?;
    d.set_item("r2", fit.r_squared)?;
    d.set_item("reference_slope", fit.reference_slope)?;
    d.set_item(
        "classification",
        match fit.classification {
            Classification::Boundary => "boundary",
            Classification::Exterior => "exterior",
        },
    )?;
    d.set_item("contrast_estimate", fit.contrast_estimate)?;
    d.set_item(
        "indicators",
        series
            .samples
            .iter()
            .map(|s| (s.j, s.indicator.re, s.indicator.im))
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Exact half-ball integral of 1/|z_j - y|^3 in the probe configuration.
#[pyfunction]
fn halfball_log_integral(delta: f64, j: u32) -> f64 {
    oracle::halfball_log_integral(delta, j)
}

/// First Born far field of a constant-contrast ball.
#[pyfunction]
fn born_far_field(radius: f64, contrast: f64, k: f64, xhat: Vec3, d: Vec3) -> Complex64 {
    oracle::born_far_field(radius, contrast, k, &xhat, &d)
}

/// Reference far-field amplitude of the constant-index ball at a
/// scattering-angle cosine.
#[pyfunction]
fn mie_far_field_amplitude(radius: f64, n_inside: f64, k: f64, cos_angle: f64) -> PyResult<Complex64> {
    oracle::mie::mie_far_field_amplitude(radius, n_inside, k, cos_angle).map_err(err)
}

/// Kelvin matrix constants (alpha, beta) for Lame parameters.
#[pyfunction]
fn kelvin_constants(lam: f64, mu: f64) -> PyResult<(f64, f64)> {
    let c = lsprobe_core::elastic::kelvin_constants(lam, mu).map_err(err)?;
    Ok((c.alpha, c.beta))
}

/// Probe source positions z_j = anchor + normal/j for j in [j_min, j_max].
#[pyfunction]
fn probe_path(shape: &PyShape, direction: Vec3, j_min: u32, j_max: u32) -> PyResult<Vec<Vec3>> {
    let sp: SurfacePoint = shape.inner.surface_point_along(&direction).map_err(err)?;
    let path = lsprobe_core::geometry::probe_path(&shape.inner, &sp, j_min, j_max).map_err(err)?;
    Ok(path.points)
}

#[pymodule]
fn lsprobe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyShape>()?;
    m.add_class::<PyAcousticProblem>()?;
    m.add_class::<PyElasticProblem>()?;
    m.add_function(wrap_pyfunction!(halfball_log_integral, m)?)?;
    m.add_function(wrap_pyfunction!(born_far_field, m)?)?;
    m.add_function(wrap_pyfunction!(mie_far_field_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(kelvin_constants, m)?)?;
    m.add_function(wrap_pyfunction!(probe_path, m)?)?;
    Ok(())
}
