//! Elastic scattering by a penetrable density perturbation: the Kupradze
//! tensor, the volume-integral forward solver, P/S far fields, the traction
//! operator and the elastic mixed-reciprocity check.
//!
//! The displacement satisfies u = u_in + V u with
//! (V phi)(x) = -omega^2 integral (1 - rho(y)) Pi(x, y) phi(y) dy.

pub mod kernels;

use crate::conv::{equivalent_ball_radius, TensorConvolution};
use crate::error::{Error, Result};
use crate::geometry::ShapeSpec;
use crate::gmres::{solve_gmres, GmresConfig, LinearOperator};
use crate::grid::{GridSpec, VectorGridField};
use crate::linalg::{
    cadd, ccross, cmat_vec, cnorm, csub, dot, norm, rcdot, scale, sub, to_cvec, CMat3, CVec3, Vec3,
};
use crate::quadrature::{needs_subdivision, subdivide_near_point, Subdivision, SubdivisionStats};
use crate::sphere::{DirectionGrid, FarFieldVector};
use kernels::NavierKernel;
use num_complex::Complex64;
use rayon::prelude::*;

pub use kernels::{grad_kelvin_apply, grad_kelvin_contract, kelvin_constants, kelvin_tensor, KelvinConstants};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Density profile inside the scatterer (the density is 1 outside).
#[derive(Debug, Clone, PartialEq)]
pub enum DensityProfile {
    Constant(f64),
    RadialLinear { at_center: f64, at_boundary: f64 },
}

/// Penetrable elastic medium: constant Lame parameters, a frequency and a
/// compactly supported density perturbation.
#[derive(Debug, Clone)]
pub struct ElasticMedium {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub shape: ShapeSpec,
    pub density: DensityProfile,
    pub contrast_floor: f64,
}

impl ElasticMedium {
    pub fn new(
        lambda: f64,
        mu: f64,
        omega: f64,
        shape: ShapeSpec,
        density: DensityProfile,
        contrast_floor: f64,
    ) -> Result<Self> {
        let medium = ElasticMedium {
            lambda,
            mu,
            omega,
            shape,
            density,
            contrast_floor,
        };
        medium.validate()?;
        Ok(medium)
    }

    /// Constant-density ball with unit Lame parameters, the standard test
    /// medium.
    pub fn ball(center: Vec3, radius: f64, rho_inside: f64, lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        Self::new(
            lambda,
            mu,
            omega,
            ShapeSpec::ball(center, radius),
            DensityProfile::Constant(rho_inside),
            (1.0 - rho_inside).abs() * 0.99,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu <= 0.0 || 2.0 * self.mu + 3.0 * self.lambda <= 0.0 {
            return Err(Error::Config(format!(
                "Lame constants must satisfy mu > 0 and 2 mu + 3 lambda > 0, got lambda={}, mu={}",
                self.lambda, self.mu
            )));
        }
        if self.omega <= 0.0 {
            return Err(Error::Config(format!("frequency must be positive, got {}", self.omega)));
        }
        if self.contrast_floor < 0.0 {
            return Err(Error::Config("contrast_floor must be nonnegative".into()));
        }
        self.shape.validate()?;
        if matches!(self.density, DensityProfile::RadialLinear { .. })
            && !matches!(self.shape.kind, crate::geometry::ShapeKind::Ball { .. })
        {
            return Err(Error::Config(
                "radial density profiles are only supported for ball scatterers".into(),
            ));
        }
        // shear and compressional background wavenumbers must be positive
        let (ks, kp) = (self.ks(), self.kp());
        if !(ks > 0.0 && kp > 0.0) {
            return Err(Error::Config("background wavenumbers are not positive".into()));
        }
        self.spot_check_profile()
    }

    fn spot_check_profile(&self) -> Result<()> {
        let diam = self.shape.bounding_diameter();
        let mut rng = crate::linalg::SmallRng::new(0xe1a5);
        for _ in 0..100 {
            let sp = self.shape.surface_point_along(&rng.unit_vec())?;
            let depth = rng.range(0.005, 0.1) * diam;
            let x = sub(&sp.position, &scale(&sp.normal, depth));
            if !self.shape.contains(&x) {
                continue;
            }
            let rho = self.density_at(&x);
            if rho <= 0.0 {
                return Err(Error::Config(format!("density must be positive, rho({x:?}) = {rho}")));
            }
            if self.contrast_floor > 0.0 {
                let c = (1.0 - rho).abs();
                if c + 1e-12 < self.contrast_floor {
                    return Err(Error::Config(format!(
                        "|1 - rho| = {c:.3e} at {x:?} violates the declared floor {}",
                        self.contrast_floor
                    )));
                }
            }
        }
        Ok(())
    }

    /// Background shear wavenumber omega sqrt(1/mu).
    pub fn ks(&self) -> f64 {
        self.omega * (1.0 / self.mu).sqrt()
    }

    /// Background compressional wavenumber omega sqrt(1/(lambda+2mu)).
    pub fn kp(&self) -> f64 {
        self.omega * (1.0 / (self.lambda + 2.0 * self.mu)).sqrt()
    }

    pub fn kernel(&self) -> NavierKernel {
        NavierKernel::new(self.lambda, self.mu, self.omega).expect("validated Lame range")
    }

    pub fn density_at(&self, x: &Vec3) -> f64 {
        if !self.shape.contains(x) {
            return 1.0;
        }
        match self.density {
            DensityProfile::Constant(rho) => rho,
            DensityProfile::RadialLinear {
                at_center,
                at_boundary,
            } => {
                let radius = match self.shape.kind {
                    crate::geometry::ShapeKind::Ball { radius } => radius,
                    _ => unreachable!("validated in new()"),
                };
                let t = (norm(&sub(x, &self.shape.center)) / radius).min(1.0);
                at_center + (at_boundary - at_center) * t
            }
        }
    }

    /// Contrast 1 - rho(x); exactly 0 outside the scatterer.
    pub fn contrast_at(&self, x: &Vec3) -> f64 {
        if !self.shape.contains(x) {
            return 0.0;
        }
        1.0 - self.density_at(x)
    }
}

/// Incident elastic fields with analytic point evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ElasticIncident {
    /// p_amp * d exp(i kp x.d) + s_amp * q exp(i ks x.d) with d.q = 0.
    PlaneWave {
        direction: Vec3,
        polarization: Vec3,
        p_amp: f64,
        s_amp: f64,
    },
    /// Pi(x, z) a.
    PointSource { location: Vec3, polarization: Vec3 },
}

impl ElasticIncident {
    pub fn plane_wave(direction: Vec3, polarization: Vec3) -> Self {
        ElasticIncident::PlaneWave {
            direction,
            polarization,
            p_amp: 1.0,
            s_amp: 1.0,
        }
    }

    pub fn validate(&self, shape: &ShapeSpec) -> Result<()> {
        match self {
            ElasticIncident::PlaneWave {
                direction,
                polarization,
                ..
            } => {
                if (norm(direction) - 1.0).abs() > 1e-10 || (norm(polarization) - 1.0).abs() > 1e-10 {
                    return Err(Error::Precondition(
                        "plane-wave direction and polarization must be unit vectors".into(),
                    ));
                }
                if dot(direction, polarization).abs() > 1e-10 {
                    return Err(Error::Precondition(format!(
                        "shear polarization must be orthogonal to the direction, d.q = {}",
                        dot(direction, polarization)
                    )));
                }
            }
            ElasticIncident::PointSource {
                location,
                polarization,
            } => {
                if (norm(polarization) - 1.0).abs() > 1e-10 {
                    return Err(Error::Precondition("source polarization must be a unit vector".into()));
                }
                if shape.signed_distance(location) <= 0.0 {
                    return Err(Error::Precondition(format!(
                        "point source at {location:?} must lie strictly outside the scatterer"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, kernel: &NavierKernel, kp: f64, ks: f64, x: &Vec3) -> CVec3 {
        match self {
            ElasticIncident::PlaneWave {
                direction,
                polarization,
                p_amp,
                s_amp,
            } => {
                let xp = Complex64::from_polar(*p_amp, kp * dot(x, direction));
                let xs = Complex64::from_polar(*s_amp, ks * dot(x, direction));
                [
                    xp * direction[0] + xs * polarization[0],
                    xp * direction[1] + xs * polarization[1],
                    xp * direction[2] + xs * polarization[2],
                ]
            }
            ElasticIncident::PointSource {
                location,
                polarization,
            } => {
                let d = sub(x, location);
                let r = norm(&d).max(1e-300);
                kernel.apply_raw(&d, r, &to_cvec(polarization))
            }
        }
    }

    /// Gradient matrix G with G[i][j] = d_j u_i.
    pub fn eval_gradient(&self, kernel: &NavierKernel, kp: f64, ks: f64, x: &Vec3) -> CMat3 {
        match self {
            ElasticIncident::PlaneWave {
                direction,
                polarization,
                p_amp,
                s_amp,
            } => {
                let xp = Complex64::from_polar(*p_amp, kp * dot(x, direction)) * Complex64::new(0.0, kp);
                let xs = Complex64::from_polar(*s_amp, ks * dot(x, direction)) * Complex64::new(0.0, ks);
                let mut g = [[Complex64::ZERO; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        g[i][j] = xp * direction[i] * direction[j]
                            + xs * polarization[i] * direction[j];
                    }
                }
                g
            }
            ElasticIncident::PointSource {
                location,
                polarization,
            } => {
                let d = sub(x, location);
                let r = norm(&d).max(1e-300);
                kernel.grad_apply_raw(&d, r, &to_cvec(polarization))
            }
        }
    }
}

/// Kupradze fundamental tensor of the background medium.
pub fn navier_tensor(medium: &ElasticMedium, x: &Vec3, y: &Vec3) -> Result<CMat3> {
    medium.kernel().tensor(x, y)
}

/// P + S plane wave sampled on the grid.
pub fn elastic_plane_wave(
    medium: &ElasticMedium,
    grid: &GridSpec,
    direction: &Vec3,
    polarization: &Vec3,
) -> Result<VectorGridField> {
    let inc = ElasticIncident::plane_wave(*direction, *polarization);
    inc.validate(&medium.shape)?;
    let kernel = medium.kernel();
    let (kp, ks) = (medium.kp(), medium.ks());
    Ok(VectorGridField::from_fn(*grid, |x| {
        inc.eval(&kernel, kp, ks, x)
    }))
}

/// Point-source field Pi(., z) a sampled nodewise.
pub fn elastic_point_source(
    medium: &ElasticMedium,
    grid: &GridSpec,
    z: &Vec3,
    a: &Vec3,
) -> Result<VectorGridField> {
    let inc = ElasticIncident::PointSource {
        location: *z,
        polarization: *a,
    };
    inc.validate(&medium.shape)?;
    let kernel = medium.kernel();
    let (kp, ks) = (medium.kp(), medium.ks());
    Ok(VectorGridField::from_fn(*grid, |x| {
        inc.eval(&kernel, kp, ks, x)
    }))
}

/// Traction (surface stress) of a smooth vector field:
/// T u = 2 mu (nu.grad) u + lambda nu (div u) + mu nu x (curl u),
/// computed from the gradient matrix G[i][j] = d_j u_i.
pub fn traction_from_gradient(lambda: f64, mu: f64, grad: &CMat3, nu: &Vec3) -> CVec3 {
    let nug = cmat_vec(grad, &to_cvec(nu)); // (nu.grad) u
    let div = grad[0][0] + grad[1][1] + grad[2][2];
    let curl = [
        grad[2][1] - grad[1][2],
        grad[0][2] - grad[2][0],
        grad[1][0] - grad[0][1],
    ];
    let nxc = ccross(&to_cvec(nu), &curl);
    [
        2.0 * mu * nug[0] + lambda * div * nu[0] + mu * nxc[0],
        2.0 * mu * nug[1] + lambda * div * nu[1] + mu * nxc[1],
        2.0 * mu * nug[2] + lambda * div * nu[2] + mu * nxc[2],
    ]
}

/// Traction of a closure field by central differences with the given step.
pub fn traction<F: Fn(&Vec3) -> CVec3>(
    lambda: f64,
    mu: f64,
    field: F,
    x: &Vec3,
    nu: &Vec3,
    step: f64,
) -> CVec3 {
    let mut grad = [[Complex64::ZERO; 3]; 3];
    for j in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[j] += step;
        xm[j] -= step;
        let fp = field(&xp);
        let fm = field(&xm);
        for i in 0..3 {
            grad[i][j] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    traction_from_gradient(lambda, mu, &grad, nu)
}

/// Converged elastic forward solve.
#[derive(Debug, Clone)]
pub struct ElasticSolution {
    pub incident: ElasticIncident,
    pub scattered: VectorGridField,
    pub total: VectorGridField,
    pub residual: f64,
    pub iterations: usize,
}

/// Forward solver context for one medium/grid pair.
pub struct ElasticSolver {
    pub medium: ElasticMedium,
    pub grid: GridSpec,
    kernel: NavierKernel,
    conv: TensorConvolution,
    contrast: Vec<f64>,
    support: Vec<usize>,
    pub gmres: GmresConfig,
}

impl ElasticSolver {
    pub fn new(medium: ElasticMedium, grid: GridSpec) -> Result<Self> {
        grid.check_covers(&medium.shape)?;
        let kernel = medium.kernel();
        let conv = TensorConvolution::navier(&grid, &kernel);
        let contrast = sample_contrast(&medium, &grid);
        let support: Vec<usize> = contrast
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(ElasticSolver {
            medium,
            grid,
            kernel,
            conv,
            contrast,
            support,
            gmres: GmresConfig::default(),
        })
    }

    pub fn kernel(&self) -> &NavierKernel {
        &self.kernel
    }

    /// V u = -omega^2 * conv[(1-rho) u], applied per component.
    pub fn apply_v(&self, field: &VectorGridField) -> Result<VectorGridField> {
        if field.grid != self.grid {
            return Err(Error::Config("field grid does not match the solver grid".into()));
        }
        let out = self.apply_v_components(&field.components);
        Ok(VectorGridField {
            grid: self.grid,
            components: out,
        })
    }

    fn apply_v_components(&self, comps: &[Vec<Complex64>; 3]) -> [Vec<Complex64>; 3] {
        let w2 = self.medium.omega * self.medium.omega;
        let weighted: [Vec<Complex64>; 3] = [0, 1, 2].map(|c| {
            comps[c]
                .par_iter()
                .zip(self.contrast.par_iter())
                .map(|(v, m)| v * *m)
                .collect()
        });
        let mut out = self.conv.apply(&weighted);
        for comp in out.iter_mut() {
            comp.par_iter_mut().for_each(|v| *v *= -w2);
        }
        out
    }

    /// Incident samples for the right-hand side; point-source fields are
    /// cell-averaged near the source's boundary foot point.
    pub fn incident_field(&self, incident: &ElasticIncident) -> Result<VectorGridField> {
        incident.validate(&self.medium.shape)?;
        let (kp, ks) = (self.medium.kp(), self.medium.ks());
        let kernel = &self.kernel;
        let mut field = VectorGridField::from_fn(self.grid, |x| incident.eval(kernel, kp, ks, x));
        if let ElasticIncident::PointSource {
            location,
            polarization,
        } = incident
        {
            let foot = self.medium.shape.project_to_boundary(location);
            let dist = norm(&sub(location, &foot));
            let h = self.grid.spacing;
            let policy = Subdivision::default();
            let a = to_cvec(polarization);
            let averaged: Vec<Option<CVec3>> = (0..self.grid.len())
                .into_par_iter()
                .map(|idx| {
                    let y = self.grid.node_of_flat(idx);
                    let near_foot = norm(&sub(&y, &foot)) <= 4.0 * dist;
                    let near_src = needs_subdivision(&y, h, location, &policy);
                    if !(near_foot || near_src) {
                        return None;
                    }
                    let mut acc = [Complex64::ZERO; 3];
                    let mut stats = SubdivisionStats::default();
                    subdivide_near_point(&y, h, location, &policy, &mut stats, &mut |p, vol, _| {
                        let d = sub(p, location);
                        let r = norm(&d).max(1e-300);
                        let v = kernel.apply_raw(&d, r, &a);
                        for c in 0..3 {
                            acc[c] += v[c] * vol;
                        }
                    });
                    let inv = 1.0 / self.grid.cell_volume();
                    Some([acc[0] * inv, acc[1] * inv, acc[2] * inv])
                })
                .collect();
            for (idx, avg) in averaged.into_iter().enumerate() {
                if let Some(v) = avg {
                    field.set(idx, v);
                }
            }
        }
        Ok(field)
    }

    /// Solve (I - V) u = u_in. The residual is measured over the contrast
    /// support, relative to the incident field there.
    pub fn solve(&self, incident: &ElasticIncident, tol: f64) -> Result<ElasticSolution> {
        if tol <= 0.0 {
            return Err(Error::Precondition("solver tolerance must be positive".into()));
        }
        let u_in = self.incident_field(incident)?;
        let rhs_field = self.apply_v_components(&u_in.components);
        let n = self.grid.len();
        let mut rhs = vec![Complex64::ZERO; 3 * n];
        for c in 0..3 {
            rhs[c * n..(c + 1) * n].copy_from_slice(&rhs_field[c]);
        }
        let rhs_norm = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let uin_support = self.support_norm(&u_in.components);

        if rhs_norm == 0.0 || self.support.is_empty() {
            return Ok(ElasticSolution {
                incident: incident.clone(),
                scattered: VectorGridField::zeros(self.grid),
                total: u_in,
                residual: 0.0,
                iterations: 0,
            });
        }

        let op = ContrastOperator { solver: self };
        let mut gmres_tol = (tol * uin_support / rhs_norm * 0.5).min(tol).max(1e-14);
        let mut iterations = 0;
        for _attempt in 0..3 {
            let cfg = GmresConfig {
                tol: gmres_tol,
                ..self.gmres.clone()
            };
            let sol = solve_gmres(&op, &rhs, &cfg);
            iterations += sol.iterations;
            let w_flat = sol.x;
            let w: [Vec<Complex64>; 3] =
                [0, 1, 2].map(|c| w_flat[c * n..(c + 1) * n].to_vec());

            let vw = self.apply_v_components(&w);
            // residual (w - Vw - V u_in) on the support
            let mut res = 0.0;
            for c in 0..3 {
                for &i in &self.support {
                    res += (w[c][i] - vw[c][i] - rhs_field[c][i]).norm_sqr();
                }
            }
            let rel = res.sqrt() / uin_support.max(1e-300);
            if rel <= tol && sol.converged {
                let scattered = VectorGridField {
                    grid: self.grid,
                    components: w,
                };
                let mut total = VectorGridField::zeros(self.grid);
                for c in 0..3 {
                    for i in 0..n {
                        total.components[c][i] =
                            scattered.components[c][i] + u_in.components[c][i];
                    }
                }
                return Ok(ElasticSolution {
                    incident: incident.clone(),
                    scattered,
                    total,
                    residual: rel,
                    iterations,
                });
            }
            gmres_tol *= 0.1;
        }
        Err(Error::Convergence {
            residual: f64::NAN,
            iterations,
        })
    }

    fn support_norm(&self, comps: &[Vec<Complex64>; 3]) -> f64 {
        let mut s = 0.0;
        for c in 0..3 {
            for &i in &self.support {
                s += comps[c][i].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// P and S far-field amplitudes at one observation direction:
    ///   u_p_inf = -(kp^2 / 4 pi) (xhat xhat^T) I_p,
    ///   u_s_inf = -(ks^2 / 4 pi) (I - xhat xhat^T) I_s,
    /// with I_a = integral (1-rho) e^{-i k_a xhat.y} u(y) dy.
    pub fn far_field_at(&self, solution: &ElasticSolution, xhat: &Vec3) -> (CVec3, CVec3) {
        let (kp, ks) = (self.medium.kp(), self.medium.ks());
        let partials: Vec<(CVec3, CVec3)> = self
            .support
            .par_chunks(8192)
            .map(|chunk| {
                let mut accp = [Complex64::ZERO; 3];
                let mut accs = [Complex64::ZERO; 3];
                for &idx in chunk {
                    let y = self.grid.node_of_flat(idx);
                    let u = solution.total.at(idx);
                    let m = self.contrast[idx];
                    let ep = Complex64::from_polar(m, -kp * dot(xhat, &y));
                    let es = Complex64::from_polar(m, -ks * dot(xhat, &y));
                    for c in 0..3 {
                        accp[c] += u[c] * ep;
                        accs[c] += u[c] * es;
                    }
                }
                (accp, accs)
            })
            .collect();
        let mut ip = [Complex64::ZERO; 3];
        let mut is = [Complex64::ZERO; 3];
        for (p, s) in partials {
            for c in 0..3 {
                ip[c] += p[c];
                is[c] += s[c];
            }
        }
        let vol = self.grid.cell_volume();
        let cp = -kp * kp / FOUR_PI * vol;
        let cs = -ks * ks / FOUR_PI * vol;
        let radial = rcdot(xhat, &ip);
        let p_part = [
            cp * radial * xhat[0],
            cp * radial * xhat[1],
            cp * radial * xhat[2],
        ];
        let srad = rcdot(xhat, &is);
        let s_part = [
            cs * (is[0] - srad * xhat[0]),
            cs * (is[1] - srad * xhat[1]),
            cs * (is[2] - srad * xhat[2]),
        ];
        (p_part, s_part)
    }

    pub fn far_field(&self, solution: &ElasticSolution, directions: &DirectionGrid) -> FarFieldVector {
        let parts: Vec<(CVec3, CVec3)> = directions
            .directions
            .par_iter()
            .map(|xhat| self.far_field_at(solution, xhat))
            .collect();
        let mut out = FarFieldVector {
            grid: directions.clone(),
            values: Vec::with_capacity(parts.len()),
            p_part: Vec::with_capacity(parts.len()),
            s_part: Vec::with_capacity(parts.len()),
        };
        for (p, s) in parts {
            out.values.push(cadd(&p, &s));
            out.p_part.push(p);
            out.s_part.push(s);
        }
        out
    }

    /// Scattered displacement at any point by composite quadrature.
    pub fn eval_scattered_any(&self, solution: &ElasticSolution, x: &Vec3) -> CVec3 {
        let w2 = self.medium.omega * self.medium.omega;
        let h = self.grid.spacing;
        let policy = Subdivision::default();
        let (kp, ks) = (self.medium.kp(), self.medium.ks());
        let c = self.kernel.consts;

        let partials: Vec<CVec3> = self
            .support
            .par_chunks(2048)
            .map(|chunk| {
                let mut acc = [Complex64::ZERO; 3];
                for &idx in chunk {
                    let y_c = self.grid.node_of_flat(idx);
                    if needs_subdivision(&y_c, h, x, &policy) {
                        let mut stats = SubdivisionStats::default();
                        subdivide_near_point(&y_c, h, x, &policy, &mut stats, &mut |y, vol, size| {
                            let (m, u) = if size >= h {
                                (self.contrast[idx], solution.total.at(idx))
                            } else {
                                (
                                    self.medium.contrast_at(y),
                                    cadd(
                                        &solution.scattered.interpolate(y),
                                        &solution.incident.eval(&self.kernel, kp, ks, y),
                                    ),
                                )
                            };
                            if m == 0.0 {
                                return;
                            }
                            let d = sub(x, y);
                            let r = norm(&d);
                            let v = if r < 0.5 * size {
                                // analytic Kelvin ball mean plus the bounded
                                // remainder at coincidence
                                let a_eq = equivalent_ball_radius(size);
                                let wgt = (Complex64::from(
                                    2.0 * std::f64::consts::PI * a_eq * a_eq
                                        * (c.alpha + c.beta / 3.0),
                                ) + self.kernel.zero_limit() * size.powi(3))
                                    / size.powi(3);
                                [u[0] * wgt, u[1] * wgt, u[2] * wgt]
                            } else {
                                self.kernel.apply_raw(&d, r, &u)
                            };
                            for comp in 0..3 {
                                acc[comp] += v[comp] * (m * vol);
                            }
                        });
                    } else {
                        let d = sub(x, &y_c);
                        let r = norm(&d);
                        let u = solution.total.at(idx);
                        let v = self.kernel.apply_raw(&d, r, &u);
                        let wv = self.contrast[idx] * self.grid.cell_volume();
                        for comp in 0..3 {
                            acc[comp] += v[comp] * wv;
                        }
                    }
                }
                acc
            })
            .collect();
        let mut out = [Complex64::ZERO; 3];
        for p in partials {
            for comp in 0..3 {
                out[comp] += p[comp];
            }
        }
        for comp in out.iter_mut() {
            *comp *= -w2;
        }
        out
    }

    /// Scattered displacement at an exterior point.
    pub fn eval_scattered(&self, solution: &ElasticSolution, x: &Vec3) -> Result<CVec3> {
        if self.medium.shape.signed_distance(x) <= 0.0 {
            return Err(Error::Precondition(format!(
                "eval_scattered requires an exterior point, {x:?} is not"
            )));
        }
        Ok(self.eval_scattered_any(solution, x))
    }

    /// Gradient of the scattered displacement at an exterior point
    /// (G[i][j] = d_j u_i). The incident factor in the integrand is
    /// evaluated analytically; the flag reports an exhausted budget.
    pub fn eval_grad_scattered(
        &self,
        solution: &ElasticSolution,
        x: &Vec3,
    ) -> Result<(CMat3, bool)> {
        if self.medium.shape.signed_distance(x) <= 0.0 {
            return Err(Error::Precondition(format!(
                "eval_grad_scattered requires an exterior point, {x:?} is not"
            )));
        }
        Ok(self.eval_grad_scattered_any(solution, x))
    }

    pub fn eval_grad_scattered_any(&self, solution: &ElasticSolution, x: &Vec3) -> (CMat3, bool) {
        let w2 = self.medium.omega * self.medium.omega;
        let h = self.grid.spacing;
        let policy = Subdivision::default();
        let (kp, ks) = (self.medium.kp(), self.medium.ks());

        let partials: Vec<(CMat3, usize)> = self
            .support
            .par_chunks(2048)
            .map(|chunk| {
                let mut acc = [[Complex64::ZERO; 3]; 3];
                let mut capped = 0usize;
                for &idx in chunk {
                    let y_c = self.grid.node_of_flat(idx);
                    if needs_subdivision(&y_c, h, x, &policy) {
                        let mut stats = SubdivisionStats::default();
                        subdivide_near_point(&y_c, h, x, &policy, &mut stats, &mut |y, vol, size| {
                            let (m, u) = if size >= h {
                                (self.contrast[idx], solution.total.at(idx))
                            } else {
                                (
                                    self.medium.contrast_at(y),
                                    cadd(
                                        &solution.scattered.interpolate(y),
                                        &solution.incident.eval(&self.kernel, kp, ks, y),
                                    ),
                                )
                            };
                            if m == 0.0 {
                                return;
                            }
                            let d = sub(x, y);
                            let r = norm(&d);
                            if r == 0.0 {
                                return; // odd leading kernel: ball mean drops
                            }
                            let g = self.kernel.grad_apply_raw(&d, r, &u);
                            for i in 0..3 {
                                for j in 0..3 {
                                    acc[i][j] += g[i][j] * (m * vol);
                                }
                            }
                        });
                        capped += stats.capped_cells;
                    } else {
                        let d = sub(x, &y_c);
                        let r = norm(&d);
                        let u = solution.total.at(idx);
                        let g = self.kernel.grad_apply_raw(&d, r, &u);
                        let wv = self.contrast[idx] * self.grid.cell_volume();
                        for i in 0..3 {
                            for j in 0..3 {
                                acc[i][j] += g[i][j] * wv;
                            }
                        }
                    }
                }
                (acc, capped)
            })
            .collect();
        let mut out = [[Complex64::ZERO; 3]; 3];
        let mut capped = 0;
        for (g, c) in partials {
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += g[i][j];
                }
            }
            capped += c;
        }
        for row in out.iter_mut() {
            for e in row.iter_mut() {
                *e *= -w2;
            }
        }
        (out, capped > 0)
    }

    pub fn eval_total(&self, solution: &ElasticSolution, x: &Vec3) -> CVec3 {
        let inc = solution
            .incident
            .eval(&self.kernel, self.medium.kp(), self.medium.ks(), x);
        cadd(&inc, &self.eval_scattered_any(solution, x))
    }

    pub fn eval_grad_total(&self, solution: &ElasticSolution, x: &Vec3) -> CMat3 {
        let gi = solution
            .incident
            .eval_gradient(&self.kernel, self.medium.kp(), self.medium.ks(), x);
        let (gs, _) = self.eval_grad_scattered_any(solution, x);
        let mut g = gi;
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += gs[i][j];
            }
        }
        g
    }
}

struct ContrastOperator<'a> {
    solver: &'a ElasticSolver,
}

impl LinearOperator for ContrastOperator<'_> {
    fn dim(&self) -> usize {
        3 * self.solver.grid.len()
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.solver.grid.len();
        let comps: [Vec<Complex64>; 3] = [0, 1, 2].map(|c| x[c * n..(c + 1) * n].to_vec());
        let vx = self.solver.apply_v_components(&comps);
        for c in 0..3 {
            for i in 0..n {
                y[c * n + i] = x[c * n + i] - vx[c][i];
            }
        }
    }
}

fn sample_contrast(medium: &ElasticMedium, grid: &GridSpec) -> Vec<f64> {
    let h = grid.spacing;
    let half_diag = 0.5 * h * 3.0f64.sqrt();
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = grid.node_of_flat(idx);
            let sd = medium.shape.signed_distance(&x);
            if sd > half_diag {
                0.0
            } else if sd < -half_diag {
                medium.contrast_at(&x)
            } else {
                let mut acc = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        for l in 0..4 {
                            let y = [
                                x[0] + h * ((i as f64 + 0.5) / 4.0 - 0.5),
                                x[1] + h * ((j as f64 + 0.5) / 4.0 - 0.5),
                                x[2] + h * ((l as f64 + 0.5) / 4.0 - 0.5),
                            ];
                            acc += medium.contrast_at(&y);
                        }
                    }
                }
                acc / 64.0
            }
        })
        .collect()
}

/// Weights pairing the P and S far-field parts with the plane-wave
/// directions in the mixed reciprocity relation: with unit-amplitude plane
/// waves and the Green's-tensor point source, the exact identity is
///   4 pi (lambda + 2 mu) d.w_p_inf(-d) + 4 pi mu q.w_s_inf(-d)
///     = a.u_sc(y; d, q),
/// the material factors being omega^2/k_alpha^2.
pub fn mixed_reciprocity_weights(lambda: f64, mu: f64) -> (f64, f64) {
    (FOUR_PI * (lambda + 2.0 * mu), FOUR_PI * mu)
}

/// Normalized residual of the elastic mixed reciprocity identity, both
/// sides from independent solves. `d` pairs with the P part and `q` with
/// the S part.
pub fn elastic_mixed_reciprocity_residual(
    solver: &ElasticSolver,
    y: &Vec3,
    a: &Vec3,
    d: &Vec3,
    q: &Vec3,
    tol: f64,
) -> Result<f64> {
    let ps = solver.solve(
        &ElasticIncident::PointSource {
            location: *y,
            polarization: *a,
        },
        tol,
    )?;
    let minus_d = [-d[0], -d[1], -d[2]];
    let (wp, ws) = solver.far_field_at(&ps, &minus_d);
    let (cp, cs) = mixed_reciprocity_weights(solver.medium.lambda, solver.medium.mu);
    let lhs = rcdot(d, &wp) * cp + rcdot(q, &ws) * cs;

    let pw = solver.solve(&ElasticIncident::plane_wave(*d, *q), tol)?;
    let usc = solver.eval_scattered(&pw, y)?;
    let rhs = rcdot(a, &usc);

    Ok((lhs - rhs).norm() / rhs.norm().max(1e-14))
}

/// Relative jumps of the displacement and the traction across the boundary
/// at +/- s along the normal of a boundary point.
pub fn boundary_jump(
    solver: &ElasticSolver,
    solution: &ElasticSolution,
    point: &crate::geometry::SurfacePoint,
    s: f64,
) -> (f64, f64) {
    let xp = crate::linalg::add(&point.position, &scale(&point.normal, s));
    let xm = sub(&point.position, &scale(&point.normal, s));
    let up = solver.eval_total(solution, &xp);
    let um = solver.eval_total(solution, &xm);
    let u_jump = cnorm(&csub(&up, &um)) / cnorm(&up).max(cnorm(&um)).max(1e-14);

    let (lambda, mu) = (solver.medium.lambda, solver.medium.mu);
    let tp = traction_from_gradient(lambda, mu, &solver.eval_grad_total(solution, &xp), &point.normal);
    let tm = traction_from_gradient(lambda, mu, &solver.eval_grad_total(solution, &xm), &point.normal);
    let t_jump = cnorm(&csub(&tp, &tm)) / cnorm(&tp).max(cnorm(&tm)).max(1e-14);
    (u_jump, t_jump)
}
