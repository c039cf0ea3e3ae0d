//! Acoustic scattering by a penetrable medium: the Helmholtz fundamental
//! solution, the volume-integral forward solver, incident fields, far
//! fields, off-grid evaluation and the mixed reciprocity check.
//!
//! The total field satisfies u = u_in + K u with
//! (K phi)(x) = -k^2 integral (1 - n(y)) Phi(x, y) phi(y) dy,
//! where Phi is the outgoing fundamental solution. The solver discretizes K
//! with midpoint cells, applies it by FFT and inverts (I - K) with GMRES.

use crate::conv::{equivalent_ball_radius, helmholtz_ball_integral, ScalarConvolution};
use crate::error::{Error, Result};
use crate::geometry::ShapeSpec;
use crate::gmres::{solve_gmres, GmresConfig, LinearOperator};
use crate::grid::{GridSpec, ScalarGridField};
use crate::linalg::{dot, norm, sub, CVec3, Vec3};
use crate::quadrature::{needs_subdivision, subdivide_near_point, Subdivision, SubdivisionStats};
use crate::sphere::{DirectionGrid, FarFieldScalar};
use num_complex::Complex64;
use rayon::prelude::*;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Empirical factor relating the far field of a point source to the
/// scattered field of a plane wave: 4 pi * u_inf(-d, z) = u_sc(z, d) with
/// the far-field normalization used here. `mixed_reciprocity_residual`
/// verifies it; pass a different factor to probe other conventions.
pub const MIXED_RECIPROCITY_FACTOR: f64 = FOUR_PI;

/// Outgoing fundamental solution e^{ik|x-y|}/(4 pi |x-y|).
pub fn phi(k: f64, x: &Vec3, y: &Vec3) -> Result<Complex64> {
    let r = norm(&sub(x, y));
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(phi_raw(k, r))
}

#[inline]
pub(crate) fn phi_raw(k: f64, r: f64) -> Complex64 {
    let kr = k * r;
    Complex64::new(kr.cos(), kr.sin()) / (FOUR_PI * r)
}

/// Gradient in x of the fundamental solution:
/// e^{ikr} (ik - 1/r) / (4 pi r) * (x-y)/r.
pub fn grad_phi(k: f64, x: &Vec3, y: &Vec3) -> Result<CVec3> {
    let d = sub(x, y);
    let r = norm(&d);
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(grad_phi_raw(k, &d, r))
}

#[inline]
pub(crate) fn grad_phi_raw(k: f64, d: &Vec3, r: f64) -> CVec3 {
    let kr = k * r;
    let e = Complex64::new(kr.cos(), kr.sin());
    let radial = e * Complex64::new(-1.0 / r, k) / (FOUR_PI * r * r);
    [radial * d[0], radial * d[1], radial * d[2]]
}

/// Refractive-index profile inside the scatterer (the index is 1 outside).
#[derive(Debug, Clone, PartialEq)]
pub enum IndexProfile {
    Constant(Complex64),
    /// Linear in the radial fraction |x - center|/R; only meaningful for
    /// ball-shaped scatterers.
    RadialLinear {
        at_center: Complex64,
        at_boundary: Complex64,
    },
}

impl IndexProfile {
    pub fn constant(n: f64) -> Self {
        IndexProfile::Constant(Complex64::new(n, 0.0))
    }
}

/// Penetrable acoustic medium: geometry plus refractive index.
#[derive(Debug, Clone)]
pub struct AcousticMedium {
    pub wavenumber: f64,
    pub shape: ShapeSpec,
    pub index: IndexProfile,
    /// Asserted lower bound on |1 - n| near the boundary (0 disables the check).
    pub contrast_floor: f64,
}

impl AcousticMedium {
    pub fn new(
        wavenumber: f64,
        shape: ShapeSpec,
        index: IndexProfile,
        contrast_floor: f64,
    ) -> Result<Self> {
        let medium = AcousticMedium {
            wavenumber,
            shape,
            index,
            contrast_floor,
        };
        medium.validate()?;
        Ok(medium)
    }

    /// Constant-index ball, the standard test medium.
    pub fn ball(center: Vec3, radius: f64, n_inside: f64, wavenumber: f64) -> Result<Self> {
        Self::new(
            wavenumber,
            ShapeSpec::ball(center, radius),
            IndexProfile::constant(n_inside),
            (1.0 - n_inside).abs() * 0.99,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.wavenumber <= 0.0 {
            return Err(Error::Config(format!(
                "wavenumber must be positive, got {}",
                self.wavenumber
            )));
        }
        if self.contrast_floor < 0.0 {
            return Err(Error::Config("contrast_floor must be nonnegative".into()));
        }
        self.shape.validate()?;
        if matches!(self.index, IndexProfile::RadialLinear { .. })
            && !matches!(self.shape.kind, crate::geometry::ShapeKind::Ball { .. })
        {
            return Err(Error::Config(
                "radial index profiles are only supported for ball scatterers".into(),
            ));
        }
        self.spot_check_profile()
    }

    /// Sample Re n > 0 inside and the contrast floor near the boundary.
    fn spot_check_profile(&self) -> Result<()> {
        let diam = self.shape.bounding_diameter();
        let mut rng = crate::linalg::SmallRng::new(0x5eed);
        for _ in 0..100 {
            let sp = self.shape.surface_point_along(&rng.unit_vec())?;
            let depth = rng.range(0.005, 0.1) * diam;
            let x = sub(&sp.position, &crate::linalg::scale(&sp.normal, depth));
            if !self.shape.contains(&x) {
                continue; // thin features; skip rather than misjudge
            }
            let n = self.index_at(&x);
            if n.re <= 0.0 {
                return Err(Error::Config(format!(
                    "refractive index must have positive real part, n({x:?}) = {n}"
                )));
            }
            if self.contrast_floor > 0.0 && depth <= 0.1 * diam {
                let c = (Complex64::ONE - n).norm();
                if c + 1e-12 < self.contrast_floor {
                    return Err(Error::Config(format!(
                        "|1 - n| = {c:.3e} at {x:?} violates the declared floor {}",
                        self.contrast_floor
                    )));
                }
            }
        }
        Ok(())
    }

    /// n(x); identically 1 outside the scatterer.
    pub fn index_at(&self, x: &Vec3) -> Complex64 {
        if !self.shape.contains(x) {
            return Complex64::ONE;
        }
        match &self.index {
            IndexProfile::Constant(n) => *n,
            IndexProfile::RadialLinear {
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

    /// Contrast 1 - n(x); exactly 0 outside the scatterer.
    pub fn contrast_at(&self, x: &Vec3) -> Complex64 {
        if !self.shape.contains(x) {
            return Complex64::ZERO;
        }
        Complex64::ONE - self.index_at(x)
    }
}

/// Incident fields with analytic point evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum AcousticIncident {
    PlaneWave { direction: Vec3 },
    PointSource { location: Vec3 },
}

impl AcousticIncident {
    pub fn eval(&self, k: f64, x: &Vec3) -> Complex64 {
        match self {
            AcousticIncident::PlaneWave { direction } => {
                Complex64::from_polar(1.0, k * dot(x, direction))
            }
            AcousticIncident::PointSource { location } => {
                phi_raw(k, norm(&sub(x, location)).max(1e-300))
            }
        }
    }

    pub fn eval_gradient(&self, k: f64, x: &Vec3) -> CVec3 {
        match self {
            AcousticIncident::PlaneWave { direction } => {
                let v = Complex64::new(0.0, k) * self.eval(k, x);
                [v * direction[0], v * direction[1], v * direction[2]]
            }
            AcousticIncident::PointSource { location } => {
                let d = sub(x, location);
                grad_phi_raw(k, &d, norm(&d).max(1e-300))
            }
        }
    }
}

/// Samples e^{ik x.d} on the grid.
pub fn plane_wave(k: f64, direction: &Vec3, grid: &GridSpec) -> Result<ScalarGridField> {
    if (norm(direction) - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!(
            "plane-wave direction must be a unit vector, |d| = {}",
            norm(direction)
        )));
    }
    let inc = AcousticIncident::PlaneWave {
        direction: *direction,
    };
    Ok(ScalarGridField::from_fn(*grid, |x| inc.eval(k, x)))
}

/// Samples the point-source field Phi(., z) on the grid. The source must be
/// exterior to the shape.
pub fn point_source(k: f64, z: &Vec3, shape: &ShapeSpec, grid: &GridSpec) -> Result<ScalarGridField> {
    if shape.signed_distance(z) <= 0.0 {
        return Err(Error::Precondition(format!(
            "point source at {z:?} must lie strictly outside the scatterer"
        )));
    }
    let inc = AcousticIncident::PointSource { location: *z };
    Ok(ScalarGridField::from_fn(*grid, |x| inc.eval(k, x)))
}

/// Converged forward solve: the incident description, the scattered part on
/// the grid, the total field and the achieved residual.
#[derive(Debug, Clone)]
pub struct AcousticSolution {
    pub incident: AcousticIncident,
    pub scattered: ScalarGridField,
    pub total: ScalarGridField,
    pub residual: f64,
    pub iterations: usize,
}

/// Forward solver context: precomputed convolution tables and cell-averaged
/// contrast for one medium/grid pair. All methods take `&self`; solves are
/// independent and safe to run concurrently.
pub struct AcousticSolver {
    pub medium: AcousticMedium,
    pub grid: GridSpec,
    conv: ScalarConvolution,
    contrast: Vec<Complex64>,
    support: Vec<usize>,
    pub gmres: GmresConfig,
}

impl AcousticSolver {
    pub fn new(medium: AcousticMedium, grid: GridSpec) -> Result<Self> {
        grid.check_covers(&medium.shape)?;
        let conv = ScalarConvolution::helmholtz(&grid, medium.wavenumber);
        let contrast = sample_contrast(&medium, &grid);
        let support: Vec<usize> = contrast
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(AcousticSolver {
            medium,
            grid,
            conv,
            contrast,
            support,
            gmres: GmresConfig::default(),
        })
    }

    pub fn contrast_samples(&self) -> &[Complex64] {
        &self.contrast
    }

    /// K phi = -k^2 * V[(1-n) phi] applied on the grid.
    pub fn apply_k(&self, field: &ScalarGridField) -> Result<ScalarGridField> {
        if field.grid != self.grid {
            return Err(Error::Config("field grid does not match the solver grid".into()));
        }
        Ok(ScalarGridField {
            grid: self.grid,
            values: self.apply_k_values(&field.values),
        })
    }

    fn apply_k_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        let k2 = self.medium.wavenumber * self.medium.wavenumber;
        let weighted: Vec<Complex64> = values
            .par_iter()
            .zip(self.contrast.par_iter())
            .map(|(v, c)| v * c)
            .collect();
        let mut out = self.conv.apply(&weighted);
        out.par_iter_mut().for_each(|v| *v *= -k2);
        out
    }

    /// Incident samples used as the solver right-hand side. Point-source
    /// fields are cell-averaged near the source's boundary foot point (and
    /// near the source itself), where plain midpoint sampling would
    /// under-resolve the near-singularity.
    pub fn incident_field(&self, incident: &AcousticIncident) -> Result<ScalarGridField> {
        let k = self.medium.wavenumber;
        match incident {
            AcousticIncident::PlaneWave { direction } => plane_wave(k, direction, &self.grid),
            AcousticIncident::PointSource { location } => {
                let mut field = point_source(k, location, &self.medium.shape, &self.grid)?;
                let foot = self.medium.shape.project_to_boundary(location);
                let dist = norm(&sub(location, &foot));
                let h = self.grid.spacing;
                let policy = Subdivision::default();
                let averaged: Vec<Option<Complex64>> = (0..self.grid.len())
                    .into_par_iter()
                    .map(|idx| {
                        let y = self.grid.node_of_flat(idx);
                        let near_foot = norm(&sub(&y, &foot)) <= 4.0 * dist;
                        let near_src = needs_subdivision(&y, h, location, &policy);
                        if !(near_foot || near_src) {
                            return None;
                        }
                        let mut acc = Complex64::ZERO;
                        let mut stats = SubdivisionStats::default();
                        subdivide_near_point(&y, h, location, &policy, &mut stats, &mut |p, vol, _| {
                            acc += phi_raw(k, norm(&sub(p, location)).max(1e-300)) * vol;
                        });
                        Some(acc / self.grid.cell_volume())
                    })
                    .collect();
                for (v, avg) in field.values.iter_mut().zip(averaged) {
                    if let Some(a) = avg {
                        *v = a;
                    }
                }
                Ok(field)
            }
        }
    }

    /// Solve (I - K) u = u_in for the given incident field. The returned
    /// residual is ||(I-K)u - u_in||_2 / ||u_in||_2 over the contrast
    /// support, and is guaranteed <= tol.
    pub fn solve(&self, incident: &AcousticIncident, tol: f64) -> Result<AcousticSolution> {
        if tol <= 0.0 {
            return Err(Error::Precondition("solver tolerance must be positive".into()));
        }
        let u_in = self.incident_field(incident)?;
        let rhs = self.apply_k_values(&u_in.values);
        let rhs_norm = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let uin_support: f64 = self
            .support
            .iter()
            .map(|&i| u_in.values[i].norm_sqr())
            .sum::<f64>()
            .sqrt();

        if rhs_norm == 0.0 || self.support.is_empty() {
            let scattered = ScalarGridField::zeros(self.grid);
            return Ok(AcousticSolution {
                incident: incident.clone(),
                total: u_in.clone(),
                scattered,
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
            let w = sol.x;

            // honest residual on the contrast support
            let mut ku = self.apply_k_values(&w);
            for (kv, r) in ku.iter_mut().zip(&rhs) {
                *kv = *kv + r; // K w + K u_in
            }
            let res: f64 = self
                .support
                .iter()
                .map(|&i| (w[i] - ku[i]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let rel = res / uin_support.max(1e-300);
            if rel <= tol && sol.converged {
                let scattered = ScalarGridField {
                    grid: self.grid,
                    values: w,
                };
                let total = ScalarGridField {
                    grid: self.grid,
                    values: scattered
                        .values
                        .iter()
                        .zip(&u_in.values)
                        .map(|(a, b)| a + b)
                        .collect(),
                };
                return Ok(AcousticSolution {
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

    /// Far-field pattern of the scattered wave:
    /// u_inf(xhat) = -k^2/(4 pi) * integral (1-n) e^{-ik xhat.y} u(y) dy.
    pub fn far_field(&self, solution: &AcousticSolution, directions: &DirectionGrid) -> FarFieldScalar {
        let values: Vec<Complex64> = directions
            .directions
            .par_iter()
            .map(|xhat| self.far_field_at(solution, xhat))
            .collect();
        FarFieldScalar {
            grid: directions.clone(),
            values,
        }
    }

    pub fn far_field_at(&self, solution: &AcousticSolution, xhat: &Vec3) -> Complex64 {
        let k = self.medium.wavenumber;
        let partials: Vec<Complex64> = self
            .support
            .par_chunks(8192)
            .map(|chunk| {
                let mut acc = Complex64::ZERO;
                for &idx in chunk {
                    let y = self.grid.node_of_flat(idx);
                    let phase = Complex64::from_polar(1.0, -k * dot(xhat, &y));
                    acc += self.contrast[idx] * solution.total.values[idx] * phase;
                }
                acc
            })
            .collect();
        let sum: Complex64 = partials.into_iter().sum();
        -k * k / FOUR_PI * self.grid.cell_volume() * sum
    }

    /// Scattered field at an exterior point by composite quadrature with
    /// near-boundary cell subdivision.
    pub fn eval_scattered(&self, solution: &AcousticSolution, x: &Vec3) -> Result<Complex64> {
        if self.medium.shape.signed_distance(x) <= 0.0 {
            return Err(Error::Precondition(format!(
                "eval_scattered requires an exterior point, {x:?} is not"
            )));
        }
        Ok(self.eval_scattered_any(solution, x))
    }

    /// Scattered field at any point (the volume potential is continuous
    /// across the boundary, so interior points are admissible; used by the
    /// transmission-condition diagnostics).
    pub fn eval_scattered_any(&self, solution: &AcousticSolution, x: &Vec3) -> Complex64 {
        let k = self.medium.wavenumber;
        let policy = Subdivision::default();
        let acc = self.quadrature_sum(solution, x, &policy, |r, sub_size| {
            if r < 0.5 * sub_size {
                // point effectively inside the sub-cell: analytic ball mean
                helmholtz_ball_integral(k, equivalent_ball_radius(sub_size))
                    / sub_size.powi(3)
            } else {
                phi_raw(k, r)
            }
        });
        -k * k * acc
    }

    /// Gradient of the scattered field at an exterior point. The incident
    /// factor inside the integrand is evaluated analytically; the flag
    /// reports whether the subdivision budget was exhausted anywhere.
    pub fn eval_grad_scattered(
        &self,
        solution: &AcousticSolution,
        x: &Vec3,
    ) -> Result<(CVec3, bool)> {
        if self.medium.shape.signed_distance(x) <= 0.0 {
            return Err(Error::Precondition(format!(
                "eval_grad_scattered requires an exterior point, {x:?} is not"
            )));
        }
        Ok(self.eval_grad_scattered_any(solution, x))
    }

    pub fn eval_grad_scattered_any(&self, solution: &AcousticSolution, x: &Vec3) -> (CVec3, bool) {
        let k = self.medium.wavenumber;
        let policy = Subdivision::default();
        let h = self.grid.spacing;
        let k2 = k * k;

        let partials: Vec<(CVec3, usize)> = self
            .support
            .par_chunks(2048)
            .map(|chunk| {
                let mut acc = [Complex64::ZERO; 3];
                let mut capped = 0usize;
                for &idx in chunk {
                    let y_c = self.grid.node_of_flat(idx);
                    if needs_subdivision(&y_c, h, x, &policy) {
                        let mut stats = SubdivisionStats::default();
                        subdivide_near_point(&y_c, h, x, &policy, &mut stats, &mut |y, vol, size| {
                            // whole cells take the same path as the far
                            // branch so the subdivision cutoff is seamless
                            let (m, u) = if size >= h {
                                (self.contrast[idx], solution.total.values[idx])
                            } else {
                                (
                                    self.medium.contrast_at(y),
                                    solution.scattered.interpolate(y)
                                        + solution.incident.eval(k, y),
                                )
                            };
                            if m.norm_sqr() == 0.0 {
                                return;
                            }
                            let d = sub(x, y);
                            let r = norm(&d);
                            if r == 0.0 {
                                return; // odd kernel: ball mean vanishes
                            }
                            let g = grad_phi_raw(k, &d, r);
                            for c in 0..3 {
                                acc[c] += g[c] * (m * u * vol);
                            }
                        });
                        capped += stats.capped_cells;
                    } else {
                        let m = self.contrast[idx];
                        let d = sub(x, &y_c);
                        let g = grad_phi_raw(k, &d, norm(&d));
                        let u = solution.total.values[idx];
                        let w = m * u * self.grid.cell_volume();
                        for c in 0..3 {
                            acc[c] += g[c] * w;
                        }
                    }
                }
                (acc, capped)
            })
            .collect();

        let mut out = [Complex64::ZERO; 3];
        let mut capped = 0;
        for (v, c) in partials {
            for i in 0..3 {
                out[i] += v[i];
            }
            capped += c;
        }
        for c in out.iter_mut() {
            *c *= -k2;
        }
        (out, capped > 0)
    }

    fn quadrature_sum(
        &self,
        solution: &AcousticSolution,
        x: &Vec3,
        policy: &Subdivision,
        kernel: impl Fn(f64, f64) -> Complex64 + Sync,
    ) -> Complex64 {
        let k = self.medium.wavenumber;
        let h = self.grid.spacing;
        let partials: Vec<Complex64> = self
            .support
            .par_chunks(2048)
            .map(|chunk| {
                let mut acc = Complex64::ZERO;
                for &idx in chunk {
                    let y_c = self.grid.node_of_flat(idx);
                    if needs_subdivision(&y_c, h, x, policy) {
                        let mut stats = SubdivisionStats::default();
                        subdivide_near_point(&y_c, h, x, policy, &mut stats, &mut |y, vol, size| {
                            let (m, u) = if size >= h {
                                (self.contrast[idx], solution.total.values[idx])
                            } else {
                                (
                                    self.medium.contrast_at(y),
                                    solution.scattered.interpolate(y)
                                        + solution.incident.eval(k, y),
                                )
                            };
                            if m.norm_sqr() == 0.0 {
                                return;
                            }
                            let r = norm(&sub(x, y));
                            acc += kernel(r, size) * m * u * vol;
                        });
                    } else {
                        let r = norm(&sub(x, &y_c));
                        acc += kernel(r, h)
                            * self.contrast[idx]
                            * solution.total.values[idx]
                            * self.grid.cell_volume();
                    }
                }
                acc
            })
            .collect();
        partials.into_iter().sum()
    }

    /// Total field (incident + scattered) at any point.
    pub fn eval_total(&self, solution: &AcousticSolution, x: &Vec3) -> Complex64 {
        solution.incident.eval(self.medium.wavenumber, x) + self.eval_scattered_any(solution, x)
    }

    /// Gradient of the total field at any point.
    pub fn eval_grad_total(&self, solution: &AcousticSolution, x: &Vec3) -> CVec3 {
        let gi = solution.incident.eval_gradient(self.medium.wavenumber, x);
        let (gs, _) = self.eval_grad_scattered_any(solution, x);
        [gi[0] + gs[0], gi[1] + gs[1], gi[2] + gs[2]]
    }
}

struct ContrastOperator<'a> {
    solver: &'a AcousticSolver,
}

impl LinearOperator for ContrastOperator<'_> {
    fn dim(&self) -> usize {
        self.solver.grid.len()
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let kx = self.solver.apply_k_values(x);
        for i in 0..x.len() {
            y[i] = x[i] - kx[i];
        }
    }
}

/// Cell-averaged contrast samples. Cells cut by the boundary are averaged
/// over a 4^3 sub-grid so the discrete medium converges like O(h^2) instead
/// of the staircase O(h).
fn sample_contrast(medium: &AcousticMedium, grid: &GridSpec) -> Vec<Complex64> {
    let h = grid.spacing;
    let half_diag = 0.5 * h * 3.0f64.sqrt();
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = grid.node_of_flat(idx);
            let sd = medium.shape.signed_distance(&x);
            if sd > half_diag {
                Complex64::ZERO
            } else if sd < -half_diag {
                medium.contrast_at(&x)
            } else {
                let mut acc = Complex64::ZERO;
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

/// Normalized defect of the mixed reciprocity relation
/// `factor * u_inf(-d; source at z) = u_sc(z; plane wave d)`,
/// both sides computed from independent forward solves.
pub fn mixed_reciprocity_residual_with_factor(
    solver: &AcousticSolver,
    z: &Vec3,
    d: &Vec3,
    tol: f64,
    factor: f64,
) -> Result<f64> {
    let ps = solver.solve(&AcousticIncident::PointSource { location: *z }, tol)?;
    let minus_d = [-d[0], -d[1], -d[2]];
    let lhs = solver.far_field_at(&ps, &minus_d) * factor;

    let pw = solver.solve(&AcousticIncident::PlaneWave { direction: *d }, tol)?;
    let rhs = solver.eval_scattered(&pw, z)?;

    Ok((lhs - rhs).norm() / rhs.norm().max(1e-14))
}

/// Mixed reciprocity residual with the standard 4 pi factor.
pub fn mixed_reciprocity_residual(
    solver: &AcousticSolver,
    z: &Vec3,
    d: &Vec3,
    tol: f64,
) -> Result<f64> {
    mixed_reciprocity_residual_with_factor(solver, z, d, tol, MIXED_RECIPROCITY_FACTOR)
}

/// Relative jumps of the total field and its normal derivative across the
/// boundary, probed at +/- s along the normal of a boundary point.
pub fn boundary_jump(
    solver: &AcousticSolver,
    solution: &AcousticSolution,
    point: &crate::geometry::SurfacePoint,
    s: f64,
) -> (f64, f64) {
    let xp = crate::linalg::add(&point.position, &crate::linalg::scale(&point.normal, s));
    let xm = crate::linalg::sub(&point.position, &crate::linalg::scale(&point.normal, s));
    let up = solver.eval_total(solution, &xp);
    let um = solver.eval_total(solution, &xm);
    let u_jump = (up - um).norm() / up.norm().max(um.norm()).max(1e-14);

    let gp = solver.eval_grad_total(solution, &xp);
    let gm = solver.eval_grad_total(solution, &xm);
    let dp = crate::linalg::rcdot(&point.normal, &gp);
    let dm = crate::linalg::rcdot(&point.normal, &gm);
    let d_jump = (dp - dm).norm() / dp.norm().max(dm.norm()).max(1e-14);
    (u_jump, d_jump)
}
