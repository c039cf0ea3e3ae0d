//! Direction grids on the unit sphere and far-field sample containers.
//!
//! The quadrature is product Gauss-Legendre in the polar cosine times a
//! uniform azimuth grid; the weights sum to 4*pi.

use crate::error::{Error, Result};
use crate::linalg::{cnorm, csub, cscale, rcdot, CVec3, Vec3};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    /// Polar angles of each sample.
    pub theta: Vec<f64>,
    /// Azimuths of each sample.
    pub phi: Vec<f64>,
    /// Unit direction vectors.
    pub directions: Vec<Vec3>,
    /// Quadrature weights, summing to 4*pi.
    pub weights: Vec<f64>,
}

impl DirectionGrid {
    /// `n_polar` Gauss-Legendre nodes in cos(theta) times `n_azimuth`
    /// equispaced azimuths.
    pub fn gauss_legendre(n_polar: usize, n_azimuth: usize) -> Result<Self> {
        if n_polar == 0 || n_azimuth == 0 {
            return Err(Error::Config("direction grid sizes must be positive".into()));
        }
        let (nodes, gl_weights) = gauss_legendre_rule(n_polar);
        let mut grid = DirectionGrid {
            theta: Vec::new(),
            phi: Vec::new(),
            directions: Vec::new(),
            weights: Vec::new(),
        };
        let dphi = 2.0 * std::f64::consts::PI / n_azimuth as f64;
        for (ct, w) in nodes.iter().zip(&gl_weights) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            let theta = ct.acos();
            for m in 0..n_azimuth {
                let phi = dphi * m as f64;
                grid.theta.push(theta);
                grid.phi.push(phi);
                grid.directions.push([st * phi.cos(), st * phi.sin(), *ct]);
                grid.weights.push(w * dphi);
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Complex scalar far-field samples on a direction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldScalar {
    pub grid: DirectionGrid,
    pub values: Vec<Complex64>,
}

impl FarFieldScalar {
    /// Relative L^2(S^2) distance to a reference far field on the same grid.
    pub fn rel_l2_error(&self, reference: &FarFieldScalar) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.values.len() {
            let w = self.grid.weights[i];
            num += w * (self.values[i] - reference.values[i]).norm_sqr();
            den += w * reference.values[i].norm_sqr();
        }
        (num / den.max(1e-300)).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Complex vector far-field samples with their compressional (radial) and
/// shear (tangential) parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldVector {
    pub grid: DirectionGrid,
    pub values: Vec<CVec3>,
    pub p_part: Vec<CVec3>,
    pub s_part: Vec<CVec3>,
}

impl FarFieldVector {
    /// Largest violation of the radial/tangential split invariants,
    /// normalized by the field scale.
    pub fn split_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.values.len() {
            let xhat = &self.grid.directions[i];
            let p = &self.p_part[i];
            let s = &self.s_part[i];
            let scale = cnorm(p).max(cnorm(s)).max(1e-300);
            // tangential residual of p
            let pr = rcdot(xhat, p);
            let tang = csub(p, &cscale(&crate::linalg::to_cvec(xhat), pr));
            worst = worst.max(cnorm(&tang) / scale);
            // radial part of s
            worst = worst.max(rcdot(xhat, s).norm() / scale);
            // values = p + s
            let sum = [p[0] + s[0], p[1] + s[1], p[2] + s[2]];
            let diff = csub(&self.values[i], &sum);
            worst = worst.max(cnorm(&diff) / scale);
        }
        worst
    }

    pub fn rel_l2_error(&self, reference: &FarFieldVector) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.values.len() {
            let w = self.grid.weights[i];
            let d = csub(&self.values[i], &reference.values[i]);
            num += w * (d[0].norm_sqr() + d[1].norm_sqr() + d[2].norm_sqr());
            let r = &reference.values[i];
            den += w * (r[0].norm_sqr() + r[1].norm_sqr() + r[2].norm_sqr());
        }
        (num / den.max(1e-300)).sqrt()
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre P_n(x) and its derivative by the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Legendre polynomial P_n(x).
pub fn legendre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_4pi() {
        let g = DirectionGrid::gauss_legendre(16, 32).unwrap();
        assert!((g.weight_sum() - 4.0 * std::f64::consts::PI).abs() < 1e-10);
        for d in &g.directions {
            assert!((crate::linalg::norm(d) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_integrates_low_degree_exactly() {
        // integral of z^2 over S^2 = 4*pi/3
        let g = DirectionGrid::gauss_legendre(8, 16).unwrap();
        let integral: f64 = g
            .directions
            .iter()
            .zip(&g.weights)
            .map(|(d, w)| w * d[2] * d[2])
            .sum();
        assert!((integral - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_five_point() {
        let (nodes, weights) = gauss_legendre_rule(5);
        // reference values of the 5-point rule
        assert!((nodes[2]).abs() < 1e-14);
        assert!((nodes[4] - 0.906179845938664).abs() < 1e-12);
        assert!((weights[2] - 0.568888888888889).abs() < 1e-12);
    }
}
