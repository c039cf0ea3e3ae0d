//! Fundamental-solution kernels for the time-harmonic Navier equation.
//!
//! The full tensor is
//!   Pi(x,y) = Phi_ks(x,y)/mu * I + (1/omega^2) Hess_x [Phi_ks - Phi_kp],
//! which reduces to the radial form pi_iso(r) I + pi_xx(r) xbar xbar^T.
//! The Kelvin matrix Pi0 = alpha/r I + beta/r xbar xbar^T is its 1/r part.
//! Radial coefficients switch to power series at small kr, where the
//! closed forms lose digits to cancellation between the two wavenumbers.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub, CMat3, CVec3, Mat3, Vec3};
use num_complex::Complex64;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// The two coefficients of the Kelvin matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelvinConstants {
    pub alpha: f64,
    pub beta: f64,
}

/// alpha = (lambda+3mu)/(8 pi mu (lambda+2mu)),
/// beta  = (lambda+mu) /(8 pi mu (lambda+2mu)); alpha + beta = 1/(4 pi mu).
pub fn kelvin_constants(lambda: f64, mu: f64) -> Result<KelvinConstants> {
    if mu <= 0.0 || lambda + 2.0 * mu <= 0.0 {
        return Err(Error::Config(format!(
            "Kelvin constants need mu > 0 and lambda + 2 mu > 0, got lambda={lambda}, mu={mu}"
        )));
    }
    let denom = 8.0 * std::f64::consts::PI * mu * (lambda + 2.0 * mu);
    Ok(KelvinConstants {
        alpha: (lambda + 3.0 * mu) / denom,
        beta: (lambda + mu) / denom,
    })
}

/// Kelvin matrix alpha/r I + beta/r xbar xbar^T.
pub fn kelvin_tensor(consts: &KelvinConstants, x: &Vec3, y: &Vec3) -> Result<Mat3> {
    let d = sub(x, y);
    let r = norm(&d);
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    let u = [d[0] / r, d[1] / r, d[2] / r];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = consts.beta / r * u[i] * u[j];
        }
        m[i][i] += consts.alpha / r;
    }
    Ok(m)
}

/// Gradient of the Kelvin field Pi0(x,y) b with respect to x; entry (i,j)
/// is d_j (Pi0 b)_i:
///   (1/r^2) [ -alpha b xbar^T
///             + beta ((xbar.b) I + xbar b^T - 3 (xbar.b) xbar xbar^T) ].
pub fn grad_kelvin_apply(consts: &KelvinConstants, x: &Vec3, y: &Vec3, b: &Vec3) -> Result<Mat3> {
    let d = sub(x, y);
    let r = norm(&d);
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    let u = [d[0] / r, d[1] / r, d[2] / r];
    let ub = dot(&u, b);
    let r2 = r * r;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (-consts.alpha * b[i] * u[j]
                + consts.beta * (u[i] * b[j] - 3.0 * ub * u[i] * u[j]))
                / r2;
        }
        m[i][i] += consts.beta * ub / r2;
    }
    Ok(m)
}

/// Closed form of grad(Pi0 b) . (Pi0 b):
///   (1/r^3) [ -alpha^2 (xbar.b) b
///             + (alpha beta |b|^2 - (3 alpha beta + beta^2)(xbar.b)^2) xbar ].
/// For unit b the xbar coefficient reduces to
/// alpha beta - (3 alpha beta + beta^2)(xbar.b)^2.
pub fn grad_kelvin_contract(consts: &KelvinConstants, x: &Vec3, y: &Vec3, b: &Vec3) -> Result<Vec3> {
    let d = sub(x, y);
    let r = norm(&d);
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    let u = [d[0] / r, d[1] / r, d[2] / r];
    let ub = dot(&u, b);
    let b2 = dot(b, b);
    let (a, be) = (consts.alpha, consts.beta);
    let cb = -a * a * ub;
    let cu = a * be * b2 - (3.0 * a * be + be * be) * ub * ub;
    let r3 = r * r * r;
    Ok([
        (cb * b[0] + cu * u[0]) / r3,
        (cb * b[1] + cu * u[1]) / r3,
        (cb * b[2] + cu * u[2]) / r3,
    ])
}

/// Radial coefficients of the Navier tensor and their r-derivatives at one
/// separation: Pi = pi_iso I + pi_xx xbar xbar^T.
#[derive(Debug, Clone, Copy)]
pub struct NavierCoeffs {
    pub pi_iso: Complex64,
    pub pi_xx: Complex64,
    pub d_pi_iso: Complex64,
    pub d_pi_xx: Complex64,
}

/// Evaluator for the Navier fundamental tensor of the background medium.
#[derive(Debug, Clone)]
pub struct NavierKernel {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub ks: f64,
    pub kp: f64,
    pub consts: KelvinConstants,
    /// Below this separation the series evaluation takes over.
    switch_r: f64,
}

impl NavierKernel {
    pub fn new(lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        if omega <= 0.0 {
            return Err(Error::Config(format!("frequency must be positive, got {omega}")));
        }
        if mu <= 0.0 || 2.0 * mu + 3.0 * lambda <= 0.0 {
            return Err(Error::Config(format!(
                "Lame constants must satisfy mu > 0 and 2 mu + 3 lambda > 0, got lambda={lambda}, mu={mu}"
            )));
        }
        let consts = kelvin_constants(lambda, mu)?;
        let ks = omega * (1.0 / mu).sqrt();
        let kp = omega * (1.0 / (lambda + 2.0 * mu)).sqrt();
        Ok(NavierKernel {
            lambda,
            mu,
            omega,
            ks,
            kp,
            consts,
            switch_r: 0.5 / ks.max(kp),
        })
    }

    /// Limit of Pi - Pi0 as r -> 0: i (2 ks^3 + kp^3)/(12 pi omega^2) I.
    pub fn zero_limit(&self) -> Complex64 {
        Complex64::new(
            0.0,
            (2.0 * self.ks.powi(3) + self.kp.powi(3)) / (12.0 * std::f64::consts::PI * self.omega * self.omega),
        )
    }

    pub fn coeffs(&self, r: f64) -> NavierCoeffs {
        if r < self.switch_r {
            self.coeffs_series(r)
        } else {
            self.coeffs_closed(r)
        }
    }

    fn coeffs_closed(&self, r: f64) -> NavierCoeffs {
        let (ks, kp) = (self.ks, self.kp);
        let w2 = self.omega * self.omega;
        let (p_s, d1_s, d2_s, d3_s) = phi_derivatives(ks, r);
        let (_p_p, d1_p, d2_p, d3_p) = phi_derivatives(kp, r);
        let psi1 = d1_s - d1_p;
        let psi2 = d2_s - d2_p;
        let psi3 = d3_s - d3_p;
        let pi_xx = (psi2 - psi1 / r) / w2;
        NavierCoeffs {
            pi_iso: p_s / self.mu + psi1 / (r * w2),
            pi_xx,
            d_pi_iso: d1_s / self.mu + pi_xx / r,
            d_pi_xx: (psi3 - psi2 / r + psi1 / (r * r)) / w2,
        }
    }

    /// Power series in r; the m-th term carries
    /// c_m = (i ks)^m - (i kp)^m, which is what the closed forms cancel.
    fn coeffs_series(&self, r: f64) -> NavierCoeffs {
        let w2 = self.omega * self.omega;
        let i_ks = Complex64::new(0.0, self.ks);
        let i_kp = Complex64::new(0.0, self.kp);
        let mut pow_s = i_ks * i_ks;
        let mut pow_p = i_kp * i_kp;
        let mut fact = 2.0f64; // m!
        let mut r_m3 = 1.0 / r; // r^{m-3}
        let mut psi1_over_r = Complex64::ZERO; // psi'(r)/r
        let mut psi_xx = Complex64::ZERO; // psi'' - psi'/r
        let mut psi_xx_d = Complex64::ZERO; // psi''' - psi''/r + psi'/r^2
        for m in 2..=30u32 {
            let c = pow_s - pow_p;
            let mf = m as f64;
            let base = c / (fact * FOUR_PI);
            psi1_over_r += base * (mf - 1.0) * r_m3;
            psi_xx += base * (mf - 1.0) * (mf - 3.0) * r_m3;
            psi_xx_d += base * (mf - 1.0) * (mf - 3.0) * (mf - 3.0) * (r_m3 / r);
            pow_s *= i_ks;
            pow_p *= i_kp;
            fact *= mf + 1.0;
            r_m3 *= r;
        }
        let (p_s, d1_s, _, _) = phi_derivatives(self.ks, r);
        let pi_xx = psi_xx / w2;
        NavierCoeffs {
            pi_iso: p_s / self.mu + psi1_over_r / w2,
            pi_xx,
            d_pi_iso: d1_s / self.mu + pi_xx / r,
            d_pi_xx: psi_xx_d / w2,
        }
    }

    /// Full tensor Pi(x,y).
    pub fn tensor(&self, x: &Vec3, y: &Vec3) -> Result<CMat3> {
        let d = sub(x, y);
        let r = norm(&d);
        if r == 0.0 {
            return Err(Error::Singularity);
        }
        let c = self.coeffs(r);
        let u = [d[0] / r, d[1] / r, d[2] / r];
        let mut m = [[Complex64::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = c.pi_xx * (u[i] * u[j]);
            }
            m[i][i] += c.pi_iso;
        }
        Ok(m)
    }

    /// Pi(x,y) a for a complex polarization.
    pub fn apply(&self, x: &Vec3, y: &Vec3, a: &CVec3) -> Result<CVec3> {
        let d = sub(x, y);
        let r = norm(&d);
        if r == 0.0 {
            return Err(Error::Singularity);
        }
        Ok(self.apply_raw(&d, r, a))
    }

    #[inline]
    pub(crate) fn apply_raw(&self, d: &Vec3, r: f64, a: &CVec3) -> CVec3 {
        let c = self.coeffs(r);
        let u = [d[0] / r, d[1] / r, d[2] / r];
        let ua = a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
        [
            c.pi_iso * a[0] + c.pi_xx * ua * u[0],
            c.pi_iso * a[1] + c.pi_xx * ua * u[1],
            c.pi_iso * a[2] + c.pi_xx * ua * u[2],
        ]
    }

    /// Gradient of the field Pi(x,y) a with respect to x; entry (i,j) is
    /// d_j (Pi a)_i:
    ///   pi_iso' xbar_j a_i + pi_xx' (xbar.a) xbar_i xbar_j
    ///   + (pi_xx/r)(a_j xbar_i - 2 (xbar.a) xbar_i xbar_j + (xbar.a) d_ij).
    pub fn grad_apply(&self, x: &Vec3, y: &Vec3, a: &CVec3) -> Result<CMat3> {
        let d = sub(x, y);
        let r = norm(&d);
        if r == 0.0 {
            return Err(Error::Singularity);
        }
        Ok(self.grad_apply_raw(&d, r, a))
    }

    #[inline]
    pub(crate) fn grad_apply_raw(&self, d: &Vec3, r: f64, a: &CVec3) -> CMat3 {
        let c = self.coeffs(r);
        let u = [d[0] / r, d[1] / r, d[2] / r];
        let ua = a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
        let xr = c.pi_xx / r;
        let mut m = [[Complex64::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = c.d_pi_iso * (a[i] * u[j])
                    + c.d_pi_xx * (ua * (u[i] * u[j]))
                    + xr * (a[j] * u[i] - 2.0 * ua * (u[i] * u[j]));
                if i == j {
                    m[i][j] += xr * ua;
                }
            }
        }
        m
    }
}

/// e^{ikr}/(4 pi r) and its first three r-derivatives.
fn phi_derivatives(k: f64, r: f64) -> (Complex64, Complex64, Complex64, Complex64) {
    let kr = k * r;
    let e = Complex64::new(kr.cos(), kr.sin());
    let r2 = r * r;
    let p = e / (FOUR_PI * r);
    let d1 = e * Complex64::new(-1.0, kr) / (FOUR_PI * r2);
    let d2 = e * Complex64::new(2.0 - kr * kr, -2.0 * kr) / (FOUR_PI * r2 * r);
    let d3 = e * Complex64::new(3.0 * kr * kr - 6.0, 6.0 * kr - kr * kr * kr) / (FOUR_PI * r2 * r2);
    (p, d1, d2, d3)
}
