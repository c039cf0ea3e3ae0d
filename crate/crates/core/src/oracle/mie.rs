//! Separation-of-variables reference solution for plane-wave scattering by
//! a constant-index penetrable ball (continuity of the field and its normal
//! derivative across the interface).
//!
//! With the interior wavenumber k1 = k sqrt(n), the scattering coefficients
//! are
//!   a_l = [k1 j_l'(k1 a) j_l(k a) - k j_l'(k a) j_l(k1 a)]
//!       / [k h_l'(k a) j_l(k1 a) - k1 j_l'(k1 a) h_l(k a)]
//! and the far field is u_inf(t) = (-i/k) sum (2l+1) a_l P_l(t) with
//! t = xhat.d.

use crate::error::{Error, Result};
use crate::linalg::{dot, Vec3};
use crate::sphere::{legendre, DirectionGrid, FarFieldScalar};
use num_complex::Complex64;

const MAX_ORDER: usize = 60;

/// Scattering coefficients a_l for l = 0..=order.
fn mie_coefficients(radius: f64, n_inside: f64, k: f64, order: usize) -> Result<Vec<Complex64>> {
    if n_inside <= 0.0 {
        return Err(Error::Oracle(format!(
            "the reference series needs a positive interior index, got {n_inside}"
        )));
    }
    let k1 = k * n_inside.sqrt();
    let x = k * radius;
    let x1 = k1 * radius;

    let j_x = spherical_j(x, order + 1);
    let j_x1 = spherical_j(x1, order + 1);
    let y_x = spherical_y(x, order + 1);

    let mut coeffs = Vec::with_capacity(order + 1);
    for l in 0..=order {
        let jl_x = j_x[l];
        let jl_x1 = j_x1[l];
        let djl_x = bessel_derivative(&j_x, l, x);
        let djl_x1 = bessel_derivative(&j_x1, l, x1);
        let hl_x = Complex64::new(jl_x, y_x[l]);
        let dhl_x = Complex64::new(djl_x, bessel_derivative(&y_x, l, x));

        let num = k1 * djl_x1 * jl_x - k * djl_x * jl_x1;
        let den = dhl_x * (k * jl_x1) - hl_x * (k1 * djl_x1);
        coeffs.push(num / den);
    }
    Ok(coeffs)
}

/// Far-field amplitude at scattering angle cosine t = xhat.d.
pub fn mie_far_field_amplitude(radius: f64, n_inside: f64, k: f64, cos_angle: f64) -> Result<Complex64> {
    if n_inside == 1.0 {
        return Ok(Complex64::ZERO);
    }
    let coeffs = mie_coefficients(radius, n_inside, k, MAX_ORDER)?;
    let mut sum = Complex64::ZERO;
    let mut tail_small = 0;
    for (l, a_l) in coeffs.iter().enumerate() {
        let term = (2 * l + 1) as f64 * a_l * legendre(l, cos_angle);
        sum += term;
        if a_l.norm() < 1e-12 * sum.norm().max(1e-30) {
            tail_small += 1;
            if tail_small >= 3 {
                return Ok(Complex64::new(0.0, -1.0 / k) * sum);
            }
        } else {
            tail_small = 0;
        }
    }
    Err(Error::Oracle(format!(
        "series did not converge by order {MAX_ORDER} (ka = {})",
        k * radius
    )))
}

/// Reference far field on a direction grid for incidence along `d`.
pub fn mie_far_field(
    radius: f64,
    n_inside: f64,
    k: f64,
    directions: &DirectionGrid,
    d: &Vec3,
) -> Result<FarFieldScalar> {
    let mut values = Vec::with_capacity(directions.len());
    for xhat in &directions.directions {
        values.push(mie_far_field_amplitude(radius, n_inside, k, dot(xhat, d))?);
    }
    Ok(FarFieldScalar {
        grid: directions.clone(),
        values,
    })
}

/// f_l'(x) = f_{l-1}(x) - (l+1)/x f_l(x), valid for j_l and y_l alike.
fn bessel_derivative(f: &[f64], l: usize, x: f64) -> f64 {
    if l == 0 {
        // j_0' = -j_1, y_0' = -y_1
        -f[1]
    } else {
        f[l - 1] - (l + 1) as f64 / x * f[l]
    }
}

/// Spherical Bessel j_0..j_lmax by downward (Miller) recurrence.
fn spherical_j(x: f64, lmax: usize) -> Vec<f64> {
    if x.abs() < 1e-8 {
        let mut out = vec![0.0; lmax + 2];
        out[0] = 1.0 - x * x / 6.0;
        if lmax >= 1 {
            out[1] = x / 3.0;
        }
        return out;
    }
    let start = lmax + 16 + (x.abs() as usize);
    let mut jp = 0.0f64;
    let mut j = 1e-300f64;
    let mut out = vec![0.0; lmax + 2];
    for l in (0..=start).rev() {
        let jm = (2 * l + 3) as f64 / x * j - jp;
        jp = j;
        j = jm;
        if l <= lmax + 1 {
            out[l] = j;
        }
        // rescale to avoid overflow during the downward sweep
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    let scale = (x.sin() / x) / out[0];
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// Spherical Bessel y_0..y_lmax by upward recurrence (stable).
fn spherical_y(x: f64, lmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 2];
    out[0] = -x.cos() / x;
    out[1] = -x.cos() / (x * x) - x.sin() / x;
    for l in 1..=lmax {
        out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_bessel_reference_values() {
        // j_0(1) = sin(1)/1, j_1(1) = sin(1) - cos(1), j_2(2) known
        let j = spherical_j(1.0, 3);
        assert!((j[0] - 1.0f64.sin()).abs() < 1e-14);
        assert!((j[1] - (1.0f64.sin() - 1.0f64.cos())).abs() < 1e-14);
        let j2 = spherical_j(2.0, 3);
        let expect = (3.0 / 8.0 - 1.0 / 2.0) * 2.0f64.sin() - 3.0 / 4.0 * 2.0f64.cos();
        assert!((j2[2] - expect).abs() < 1e-13, "{} vs {expect}", j2[2]);

        let y = spherical_y(1.5, 2);
        let y0 = -1.5f64.cos() / 1.5;
        assert!((y[0] - y0).abs() < 1e-14);
    }

    #[test]
    fn no_contrast_means_no_scattering() {
        let amp = mie_far_field_amplitude(0.8, 1.0, 1.0, 0.3).unwrap();
        assert_eq!(amp, Complex64::ZERO);
    }

    #[test]
    fn forward_peak_dominates() {
        let fwd = mie_far_field_amplitude(0.8, 1.5, 1.0, 1.0).unwrap();
        let bwd = mie_far_field_amplitude(0.8, 1.5, 1.0, -1.0).unwrap();
        assert!(fwd.norm() >= bwd.norm(), "fwd {} bwd {}", fwd.norm(), bwd.norm());
    }

    #[test]
    fn matches_born_for_weak_contrast() {
        let (radius, k) = (0.8, 1.0);
        for n in [1.01, 0.99] {
            let contrast = 1.0 - n;
            for t in [-1.0, -0.3, 0.5, 1.0f64] {
                let mie = mie_far_field_amplitude(radius, n, k, t).unwrap();
                // born formula with xhat.d = t: q = k sqrt(2 - 2t)
                let d = [0.0, 0.0, 1.0];
                let s = (1.0 - t * t).max(0.0).sqrt();
                let xhat = [s, 0.0, t];
                let born = crate::oracle::born_far_field(radius, contrast, k, &xhat, &d);
                assert!(
                    (mie - born).norm() <= 0.02 * born.norm(),
                    "n={n}, t={t}: mie {mie} born {born}"
                );
            }
        }
    }

    #[test]
    fn born_and_mie_disagreement_scales_quadratically() {
        // the discrepancy must be O(c^2): ratio to c^2 stays bounded
        let (radius, k, t) = (0.8, 1.0, 0.2);
        let d = [0.0, 0.0, 1.0];
        let s = (1.0 - t * t as f64).max(0.0).sqrt();
        let xhat = [s, 0.0, t];
        let mut ratios = Vec::new();
        for c in [0.01, 0.02, 0.04] {
            let n = 1.0 - c;
            let mie = mie_far_field_amplitude(radius, n, k, t).unwrap();
            let born = crate::oracle::born_far_field(radius, c, k, &xhat, &d);
            ratios.push((mie - born).norm() / (c * c));
        }
        let max = ratios.iter().cloned().fold(0.0f64, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 3.0, "ratios {ratios:?} not O(c^2)-consistent");
    }
}
