//! FFT application of the volume potentials.
//!
//! The grid is zero-padded to twice its extent so the circular convolution
//! reproduces the discrete sum exactly; the kernel is tabulated per
//! displacement (truncated beyond the grid-box diameter, which no physical
//! displacement exceeds) with the singular self cell replaced by the
//! analytic mean over a ball of equal volume.

use crate::fft::Fft3;
use crate::grid::GridSpec;
use num_complex::Complex64;
use rayon::prelude::*;

/// Radius of the ball with the same volume as a grid cell of size h.
pub fn equivalent_ball_radius(h: f64) -> f64 {
    h * (3.0 / (4.0 * std::f64::consts::PI)).cbrt()
}

/// Integral of e^{ikr}/(4 pi r) over a ball of radius a centered at the
/// singularity: (e^{ika}(1 - ika) - 1)/k^2.
pub fn helmholtz_ball_integral(k: f64, a: f64) -> Complex64 {
    let ika = Complex64::new(0.0, k * a);
    (ika.exp() * (Complex64::ONE - ika) - 1.0) / (k * k)
}

pub(crate) fn signed_displacement(p: usize, m: usize) -> i64 {
    if p <= m / 2 {
        p as i64
    } else {
        p as i64 - m as i64
    }
}

/// Discrete convolution with a radial kernel `h^3 * kernel(r)`.
pub struct ScalarConvolution {
    grid: GridSpec,
    padded: [usize; 3],
    fft: Fft3,
    kernel_hat: Vec<Complex64>,
}

impl ScalarConvolution {
    /// Tabulate the Helmholtz kernel e^{ikr}/(4 pi r) for wavenumber `k`.
    pub fn helmholtz(grid: &GridSpec, k: f64) -> Self {
        let h = grid.spacing;
        let self_weight = helmholtz_ball_integral(k, equivalent_ball_radius(h));
        Self::from_radial(grid, self_weight, move |r| {
            let kr = k * r;
            Complex64::new(kr.cos(), kr.sin()) / (4.0 * std::f64::consts::PI * r)
        })
    }

    /// Generic radial kernel; `self_weight` is the exact integral of the
    /// kernel over the equivalent-volume ball around the singularity.
    pub fn from_radial(
        grid: &GridSpec,
        self_weight: Complex64,
        kernel: impl Fn(f64) -> Complex64 + Sync,
    ) -> Self {
        let padded = [2 * grid.dims[0], 2 * grid.dims[1], 2 * grid.dims[2]];
        let fft = Fft3::new(padded);
        let h = grid.spacing;
        let vol = grid.cell_volume();
        let truncation = h * ((grid.dims[0] * grid.dims[0]
            + grid.dims[1] * grid.dims[1]
            + grid.dims[2] * grid.dims[2]) as f64)
            .sqrt();
        let [m1, m2, m3] = padded;
        let mut table: Vec<Complex64> = (0..m1 * m2 * m3)
            .into_par_iter()
            .map(|idx| {
                let p3 = idx % m3;
                let rest = idx / m3;
                let p2 = rest % m2;
                let p1 = rest / m2;
                let d1 = signed_displacement(p1, m1);
                let d2 = signed_displacement(p2, m2);
                let d3 = signed_displacement(p3, m3);
                let r = h * (((d1 * d1 + d2 * d2 + d3 * d3) as f64).sqrt());
                if d1 == 0 && d2 == 0 && d3 == 0 {
                    self_weight
                } else if r <= truncation {
                    kernel(r) * vol
                } else {
                    Complex64::ZERO
                }
            })
            .collect();
        fft.forward(&mut table);
        ScalarConvolution {
            grid: *grid,
            padded,
            fft,
            kernel_hat: table,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Apply the convolution to grid samples, returning grid samples.
    pub fn apply(&self, src: &[Complex64]) -> Vec<Complex64> {
        let mut buf = self.pad(src);
        self.fft.forward(&mut buf);
        buf.par_iter_mut()
            .zip(self.kernel_hat.par_iter())
            .for_each(|(v, k)| *v *= k);
        self.fft.inverse(&mut buf);
        self.crop(&buf)
    }

    fn pad(&self, src: &[Complex64]) -> Vec<Complex64> {
        pad_into(self.grid.dims, self.padded, src)
    }

    fn crop(&self, buf: &[Complex64]) -> Vec<Complex64> {
        crop_from(self.grid.dims, self.padded, buf)
    }
}

fn pad_into(dims: [usize; 3], padded: [usize; 3], src: &[Complex64]) -> Vec<Complex64> {
    let [n1, n2, n3] = dims;
    let [m1, m2, m3] = padded;
    let mut buf = vec![Complex64::ZERO; m1 * m2 * m3];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let src_off = (i1 * n2 + i2) * n3;
            let dst_off = (i1 * m2 + i2) * m3;
            buf[dst_off..dst_off + n3].copy_from_slice(&src[src_off..src_off + n3]);
        }
    }
    buf
}

fn crop_from(dims: [usize; 3], padded: [usize; 3], buf: &[Complex64]) -> Vec<Complex64> {
    let [n1, n2, n3] = dims;
    let [_, m2, m3] = padded;
    let mut out = vec![Complex64::ZERO; n1 * n2 * n3];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let dst_off = (i1 * n2 + i2) * n3;
            let src_off = (i1 * m2 + i2) * m3;
            out[dst_off..dst_off + n3].copy_from_slice(&buf[src_off..src_off + n3]);
        }
    }
    out
}

/// Discrete convolution with the symmetric Navier tensor kernel. Six unique
/// component tables share the scalar FFT machinery; the self cell combines
/// the analytic Kelvin ball mean with the bounded remainder of the tensor.
pub struct TensorConvolution {
    grid: GridSpec,
    padded: [usize; 3],
    fft: Fft3,
    /// upper-triangle component order (0,0),(0,1),(0,2),(1,1),(1,2),(2,2)
    kernel_hat: [Vec<Complex64>; 6],
}

const SYM_INDEX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];

impl TensorConvolution {
    pub fn navier(grid: &GridSpec, kernel: &crate::elastic::kernels::NavierKernel) -> Self {
        let padded = [2 * grid.dims[0], 2 * grid.dims[1], 2 * grid.dims[2]];
        let fft = Fft3::new(padded);
        let h = grid.spacing;
        let vol = grid.cell_volume();
        let truncation = h * ((grid.dims[0] * grid.dims[0]
            + grid.dims[1] * grid.dims[1]
            + grid.dims[2] * grid.dims[2]) as f64)
            .sqrt();
        // self weight: integral of Pi0 over the equivalent ball plus the
        // finite limit of Pi - Pi0 times the cell volume (diagonal only)
        let a_eq = equivalent_ball_radius(h);
        let c = kernel.consts;
        let self_diag = Complex64::from(
            2.0 * std::f64::consts::PI * a_eq * a_eq * (c.alpha + c.beta / 3.0),
        ) + kernel.zero_limit() * vol;

        let [m1, m2, m3] = padded;
        let n_pad = m1 * m2 * m3;
        let entries: Vec<[Complex64; 6]> = (0..n_pad)
            .into_par_iter()
            .map(|idx| {
                let p3 = idx % m3;
                let rest = idx / m3;
                let p2 = rest % m2;
                let p1 = rest / m2;
                let d = [
                    signed_displacement(p1, m1),
                    signed_displacement(p2, m2),
                    signed_displacement(p3, m3),
                ];
                let r = h * (((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64).sqrt());
                let mut out = [Complex64::ZERO; 6];
                if d == [0, 0, 0] {
                    out[0] = self_diag;
                    out[3] = self_diag;
                    out[5] = self_diag;
                } else if r <= truncation {
                    let co = kernel.coeffs(r);
                    let u = [
                        d[0] as f64 * h / r,
                        d[1] as f64 * h / r,
                        d[2] as f64 * h / r,
                    ];
                    let mut t = 0;
                    for a in 0..3 {
                        for b in a..3 {
                            let mut v = co.pi_xx * (u[a] * u[b]);
                            if a == b {
                                v += co.pi_iso;
                            }
                            out[t] = v * vol;
                            t += 1;
                        }
                    }
                }
                out
            })
            .collect();

        let mut kernel_hat: [Vec<Complex64>; 6] = Default::default();
        for t in 0..6 {
            let mut table: Vec<Complex64> = entries.iter().map(|e| e[t]).collect();
            fft.forward(&mut table);
            kernel_hat[t] = table;
        }
        TensorConvolution {
            grid: *grid,
            padded,
            fft,
            kernel_hat,
        }
    }

    /// Apply the tensor convolution to the three component fields.
    pub fn apply(&self, src: &[Vec<Complex64>; 3]) -> [Vec<Complex64>; 3] {
        let mut src_hat: [Vec<Complex64>; 3] = Default::default();
        for c in 0..3 {
            let mut buf = pad_into(self.grid.dims, self.padded, &src[c]);
            self.fft.forward(&mut buf);
            src_hat[c] = buf;
        }
        let mut out: [Vec<Complex64>; 3] = Default::default();
        for a in 0..3 {
            let mut acc = vec![Complex64::ZERO; src_hat[0].len()];
            for b in 0..3 {
                let table = &self.kernel_hat[SYM_INDEX[a][b]];
                acc.par_iter_mut()
                    .zip(src_hat[b].par_iter())
                    .zip(table.par_iter())
                    .for_each(|((o, s), k)| *o += s * k);
            }
            self.fft.inverse(&mut acc);
            out[a] = crop_from(self.grid.dims, self.padded, &acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm, sub};

    #[test]
    fn matches_direct_summation() {
        let grid = GridSpec::new([-0.5; 3], 0.125, [8, 8, 8]).unwrap();
        let k = 1.3;
        let conv = ScalarConvolution::helmholtz(&grid, k);
        let src: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new((i as f64 * 0.1).sin(), (i as f64 * 0.07).cos()))
            .collect();
        let fast = conv.apply(&src);

        let vol = grid.cell_volume();
        let self_w = helmholtz_ball_integral(k, equivalent_ball_radius(grid.spacing));
        for &target in &[0usize, 13, 200, 511] {
            let x = grid.node_of_flat(target);
            let mut direct = Complex64::ZERO;
            for (j, y) in grid.nodes() {
                if j == target {
                    direct += self_w * src[j];
                } else {
                    let r = norm(&sub(&x, &y));
                    let kr = k * r;
                    direct += Complex64::new(kr.cos(), kr.sin())
                        / (4.0 * std::f64::consts::PI * r)
                        * vol
                        * src[j];
                }
            }
            assert!(
                (fast[target] - direct).norm() < 1e-11 * direct.norm().max(1.0),
                "node {target}: fft {} direct {}",
                fast[target],
                direct
            );
        }
    }
}
