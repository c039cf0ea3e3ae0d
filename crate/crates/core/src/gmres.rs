//! Restarted GMRES for the complex operator equations (I - K)u = f.
//!
//! The volume-integral operators are compact perturbations of the identity,
//! so convergence is fast and a modest restart length suffices.

use num_complex::Complex64;

/// Matrix-free linear operator.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

#[derive(Debug, Clone)]
pub struct GmresConfig {
    /// Relative residual target.
    pub tol: f64,
    /// Krylov subspace dimension before restart.
    pub restart: usize,
    /// Total iteration budget.
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            tol: 1e-8,
            restart: 30,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(ai, bi)| ai.conj() * bi).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Solve `op(x) = b` with restarted GMRES and modified Gram-Schmidt.
pub fn solve_gmres(op: &dyn LinearOperator, b: &[Complex64], config: &GmresConfig) -> GmresResult {
    let n = op.dim();
    assert_eq!(b.len(), n, "right-hand side dimension mismatch");

    let b_norm = norm(b);
    if b_norm < 1e-300 {
        return GmresResult {
            x: vec![Complex64::ZERO; n],
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }

    let mut x = vec![Complex64::ZERO; n];
    let mut total_iter = 0usize;

    loop {
        // r = b - A x
        let mut r = vec![Complex64::ZERO; n];
        op.apply(&x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let r_norm = norm(&r);
        if r_norm / b_norm < config.tol {
            return GmresResult {
                x,
                iterations: total_iter,
                residual: r_norm / b_norm,
                converged: true,
            };
        }
        if total_iter >= config.max_iter {
            return GmresResult {
                x,
                iterations: total_iter,
                residual: r_norm / b_norm,
                converged: false,
            };
        }

        let m = config.restart.min(n);
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        let mut h = vec![vec![Complex64::ZERO; m + 1]; m];
        let inv = 1.0 / r_norm;
        for ri in r.iter_mut() {
            *ri *= inv;
        }
        basis.push(r);

        let mut g = vec![Complex64::ZERO; m + 1];
        g[0] = Complex64::new(r_norm, 0.0);
        let mut cs = vec![Complex64::ZERO; m];
        let mut sn = vec![Complex64::ZERO; m];

        let mut k = 0;
        while k < m && total_iter < config.max_iter {
            total_iter += 1;

            let mut w = vec![Complex64::ZERO; n];
            op.apply(&basis[k], &mut w);

            for j in 0..=k {
                let hjk = dot(&basis[j], &w);
                h[k][j] = hjk;
                for i in 0..n {
                    w[i] -= hjk * basis[j][i];
                }
            }
            let w_norm = norm(&w);
            h[k][k + 1] = Complex64::new(w_norm, 0.0);

            if w_norm < 1e-300 {
                k += 1;
                break; // exact solution found in this subspace
            }
            let inv_w = 1.0 / w_norm;
            for wi in w.iter_mut() {
                *wi *= inv_w;
            }
            basis.push(w);

            for j in 0..k {
                let t = cs[j].conj() * h[k][j] + sn[j].conj() * h[k][j + 1];
                h[k][j + 1] = -sn[j] * h[k][j] + cs[j] * h[k][j + 1];
                h[k][j] = t;
            }
            let (c, s) = givens(h[k][k], h[k][k + 1]);
            cs[k] = c;
            sn[k] = s;
            h[k][k] = c.conj() * h[k][k] + s.conj() * h[k][k + 1];
            h[k][k + 1] = Complex64::ZERO;
            let t = c.conj() * g[k] + s.conj() * g[k + 1];
            g[k + 1] = -s * g[k] + c * g[k + 1];
            g[k] = t;

            k += 1;
            if g[k].norm() / b_norm < config.tol {
                break;
            }
        }

        // back substitution for y, then x += V y
        let mut y = vec![Complex64::ZERO; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[j][i] * y[j];
            }
            if h[i][i].norm() > 1e-300 {
                y[i] = s / h[i][i];
            }
        }
        for j in 0..k {
            let yj = y[j];
            let vj = &basis[j];
            for i in 0..n {
                x[i] += vj[i] * yj;
            }
        }
    }
}

fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    if b.norm() < 1e-300 {
        return (Complex64::ONE, Complex64::ZERO);
    }
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / r, b / r)
}
