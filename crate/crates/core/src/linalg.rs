//! Small fixed-size vector and matrix helpers used throughout the solvers.

use num_complex::Complex64;

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];
/// Row-major 3x3 complex matrix; `m[i][j]` is row `i`, column `j`.
pub type CMat3 = [[Complex64; 3]; 3];
pub type Mat3 = [[f64; 3]; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cdot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn cnorm(a: &CVec3) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).sqrt()
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn normalize(a: &Vec3) -> Vec3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn ccross(a: &CVec3, b: &CVec3) -> CVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Dot of a real vector with a complex vector.
pub fn rcdot(a: &Vec3, b: &CVec3) -> Complex64 {
    b[0] * a[0] + b[1] * a[1] + b[2] * a[2]
}

pub fn to_cvec(a: &Vec3) -> CVec3 {
    [a[0].into(), a[1].into(), a[2].into()]
}

pub fn cadd(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn csub(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cscale(a: &CVec3, s: Complex64) -> CVec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn czero() -> CVec3 {
    [Complex64::ZERO; 3]
}

pub fn cmat_zero() -> CMat3 {
    [[Complex64::ZERO; 3]; 3]
}

/// `m * v` for a row-major 3x3 matrix.
pub fn cmat_vec(m: &CMat3, v: &CVec3) -> CVec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// `m^T * v` for a row-major 3x3 matrix.
pub fn cmat_tvec(m: &CMat3, v: &CVec3) -> CVec3 {
    [
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    ]
}

pub fn cmat_add_assign(m: &mut CMat3, other: &CMat3) {
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] += other[i][j];
        }
    }
}

pub fn cmat_scale(m: &CMat3, s: Complex64) -> CMat3 {
    let mut out = cmat_zero();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j] * s;
        }
    }
    out
}

/// Frobenius norm of a 3x3 complex matrix.
pub fn cmat_frobenius(m: &CMat3) -> f64 {
    let mut s = 0.0;
    for row in m {
        for e in row {
            s += e.norm_sqr();
        }
    }
    s.sqrt()
}

pub fn cmat_sub(a: &CMat3, b: &CMat3) -> CMat3 {
    let mut out = cmat_zero();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

/// Deterministic pseudo-random stream for sampling-based checks.
///
/// xorshift64*; not cryptographic, just reproducible across platforms.
#[derive(Clone)]
pub struct SmallRng(u64);

impl SmallRng {
    pub fn new(seed: u64) -> Self {
        SmallRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniformly distributed unit vector.
    pub fn unit_vec(&mut self) -> Vec3 {
        loop {
            let v = [
                self.range(-1.0, 1.0),
                self.range(-1.0, 1.0),
                self.range(-1.0, 1.0),
            ];
            let n = norm(&v);
            if n > 1e-3 && n <= 1.0 {
                return scale(&v, 1.0 / n);
            }
        }
    }
}
