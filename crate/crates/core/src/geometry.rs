//! Scatterer geometry: implicit shapes, inside/outside tests, surface
//! normals and the point-source approach paths used by the probe.
//!
//! Shapes are represented implicitly. `implicit` is a cheap C^2 level-set
//! function (negative inside), while `signed_distance` is a genuine distance
//! to the boundary: exact for balls, foot-point Newton for the others.

use crate::error::{Error, Result};
use crate::linalg::{add, dot, norm, normalize, scale, sub, Mat3, Vec3};
use serde::{Deserialize, Serialize};

/// Tolerance on |signed_distance| below which a point counts as lying on
/// the boundary for `normal_at` and `SurfacePoint` construction.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Supported scatterer shapes. All boundaries are C^2-smooth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum ShapeKind {
    Ball {
        radius: f64,
    },
    Ellipsoid {
        semi_axes: [f64; 3],
    },
    /// Smooth union of two equal balls with centers offset along the z axis
    /// by +/- `half_separation`. The union is blended with an exponential
    /// smooth-minimum whose length scale is fixed at 0.2 x radius, which
    /// keeps the waist C^2 and gives one non-convex test geometry.
    Peanut {
        radius: f64,
        half_separation: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    #[serde(flatten)]
    pub kind: ShapeKind,
    pub center: Vec3,
}

impl ShapeSpec {
    pub fn ball(center: Vec3, radius: f64) -> Self {
        ShapeSpec {
            kind: ShapeKind::Ball { radius },
            center,
        }
    }

    pub fn ellipsoid(center: Vec3, semi_axes: [f64; 3]) -> Self {
        ShapeSpec {
            kind: ShapeKind::Ellipsoid { semi_axes },
            center,
        }
    }

    pub fn peanut(center: Vec3, radius: f64, half_separation: f64) -> Self {
        ShapeSpec {
            kind: ShapeKind::Peanut {
                radius,
                half_separation,
            },
            center,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ShapeKind::Ball { radius } => {
                if radius <= 0.0 {
                    return Err(Error::Config(format!("ball radius must be positive, got {radius}")));
                }
            }
            ShapeKind::Ellipsoid { semi_axes } => {
                if semi_axes.iter().any(|&a| a <= 0.0) {
                    return Err(Error::Config(format!(
                        "ellipsoid semi-axes must be positive, got {semi_axes:?}"
                    )));
                }
            }
            ShapeKind::Peanut {
                radius,
                half_separation,
            } => {
                if radius <= 0.0 {
                    return Err(Error::Config(format!("peanut radius must be positive, got {radius}")));
                }
                if half_separation <= 0.0 || half_separation >= 1.2 * radius {
                    return Err(Error::Config(format!(
                        "peanut half_separation must lie in (0, 1.2*radius), got {half_separation}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Smoothing length of the peanut blend.
    fn peanut_blend(radius: f64) -> f64 {
        0.2 * radius
    }

    fn peanut_centers(&self, half_separation: f64) -> (Vec3, Vec3) {
        (
            add(&self.center, &[0.0, 0.0, half_separation]),
            add(&self.center, &[0.0, 0.0, -half_separation]),
        )
    }

    /// C^2 implicit function: negative inside, positive outside. Not a
    /// distance function in general (see `signed_distance`).
    pub fn implicit(&self, x: &Vec3) -> f64 {
        match self.kind {
            ShapeKind::Ball { radius } => norm(&sub(x, &self.center)) - radius,
            ShapeKind::Ellipsoid { semi_axes } => {
                let d = sub(x, &self.center);
                d[0] * d[0] / (semi_axes[0] * semi_axes[0])
                    + d[1] * d[1] / (semi_axes[1] * semi_axes[1])
                    + d[2] * d[2] / (semi_axes[2] * semi_axes[2])
                    - 1.0
            }
            ShapeKind::Peanut {
                radius,
                half_separation,
            } => {
                let (c1, c2) = self.peanut_centers(half_separation);
                let k = Self::peanut_blend(radius);
                let f1 = norm(&sub(x, &c1)) - radius;
                let f2 = norm(&sub(x, &c2)) - radius;
                // exponential smooth minimum, written to avoid overflow
                let m = f1.min(f2);
                m - k * ((-(f1 - m) / k).exp() + (-(f2 - m) / k).exp()).ln()
            }
        }
    }

    /// Gradient of `implicit`.
    pub fn implicit_gradient(&self, x: &Vec3) -> Vec3 {
        match self.kind {
            ShapeKind::Ball { .. } => {
                let d = sub(x, &self.center);
                let n = norm(&d).max(1e-300);
                scale(&d, 1.0 / n)
            }
            ShapeKind::Ellipsoid { semi_axes } => {
                let d = sub(x, &self.center);
                [
                    2.0 * d[0] / (semi_axes[0] * semi_axes[0]),
                    2.0 * d[1] / (semi_axes[1] * semi_axes[1]),
                    2.0 * d[2] / (semi_axes[2] * semi_axes[2]),
                ]
            }
            ShapeKind::Peanut {
                radius,
                half_separation,
            } => {
                let (c1, c2) = self.peanut_centers(half_separation);
                let k = Self::peanut_blend(radius);
                let d1 = sub(x, &c1);
                let d2 = sub(x, &c2);
                let r1 = norm(&d1).max(1e-12);
                let r2 = norm(&d2).max(1e-12);
                let f1 = r1 - radius;
                let f2 = r2 - radius;
                let m = f1.min(f2);
                let e1 = (-(f1 - m) / k).exp();
                let e2 = (-(f2 - m) / k).exp();
                let (w1, w2) = (e1 / (e1 + e2), e2 / (e1 + e2));
                add(&scale(&d1, w1 / r1), &scale(&d2, w2 / r2))
            }
        }
    }

    /// Hessian of `implicit`, needed by the foot-point Newton iteration.
    fn implicit_hessian(&self, x: &Vec3) -> Mat3 {
        match self.kind {
            ShapeKind::Ball { .. } => {
                let d = sub(x, &self.center);
                let r = norm(&d).max(1e-12);
                let u = scale(&d, 1.0 / r);
                let mut h = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        h[i][j] = ((if i == j { 1.0 } else { 0.0 }) - u[i] * u[j]) / r;
                    }
                }
                h
            }
            ShapeKind::Ellipsoid { semi_axes } => {
                let mut h = [[0.0; 3]; 3];
                for i in 0..3 {
                    h[i][i] = 2.0 / (semi_axes[i] * semi_axes[i]);
                }
                h
            }
            ShapeKind::Peanut {
                radius,
                half_separation,
            } => {
                let (c1, c2) = self.peanut_centers(half_separation);
                let k = Self::peanut_blend(radius);
                let d1 = sub(x, &c1);
                let d2 = sub(x, &c2);
                let r1 = norm(&d1).max(1e-12);
                let r2 = norm(&d2).max(1e-12);
                let u1 = scale(&d1, 1.0 / r1);
                let u2 = scale(&d2, 1.0 / r2);
                let f1 = r1 - radius;
                let f2 = r2 - radius;
                let m = f1.min(f2);
                let e1 = (-(f1 - m) / k).exp();
                let e2 = (-(f2 - m) / k).exp();
                let (w1, w2) = (e1 / (e1 + e2), e2 / (e1 + e2));
                let g = add(&scale(&u1, w1), &scale(&u2, w2));
                let mut h = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let id = if i == j { 1.0 } else { 0.0 };
                        let h1 = (id - u1[i] * u1[j]) / r1;
                        let h2 = (id - u2[i] * u2[j]) / r2;
                        h[i][j] = w1 * h1
                            + w2 * h2
                            + (g[i] * g[j] - w1 * u1[i] * u1[j] - w2 * u2[i] * u2[j]) / k;
                    }
                }
                h
            }
        }
    }

    /// True if `x` lies strictly inside the shape.
    pub fn contains(&self, x: &Vec3) -> bool {
        self.implicit(x) < 0.0
    }

    /// Project `x` onto the boundary (closest point). Gradient-flow steps
    /// bring the point near the level set, then a Lagrange-Newton iteration
    /// on the closest-point conditions polishes to machine precision.
    pub fn project_to_boundary(&self, x: &Vec3) -> Vec3 {
        if let ShapeKind::Ball { radius } = self.kind {
            let d = sub(x, &self.center);
            let r = norm(&d);
            if r < 1e-14 {
                return add(&self.center, &[radius, 0.0, 0.0]);
            }
            return add(&self.center, &scale(&d, radius / r));
        }

        // gradient flow toward the level set
        let mut p = *x;
        for _ in 0..60 {
            let f = self.implicit(&p);
            let g = self.implicit_gradient(&p);
            let g2 = dot(&g, &g).max(1e-30);
            let step = scale(&g, -f / g2);
            p = add(&p, &step);
            if f.abs() < 1e-13 {
                break;
            }
        }

        // Lagrange-Newton on (p - x) + lambda * grad F(p) = 0, F(p) = 0
        let g0 = self.implicit_gradient(&p);
        let mut lambda = -dot(&sub(&p, x), &g0) / dot(&g0, &g0).max(1e-30);
        for _ in 0..40 {
            let f = self.implicit(&p);
            let g = self.implicit_gradient(&p);
            let h = self.implicit_hessian(&p);
            let r = [
                p[0] - x[0] + lambda * g[0],
                p[1] - x[1] + lambda * g[1],
                p[2] - x[2] + lambda * g[2],
                f,
            ];
            let res = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]).sqrt();
            if res < 1e-14 {
                break;
            }
            // 4x4 Newton system [[I + lambda H, g], [g^T, 0]]
            let mut a = [[0.0f64; 5]; 4];
            for i in 0..3 {
                for j in 0..3 {
                    a[i][j] = (if i == j { 1.0 } else { 0.0 }) + lambda * h[i][j];
                }
                a[i][3] = g[i];
                a[i][4] = -r[i];
            }
            for j in 0..3 {
                a[3][j] = g[j];
            }
            a[3][3] = 0.0;
            a[3][4] = -r[3];
            if !solve4(&mut a) {
                break;
            }
            for i in 0..3 {
                p[i] += a[i][4];
            }
            lambda += a[3][4];
        }
        p
    }

    /// Signed distance to the boundary: negative inside, positive outside.
    pub fn signed_distance(&self, x: &Vec3) -> f64 {
        match self.kind {
            ShapeKind::Ball { radius } => norm(&sub(x, &self.center)) - radius,
            _ => {
                let p = self.project_to_boundary(x);
                let d = norm(&sub(x, &p));
                if self.contains(x) {
                    -d
                } else {
                    d
                }
            }
        }
    }

    /// Outward unit normal at a point on the boundary.
    ///
    /// Fails if `x` is farther than `BOUNDARY_TOL` from the boundary.
    pub fn normal_at(&self, x: &Vec3) -> Result<Vec3> {
        let sd = self.signed_distance(x);
        if sd.abs() > BOUNDARY_TOL {
            return Err(Error::Precondition(format!(
                "normal_at: point is {:.3e} from the boundary (tolerance {:.1e})",
                sd.abs(),
                BOUNDARY_TOL
            )));
        }
        Ok(normalize(&self.implicit_gradient(x)))
    }

    /// Axis-aligned bounding box `(min, max)` of the shape.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        match self.kind {
            ShapeKind::Ball { radius } => (
                sub(&self.center, &[radius; 3]),
                add(&self.center, &[radius; 3]),
            ),
            ShapeKind::Ellipsoid { semi_axes } => {
                (sub(&self.center, &semi_axes), add(&self.center, &semi_axes))
            }
            ShapeKind::Peanut {
                radius,
                half_separation,
            } => {
                // the exponential blend can bulge outward by at most k*ln 2
                let bulge = Self::peanut_blend(radius) * std::f64::consts::LN_2;
                let r = radius + bulge;
                (
                    sub(&self.center, &[r, r, r + half_separation]),
                    add(&self.center, &[r, r, r + half_separation]),
                )
            }
        }
    }

    /// Diameter of the bounding box (used for grid sizing heuristics).
    pub fn bounding_diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        norm(&sub(&hi, &lo))
    }

    /// Boundary point hit by a ray from the shape center along `direction`,
    /// with its outward normal.
    pub fn surface_point_along(&self, direction: &Vec3) -> Result<SurfacePoint> {
        let d = normalize(direction);
        // bracket the boundary on the ray, then bisect
        let (lo_c, hi_c) = self.bounding_box();
        let t_hi = 2.0 * norm(&sub(&hi_c, &lo_c));
        let (mut a, mut b) = (0.0f64, t_hi);
        if self.implicit(&self.center) >= 0.0 {
            return Err(Error::Geometry(
                "shape center is not interior; cannot ray-cast a surface point".into(),
            ));
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let p = add(&self.center, &scale(&d, mid));
            if self.implicit(&p) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
            if b - a < 1e-15 * t_hi.max(1.0) {
                break;
            }
        }
        let p0 = add(&self.center, &scale(&d, 0.5 * (a + b)));
        self.surface_point_near(&p0)
    }

    /// Project `x` to the boundary and package the result with its normal.
    pub fn surface_point_near(&self, x: &Vec3) -> Result<SurfacePoint> {
        let p = self.project_to_boundary(x);
        let sd = self.signed_distance(&p);
        if sd.abs() > 1e-10 {
            return Err(Error::Geometry(format!(
                "boundary projection did not converge (residual distance {:.3e})",
                sd.abs()
            )));
        }
        let normal = normalize(&self.implicit_gradient(&p));
        SurfacePoint::new(p, normal)
    }
}

/// A point on the scatterer boundary together with the outward unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub position: Vec3,
    pub normal: Vec3,
}

impl SurfacePoint {
    pub fn new(position: Vec3, normal: Vec3) -> Result<Self> {
        if (norm(&normal) - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "surface normal must be a unit vector, |n| = {}",
                norm(&normal)
            )));
        }
        Ok(SurfacePoint { position, normal })
    }
}

/// The approach path of point sources toward a boundary anchor:
/// `points[i] = anchor + normal / indices[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbePath {
    pub anchor: SurfacePoint,
    pub indices: Vec<u32>,
    pub points: Vec<Vec3>,
}

/// Build the source path `z_j = z* + nu/j` for `j = j_min..=j_max` and check
/// that every source lies strictly outside the shape.
pub fn probe_path(shape: &ShapeSpec, anchor: &SurfacePoint, j_min: u32, j_max: u32) -> Result<ProbePath> {
    if j_min < 1 || j_min > j_max {
        return Err(Error::Precondition(format!(
            "probe indices must satisfy 1 <= j_min <= j_max, got {j_min}..{j_max}"
        )));
    }
    let mut indices = Vec::new();
    let mut points = Vec::new();
    for j in j_min..=j_max {
        let jf = j as f64;
        let z = [
            anchor.position[0] + anchor.normal[0] / jf,
            anchor.position[1] + anchor.normal[1] / jf,
            anchor.position[2] + anchor.normal[2] / jf,
        ];
        if shape.implicit(&z) <= 0.0 {
            return Err(Error::Geometry(format!(
                "probe point z_{j} = {z:?} is not strictly exterior to the shape"
            )));
        }
        indices.push(j);
        points.push(z);
    }
    Ok(ProbePath {
        anchor: *anchor,
        indices,
        points,
    })
}

/// Gaussian elimination with partial pivoting on a 4x5 augmented system.
fn solve4(a: &mut [[f64; 5]; 4]) -> bool {
    for col in 0..4 {
        let mut piv = col;
        for row in col + 1..4 {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return false;
        }
        a.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..5 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    for col in (0..4).rev() {
        let mut s = a[col][4];
        for k in col + 1..4 {
            s -= a[col][k] * a[k][4];
        }
        a[col][4] = s / a[col][col];
    }
    true
}
