//! Uniform Cartesian grids and the complex fields living on them.
//!
//! Nodes sit at cell centers: node (i1,i2,i3) is at
//! `origin + h*(i+0.5)` per axis, and each node owns a cell of volume h^3.

use crate::error::{Error, Result};
use crate::geometry::ShapeSpec;
use crate::linalg::{CVec3, Vec3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Minimum corner of the grid box.
    pub origin: Vec3,
    /// Cell size (cubic cells).
    pub spacing: f64,
    /// Node counts per axis.
    pub dims: [usize; 3],
}

impl GridSpec {
    pub fn new(origin: Vec3, spacing: f64, dims: [usize; 3]) -> Result<Self> {
        if spacing <= 0.0 {
            return Err(Error::Config(format!("grid spacing must be positive, got {spacing}")));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::Config(format!("grid dims must be positive, got {dims:?}")));
        }
        Ok(GridSpec {
            origin,
            spacing,
            dims,
        })
    }

    /// Cube of `n^3` cells centered on the shape with the given half-extent.
    /// Checks the 2h covering margin around the shape's bounding box.
    pub fn cube_around(shape: &ShapeSpec, half_extent: f64, n: usize) -> Result<Self> {
        let (blo, bhi) = shape.bounding_box();
        let c = [
            0.5 * (blo[0] + bhi[0]),
            0.5 * (blo[1] + bhi[1]),
            0.5 * (blo[2] + bhi[2]),
        ];
        let origin = [c[0] - half_extent, c[1] - half_extent, c[2] - half_extent];
        let spacing = 2.0 * half_extent / n as f64;
        let grid = GridSpec::new(origin, spacing, [n, n, n])?;
        grid.check_covers(shape)?;
        Ok(grid)
    }

    /// The grid box must contain the shape's bounding box with margin >= 2h.
    pub fn check_covers(&self, shape: &ShapeSpec) -> Result<()> {
        let (blo, bhi) = shape.bounding_box();
        let margin = 2.0 * self.spacing;
        let hi = self.upper_corner();
        for a in 0..3 {
            if blo[a] - self.origin[a] < margin || hi[a] - bhi[a] < margin {
                return Err(Error::Config(format!(
                    "grid box does not contain the shape with margin 2h = {margin:.4} on axis {a}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn upper_corner(&self) -> Vec3 {
        [
            self.origin[0] + self.spacing * self.dims[0] as f64,
            self.origin[1] + self.spacing * self.dims[1] as f64,
            self.origin[2] + self.spacing * self.dims[2] as f64,
        ]
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.dims[1] + i[1]) * self.dims[2] + i[2]
    }

    #[inline]
    pub fn node(&self, i: [usize; 3]) -> Vec3 {
        [
            self.origin[0] + self.spacing * (i[0] as f64 + 0.5),
            self.origin[1] + self.spacing * (i[1] as f64 + 0.5),
            self.origin[2] + self.spacing * (i[2] as f64 + 0.5),
        ]
    }

    #[inline]
    pub fn node_of_flat(&self, idx: usize) -> Vec3 {
        self.node(self.unflatten(idx))
    }

    #[inline]
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let i3 = idx % self.dims[2];
        let rest = idx / self.dims[2];
        let i2 = rest % self.dims[1];
        let i1 = rest / self.dims[1];
        [i1, i2, i3]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    /// Iterate flat index and node position.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, Vec3)> + '_ {
        (0..self.len()).map(move |idx| (idx, self.node_of_flat(idx)))
    }
}

/// Complex scalar samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGridField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl ScalarGridField {
    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        ScalarGridField {
            grid,
            values: vec![Complex64::ZERO; n],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&Vec3) -> Complex64 + Sync) -> Self {
        use rayon::prelude::*;
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(&grid.node_of_flat(idx)))
            .collect();
        ScalarGridField { grid, values }
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Trilinear interpolation, clamped to the grid interior.
    pub fn interpolate(&self, x: &Vec3) -> Complex64 {
        let (base, frac) = interp_cell(&self.grid, x);
        let mut acc = Complex64::ZERO;
        for (di, wi) in [(0usize, 1.0 - frac[0]), (1, frac[0])] {
            for (dj, wj) in [(0usize, 1.0 - frac[1]), (1, frac[1])] {
                for (dk, wk) in [(0usize, 1.0 - frac[2]), (1, frac[2])] {
                    let idx = self.grid.index([base[0] + di, base[1] + dj, base[2] + dk]);
                    acc += self.values[idx] * (wi * wj * wk);
                }
            }
        }
        acc
    }
}

/// Complex 3-vector samples on a grid, stored per component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGridField {
    pub grid: GridSpec,
    pub components: [Vec<Complex64>; 3],
}

impl VectorGridField {
    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        VectorGridField {
            grid,
            components: [
                vec![Complex64::ZERO; n],
                vec![Complex64::ZERO; n],
                vec![Complex64::ZERO; n],
            ],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&Vec3) -> CVec3 + Sync) -> Self {
        use rayon::prelude::*;
        let all: Vec<CVec3> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(&grid.node_of_flat(idx)))
            .collect();
        let mut out = VectorGridField::zeros(grid);
        for (idx, v) in all.into_iter().enumerate() {
            for c in 0..3 {
                out.components[c][idx] = v[c];
            }
        }
        out
    }

    pub fn at(&self, idx: usize) -> CVec3 {
        [
            self.components[0][idx],
            self.components[1][idx],
            self.components[2][idx],
        ]
    }

    pub fn set(&mut self, idx: usize, v: CVec3) {
        for c in 0..3 {
            self.components[c][idx] = v[c];
        }
    }

    pub fn norm2(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let v = self.at(i);
                (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn interpolate(&self, x: &Vec3) -> CVec3 {
        let (base, frac) = interp_cell(&self.grid, x);
        let mut acc = [Complex64::ZERO; 3];
        for (di, wi) in [(0usize, 1.0 - frac[0]), (1, frac[0])] {
            for (dj, wj) in [(0usize, 1.0 - frac[1]), (1, frac[1])] {
                for (dk, wk) in [(0usize, 1.0 - frac[2]), (1, frac[2])] {
                    let idx = self.grid.index([base[0] + di, base[1] + dj, base[2] + dk]);
                    let w = wi * wj * wk;
                    for c in 0..3 {
                        acc[c] += self.components[c][idx] * w;
                    }
                }
            }
        }
        acc
    }
}

fn interp_cell(grid: &GridSpec, x: &Vec3) -> ([usize; 3], [f64; 3]) {
    let mut base = [0usize; 3];
    let mut frac = [0.0f64; 3];
    for a in 0..3 {
        // node coordinates are offset half a cell from the origin
        let t = (x[a] - grid.origin[a]) / grid.spacing - 0.5;
        let t = t.clamp(0.0, (grid.dims[a] - 1) as f64);
        let i = (t.floor() as usize).min(grid.dims[a] - 2);
        base[a] = i;
        frac[a] = t - i as f64;
    }
    (base, frac)
}
