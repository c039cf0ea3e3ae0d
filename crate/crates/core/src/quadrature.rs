//! Cell subdivision for near-singular volume quadrature.
//!
//! Grid cells close to an evaluation or source point are split recursively
//! until sub-cells are small relative to their distance from the point, so
//! that midpoint quadrature resolves kernels growing like 1/r^p.

use crate::linalg::{norm, sub, Vec3};

/// Subdivision policy. A (sub-)cell of size `s` at distance `d` from the
/// marked point is split while `s * ratio > d`, up to `max_depth` levels.
#[derive(Debug, Clone, Copy)]
pub struct Subdivision {
    pub ratio: f64,
    pub max_depth: u32,
}

impl Default for Subdivision {
    fn default() -> Self {
        // size <= distance/8 keeps the midpoint error per cell below ~1%
        // for kernels up to 1/r^3
        Subdivision {
            ratio: 8.0,
            max_depth: 6,
        }
    }
}

/// Tracks whether the depth budget was exhausted anywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct SubdivisionStats {
    pub capped_cells: usize,
    pub leaf_count: usize,
}

/// Visit midpoint quadrature nodes of `cell_center`'s cell (size `size`),
/// subdividing near `point`. The callback receives each leaf node, its
/// sub-cell volume and its sub-cell size. Returns whether the innermost
/// sub-cell still wanted further splitting (the point is essentially inside).
pub fn subdivide_near_point(
    cell_center: &Vec3,
    size: f64,
    point: &Vec3,
    policy: &Subdivision,
    stats: &mut SubdivisionStats,
    emit: &mut impl FnMut(&Vec3, f64, f64),
) {
    recurse(cell_center, size, point, policy, 0, stats, emit);
}

fn recurse(
    center: &Vec3,
    size: f64,
    point: &Vec3,
    policy: &Subdivision,
    depth: u32,
    stats: &mut SubdivisionStats,
    emit: &mut impl FnMut(&Vec3, f64, f64),
) {
    let d = norm(&sub(center, point));
    let wants_split = size * policy.ratio > d;
    if wants_split && depth < policy.max_depth {
        let q = 0.25 * size;
        for sx in [-q, q] {
            for sy in [-q, q] {
                for sz in [-q, q] {
                    let c = [center[0] + sx, center[1] + sy, center[2] + sz];
                    recurse(&c, 0.5 * size, point, policy, depth + 1, stats, emit);
                }
            }
        }
    } else {
        if wants_split {
            stats.capped_cells += 1;
        }
        stats.leaf_count += 1;
        emit(center, size * size * size, size);
    }
}

/// True if a cell of size `size` centered at `cell_center` is close enough
/// to `point` that subdivision would trigger at the top level.
pub fn needs_subdivision(cell_center: &Vec3, size: f64, point: &Vec3, policy: &Subdivision) -> bool {
    size * policy.ratio > norm(&sub(cell_center, point))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes_partition_the_cell() {
        let policy = Subdivision::default();
        let mut stats = SubdivisionStats::default();
        let mut vol = 0.0;
        subdivide_near_point(
            &[0.0; 3],
            1.0,
            &[0.6, 0.0, 0.0],
            &policy,
            &mut stats,
            &mut |_, v, _| vol += v,
        );
        assert!((vol - 1.0).abs() < 1e-12);
        assert!(stats.leaf_count > 1);
    }

    #[test]
    fn far_cells_stay_whole() {
        let policy = Subdivision::default();
        let mut stats = SubdivisionStats::default();
        let mut count = 0;
        subdivide_near_point(
            &[0.0; 3],
            0.1,
            &[5.0, 0.0, 0.0],
            &policy,
            &mut stats,
            &mut |_, _, _| count += 1,
        );
        assert_eq!(count, 1);
    }

    #[test]
    fn resolves_inverse_cube_kernel() {
        // integrate 1/|x-p|^3 over the cell [-.5,.5]^3 with p just outside,
        // compare subdivided midpoint against a fine fixed grid
        let p = [0.55, 0.0, 0.0];
        let policy = Subdivision {
            ratio: 8.0,
            max_depth: 8,
        };
        let mut stats = SubdivisionStats::default();
        let mut val = 0.0;
        subdivide_near_point(&[0.0; 3], 1.0, &p, &policy, &mut stats, &mut |y, v, _| {
            val += v / norm(&sub(y, &p)).powi(3)
        });

        let n = 160;
        let h = 1.0 / n as f64;
        let mut reference = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let y = [
                        -0.5 + (i as f64 + 0.5) * h,
                        -0.5 + (j as f64 + 0.5) * h,
                        -0.5 + (k as f64 + 0.5) * h,
                    ];
                    reference += h * h * h / norm(&sub(&y, &p)).powi(3);
                }
            }
        }
        assert!(
            (val - reference).abs() / reference < 5e-3,
            "subdivided {val} vs reference {reference}"
        );
    }
}
