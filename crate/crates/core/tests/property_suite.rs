//! Property-based checks of the kernel identities: analytic gradients
//! against Richardson-extrapolated finite differences, and the closed-form
//! contraction against its compositional definition, over randomized
//! geometry and material parameters.

use lsprobe_core::elastic::{
    grad_kelvin_apply, grad_kelvin_contract, kelvin_constants, kelvin_tensor,
};
use lsprobe_core::elastic::kernels::NavierKernel;
use lsprobe_core::linalg::{norm, sub, Vec3};
use lsprobe_core::oracle::{finite_difference_gradient, finite_difference_jacobian};
use num_complex::Complex64;
use proptest::prelude::*;

fn vec3_in(lo: f64, hi: f64) -> impl Strategy<Value = Vec3> {
    [lo..hi, lo..hi, lo..hi]
}

fn separated_pair() -> impl Strategy<Value = (Vec3, Vec3)> {
    (vec3_in(-1.0, 1.0), vec3_in(-1.0, 1.0))
        .prop_filter("separation in [0.1, 2]", |(x, y)| {
            let r = norm(&sub(x, y));
            (0.1..=2.0).contains(&r)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn helmholtz_gradient_matches_finite_differences(
        (x, y) in separated_pair(),
        k in 0.5f64..3.0,
    ) {
        let f = |p: &Vec3| lsprobe_core::acoustic::phi(k, p, &y).unwrap();
        let fd = finite_difference_gradient(&f, &x, 1e-3);
        let exact = lsprobe_core::acoustic::grad_phi(k, &x, &y).unwrap();
        let scale = exact.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        for c in 0..3 {
            prop_assert!(
                (fd[c] - exact[c]).norm() <= 1e-8 * scale,
                "component {}: {} vs {}", c, fd[c], exact[c]
            );
        }
    }

    #[test]
    fn kelvin_gradient_matches_finite_differences(
        (x, y) in separated_pair(),
        b in vec3_in(-1.0, 1.0),
        lambda in -0.3f64..3.0,
        mu in 0.2f64..3.0,
    ) {
        prop_assume!(lambda + 2.0 * mu > 0.1);
        prop_assume!(2.0 * mu + 3.0 * lambda > 0.1);
        let consts = kelvin_constants(lambda, mu).unwrap();
        let f = |p: &Vec3| -> [Complex64; 3] {
            let m = kelvin_tensor(&consts, p, &y).unwrap();
            core::array::from_fn(|i| {
                Complex64::from(m[i][0] * b[0] + m[i][1] * b[1] + m[i][2] * b[2])
            })
        };
        let r = norm(&sub(&x, &y));
        let fd = finite_difference_jacobian(&f, &x, (1e-3 * r).min(1e-3));
        let exact = grad_kelvin_apply(&consts, &x, &y, &b).unwrap();
        let scale = exact.iter().flatten().map(|v| v.abs()).fold(0.0f64, f64::max);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!(
                    (fd[i][j].re - exact[i][j]).abs() <= 1e-6 * scale,
                    "entry ({},{}): {} vs {}", i, j, fd[i][j].re, exact[i][j]
                );
                prop_assert!(fd[i][j].im.abs() <= 1e-10 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn kelvin_contraction_equals_composition(
        (x, y) in separated_pair(),
        b in vec3_in(-1.5, 1.5),
        lambda in -0.3f64..3.0,
        mu in 0.2f64..3.0,
    ) {
        prop_assume!(lambda + 2.0 * mu > 0.1);
        prop_assume!(2.0 * mu + 3.0 * lambda > 0.1);
        let consts = kelvin_constants(lambda, mu).unwrap();
        let closed = grad_kelvin_contract(&consts, &x, &y, &b).unwrap();
        let grad = grad_kelvin_apply(&consts, &x, &y, &b).unwrap();
        let tensor = kelvin_tensor(&consts, &x, &y).unwrap();
        let pib: Vec3 = core::array::from_fn(|i| {
            tensor[i][0] * b[0] + tensor[i][1] * b[1] + tensor[i][2] * b[2]
        });
        let scale = closed.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(1e-30);
        for i in 0..3 {
            let composed = grad[i][0] * pib[0] + grad[i][1] * pib[1] + grad[i][2] * pib[2];
            prop_assert!(
                (composed - closed[i]).abs() <= 1e-12 * scale.max(composed.abs()),
                "component {}: {} vs {}", i, composed, closed[i]
            );
        }
    }

    #[test]
    fn navier_gradient_matches_finite_differences(
        (x, y) in separated_pair(),
        b in vec3_in(-1.0, 1.0),
        lambda in 0.0f64..2.0,
        mu in 0.4f64..2.0,
        omega in 0.5f64..2.0,
    ) {
        let kernel = NavierKernel::new(lambda, mu, omega).unwrap();
        let bc = [Complex64::from(b[0]), Complex64::from(b[1]), Complex64::from(b[2])];
        let f = |p: &Vec3| kernel.apply(p, &y, &bc).unwrap();
        let r = norm(&sub(&x, &y));
        let fd = finite_difference_jacobian(&f, &x, (1e-3 * r).min(1e-3));
        let exact = kernel.grad_apply(&x, &y, &bc).unwrap();
        let scale = exact.iter().flatten().map(|v| v.norm()).fold(0.0f64, f64::max);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!(
                    (fd[i][j] - exact[i][j]).norm() <= 1e-6 * scale,
                    "entry ({},{}): {} vs {}", i, j, fd[i][j], exact[i][j]
                );
            }
        }
    }

    #[test]
    fn probe_path_identity_for_random_anchors(
        dir in vec3_in(-1.0, 1.0),
        j_min in 1u32..5,
        span in 1u32..12,
    ) {
        prop_assume!(norm(&dir) > 0.1);
        let shape = lsprobe_core::geometry::ShapeSpec::ball([0.0; 3], 0.8);
        let anchor = shape.surface_point_along(&dir).unwrap();
        let path = lsprobe_core::geometry::probe_path(&shape, &anchor, j_min, j_min + span).unwrap();
        for (j, z) in path.indices.iter().zip(&path.points) {
            let expect: Vec3 = core::array::from_fn(|c| {
                anchor.position[c] + anchor.normal[c] / *j as f64
            });
            prop_assert_eq!(*z, expect);
            prop_assert!(shape.signed_distance(z) > 0.0);
        }
    }
}
