//! Verification suites: each produces oracle-report rows (reference vs
//! test value with tolerances) and passes only if every row does.

use lsprobe_core::acoustic::{
    grad_phi, mixed_reciprocity_residual, phi, AcousticIncident, AcousticMedium, AcousticSolver,
};
use lsprobe_core::elastic::{
    elastic_mixed_reciprocity_residual, grad_kelvin_apply, grad_kelvin_contract, kelvin_constants,
    kelvin_tensor, kernels::NavierKernel, ElasticMedium, ElasticSolver,
};
use lsprobe_core::error::Result;
use lsprobe_core::grid::GridSpec;
use lsprobe_core::linalg::{cmat_frobenius, norm, sub, SmallRng, Vec3};
use lsprobe_core::oracle::{
    self, finite_difference_gradient, finite_difference_jacobian, halfball_log_integral,
    halfball_test, singular_quadrature, OracleReport, Region,
};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Kernels,
    Reciprocity,
    Lemma23,
    Lemma31,
    All,
}

pub struct SuiteRow {
    pub report: OracleReport,
    pub tolerance: f64,
}

impl SuiteRow {
    fn new(report: OracleReport, tolerance: f64) -> Self {
        SuiteRow { report, tolerance }
    }

    pub fn passes(&self) -> bool {
        self.report.passes(self.tolerance)
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    match suite {
        Suite::Kernels => kernels(&mut rows)?,
        Suite::Reciprocity => reciprocity(&mut rows)?,
        Suite::Lemma23 => layer_integral(&mut rows)?,
        Suite::Lemma31 => kelvin_gradients(&mut rows)?,
        Suite::All => {
            kernels(&mut rows)?;
            kelvin_gradients(&mut rows)?;
            layer_integral(&mut rows)?;
            reciprocity(&mut rows)?;
        }
    }
    Ok(rows)
}

/// Fundamental-solution kernels against finite differences and symmetry.
fn kernels(rows: &mut Vec<SuiteRow>) -> Result<()> {
    let mut rng = SmallRng::new(0xc0de);
    for case in 0..5 {
        let k = rng.range(0.5, 2.5);
        let y = [rng.range(-0.5, 0.5), rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)];
        let dir = rng.unit_vec();
        let r = rng.range(0.3, 1.5);
        let x = [y[0] + r * dir[0], y[1] + r * dir[1], y[2] + r * dir[2]];
        let f = |p: &Vec3| phi(k, p, &y).unwrap();
        let fd = finite_difference_gradient(&f, &x, 1e-3);
        let exact = grad_phi(k, &x, &y).unwrap();
        for c in 0..3 {
            rows.push(SuiteRow::new(
                OracleReport::new(format!("grad_phi_fd_{case}_{c}"), fd[c], exact[c], 4),
                1e-8,
            ));
        }
    }

    // Navier tensor symmetry and gradient vs finite differences
    let kernel = NavierKernel::new(1.3, 0.8, 1.1)?;
    for case in 0..5 {
        let y = [rng.range(-0.5, 0.5), rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)];
        let dir = rng.unit_vec();
        let r = rng.range(0.2, 1.5);
        let x = [y[0] + r * dir[0], y[1] + r * dir[1], y[2] + r * dir[2]];
        let t = kernel.tensor(&x, &y)?;
        let mut asym: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                asym = asym.max((t[i][j] - t[j][i]).norm());
            }
        }
        rows.push(SuiteRow::new(
            OracleReport::new(
                format!("navier_symmetry_{case}"),
                Complex64::from(cmat_frobenius(&t)),
                Complex64::from(cmat_frobenius(&t) + asym),
                9,
            ),
            1e-12,
        ));

        let b = [
            Complex64::from(rng.range(-1.0, 1.0)),
            Complex64::from(rng.range(-1.0, 1.0)),
            Complex64::from(rng.range(-1.0, 1.0)),
        ];
        let f = |p: &Vec3| kernel.apply(p, &y, &b).unwrap();
        let fd = finite_difference_jacobian(&f, &x, 1e-3 * r);
        let exact = kernel.grad_apply(&x, &y, &b)?;
        let mut worst = 0.0f64;
        let scale = exact.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((fd[i][j] - exact[i][j]).norm() / scale);
            }
        }
        rows.push(SuiteRow::new(
            OracleReport::new(
                format!("grad_navier_fd_{case}"),
                Complex64::ONE,
                Complex64::from(1.0 + worst),
                36,
            ),
            1e-6,
        ));
    }
    Ok(())
}

/// The Kelvin gradient identities at 1e-6 (finite differences) and 1e-12
/// (algebraic forms).
fn kelvin_gradients(rows: &mut Vec<SuiteRow>) -> Result<()> {
    let mut rng = SmallRng::new(0x31337);
    for case in 0..20 {
        let mu = rng.range(0.2, 3.0);
        let lambda = rng.range(-0.4 * mu, 3.0);
        if 2.0 * mu + 3.0 * lambda <= 0.1 {
            continue;
        }
        let consts = kelvin_constants(lambda, mu)?;
        let y = [rng.range(-0.5, 0.5), rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)];
        let dir = rng.unit_vec();
        let r = rng.range(0.1, 2.0);
        let x = [y[0] + r * dir[0], y[1] + r * dir[1], y[2] + r * dir[2]];
        let b = [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)];

        // gradient vs finite differences
        let exact = grad_kelvin_apply(&consts, &x, &y, &b)?;
        let f = |p: &Vec3| -> [Complex64; 3] {
            let m = kelvin_tensor(&consts, p, &y).unwrap();
            core::array::from_fn(|i| {
                Complex64::from(m[i][0] * b[0] + m[i][1] * b[1] + m[i][2] * b[2])
            })
        };
        let fd = finite_difference_jacobian(&f, &x, 1e-3 * r);
        let scale = exact.iter().flatten().map(|v| v.abs()).fold(0.0f64, f64::max);
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((fd[i][j].re - exact[i][j]).abs() / scale);
            }
        }
        rows.push(SuiteRow::new(
            OracleReport::new(
                format!("grad_kelvin_fd_{case}"),
                Complex64::ONE,
                Complex64::from(1.0 + worst),
                36,
            ),
            1e-6,
        ));

        // closed contraction vs composition
        let closed = grad_kelvin_contract(&consts, &x, &y, &b)?;
        let tensor = kelvin_tensor(&consts, &x, &y)?;
        let pib: Vec3 = core::array::from_fn(|i| {
            tensor[i][0] * b[0] + tensor[i][1] * b[1] + tensor[i][2] * b[2]
        });
        let cscale = closed.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(1e-30);
        let mut cworst = 0.0f64;
        for i in 0..3 {
            let composed = exact[i][0] * pib[0] + exact[i][1] * pib[1] + exact[i][2] * pib[2];
            cworst = cworst.max((composed - closed[i]).abs() / cscale);
        }
        rows.push(SuiteRow::new(
            OracleReport::new(
                format!("kelvin_contract_compose_{case}"),
                Complex64::ONE,
                Complex64::from(1.0 + cworst),
                3,
            ),
            1e-12,
        ));

        // alpha + beta identity
        let expect = 1.0 / (4.0 * std::f64::consts::PI * mu);
        rows.push(SuiteRow::new(
            OracleReport::new(
                format!("kelvin_sum_{case}"),
                Complex64::from(expect),
                Complex64::from(consts.alpha + consts.beta),
                1,
            ),
            1e-14,
        ));
    }
    Ok(())
}

/// Adaptive quadrature of the half-ball integral against the closed form.
fn layer_integral(rows: &mut Vec<SuiteRow>) -> Result<()> {
    let anchor = [0.0, 0.0, 0.8];
    let normal = [0.0, 0.0, 1.0];
    for delta in [0.3, 0.5] {
        for j in [1u32, 10, 100] {
            let test = halfball_test(anchor, normal, delta);
            let region = Region {
                contains: &test,
                lo: [anchor[0] - delta, anchor[1] - delta, anchor[2] - delta],
                hi: [anchor[0] + delta, anchor[1] + delta, anchor[2] + delta],
            };
            let zj = oracle::probe_point(&anchor, &normal, j);
            let one = |_: &Vec3| Complex64::ONE;
            let quad = singular_quadrature(&region, &zj, 3, &one)?;
            let closed = halfball_log_integral(delta, j);
            rows.push(SuiteRow::new(
                OracleReport::new(
                    format!("halfball_quadrature_d{delta}_j{j}"),
                    Complex64::from(closed),
                    quad.value,
                    quad.leaf_count,
                ),
                1e-4,
            ));
        }
    }
    // deficit limit at j = 100, relative to 2 pi
    let two_pi = 2.0 * std::f64::consts::PI;
    let deficit = halfball_log_integral(0.5, 100) - two_pi * 51.0f64.ln();
    rows.push(SuiteRow::new(
        OracleReport::new("halfball_deficit_limit", Complex64::from(-two_pi), Complex64::from(deficit), 1),
        1e-2,
    ));
    Ok(())
}

/// Discrete reciprocity identities from independent solves at 32^3.
fn reciprocity(rows: &mut Vec<SuiteRow>) -> Result<()> {
    let medium = AcousticMedium::ball([0.0; 3], 0.8, 1.5, 1.0)?;
    let grid = GridSpec::cube_around(&medium.shape, 1.0, 32)?;
    let solver = AcousticSolver::new(medium, grid)?;

    // far-field reciprocity for one +/- pair
    let d = [0.0, 0.0, 1.0];
    let minus_d = [0.0, 0.0, -1.0];
    let xhat = [1.0, 0.0, 0.0];
    let minus_xhat = [-1.0, 0.0, 0.0];
    let sol_d = solver.solve(&AcousticIncident::PlaneWave { direction: d }, 1e-10)?;
    let sol_mx = solver.solve(
        &AcousticIncident::PlaneWave {
            direction: minus_xhat,
        },
        1e-10,
    )?;
    let lhs = solver.far_field_at(&sol_d, &xhat);
    let rhs = solver.far_field_at(&sol_mx, &minus_d);
    rows.push(SuiteRow::new(
        OracleReport::new("far_field_reciprocity", rhs, lhs, 2),
        1e-3,
    ));

    let mixed = mixed_reciprocity_residual(&solver, &[0.0, 0.0, 1.5], &minus_d, 1e-8)?;
    rows.push(SuiteRow::new(
        OracleReport::new(
            "mixed_reciprocity_acoustic",
            Complex64::ONE,
            Complex64::from(1.0 + mixed),
            2,
        ),
        2e-2,
    ));

    let emedium = ElasticMedium::ball([0.0; 3], 0.8, 1.3, 1.0, 1.0, 1.0)?;
    let esolver = ElasticSolver::new(emedium, grid)?;
    let eres = elastic_mixed_reciprocity_residual(
        &esolver,
        &[0.0, 0.0, 1.5],
        &[0.0, 0.0, 1.0],
        &minus_d,
        &[0.0, 1.0, 0.0],
        1e-8,
    )?;
    rows.push(SuiteRow::new(
        OracleReport::new(
            "mixed_reciprocity_elastic",
            Complex64::ONE,
            Complex64::from(1.0 + eres),
            2,
        ),
        5e-2,
    ));

    // sanity: the probe geometry used by the identities is exterior
    let z = [0.0, 0.0, 1.5];
    debug_assert!(norm(&sub(&z, &[0.0; 3])) > 0.8);
    Ok(())
}
