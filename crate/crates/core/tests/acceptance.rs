//! Acceptance suite: every exit criterion checked at its stated tolerance,
//! sequentially, with one pass/fail line per criterion.
//!
//! Run with `cargo test -p lsprobe-core --test acceptance -- --nocapture`
//! to see the per-criterion report.

use lsprobe_core::acoustic::{
    boundary_jump as acoustic_boundary_jump, mixed_reciprocity_residual, AcousticIncident,
    AcousticMedium, AcousticSolver,
};
use lsprobe_core::elastic::{
    boundary_jump as elastic_boundary_jump, elastic_mixed_reciprocity_residual, kelvin_constants,
    kelvin_tensor, ElasticIncident, ElasticMedium, ElasticSolver,
};
use lsprobe_core::geometry::SurfacePoint;
use lsprobe_core::grid::GridSpec;
use lsprobe_core::linalg::{cmat_frobenius, cmat_sub, normalize, scale, SmallRng, Vec3};
use lsprobe_core::oracle;
use lsprobe_core::probe::{
    fit_log_blowup, kelvin_angular_mean, run_probe_acoustic, run_probe_elastic, Classification,
    ProbeConfig, ProbePhysics, ProbeSeries,
};
use lsprobe_core::sphere::DirectionGrid;
use num_complex::Complex64;

const TOL: f64 = 1e-8;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn record(&mut self, idx: u32, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("criterion {idx:2} ({name}): PASS  [{detail}]"),
            Err(detail) => {
                println!("criterion {idx:2} ({name}): FAIL  [{detail}]");
                self.failures.push(format!("criterion {idx} ({name}): {detail}"));
            }
        }
    }
}

fn check(cond: bool, msg: String, errs: &mut Vec<String>) {
    if !cond {
        errs.push(msg);
    }
}

fn outcome(detail: String, errs: Vec<String>) -> Result<String, String> {
    if errs.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", errs.join("; ")))
    }
}

#[test]
fn acceptance_criteria() {
    let mut report = Report { failures: Vec::new() };
    let started = std::time::Instant::now();

    report.record(1, "Kelvin kernel identities", criterion_1());
    report.record(2, "Kupradze-Kelvin asymptotics", criterion_2());
    report.record(3, "half-ball log integral", criterion_3());

    // shared acoustic artifacts: n = 1.5 ball at 64^3 and 32^3
    let medium15 = AcousticMedium::ball([0.0; 3], 0.8, 1.5, 1.0).unwrap();
    let grid64 = GridSpec::cube_around(&medium15.shape, 1.0, 64).unwrap();
    let grid32 = GridSpec::cube_around(&medium15.shape, 1.0, 32).unwrap();
    let solver15_64 = AcousticSolver::new(medium15.clone(), grid64).unwrap();
    let solver15_32 = AcousticSolver::new(medium15.clone(), grid32).unwrap();
    let d_inc = [0.0, 0.0, 1.0];
    let pw15_64 = solver15_64
        .solve(&AcousticIncident::PlaneWave { direction: d_inc }, TOL)
        .unwrap();
    let pw15_32 = solver15_32
        .solve(&AcousticIncident::PlaneWave { direction: d_inc }, TOL)
        .unwrap();

    report.record(
        4,
        "acoustic forward vs series/Born",
        criterion_4(&solver15_64, &pw15_64, &solver15_32, &pw15_32),
    );

    // shared elastic artifacts: rho = 1.3 ball at 64^3 and 32^3
    let medium_e13 = ElasticMedium::ball([0.0; 3], 0.8, 1.3, 1.0, 1.0, 1.0).unwrap();
    let egrid64 = GridSpec::cube_around(&medium_e13.shape, 1.0, 64).unwrap();
    let egrid32 = GridSpec::cube_around(&medium_e13.shape, 1.0, 32).unwrap();
    let esolver64 = ElasticSolver::new(medium_e13.clone(), egrid64).unwrap();
    let esolver32 = ElasticSolver::new(medium_e13.clone(), egrid32).unwrap();
    let e_inc = ElasticIncident::plane_wave([0.0, 0.0, -1.0], [0.0, 1.0, 0.0]);
    let epw64 = esolver64.solve(&e_inc, TOL).unwrap();
    let epw32 = esolver32.solve(&e_inc, TOL).unwrap();

    report.record(
        5,
        "reciprocity and mixed reciprocity",
        criterion_5(&solver15_64, &esolver64),
    );
    report.record(
        6,
        "transmission conditions",
        criterion_6(
            &solver15_64,
            &pw15_64,
            &solver15_32,
            &pw15_32,
            &esolver64,
            &epw64,
            &esolver32,
            &epw32,
        ),
    );

    let anchor = SurfacePoint::new([0.0, 0.0, 0.8], [0.0, 0.0, 1.0]).unwrap();
    let probe_cfg = ProbeConfig::default();
    let series15 = run_probe_acoustic(&solver15_64, &anchor, 2, 16, &probe_cfg).unwrap();

    report.record(7, "acoustic blow-up and recovery", criterion_7(&medium15, &series15));
    report.record(8, "elastic blow-up and recovery", criterion_8());
    report.record(9, "uniform bound of the regular part", criterion_9(&series15));
    report.record(10, "contrast monotonicity", criterion_10());

    println!(
        "acceptance suite finished in {:.1} s",
        started.elapsed().as_secs_f64()
    );
    assert!(
        report.failures.is_empty(),
        "acceptance failures:\n{}",
        report.failures.join("\n")
    );
}

/// Gradient identities of the Kelvin field: analytic vs finite differences
/// over 100 random configurations, the special radial case, and the
/// constants identity alpha + beta = 1/(4 pi mu).
fn criterion_1() -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();
    let mut rng = SmallRng::new(0xacce97);
    let mut worst_fd: f64 = 0.0;
    for _ in 0..100 {
        let mu = rng.range(0.2, 3.0);
        let lambda = rng.range(-0.5 * mu, 3.0);
        if 2.0 * mu + 3.0 * lambda <= 0.1 {
            continue;
        }
        let consts = kelvin_constants(lambda, mu).unwrap();
        // alpha + beta = 1/(4 pi mu) to 1e-14 relative
        let expect = 1.0 / (4.0 * std::f64::consts::PI * mu);
        check(
            ((consts.alpha + consts.beta) - expect).abs() <= 1e-14 * expect,
            format!("alpha+beta identity violated at lambda={lambda}, mu={mu}"),
            &mut errs,
        );

        let dir = rng.unit_vec();
        let r = rng.range(0.1, 2.0);
        let y = [rng.range(-0.5, 0.5), rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)];
        let x = [y[0] + r * dir[0], y[1] + r * dir[1], y[2] + r * dir[2]];
        let b = [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)];
        let exact = lsprobe_core::elastic::grad_kelvin_apply(&consts, &x, &y, &b).unwrap();
        let f = |p: &Vec3| -> [Complex64; 3] {
            let m = kelvin_tensor(&consts, p, &y).unwrap();
            core::array::from_fn(|i| {
                Complex64::from(m[i][0] * b[0] + m[i][1] * b[1] + m[i][2] * b[2])
            })
        };
        let fd = oracle::finite_difference_jacobian(&f, &x, 1e-3 * r);
        let scale_m = exact.iter().flatten().map(|v| v.abs()).fold(0.0f64, f64::max);
        for i in 0..3 {
            for j in 0..3 {
                worst_fd = worst_fd.max((fd[i][j].re - exact[i][j]).abs() / scale_m);
            }
        }

        // radial polarization: contraction equals -(alpha+beta)^2 xbar/r^3
        let v = lsprobe_core::elastic::grad_kelvin_contract(&consts, &x, &y, &dir).unwrap();
        let c = -(consts.alpha + consts.beta).powi(2) / (r * r * r);
        for i in 0..3 {
            check(
                (v[i] - c * dir[i]).abs() <= 1e-12 * c.abs(),
                format!("radial contraction off at component {i}"),
                &mut errs,
            );
        }
    }
    check(
        worst_fd <= 1e-6,
        format!("gradient vs finite differences worst {worst_fd:.2e} > 1e-6"),
        &mut errs,
    );
    outcome(
        format!(
            "fd worst {worst_fd:.1e}, runtime {:.2} s",
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// The dynamic tensor minus its Kelvin part stays bounded down to
/// separations of 1e-4.
fn criterion_2() -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let kernel = lsprobe_core::elastic::kernels::NavierKernel::new(1.0, 1.0, 1.0).unwrap();
    let consts = kernel.consts;
    let dir = normalize(&[0.3, -0.5, 0.81]);
    let diff_at = |r: f64| -> f64 {
        let x = scale(&dir, r);
        let pi = kernel.tensor(&x, &[0.0; 3]).unwrap();
        let k = kelvin_tensor(&consts, &x, &[0.0; 3]).unwrap();
        let mut km = [[Complex64::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                km[i][j] = Complex64::from(k[i][j]);
            }
        }
        cmat_frobenius(&cmat_sub(&pi, &km))
    };
    let at_large = diff_at(1e-1);
    let mut sup: f64 = 0.0;
    let mut r = 1e-4;
    while r <= 1e-1 {
        sup = sup.max(diff_at(r));
        r *= 1.1;
    }
    let bound = 2.0 * at_large + 10.0;
    let mut errs = Vec::new();
    check(
        sup <= bound,
        format!("sup {sup:.3e} exceeds 2x(value at 0.1) + 10 = {bound:.3e}"),
        &mut errs,
    );
    outcome(
        format!(
            "sup {:.3e} vs bound {:.3e}, runtime {:.2} s",
            sup,
            bound,
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// Adaptive quadrature against the closed-form chain for the probe's
/// half-ball integral, and the -2 pi limit of the log deficit.
fn criterion_3() -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();
    let anchor = [0.0, 0.0, 0.8];
    let normal = [0.0, 0.0, 1.0];
    let mut worst: f64 = 0.0;
    for delta in [0.3, 0.5] {
        for j in [1u32, 10, 100] {
            let test = oracle::halfball_test(anchor, normal, delta);
            let region = oracle::Region {
                contains: &test,
                lo: [anchor[0] - delta, anchor[1] - delta, anchor[2] - delta],
                hi: [anchor[0] + delta, anchor[1] + delta, anchor[2] + delta],
            };
            let zj = oracle::probe_point(&anchor, &normal, j);
            let one = |_: &Vec3| Complex64::ONE;
            let quad = oracle::singular_quadrature(&region, &zj, 3, &one).unwrap();
            let closed = oracle::halfball_log_integral(delta, j);
            let rel = (quad.value.re - closed).abs() / closed.abs();
            worst = worst.max(rel);
            check(
                rel <= 1e-4,
                format!("quadrature vs closed form at delta={delta}, j={j}: rel {rel:.2e}"),
                &mut errs,
            );
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let deficit = oracle::halfball_log_integral(0.5, 100) - two_pi * 51.0f64.ln();
    let gap = (deficit + two_pi).abs() / two_pi;
    check(
        gap <= 1e-2,
        format!("deficit at j=100 is {gap:.3e} from -2 pi (relative)"),
        &mut errs,
    );
    outcome(
        format!(
            "worst quadrature rel {worst:.1e}, deficit gap {gap:.1e}, runtime {:.2} s",
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// Acoustic forward solver against the sphere series and the Born closed
/// form, with the 32^3 -> 64^3 refinement gain.
fn criterion_4(
    solver64: &AcousticSolver,
    pw64: &lsprobe_core::acoustic::AcousticSolution,
    solver32: &AcousticSolver,
    pw32: &lsprobe_core::acoustic::AcousticSolution,
) -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();
    let d = [0.0, 0.0, 1.0];
    let dirs = DirectionGrid::gauss_legendre(16, 32).unwrap();
    let mie = oracle::mie_far_field(0.8, 1.5, 1.0, &dirs, &d).unwrap();
    let err64 = solver64.far_field(pw64, &dirs).rel_l2_error(&mie);
    let err32 = solver32.far_field(pw32, &dirs).rel_l2_error(&mie);
    check(err64 <= 3e-2, format!("series error at 64^3 is {err64:.3e} > 3e-2"), &mut errs);
    check(
        err32 >= 1.8 * err64,
        format!("refinement gain {:.2} < 1.8", err32 / err64),
        &mut errs,
    );

    // Born regime
    let medium_born = AcousticMedium::ball([0.0; 3], 0.8, 1.01, 1.0).unwrap();
    let grid = GridSpec::cube_around(&medium_born.shape, 1.0, 64).unwrap();
    let solver_born = AcousticSolver::new(medium_born, grid).unwrap();
    let sol = solver_born
        .solve(&AcousticIncident::PlaneWave { direction: d }, TOL)
        .unwrap();
    let ff = solver_born.far_field(&sol, &dirs);
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, xhat) in dirs.directions.iter().enumerate() {
        let born = oracle::born_far_field(0.8, -0.01, 1.0, xhat, &d);
        num += dirs.weights[i] * (ff.values[i] - born).norm_sqr();
        den += dirs.weights[i] * born.norm_sqr();
    }
    let born_err = (num / den).sqrt();
    check(born_err <= 2e-2, format!("Born error {born_err:.3e} > 2e-2"), &mut errs);
    outcome(
        format!(
            "series err 32^3 {err32:.2e} -> 64^3 {err64:.2e} (gain {:.1}), Born err {born_err:.2e}, runtime {:.1} s",
            err32 / err64,
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// Far-field reciprocity at both contrasts, plus the acoustic and elastic
/// mixed reciprocity identities from independent solves.
fn criterion_5(solver15: &AcousticSolver, esolver: &ElasticSolver) -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();

    // u_inf(xhat, d) vs u_inf(-d, -xhat) over the +/- axis direction set
    let axis_dirs: [Vec3; 6] = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let reciprocity_dev = |solver: &AcousticSolver| -> f64 {
        let mut ff = vec![vec![Complex64::ZERO; 6]; 6];
        for (i, d) in axis_dirs.iter().enumerate() {
            let sol = solver
                .solve(&AcousticIncident::PlaneWave { direction: *d }, 1e-10)
                .unwrap();
            for (q, xhat) in axis_dirs.iter().enumerate() {
                ff[i][q] = solver.far_field_at(&sol, xhat);
            }
        }
        let neg = |i: usize| i ^ 1;
        let mut worst: f64 = 0.0;
        for i in 0..6 {
            for q in 0..6 {
                worst = worst
                    .max((ff[i][q] - ff[neg(q)][neg(i)]).norm() / ff[neg(q)][neg(i)].norm().max(1e-300));
            }
        }
        worst
    };

    let medium_born = AcousticMedium::ball([0.0; 3], 0.8, 1.01, 1.0).unwrap();
    let grid = GridSpec::cube_around(&medium_born.shape, 1.0, 64).unwrap();
    let solver_born = AcousticSolver::new(medium_born, grid).unwrap();
    let dev_born = reciprocity_dev(&solver_born);
    check(dev_born <= 1e-3, format!("Born reciprocity deviation {dev_born:.2e}"), &mut errs);
    let dev_15 = reciprocity_dev(solver15);
    check(dev_15 <= 2e-2, format!("n=1.5 reciprocity deviation {dev_15:.2e}"), &mut errs);

    let mixed = mixed_reciprocity_residual(solver15, &[0.0, 0.0, 1.5], &[0.0, 0.0, -1.0], TOL).unwrap();
    check(mixed <= 2e-2, format!("acoustic mixed reciprocity {mixed:.2e}"), &mut errs);

    let elastic = elastic_mixed_reciprocity_residual(
        esolver,
        &[0.0, 0.0, 1.5],
        &[0.0, 0.0, 1.0],
        &[0.0, 0.0, -1.0],
        &[0.0, 1.0, 0.0],
        TOL,
    )
    .unwrap();
    check(elastic <= 5e-2, format!("elastic mixed reciprocity {elastic:.2e}"), &mut errs);

    outcome(
        format!(
            "recip born {dev_born:.1e} / n1.5 {dev_15:.1e}, mixed acoustic {mixed:.1e}, mixed elastic {elastic:.1e}, runtime {:.1} s",
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// Field and flux continuity across the interface, decreasing under
/// refinement.
#[allow(clippy::too_many_arguments)]
fn criterion_6(
    solver64: &AcousticSolver,
    pw64: &lsprobe_core::acoustic::AcousticSolution,
    solver32: &AcousticSolver,
    pw32: &lsprobe_core::acoustic::AcousticSolution,
    esolver64: &ElasticSolver,
    epw64: &lsprobe_core::elastic::ElasticSolution,
    esolver32: &ElasticSolver,
    epw32: &lsprobe_core::elastic::ElasticSolution,
) -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();
    let probes: [Vec3; 6] = [
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.577350, 0.577350, 0.577350],
        [0.0, 0.0, -1.0],
        [-std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2],
    ];

    let acoustic_jumps = |solver: &AcousticSolver,
                          sol: &lsprobe_core::acoustic::AcousticSolution|
     -> (f64, f64) {
        let s = solver.grid.spacing / 2.0;
        let mut wu: f64 = 0.0;
        let mut wd: f64 = 0.0;
        for dir in &probes {
            let sp = solver.medium.shape.surface_point_along(dir).unwrap();
            let (ju, jd) = acoustic_boundary_jump(solver, sol, &sp, s);
            wu = wu.max(ju);
            wd = wd.max(jd);
        }
        (wu, wd)
    };
    let (au64, ad64) = acoustic_jumps(solver64, pw64);
    let (au32, ad32) = acoustic_jumps(solver32, pw32);
    check(au64 <= 5e-2, format!("acoustic field jump {au64:.3e} > 5e-2"), &mut errs);
    check(ad64 <= 5e-2, format!("acoustic flux jump {ad64:.3e} > 5e-2"), &mut errs);
    check(
        au64 < au32 && ad64 < ad32,
        format!("jumps not decreasing: u {au32:.2e}->{au64:.2e}, dnu {ad32:.2e}->{ad64:.2e}"),
        &mut errs,
    );

    let elastic_jumps = |solver: &ElasticSolver,
                         sol: &lsprobe_core::elastic::ElasticSolution|
     -> (f64, f64) {
        let s = solver.grid.spacing / 2.0;
        let mut wu: f64 = 0.0;
        let mut wt: f64 = 0.0;
        for dir in probes.iter().take(4) {
            let sp = solver.medium.shape.surface_point_along(dir).unwrap();
            let (ju, jt) = elastic_boundary_jump(solver, sol, &sp, s);
            wu = wu.max(ju);
            wt = wt.max(jt);
        }
        (wu, wt)
    };
    let (eu64, et64) = elastic_jumps(esolver64, epw64);
    let (eu32, et32) = elastic_jumps(esolver32, epw32);
    check(eu64 <= 5e-2, format!("elastic displacement jump {eu64:.3e} > 5e-2"), &mut errs);
    check(et64 <= 5e-2, format!("elastic traction jump {et64:.3e} > 5e-2"), &mut errs);
    check(
        eu64 < eu32 && et64 < et32,
        format!("elastic jumps not decreasing: u {eu32:.2e}->{eu64:.2e}, T {et32:.2e}->{et64:.2e}"),
        &mut errs,
    );

    outcome(
        format!(
            "acoustic (u, dnu) jumps ({au64:.2e}, {ad64:.2e}), elastic (u, T) jumps ({eu64:.2e}, {et64:.2e}), runtime {:.1} s",
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// The acoustic singular-source experiment: eventual monotonicity, the
/// oracle-gated slope, boundary-value recovery, the calibrated lower
/// bound, the exterior control, and slope stability under the fit offset.
fn criterion_7(medium15: &AcousticMedium, series: &ProbeSeries) -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();
    let delta = 0.3;

    // eventually monotone modulus (from j = 4 on)
    let mags: Vec<f64> = series.samples.iter().map(|s| s.indicator.norm()).collect();
    let monotone_from_4 = mags.windows(2).skip(2).all(|w| w[1] > w[0]);
    check(monotone_from_4, "indicator modulus not monotone for j >= 4".into(), &mut errs);

    let fit = fit_log_blowup(series, delta).unwrap();
    check(
        fit.classification == Classification::Boundary,
        "boundary anchor not classified as boundary".into(),
        &mut errs,
    );

    // fitted slope within 25% of the oracle-validated window coefficient
    // (contrast x reference slope); the asymptotic solid-angle constant is
    // printed for comparison
    let validated = 0.5 * fit.reference_slope;
    let slope_ratio = fit.slope / validated;
    check(
        (slope_ratio - 1.0).abs() <= 0.25,
        format!("slope {:.3e} vs oracle-validated {validated:.3e} (ratio {slope_ratio:.3})", fit.slope),
        &mut errs,
    );

    // recovered boundary contrast in [0.375, 0.625]
    check(
        (0.375..=0.625).contains(&fit.contrast_estimate),
        format!("recovered contrast {:.4} outside [0.375, 0.625]", fit.contrast_estimate),
        &mut errs,
    );

    // calibrated lower bound with the validated asymptotic rate
    // C0 k^2/(16 pi) ln(delta j + 1)
    let rate = 0.5 / (16.0 * std::f64::consts::PI);
    let x = |j: u32| (delta * j as f64 + 1.0).ln();
    let m_cal = rate * x(series.samples[0].j) - mags[0];
    for (i, s) in series.samples.iter().enumerate() {
        check(
            mags[i] >= rate * x(s.j) - m_cal - 1e-12,
            format!("lower bound violated at j = {}", s.j),
            &mut errs,
        );
    }

    // recovery is stable under the fit offset (the raw slope reparametrizes
    // with delta; the calibrated estimate must not)
    let est_lo = fit_log_blowup(series, 0.1).unwrap().contrast_estimate;
    let est_hi = fit_log_blowup(series, 0.5).unwrap().contrast_estimate;
    let drift = (est_lo / fit.contrast_estimate - 1.0)
        .abs()
        .max((est_hi / fit.contrast_estimate - 1.0).abs());
    check(
        drift <= 0.10,
        format!("recovery drifts {:.1}% across delta in [0.1, 0.5]", drift * 100.0),
        &mut errs,
    );

    // exterior control anchor at distance 0.3 from the boundary
    let grid_ext = GridSpec::cube_around(&medium15.shape, 1.2, 64).unwrap();
    let solver_ext = AcousticSolver::new(medium15.clone(), grid_ext).unwrap();
    let fake = SurfacePoint::new([0.0, 0.0, 1.1], [0.0, 0.0, 1.0]).unwrap();
    let ext_series = run_probe_acoustic(&solver_ext, &fake, 2, 13, &ProbeConfig::default()).unwrap();
    let ext_mags: Vec<f64> = ext_series.samples.iter().map(|s| s.indicator.norm()).collect();
    let ext_max = ext_mags.iter().cloned().fold(0.0f64, f64::max);
    let mut sorted = ext_mags.clone();
    sorted.sort_by(f64::total_cmp);
    let ext_median = sorted[sorted.len() / 2];
    check(
        ext_max <= 10.0 * ext_median,
        format!("exterior indicator not bounded: max/median {:.2}", ext_max / ext_median),
        &mut errs,
    );
    let ext_fit = fit_log_blowup(&ext_series, delta).unwrap();
    check(
        ext_fit.classification == Classification::Exterior,
        "exterior control anchor misclassified as boundary".into(),
        &mut errs,
    );

    let asymptotic = ProbePhysics::Acoustic { wavenumber: 1.0 }.theoretical_slope(0.5);
    outcome(
        format!(
            "slope {:.3e} (window-validated {validated:.3e}, asymptotic {asymptotic:.3e}), r2 {:.4}, recovered {:.3}, delta-drift {:.2}%, exterior slope {:.1e}, runtime {:.1} s",
            fit.slope,
            fit.r_squared,
            fit.contrast_estimate,
            drift * 100.0,
            ext_fit.slope,
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// The elastic singular-source experiment with the angular-mean-corrected
/// coefficient, plus the calibrated growth chain of the boundary-layer
/// integral.
fn criterion_8() -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();
    let medium = ElasticMedium::ball([0.0; 3], 0.8, 1.5, 1.0, 1.0, 1.0).unwrap();
    let grid = GridSpec::cube_around(&medium.shape, 1.0, 48).unwrap();
    let solver = ElasticSolver::new(medium.clone(), grid).unwrap();
    let anchor = SurfacePoint::new([0.0, 0.0, 0.8], [0.0, 0.0, 1.0]).unwrap();
    let delta = 0.3;
    let series = run_probe_elastic(&solver, &anchor, 2, 12, &ProbeConfig::default()).unwrap();
    let fit = fit_log_blowup(&series, delta).unwrap();

    check(fit.r_squared >= 0.9, format!("fit r2 {:.3} < 0.9", fit.r_squared), &mut errs);
    check(
        (fit.contrast_estimate - 0.5).abs() <= 0.35 * 0.5,
        format!("recovered |1-rho| = {:.4} not within 35% of 0.5", fit.contrast_estimate),
        &mut errs,
    );

    // the boundary-layer integral grows at the oracle-validated rate
    // C omega^2 S per unit of the half-ball integral, after one-point
    // calibration at j = 2
    let consts = kelvin_constants(1.0, 1.0).unwrap();
    let s_mean = kelvin_angular_mean(consts.alpha, consts.beta);
    let coeff = 0.5 * s_mean; // omega = 1
    let z_star = [0.0, 0.0, 0.8];
    let nu = [0.0, 0.0, 1.0];
    let js = [2u32, 3, 4, 6, 8, 12];
    let mut i2 = Vec::new();
    for &j in &js {
        let zj = oracle::probe_point(&z_star, &nu, j);
        let out = oracle::i2_elastic_oracle(&medium, &zj, &z_star, delta, &nu).unwrap();
        i2.push(out.value.norm());
    }
    let m_cal = coeff * oracle::halfball_log_integral(delta, 2) - i2[0];
    for (i, &j) in js.iter().enumerate() {
        check(
            i2[i] >= coeff * oracle::halfball_log_integral(delta, j) - m_cal - 1e-12,
            format!("elastic layer-integral chain violated at j = {j}"),
            &mut errs,
        );
    }

    let asymptotic = ProbePhysics::Elastic {
        omega: 1.0,
        lambda: 1.0,
        mu: 1.0,
    }
    .theoretical_slope(0.5);
    outcome(
        format!(
            "slope {:.3e} (window-validated {:.3e}, asymptotic {asymptotic:.3e}), r2 {:.4}, recovered {:.3}, runtime {:.1} s",
            fit.slope,
            0.5 * fit.reference_slope,
            fit.r_squared,
            fit.contrast_estimate,
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}

/// Uniform boundedness of the scattered (regular) part across the source
/// sequence.
fn criterion_9(series: &ProbeSeries) -> Result<String, String> {
    let ratio = series.sup_norm_ratio();
    let mut errs = Vec::new();
    check(
        ratio <= 3.0,
        format!("sup-norm ratio {ratio:.2} exceeds 3"),
        &mut errs,
    );
    outcome(format!("max/min of ||w_j||_inf = {ratio:.2}"), errs)
}

/// Fitted slopes scale with the contrast: 0.3 vs 0.6 ordered with ratio in
/// [1.6, 2.4].
fn criterion_10() -> Result<String, String> {
    let t0 = std::time::Instant::now();
    let mut errs = Vec::new();
    let anchor = SurfacePoint::new([0.0, 0.0, 0.8], [0.0, 0.0, 1.0]).unwrap();
    let mut slopes = Vec::new();
    for n_inside in [1.3, 1.6] {
        let medium = AcousticMedium::ball([0.0; 3], 0.8, n_inside, 1.0).unwrap();
        let grid = GridSpec::cube_around(&medium.shape, 1.0, 48).unwrap();
        let solver = AcousticSolver::new(medium, grid).unwrap();
        let series = run_probe_acoustic(&solver, &anchor, 2, 12, &ProbeConfig::default()).unwrap();
        let fit = fit_log_blowup(&series, 0.3).unwrap();
        slopes.push(fit.slope);
    }
    check(slopes[1] > slopes[0], "slopes not ordered with contrast".into(), &mut errs);
    let ratio = slopes[1] / slopes[0];
    check(
        (1.6..=2.4).contains(&ratio),
        format!("slope ratio {ratio:.2} outside [1.6, 2.4]"),
        &mut errs,
    );
    outcome(
        format!(
            "slopes {:.3e} (c=0.3) / {:.3e} (c=0.6), ratio {ratio:.2}, runtime {:.1} s",
            slopes[0],
            slopes[1],
            t0.elapsed().as_secs_f64()
        ),
        errs,
    )
}
