//! Acceptance run: one PASS/FAIL line per criterion, each within its time budget.
//! Built with `harness = false` so the lines always reach the terminal.

use std::time::{Duration, Instant};

use maxwell_lap::lap::*;
use maxwell_lap::multiplier::{charge_column_2d, charge_column_3d};
use maxwell_lap::region::*;
use maxwell_lap::sources::{random_band_limited, random_solenoidal};
use maxwell_lap::spectral::{divergence_defect, half_laplacian_resolvent, riesz, Branch};
use maxwell_lap::verify::{inverse_suite_3d, random_mutations, SuiteReport};
use maxwell_lap::*;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn suite<'a>(report: &'a VerifyReport, name: &str, dim: usize) -> &'a SuiteReport {
    report.suites.iter().find(|s| s.name == name && s.dim == dim).expect("suite present")
}

fn full_suites() -> VerifyReport {
    run_suites(&VerifyConfig { samples: 100_000, ..VerifyConfig::default() })
}

fn diagonalization() -> Outcome {
    let r = full_suites();
    let picks = [("diagonalization", 2), ("diagonalization", 3), ("det_m", 2), ("det_m_over_alpha4", 3)];
    let passed = picks.iter().all(|(n, d)| suite(&r, n, *d).passed && suite(&r, n, *d).samples >= 100_000);
    let detail = picks
        .iter()
        .map(|(n, d)| format!("{n} {d}D {:.1e}", suite(&r, n, *d).max_defect))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(passed, detail)
}

fn inverse_oracle() -> Outcome {
    let r = full_suites();
    let (a, b) = (suite(&r, "inverse", 2), suite(&r, "inverse", 3));
    Outcome::new(
        a.passed && b.passed && a.skipped == 0 && b.skipped == 0,
        format!("2D {:.1e}, 3D {:.1e} over {} points each", a.max_defect, b.max_defect, a.samples),
    )
}

fn random_omega(rng: &mut ChaCha8Rng) -> C64 {
    let im = 10f64.powf(rng.gen_range(-3.0..1.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    C64::new(rng.gen_range(-5.0..5.0), im)
}

fn random_material(dim: usize, rng: &mut ChaCha8Rng) -> Material64 {
    if dim == 2 {
        let (a, b) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
        let c = rng.gen_range(-0.8..0.8) * f64::sqrt(a * b);
        Material2::new(a, c, b, rng.gen_range(0.5..2.0)).unwrap().into()
    } else {
        let axis = [Axis::X1, Axis::X2, Axis::X3][rng.gen_range(0..3)];
        Material3::new(rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0), axis, rng.gen_range(0.5..2.0))
            .unwrap()
            .into()
    }
}

fn solve_residual() -> Outcome {
    let (mut worst_res, mut worst_div) = (0.0f64, 0.0f64);
    for (dim, n) in [(2, 64), (3, 32)] {
        let grid = Grid::cubic(dim, n, TWO_PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(300 + dim as u64);
        for trial in 0..100 {
            let mat = random_material(dim, &mut rng);
            let omega = random_omega(&mut rng);
            let ncomp = mat.components();
            let solenoidal = trial % 2 == 0;
            let j = if solenoidal {
                random_solenoidal(&grid, ncomp, n / 4, &mut rng)
            } else {
                random_band_limited(&grid, ncomp, n / 4, &mut rng)
            };
            let u = solve(omega, &j, &mat).unwrap();
            worst_res = worst_res.max(relative_l2(&forward_operator(omega, &u, &mat).unwrap(), &j));
            if solenoidal {
                worst_div = worst_div.max(divergence_defect(&u));
            }
        }
    }
    Outcome::new(
        worst_res < 1e-10 && worst_div < 1e-11,
        format!("residual {worst_res:.1e}, divergence {worst_div:.1e} over 200 currents"),
    )
}

fn max_rel(a: &Field64, b: &Field64) -> f64 {
    a.sub(b).max_abs() / b.max_abs()
}

fn test_vectors() -> Outcome {
    let neg_i_over = |k: f64| C64::new(0.0, -1.0 / k);
    let mut worst = 0.0f64;

    let grid = Grid::cubic(2, 64, TWO_PI).unwrap();
    let f = random_band_limited(&grid, 1, 12, &mut ChaCha8Rng::seed_from_u64(401));
    for (m2, omega) in [
        (Material2::new(2.0, 0.3, 1.5, 0.7).unwrap(), C64::new(1.3, 0.4)),
        (Material2::isotropic(1.0, 1.0).unwrap(), C64::new(-2.0, -0.05)),
    ] {
        let flavor = NormFlavor::eps_prime(&m2);
        let r1 = riesz(&f, 0, &flavor).unwrap();
        let r2 = riesz(&f, 1, &flavor).unwrap();
        let zero = Field::zeros(&grid, 1);
        let j = Field::stack(&[&r2.scaled(C64::new(-2.0, 0.0)), &r1.scaled(C64::new(2.0, 0.0)), &zero]);
        let u = solve(omega, &j, &m2.into()).unwrap();
        let em = half_laplacian_resolvent(&f, omega, Branch::Minus, &flavor).unwrap();
        let ep = half_laplacian_resolvent(&f, omega, Branch::Plus, &flavor).unwrap();
        let (sum, diff) = (em.add(&ep), ep.sub(&em));
        let want = Field::stack(&[
            &riesz(&sum, 1, &flavor).unwrap().scaled(-neg_i_over(1.0)),
            &riesz(&sum, 0, &flavor).unwrap().scaled(neg_i_over(1.0)),
            &diff.scaled(neg_i_over(1.0) * m2.mu),
        ]);
        worst = worst.max(max_rel(&u, &want));
    }

    let grid = Grid::cubic(3, 32, TWO_PI).unwrap();
    let f = random_band_limited(&grid, 1, 8, &mut ChaCha8Rng::seed_from_u64(402));
    let euclid = NormFlavor::euclidean(3);
    let r = |g: &Field64, a: usize| riesz(g, a, &euclid).unwrap();
    for (eps_axis, eps_perp) in [(1.0f64, 1.0f64), (0.5, 2.0)] {
        let m3 = Material3::new(eps_axis, eps_perp, Axis::X1, 1.0).unwrap();
        let omega = C64::new(0.9, 0.3);
        let sb = m3.b().sqrt();
        let zero = Field::zeros(&grid, 1);
        let j = Field::stack(&[&zero, &r(&f, 2).scaled(C64::new(-1.0, 0.0)), &r(&f, 1), &zero, &zero, &zero]);
        let u = solve(omega, &j, &m3.into()).unwrap();
        let scaled = NormFlavor::scaled_euclidean(3, sb);
        let em = half_laplacian_resolvent(&f, omega, Branch::Minus, &scaled).unwrap();
        let ep = half_laplacian_resolvent(&f, omega, Branch::Plus, &scaled).unwrap();
        let (sum, diff) = (em.add(&ep), em.sub(&ep));
        let half = neg_i_over(2.0);
        let transverse = r(&r(&diff, 1), 1).add(&r(&r(&diff, 2), 2));
        let want = Field::stack(&[
            &zero,
            &r(&sum, 2).scaled(-half),
            &r(&sum, 1).scaled(half),
            &transverse.scaled(-half * sb),
            &r(&r(&diff, 0), 1).scaled(half * sb),
            &r(&r(&diff, 0), 2).scaled(half * sb),
        ]);
        worst = worst.max(max_rel(&u, &want));
    }
    Outcome::new(worst < 1e-10, format!("max componentwise defect {worst:.1e}"))
}

/// Field whose spectral coefficients are the charge columns of `j`.
fn charge_part(omega: C64, j: &Field64, mat: &Material64) -> Field64 {
    let grid = j.grid().clone();
    let n = grid.len();
    let spec = j.to_spectral();
    let mut out = Field::zeros(&grid, j.ncomp());
    let i = C64::new(0.0, 1.0);
    for k in 1..n {
        let xi = grid.wavevector(k);
        let c = |a: usize| spec.data()[a * n + k];
        let col: Vec<C64> = match mat {
            Material::Planar(m) => charge_column_2d(omega, &[xi[0], xi[1]], m, i * (c(0) * xi[0] + c(1) * xi[1])).to_vec(),
            Material::Uniaxial(m) => {
                let rho_e = i * (c(0) * xi[0] + c(1) * xi[1] + c(2) * xi[2]);
                let rho_m = i * (c(3) * xi[0] + c(4) * xi[1] + c(5) * xi[2]);
                charge_column_3d(omega, &xi, m, rho_e, rho_m).to_vec()
            }
        };
        for (a, v) in col.into_iter().enumerate() {
            out.data_mut()[a * n + k] = v;
        }
    }
    out.to_physical()
}

fn charge_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut linear = true;
    for (dim, n) in [(2, 64), (3, 32)] {
        let grid = Grid::cubic(dim, n, TWO_PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(500 + dim as u64);
        for _ in 0..10 {
            let mat = random_material(dim, &mut rng);
            let omega = random_omega(&mut rng);
            let j = random_band_limited(&grid, mat.components(), n / 4, &mut rng);
            let full = solve(omega, &j, &mat).unwrap();
            let sol = solve(omega, &leray_project_material(&j, &mat), &mat).unwrap();
            let got = full.sub(&sol);
            worst = worst.max(got.sub(&charge_part(omega, &j, &mat)).max_abs() / full.max_abs());

            let norms = |j: &Field64| {
                let ch = divergence_and_charges(j);
                let e = lebesgue_norm(&fractional_laplacian(&ch.rho_e, -0.5).unwrap(), 3.0);
                let m = lebesgue_norm(&fractional_laplacian(&ch.rho_m, -0.5).unwrap(), 3.0);
                (e, m)
            };
            let (e1, m1) = norms(&j);
            let (e2, m2) = norms(&j.scaled(C64::new(-2.5, 0.0)));
            linear &= e1.is_finite() && m1.is_finite() && e1 > 0.0 && (e2 / e1 - 2.5).abs() < 1e-12;
            if dim == 3 {
                linear &= m1 > 0.0 && (m2 / m1 - 2.5).abs() < 1e-12;
            }
        }
    }
    Outcome::new(worst < 1e-11 && linear, format!("split defect {worst:.1e}, charge norms finite and linear: {linear}"))
}

fn sokhotsky_and_lap() -> Outcome {
    let opts = LapOptions::default();
    // Scalar rate of e_delta towards pv + surface.
    let src = GaussianPacket::new(2, 1).with_bump([0.9, 0.3, 0.0], 0.35, [0.2, 0.1, 0.0], vec![C64::new(1.0, 0.0)]);
    let flavor = NormFlavor::scaled_euclidean(2, 1.3);
    let (omega, cutoff, grid) = (1.1, CutoffSpec::new(2.0, 4.0).unwrap(), Grid::cubic(2, 4, 2.0).unwrap());
    let pv = pv_part(&src, omega, &cutoff, &flavor, &grid, &opts).unwrap();
    let quad = SurfaceQuadrature::new(&flavor, omega, 256, 0);
    let mut min_rate = f64::INFINITY;
    for side in [Side::Plus, Side::Minus] {
        let limit = pv.add(&surface_part(&src, omega, side, &cutoff, &flavor, &quad, &grid).unwrap());
        let deltas: Vec<f64> = (3..=9).map(|k| 2f64.powi(-k)).collect();
        let errs: Vec<f64> = deltas
            .iter()
            .map(|d| relative_l2(&e_delta(&src, omega, *d, side, &cutoff, &flavor, &grid, &opts).unwrap(), &limit))
            .collect();
        min_rate = min_rate.min(loglog_fit(&deltas, &errs).0);
    }

    let planar = GaussianPacket::new(2, 3)
        .with_bump([0.7, -0.5, 0.0], 0.3, [0.3, -0.2, 0.0], vec![C64::new(1.0, 0.2), C64::new(-0.4, 0.5), C64::new(0.3, 0.0)])
        .with_bump([-0.2, 0.9, 0.0], 0.25, [0.0, 0.4, 0.0], vec![C64::new(0.2, -0.1), C64::new(0.8, 0.0), C64::new(-0.5, 0.5)]);
    let spatial = GaussianPacket::new(3, 6).with_bump(
        [0.6, -0.4, 0.3],
        0.35,
        [0.5, 0.5, 0.5],
        (0..6).map(|k| C64::new(1.0 - 0.2 * k as f64, 0.1 * k as f64)).collect(),
    );
    let cases: [(&GaussianPacket<f64>, Material64, Grid64, LapOptions<f64>); 2] = [
        (&planar, Material2::new(1.6, 0.3, 0.9, 1.2).unwrap().into(), Grid::cubic(2, 8, 3.0).unwrap(), opts.clone()),
        (
            &spatial,
            Material3::new(0.5, 2.0, Axis::X2, 1.0).unwrap().into(),
            Grid::cubic(3, 4, 2.0).unwrap(),
            LapOptions { angular: 32, ..opts.clone() },
        ),
    ];
    let (mut agree, mut diff_defect, mut residual) = (0.0f64, 0.0f64, 0.0f64);
    for (src, mat, grid, opts) in &cases {
        let omega = 0.8;
        let cutoff = CutoffSpec::enclosing(omega, mat, 0.2);
        let mut fields = Vec::new();
        for side in [Side::Plus, Side::Minus] {
            match lap_solve_checked(omega, *src, mat, side, &cutoff, grid, opts) {
                Ok(cv) => {
                    agree = agree.max(cv.relative_difference);
                    fields.push(cv.quadrature.field);
                }
                Err(e) => return Outcome::new(false, format!("{e}")),
            }
            for method in [LapMethod::Extrapolate, LapMethod::Quadrature] {
                residual = residual.max(limiting_residual(omega, *src, mat, side, method, &cutoff, grid, opts).unwrap());
            }
        }
        let surface = surface_terms(omega, *src, mat, Side::Plus, &cutoff, grid, opts).unwrap();
        diff_defect = diff_defect.max(relative_l2(&fields[0].sub(&fields[1]), &surface.scaled(C64::new(2.0, 0.0))));
    }
    Outcome::new(
        min_rate >= 0.9 && agree < 1e-5 && diff_defect < 1e-6 && residual < 1e-6,
        format!(
            "rate {min_rate:.3}, agreement {agree:.1e}, difference {diff_defect:.1e}, residual {residual:.1e}"
        ),
    )
}

fn exponent_probes() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;

    // L2 -> L2 annulus at exact lattice resonance.
    let half = LebesguePair::<f64>::new(0.5, 0.5, 2).unwrap();
    let mat2: Material64 = Material2::new(1.4, 0.2, 0.8, 1.0).unwrap().into();
    let grid = Grid::cubic(2, 64, TWO_PI).unwrap();
    let deltas: Vec<f64> = (0..6).map(|k| 1e-2 * 10f64.powf(-0.4 * k as f64)).collect();
    let w = lattice_resonance(&grid, &mat2, 10.0);
    let fit = lap_blowup_probe(w, &half, &mat2, &deltas, Side::Plus, ProbeFamily::Annulus { half_width: 0.25 }, &grid)
        .unwrap();
    passed &= (fit.slope + 1.0).abs() <= 0.1 && fit.samples.len() >= 6;
    lines.push(format!("annulus {:.3}", fit.slope));

    // gamma = 0 pair in 3D: Knapp caps along the distance and along a ray.
    let pair = LebesguePair::<f64>::new(0.75, 0.25, 3).unwrap();
    let mat3: Material64 = Material3::isotropic(1.0, 1.0).unwrap().into();
    let base = Grid::cubic(3, 8, 1.0).unwrap();
    let dists: Vec<f64> = (0..6).map(|k| 0.4 * 2f64.powf(-0.5 * k as f64)).collect();
    let fit = norm_scaling_probe(&pair, &mat3, ProbeFamily::Knapp, &distance_samples(4.0, &dists), ProbeAxis::Distance, &base)
        .unwrap();
    passed &= gamma(&pair) == 0.0 && fit.slope.abs() <= 0.1 && fit.samples.len() >= 6;
    lines.push(format!("knapp dist {:.3}", fit.slope));
    let moduli: Vec<f64> = (1..=6).map(|k| 2f64.powi(k)).collect();
    let ray = norm_scaling_probe(&pair, &mat3, ProbeFamily::Knapp, &ray_samples(C64::new(1.0, 0.1), &moduli), ProbeAxis::Modulus, &base)
        .unwrap();
    passed &= (ray.slope - 0.5).abs() <= 0.15 && (ray.predicted - 0.5).abs() < 1e-12;
    lines.push(format!("knapp ray {:.3}", ray.slope));

    // Lower-bound families must not beat the prediction.
    let pair2 = LebesguePair::<f64>::new(0.75, 0.25, 2).unwrap();
    let iso2: Material64 = Material2::isotropic(1.0, 1.0).unwrap().into();
    let omegas = distance_samples(4.0, &dists);
    for family in [ProbeFamily::Knapp, ProbeFamily::Radial] {
        let fit = norm_scaling_probe(&pair2, &iso2, family, &omegas, ProbeAxis::Distance, &Grid::cubic(2, 8, 1.0).unwrap())
            .unwrap();
        passed &= fit.slope >= fit.predicted - 0.1;
        lines.push(format!("{family:?} 2D {:.3} (bound {:.3})", fit.slope, fit.predicted));
    }
    Outcome::new(passed, lines.join(", "))
}

fn region_arithmetic() -> Outcome {
    type Q = Ratio<i64>;
    let q = |a: i64, b: i64| Q::new(a, b);
    let pair = |x: Q, y: Q, d: usize| LebesguePair::new(x, y, d).unwrap();
    let mut dual_ok = true;
    for d in [2, 3] {
        for i in 0..100 {
            for j in 0..100 {
                let p = pair(q(i, 99), q(j, 99), d);
                dual_ok &= gamma(&p) == gamma(&p.dual());
                for set in [SetId::R0Half, SetId::R1, SetId::P] {
                    dual_ok &= membership(&p, set) == membership(&p.dual(), set);
                }
            }
        }
    }
    let table: &[(usize, (i64, i64), (i64, i64), SetId, bool)] = &[
        (2, (1, 2), (1, 4), SetId::R0Half, true),
        (2, (1, 2), (0, 1), SetId::R0Half, false),
        (2, (1, 1), (1, 2), SetId::R0Half, false),
        (2, (3, 4), (1, 2), SetId::R0Half, true),
        (2, (1, 1), (2, 5), SetId::R0Half, false),
        (3, (1, 3), (0, 1), SetId::R0Half, false),
        (3, (1, 1), (2, 3), SetId::R0Half, false),
        (3, (1, 2), (1, 4), SetId::R0Half, true),
        (3, (3, 4), (1, 4), SetId::P, true),
        (3, (2, 3), (1, 6), SetId::P, false),
        (3, (3, 4), (1, 4), SetId::R1, true),
        (3, (1, 1), (1, 3), SetId::R1, false),
        (3, (1, 1), (0, 1), SetId::R1, false),
        (2, (9, 10), (1, 10), SetId::R1, true),
        (2, (1, 1), (0, 1), SetId::R1, false),
    ];
    let table_ok = table
        .iter()
        .all(|&(d, (a, b), (c, e), set, want)| membership(&pair(q(a, b), q(c, e), d), set) == want);

    let cone = LebesguePair::<f64>::new(1.0 / 3.0, 0.0, 3).unwrap();
    let empty = matches!(
        z_boundary(&RegionQuery::new(cone, 0.5, None, 0.5).unwrap(), 64, 10.0),
        Err(RegionError::EmptyRegion(_))
    );
    let mut cone_err = 0.0f64;
    for ell in [1.0, 2.0, 7.5] {
        let b = z_boundary(&RegionQuery::new(cone, ell, None, 0.5).unwrap(), 200, 50.0).unwrap();
        for pt in b.branches.iter().flatten() {
            cone_err = cone_err.max((pt[1].abs() / pt[0].hypot(pt[1]) - 1.0 / ell).abs());
        }
    }
    Outcome::new(
        dual_ok && table_ok && empty && cone_err < 1e-10,
        format!("duality {dual_ok}, truth table {table_ok}, empty for l < 1 {empty}, cone defect {cone_err:.1e}"),
    )
}

fn mutation_detection() -> Outcome {
    let mutations = random_mutations(10, 0x6d75);
    let mut missed = Vec::new();
    for m in &mutations {
        let r = inverse_suite_3d(100_000, VerifyConfig::default().seed, 1e-10, Some(*m));
        if r.passed || r.witness.is_none() {
            missed.push((m.row, m.col));
        }
    }
    let entries: Vec<String> = mutations.iter().map(|m| format!("({},{})", m.row, m.col)).collect();
    Outcome::new(missed.is_empty(), format!("caught {}/10: {}", 10 - missed.len(), entries.join(" ")))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("diagonalization suite", 30, diagonalization),
        ("inverse oracle", 60, inverse_oracle),
        ("solve residual", 120, solve_residual),
        ("test vectors", 30, test_vectors),
        ("charge identity", 30, charge_identity),
        ("limiting absorption", 300, sokhotsky_and_lap),
        ("exponent probes", 300, exponent_probes),
        ("region arithmetic", 10, region_arithmetic),
        ("mutation detection", 120, mutation_detection),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let ok = out.passed && in_time;
        failures += usize::from(!ok);
        println!(
            "criterion {}: {} {name}: {} [{:.1} s of {budget} s{}]",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
