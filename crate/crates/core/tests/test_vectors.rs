//! Closed-form outputs of `solve` on structured inputs, computed independently
//! through scalar Riesz and half-Laplacian resolvent multipliers.

use maxwell_lap::sources::random_band_limited;
use maxwell_lap::spectral::{half_laplacian_resolvent, riesz, Branch};
use maxwell_lap::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar_field(grid: &Grid64, seed: u64) -> Field64 {
    random_band_limited(grid, 1, 6, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn max_rel(a: &Field64, b: &Field64) -> f64 {
    a.sub(b).max_abs() / b.max_abs()
}

fn neg_i_over(k: f64) -> C64 {
    C64::new(0.0, -1.0 / k)
}

#[test]
fn planar_transverse_input() {
    let grid = Grid::cubic(2, 32, 2.0 * std::f64::consts::PI).unwrap();
    let f = scalar_field(&grid, 11);
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
        let sum = em.add(&ep);
        let diff = ep.sub(&em);
        let want = Field::stack(&[
            &riesz(&sum, 1, &flavor).unwrap().scaled(-neg_i_over(1.0)),
            &riesz(&sum, 0, &flavor).unwrap().scaled(neg_i_over(1.0)),
            &diff.scaled(neg_i_over(1.0) * m2.mu),
        ]);
        assert!(max_rel(&u, &want) < 1e-10, "defect {:e}", max_rel(&u, &want));
    }
}

#[test]
fn spatial_example_input() {
    let grid = Grid::cubic(3, 16, 2.0 * std::f64::consts::PI).unwrap();
    let f = scalar_field(&grid, 12);
    let euclid = NormFlavor::euclidean(3);
    for (eps_axis, eps_perp) in [(1.0f64, 1.0f64), (0.5, 2.0)] {
        let m3 = Material3::new(eps_axis, eps_perp, Axis::X1, 1.0).unwrap();
        let omega = C64::new(0.9, 0.3);
        let sb = m3.b().sqrt();
        let zero = Field::zeros(&grid, 1);
        let r = |g: &Field64, a: usize| riesz(g, a, &euclid).unwrap();
        let j = Field::stack(&[&zero, &r(&f, 2).scaled(C64::new(-1.0, 0.0)), &r(&f, 1), &zero, &zero, &zero]);
        let u = solve(omega, &j, &m3.into()).unwrap();

        let scaled = NormFlavor::scaled_euclidean(3, sb);
        let em = half_laplacian_resolvent(&f, omega, Branch::Minus, &scaled).unwrap();
        let ep = half_laplacian_resolvent(&f, omega, Branch::Plus, &scaled).unwrap();
        let sum = em.add(&ep);
        let diff = em.sub(&ep);
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
        assert!(max_rel(&u, &want) < 1e-10, "a={eps_axis} b={eps_perp}: defect {:e}", max_rel(&u, &want));
    }
}
