//! Randomized invariant suites over symbols and inverse symbols.
//!
//! Samples are drawn sequentially from a seeded ChaCha stream and evaluated in
//! parallel, so reports are identical for a fixed seed regardless of threads.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::SymbolMatrix;
use crate::multiplier::{charge_column_2d, charge_column_3d, resolvent_matrix_2d, resolvent_matrix_3d_with, EntryMutation};
use crate::symbol::{
    det_diagnostics, det_ratio_closed_form, eigen_decomposition_2d, eigen_decomposition_3d, symbol_p_2d,
    symbol_p_3d, Axis, Material2, Material3,
};

/// Thresholds of the suites; each report echoes the one it used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteTolerances {
    pub diagonalization: f64,
    pub det_2d: f64,
    pub det_3d_ratio: f64,
    pub inverse: f64,
    pub charge: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self { diagonalization: 1e-12, det_2d: 1e-12, det_3d_ratio: 1e-12, inverse: 1e-10, charge: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Samples per suite and dimension.
    pub samples: usize,
    pub seed: u64,
    pub tolerances: SuiteTolerances,
    /// Sign flip injected into the 3D transverse block of the inverse oracle.
    pub mutation: Option<EntryMutation>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { samples: 100_000, seed: 0x5eed, tolerances: SuiteTolerances::default(), mutation: None }
    }
}

/// Random point of a suite: frequency, wavevector and material.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SamplePoint {
    Planar { omega: [f64; 2], xi: [f64; 2], material: Material2<f64> },
    Spatial { omega: [f64; 2], xi: [f64; 3], material: Material3<f64> },
}

/// Worst sample of a suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub point: SamplePoint,
    pub row: usize,
    pub col: usize,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub dim: usize,
    pub samples: usize,
    /// Samples outside the suite's domain (e.g. directions on the axis for eigenvectors).
    pub skipped: usize,
    pub max_defect: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub tolerances: SuiteTolerances,
    pub mutation: Option<EntryMutation>,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl VerifyReport {
    /// First failing suite's witness, if any.
    pub fn first_failure(&self) -> Option<(&SuiteReport, Witness)> {
        self.suites.iter().find(|s| !s.passed).and_then(|s| s.witness.map(|w| (s, w)))
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_omega(rng: &mut ChaCha8Rng) -> [f64; 2] {
    let re = rng.gen_range(-10.0..10.0);
    let im = log_uniform(rng, 1e-3, 10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    [re, im]
}

fn random_direction<const D: usize>(rng: &mut ChaCha8Rng) -> [f64; D] {
    loop {
        let mut v = [0.0; D];
        v.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            let s = log_uniform(rng, 1e-2, 1e2) / r;
            v.iter_mut().for_each(|x| *x *= s);
            return v;
        }
    }
}

fn planar_point(rng: &mut ChaCha8Rng) -> SamplePoint {
    let e11 = log_uniform(rng, 0.25, 4.0);
    let e22 = log_uniform(rng, 0.25, 4.0);
    let isotropic = rng.gen_bool(0.1);
    let material = if isotropic {
        Material2 { eps11: e11, eps12: 0.0, eps22: e11, mu: log_uniform(rng, 0.5, 2.0) }
    } else {
        let e12 = rng.gen_range(-0.9..0.9) * (e11 * e22).sqrt();
        Material2 { eps11: e11, eps12: e12, eps22: e22, mu: log_uniform(rng, 0.5, 2.0) }
    };
    SamplePoint::Planar { omega: random_omega(rng), xi: random_direction(rng), material }
}

/// 3D sample; a tenth are isotropic and, with `near_axis`, a tenth sit near
/// the distinguished axis where the fallback path takes over.
fn spatial_point(rng: &mut ChaCha8Rng, near_axis: bool) -> SamplePoint {
    let axis = [Axis::X1, Axis::X2, Axis::X3][rng.gen_range(0..3)];
    let eps_axis = log_uniform(rng, 0.25, 4.0);
    let eps_perp = if rng.gen_bool(0.1) { eps_axis } else { log_uniform(rng, 0.25, 4.0) };
    let material = Material3 { eps_axis, eps_perp, axis, mu: log_uniform(rng, 0.5, 2.0) };
    let mut xi: [f64; 3] = random_direction(rng);
    if near_axis && rng.gen_bool(0.1) {
        let j = axis.index();
        let scale = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tilt = log_uniform(rng, 1e-12, 1e-4);
        for (k, x) in xi.iter_mut().enumerate() {
            *x = if k == j { scale } else { *x * tilt };
        }
    }
    SamplePoint::Spatial { omega: random_omega(rng), xi, material }
}

fn draw(dim: usize, samples: usize, seed: u64, stream: u64, near_axis: bool) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..samples)
        .map(|_| if dim == 2 { planar_point(&mut rng) } else { spatial_point(&mut rng, near_axis) })
        .collect()
}

fn c(z: [f64; 2]) -> Complex<f64> {
    Complex::new(z[0], z[1])
}

/// Largest entry of `a - b` and its position.
fn max_entry(a: &SymbolMatrix<f64>, b: &SymbolMatrix<f64>) -> (f64, usize, usize) {
    let n = a.order();
    let mut best = (0.0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            let v = (a[(i, j)] - b[(i, j)]).norm();
            if !(v <= best.0) {
                best = (v, i, j);
            }
        }
    }
    best
}

type Outcome = Option<(f64, usize, usize)>;

fn run_suite(
    name: &str,
    dim: usize,
    points: &[SamplePoint],
    tolerance: f64,
    eval: impl Fn(&SamplePoint) -> Outcome + Sync,
) -> SuiteReport {
    let results: Vec<Outcome> = points.par_iter().map(&eval).collect();
    let mut skipped = 0;
    let mut witness: Option<Witness> = None;
    for (index, r) in results.iter().enumerate() {
        match r {
            None => skipped += 1,
            Some((defect, row, col)) => {
                let worse = witness.is_none_or(|w| !(*defect <= w.defect));
                if worse {
                    witness = Some(Witness { index, point: points[index], row: *row, col: *col, defect: *defect });
                }
            }
        }
    }
    let max_defect = witness.map_or(0.0, |w| w.defect);
    SuiteReport {
        name: name.to_string(),
        dim,
        samples: points.len(),
        skipped,
        max_defect,
        tolerance,
        passed: max_defect <= tolerance,
        witness,
    }
}

/// `p = m d m^{-1}`, relative to the largest entry of `p`.
pub fn diagonalization_defect(point: &SamplePoint) -> Outcome {
    let (p, e) = match *point {
        SamplePoint::Planar { omega, xi, material } => {
            (symbol_p_2d(c(omega), &xi, &material), eigen_decomposition_2d(c(omega), &xi, &material).ok()?)
        }
        SamplePoint::Spatial { omega, xi, material } => {
            (symbol_p_3d(c(omega), &xi, &material), eigen_decomposition_3d(c(omega), &xi, &material).ok()?)
        }
    };
    let (v, i, j) = max_entry(&p, &e.reconstruct());
    Some((v / p.max_abs(), i, j))
}

/// `|det m + 1|` for the planar eigenvector matrix.
pub fn planar_det_defect(point: &SamplePoint) -> Outcome {
    let SamplePoint::Planar { omega, xi, material } = *point else { return None };
    let e = eigen_decomposition_2d(c(omega), &xi, &material).ok()?;
    Some(((e.m.det() + 1.0).norm(), 0, 0))
}

/// Relative deviation of `|det m| / alpha^4` from `4 / (a b^{3/2})`.
pub fn spatial_det_defect(point: &SamplePoint) -> Outcome {
    let SamplePoint::Spatial { xi, material, .. } = *point else { return None };
    let d = det_diagnostics(&xi, &material).ok()?;
    let canon = material.canonical();
    let expected = det_ratio_closed_form(canon.a(), canon.b());
    let ratio = d.det_m.norm() / d.alpha.powi(4);
    Some(((ratio - expected).abs() / expected, 0, 0))
}

/// `|p M - I|_max` for the closed-form inverse symbol.
pub fn inverse_defect(point: &SamplePoint, mutation: Option<EntryMutation>) -> Outcome {
    let (p, m) = match *point {
        SamplePoint::Planar { omega, xi, material } => {
            (symbol_p_2d(c(omega), &xi, &material), resolvent_matrix_2d(c(omega), &xi, &material))
        }
        SamplePoint::Spatial { omega, xi, material } => (
            symbol_p_3d(c(omega), &xi, &material),
            resolvent_matrix_3d_with(c(omega), &xi, &material, mutation),
        ),
    };
    let n = p.order();
    Some(max_entry(&(p * m), &SymbolMatrix::identity(n)))
}

/// `M` applied to the material gradient directions `(eps xi, xi)` must equal
/// the charge column built from `rho = i xi . J`; relative defect.
pub fn charge_defect(point: &SamplePoint) -> Outcome {
    let i = Complex::new(0.0, 1.0);
    let (got, want) = match *point {
        SamplePoint::Planar { omega, xi, material: m } => {
            let je = [m.eps11 * xi[0] + m.eps12 * xi[1], m.eps12 * xi[0] + m.eps22 * xi[1]];
            let j = [Complex::from(je[0]), Complex::from(je[1]), Complex::zero()];
            let rho = i * (xi[0] * je[0] + xi[1] * je[1]);
            let got = resolvent_matrix_2d(c(omega), &xi, &m).mul_vec(&j);
            (got, charge_column_2d(c(omega), &xi, &m, rho).to_vec())
        }
        SamplePoint::Spatial { omega, xi, material: m } => {
            let mut eps = [m.eps_perp; 3];
            eps[m.axis.index()] = m.eps_axis;
            let mut j = [Complex::zero(); 6];
            let (mut de, mut dm) = (0.0, 0.0);
            for k in 0..3 {
                j[k] = Complex::from(eps[k] * xi[k]);
                j[k + 3] = Complex::from(xi[k]);
                de += xi[k] * eps[k] * xi[k];
                dm += xi[k] * xi[k];
            }
            let got = resolvent_matrix_3d_with(c(omega), &xi, &m, None).mul_vec(&j);
            (got, charge_column_3d(c(omega), &xi, &m, i * de, i * dm).to_vec())
        }
    };
    let scale = want.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let (mut worst, mut row) = (0.0, 0);
    for (k, (g, w)) in got.iter().zip(&want).enumerate() {
        let v = (g - w).norm() / scale;
        if !(v <= worst) {
            worst = v;
            row = k;
        }
    }
    Some((worst, row, 0))
}

/// Runs every suite in both dimensions.
pub fn run_suites(config: &VerifyConfig) -> VerifyReport {
    let t = config.tolerances;
    let planar = draw(2, config.samples, config.seed, 2, false);
    let spatial = draw(3, config.samples, config.seed, 3, true);
    let spatial_generic = draw(3, config.samples, config.seed, 4, false);
    let mutation = config.mutation;
    let suites = vec![
        run_suite("diagonalization", 2, &planar, t.diagonalization, diagonalization_defect),
        run_suite("diagonalization", 3, &spatial_generic, t.diagonalization, diagonalization_defect),
        run_suite("det_m", 2, &planar, t.det_2d, planar_det_defect),
        run_suite("det_m_over_alpha4", 3, &spatial_generic, t.det_3d_ratio, spatial_det_defect),
        run_suite("inverse", 2, &planar, t.inverse, |p| inverse_defect(p, None)),
        run_suite("inverse", 3, &spatial, t.inverse, |p| inverse_defect(p, mutation)),
        run_suite("charge_kernel", 2, &planar, t.charge, charge_defect),
        run_suite("charge_kernel", 3, &spatial, t.charge, charge_defect),
    ];
    let passed = suites.iter().all(|s| s.passed);
    VerifyReport { seed: config.seed, samples: config.samples, tolerances: t, mutation, suites, passed }
}

/// Inverse-oracle suite alone in 3D, used for mutation detection.
pub fn inverse_suite_3d(samples: usize, seed: u64, tolerance: f64, mutation: Option<EntryMutation>) -> SuiteReport {
    let spatial = draw(3, samples, seed, 3, true);
    run_suite("inverse", 3, &spatial, tolerance, |p| inverse_defect(p, mutation))
}

/// Entries of the 3D transverse block that vanish identically (the axial
/// electric and magnetic components do not couple); a sign flip there is a no-op.
pub const STRUCTURAL_ZEROS: [(usize, usize); 2] = [(0, 3), (3, 0)];

/// `count` distinct random nonzero entries of the 6x6 transverse block.
pub fn random_mutations(count: usize, seed: u64) -> Vec<EntryMutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<EntryMutation> = Vec::with_capacity(count);
    while out.len() < count.min(36 - STRUCTURAL_ZEROS.len()) {
        let m = EntryMutation { row: rng.gen_range(0..6), col: rng.gen_range(0..6) };
        if !out.contains(&m) && !STRUCTURAL_ZEROS.contains(&(m.row, m.col)) {
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let cfg = VerifyConfig { samples: 2000, ..VerifyConfig::default() };
        let a = run_suites(&cfg);
        let b = run_suites(&cfg);
        assert_eq!(a, b);
        for s in &a.suites {
            assert!(s.passed, "{} d={} defect {:e}", s.name, s.dim, s.max_defect);
        }
    }

    #[test]
    fn mutation_yields_witness() {
        let m = EntryMutation { row: 1, col: 2 };
        let r = inverse_suite_3d(500, 1, 1e-10, Some(m));
        assert!(!r.passed);
        assert!(r.witness.is_some());
    }
}
