//! Maxwell symbols, their eigen-decompositions and the anisotropic norms.
//!
//! The 2D system acts on `(D1, D2, B)`; the 3D system on `(D, B)`. In 3D the
//! permittivity is diagonal with one distinguished axis. Internally every 3D
//! computation runs in canonical coordinates: the distinguished axis is
//! rotated to the first slot by a cyclic relabeling and `mu` is absorbed
//! into the permittivity.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::SymbolMatrix;
use crate::scalar::{imag_unit, Real};
use crate::spectral::{Field, Grid};

/// Relative distance to the distinguished axis below which the closed-form
/// 3D diagonalization is refused.
pub const DEGENERACY_ETA: f64 = 1e-8;

/// Relative tolerance for deciding that two principal permittivities agree.
pub const PERMITTIVITY_MATCH_RTOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("permittivity is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("permeability must be positive and finite, got {0}")]
    NonPositivePermeability(f64),
    #[error("wavevector is zero")]
    ZeroWavevector,
    #[error("direction lies within {eta:e} of the distinguished axis")]
    DegenerateDirection { eta: f64 },
    #[error("principal permittivities are pairwise distinct")]
    NotPartiallyAnisotropic,
    #[error("axis must be 1, 2 or 3, got {0}")]
    InvalidAxis(usize),
    #[error("expected a {expected}D wavevector, got {got} components")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Planar material: symmetric positive definite 2x2 permittivity and scalar permeability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material2<T> {
    pub eps11: T,
    pub eps12: T,
    pub eps22: T,
    pub mu: T,
}

impl<T: Real> Material2<T> {
    pub fn new(eps11: T, eps12: T, eps22: T, mu: T) -> Result<Self, SymbolError> {
        let all_finite = [eps11, eps12, eps22].iter().all(|v| v.is_finite());
        if !all_finite || eps11 <= T::zero() || eps11 * eps22 - eps12 * eps12 <= T::zero() {
            return Err(SymbolError::NotPositiveDefinite);
        }
        if !(mu > T::zero() && mu.is_finite()) {
            return Err(SymbolError::NonPositivePermeability(mu.as_f64()));
        }
        Ok(Self { eps11, eps12, eps22, mu })
    }

    pub fn isotropic(eps: T, mu: T) -> Result<Self, SymbolError> {
        Self::new(eps, T::zero(), eps, mu)
    }

    pub fn det_eps(&self) -> T {
        self.eps11 * self.eps22 - self.eps12 * self.eps12
    }

    /// Entries `(e11, e12, e22)` of the inverse permittivity.
    pub fn inverse_permittivity(&self) -> [T; 3] {
        let det = self.det_eps();
        [self.eps22 / det, -self.eps12 / det, self.eps11 / det]
    }

    /// Metric `G` with `|xi|_{eps'}^2 = xi^T G xi`.
    pub fn metric(&self) -> [[T; 2]; 2] {
        let s = T::one() / (self.mu * self.det_eps());
        [[s * self.eps11, s * self.eps12], [s * self.eps12, s * self.eps22]]
    }
}

/// Coordinate axis, 1-based in the public interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub fn from_one_based(k: usize) -> Result<Self, SymbolError> {
        match k {
            1 => Ok(Axis::X1),
            2 => Ok(Axis::X2),
            3 => Ok(Axis::X3),
            _ => Err(SymbolError::InvalidAxis(k)),
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    pub fn one_based(self) -> usize {
        self.index() + 1
    }
}

/// Partially anisotropic 3D material: `eps = eps_axis` along `axis`,
/// `eps_perp` on the orthogonal plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material3<T> {
    pub eps_axis: T,
    pub eps_perp: T,
    pub axis: Axis,
    pub mu: T,
}

impl<T: Real> Material3<T> {
    pub fn new(eps_axis: T, eps_perp: T, axis: Axis, mu: T) -> Result<Self, SymbolError> {
        let ok = |v: T| v > T::zero() && v.is_finite();
        if !ok(eps_axis) || !ok(eps_perp) {
            return Err(SymbolError::NotPositiveDefinite);
        }
        if !ok(mu) {
            return Err(SymbolError::NonPositivePermeability(mu.as_f64()));
        }
        Ok(Self { eps_axis, eps_perp, axis, mu })
    }

    pub fn isotropic(eps: T, mu: T) -> Result<Self, SymbolError> {
        Self::new(eps, eps, Axis::X1, mu)
    }

    /// Builds the material from principal permittivities; at least two must agree.
    pub fn from_principal(eps: [T; 3], mu: T) -> Result<Self, SymbolError> {
        let close = |x: T, y: T| (x - y).abs() <= T::lit(PERMITTIVITY_MATCH_RTOL) * x.abs().max(y.abs());
        let axis = if close(eps[1], eps[2]) {
            Axis::X1
        } else if close(eps[0], eps[2]) {
            Axis::X2
        } else if close(eps[0], eps[1]) {
            Axis::X3
        } else {
            return Err(SymbolError::NotPartiallyAnisotropic);
        };
        let perp = eps[(axis.index() + 1) % 3];
        Self::new(eps[axis.index()], perp, axis, mu)
    }

    /// Canonical coefficient along the axis, `1/(mu eps_axis)`.
    #[inline]
    pub fn a(&self) -> T {
        T::one() / (self.mu * self.eps_axis)
    }

    /// Canonical coefficient across the axis, `1/(mu eps_perp)`.
    #[inline]
    pub fn b(&self) -> T {
        T::one() / (self.mu * self.eps_perp)
    }

    pub fn is_canonical(&self) -> bool {
        self.axis == Axis::X1 && self.mu == T::one()
    }

    /// Equivalent material with the axis first and unit permeability.
    pub fn canonical(&self) -> Self {
        Self {
            eps_axis: self.mu * self.eps_axis,
            eps_perp: self.mu * self.eps_perp,
            axis: Axis::X1,
            mu: T::one(),
        }
    }

    /// Principal values of the inverse permittivity in the original frame.
    pub fn inverse_permittivity(&self) -> [T; 3] {
        let mut e = [T::one() / self.eps_perp; 3];
        e[self.axis.index()] = T::one() / self.eps_axis;
        e
    }

    /// Cyclic relabeling that puts the distinguished axis first.
    #[inline]
    pub fn to_canonical_coords(&self, v: [T; 3]) -> [T; 3] {
        let j = self.axis.index();
        [v[j], v[(j + 1) % 3], v[(j + 2) % 3]]
    }

    #[inline]
    pub fn from_canonical_coords(&self, v: [T; 3]) -> [T; 3] {
        let j = self.axis.index();
        let mut out = [T::zero(); 3];
        for (k, vk) in v.iter().enumerate() {
            out[(j + k) % 3] = *vk;
        }
        out
    }
}

/// A material of either dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Material<T> {
    Planar(Material2<T>),
    Uniaxial(Material3<T>),
}

impl<T: Real> Material<T> {
    pub fn dim(&self) -> usize {
        match self {
            Material::Planar(_) => 2,
            Material::Uniaxial(_) => 3,
        }
    }

    /// Number of field components of the system, 3 in 2D and 6 in 3D.
    pub fn components(&self) -> usize {
        match self {
            Material::Planar(_) => 3,
            Material::Uniaxial(_) => 6,
        }
    }

    pub fn mu(&self) -> T {
        match self {
            Material::Planar(m) => m.mu,
            Material::Uniaxial(m) => m.mu,
        }
    }
}

impl<T> From<Material2<T>> for Material<T> {
    fn from(m: Material2<T>) -> Self {
        Material::Planar(m)
    }
}

impl<T> From<Material3<T>> for Material<T> {
    fn from(m: Material3<T>) -> Self {
        Material::Uniaxial(m)
    }
}

/// Quadratic norm `|xi|_G = sqrt(xi^T G xi)` with a symmetric positive definite metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormFlavor<T> {
    dim: usize,
    g: [[T; 3]; 3],
}

impl<T: Real> NormFlavor<T> {
    pub fn euclidean(dim: usize) -> Self {
        Self::scaled_euclidean(dim, T::one())
    }

    /// `s |xi|`.
    pub fn scaled_euclidean(dim: usize, s: T) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        let mut g = [[T::zero(); 3]; 3];
        for (i, row) in g.iter_mut().enumerate().take(dim) {
            row[i] = s * s;
        }
        Self { dim, g }
    }

    /// `|xi|_{eps'}` of a planar material.
    pub fn eps_prime(mat: &Material2<T>) -> Self {
        let m = mat.metric();
        let mut g = [[T::zero(); 3]; 3];
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] = m[i][j];
            }
        }
        Self { dim: 2, g }
    }

    /// `|xi|_eps` of a uniaxial material, in its original frame.
    pub fn eps(mat: &Material3<T>) -> Self {
        let mut g = [[T::zero(); 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = if i == mat.axis.index() { mat.b() } else { mat.a() };
        }
        Self { dim: 3, g }
    }

    /// Custom metric; the caller guarantees symmetry and positivity.
    pub fn from_metric(dim: usize, metric: [[T; 3]; 3]) -> Self {
        Self { dim, g: metric }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> [[T; 3]; 3] {
        self.g
    }

    #[inline]
    pub fn norm_sqr(&self, xi: &[T]) -> T {
        let mut s = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                s = s + xi[i] * self.g[i][j] * xi[j];
            }
        }
        s
    }

    #[inline]
    pub fn norm(&self, xi: &[T]) -> T {
        self.norm_sqr(xi).sqrt()
    }

    pub fn det(&self) -> T {
        let g = &self.g;
        if self.dim == 2 {
            g[0][0] * g[1][1] - g[0][1] * g[1][0]
        } else {
            g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
        }
    }

    /// Lower Cholesky factor `L` with `G = L L^T`.
    pub fn cholesky(&self) -> [[T; 3]; 3] {
        let n = self.dim;
        let mut l = [[T::zero(); 3]; 3];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.g[i][j];
                for k in 0..j {
                    s = s - l[i][k] * l[j][k];
                }
                l[i][j] = if i == j { s.sqrt() } else { s / l[j][j] };
            }
        }
        l
    }

    /// Maps a point `zeta` of the Euclidean unit ball frame to `xi = L^{-T} zeta`,
    /// so that `|xi|_G = |zeta|`.
    pub fn from_unit_frame(&self, zeta: &[T]) -> [T; 3] {
        let l = self.cholesky();
        let n = self.dim;
        let mut xi = [T::zero(); 3];
        for i in (0..n).rev() {
            let mut s = zeta[i];
            for k in (i + 1)..n {
                s = s - l[k][i] * xi[k];
            }
            xi[i] = s / l[i][i];
        }
        xi
    }
}

/// `|xi|_{eps'} = <xi, mu^{-1} det(eps)^{-1} eps xi>^{1/2}`.
pub fn norm_eps_prime<T: Real>(xi: &[T; 2], mat: &Material2<T>) -> T {
    let [e11, e12, e22] = mat.inverse_permittivity();
    ((e22 * xi[0] * xi[0] - T::lit(2.0) * e12 * xi[0] * xi[1] + e11 * xi[1] * xi[1]) / mat.mu).sqrt()
}

/// `|xi|_eps = (b xi_1^2 + a (xi_2^2 + xi_3^2))^{1/2}` with coordinates taken
/// relative to the distinguished axis.
pub fn norm_eps<T: Real>(xi: &[T; 3], mat: &Material3<T>) -> T {
    let c = mat.to_canonical_coords(*xi);
    (mat.b() * c[0] * c[0] + mat.a() * (c[1] * c[1] + c[2] * c[2])).sqrt()
}

/// Planar symbol acting on `(D1, D2, B)`.
pub fn symbol_p_2d<T: Real>(omega: Complex<T>, xi: &[T; 2], mat: &Material2<T>) -> SymbolMatrix<T> {
    let [e11, e12, e22] = mat.inverse_permittivity();
    let i = imag_unit::<T>();
    let re = |x: T| Complex::new(x, T::zero());
    let (x1, x2) = (xi[0], xi[1]);
    let z = Complex::zero();
    SymbolMatrix::from_rows(&[
        &[i * omega, z, i * re(-x2 / mat.mu)],
        &[z, i * omega, i * re(x1 / mat.mu)],
        &[i * re(x1 * e12 - x2 * e11), i * re(x1 * e22 - x2 * e12), i * omega],
    ])
}

/// The cross-product matrix `B(xi)` with `B(xi) v = v x xi`.
pub fn cross_matrix<T: Real>(xi: &[T; 3]) -> [[T; 3]; 3] {
    let z = T::zero();
    [[z, xi[2], -xi[1]], [-xi[2], z, xi[0]], [xi[1], -xi[0], z]]
}

/// 3D symbol acting on `(D, B)`.
pub fn symbol_p_3d<T: Real>(omega: Complex<T>, xi: &[T; 3], mat: &Material3<T>) -> SymbolMatrix<T> {
    let b = cross_matrix(xi);
    let einv = mat.inverse_permittivity();
    let i = imag_unit::<T>();
    let mut p = SymbolMatrix::zeros(6);
    for r in 0..3 {
        p[(r, r)] = i * omega;
        p[(r + 3, r + 3)] = i * omega;
        for c in 0..3 {
            p[(r, c + 3)] = i * (b[r][c] / mat.mu);
            p[(r + 3, c)] = -i * (b[r][c] * einv[c]);
        }
    }
    p
}

fn check_dim<T>(xi: &[T], expected: usize) -> Result<(), SymbolError> {
    if xi.len() == expected {
        Ok(())
    } else {
        Err(SymbolError::DimensionMismatch { expected, got: xi.len() })
    }
}

/// Symbol of either dimension; `xi` must match the material's dimension.
pub fn symbol_p<T: Real>(omega: Complex<T>, xi: &[T], mat: &Material<T>) -> Result<SymbolMatrix<T>, SymbolError> {
    match mat {
        Material::Planar(m) => {
            check_dim(xi, 2)?;
            Ok(symbol_p_2d(omega, &[xi[0], xi[1]], m))
        }
        Material::Uniaxial(m) => {
            check_dim(xi, 3)?;
            Ok(symbol_p_3d(omega, &[xi[0], xi[1], xi[2]], m))
        }
    }
}

/// `p = m d m^{-1}` with `d` diagonal.
#[derive(Clone, Copy, Debug)]
pub struct EigenDecomposition<T: Real> {
    pub m: SymbolMatrix<T>,
    pub d: SymbolMatrix<T>,
    pub m_inv: SymbolMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    /// Reconstructs `m d m^{-1}`.
    pub fn reconstruct(&self) -> SymbolMatrix<T> {
        self.m * self.d * self.m_inv
    }
}

/// Planar diagonalization. The first column of `m` is normalized so that
/// `det m = -1` exactly.
pub fn eigen_decomposition_2d<T: Real>(
    omega: Complex<T>,
    xi: &[T; 2],
    mat: &Material2<T>,
) -> Result<EigenDecomposition<T>, SymbolError> {
    let r = norm_eps_prime(xi, mat);
    if r == T::zero() {
        return Err(SymbolError::ZeroWavevector);
    }
    let [e11, e12, e22] = mat.inverse_permittivity();
    let (p1, p2) = (xi[0] / r, xi[1] / r);
    let mu = mat.mu;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let c = |x: T| Complex::new(x, T::zero());
    let m = SymbolMatrix::from_rows(&[
        &[c(half * (e22 * p1 - e12 * p2)), c(-p2 / mu), c(p2 / mu)],
        &[c(half * (e11 * p2 - e12 * p1)), c(p1 / mu), c(-p1 / mu)],
        &[c(T::zero()), c(-T::one()), c(-T::one())],
    ]);
    let m_inv = SymbolMatrix::from_rows(&[
        &[c(two * p1 / mu), c(two * p2 / mu), c(T::zero())],
        &[c(half * (p1 * e12 - p2 * e11)), c(half * (e22 * p1 - e12 * p2)), c(-half)],
        &[c(half * (p2 * e11 - p1 * e12)), c(half * (p2 * e12 - p1 * e22)), c(-half)],
    ]);
    let i = imag_unit::<T>();
    let d = SymbolMatrix::diagonal(&[i * omega, i * (omega - r), i * (omega + r)]);
    Ok(EigenDecomposition { m, d, m_inv })
}

/// Shared scalar data of a 3D wavevector in canonical coordinates.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame3<T> {
    /// Canonical coordinates of xi.
    pub xi: [T; 3],
    /// Euclidean norm.
    pub n: T,
    /// `|xi|_eps`.
    pub ne: T,
    /// `xi / |xi|`.
    pub unit: [T; 3],
    /// `xi / |xi|_eps`.
    pub unit_eps: [T; 3],
    pub a: T,
    pub b: T,
}

impl<T: Real> Frame3<T> {
    pub fn new(xi: &[T; 3], mat: &Material3<T>) -> Result<Self, SymbolError> {
        let c = mat.to_canonical_coords(*xi);
        let (a, b) = (mat.a(), mat.b());
        let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if n == T::zero() {
            return Err(SymbolError::ZeroWavevector);
        }
        let ne = (b * c[0] * c[0] + a * (c[1] * c[1] + c[2] * c[2])).sqrt();
        Ok(Self {
            xi: c,
            n,
            ne,
            unit: [c[0] / n, c[1] / n, c[2] / n],
            unit_eps: [c[0] / ne, c[1] / ne, c[2] / ne],
            a,
            b,
        })
    }

    /// `xi_2^2 + xi_3^2` relative to `|xi|^2`.
    #[inline]
    pub fn transverse_fraction(&self) -> T {
        self.unit[1] * self.unit[1] + self.unit[2] * self.unit[2]
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.transverse_fraction() < T::lit(DEGENERACY_ETA)
    }
}

/// Lifts a canonical-frame 6x6 matrix `X` to the original frame as `S X S^{-1}`-type
/// products: returns `left * X * right` with `left = diag(I, mu) Q^T` and `right = Q diag(I, 1/mu)`.
pub(crate) fn lift_from_canonical<T: Real>(
    x: &SymbolMatrix<T>,
    mat: &Material3<T>,
    left: bool,
    right: bool,
) -> SymbolMatrix<T> {
    let j = mat.axis.index();
    let mu = mat.mu;
    // Original-frame index of canonical slot k within a triple.
    let orig = |k: usize| (j + k) % 3;
    let mut out = SymbolMatrix::zeros(6);
    for r in 0..6 {
        for c in 0..6 {
            let (ro, co) = (
                if left { (r / 3) * 3 + orig(r % 3) } else { r },
                if right { (c / 3) * 3 + orig(c % 3) } else { c },
            );
            let mut v = x[(r, c)];
            if left && r >= 3 {
                v = v * mu;
            }
            if right && c >= 3 {
                v = v / mu;
            }
            out[(ro, co)] = v;
        }
    }
    out
}

/// Bounded eigenvector matrix and its closed-form inverse in canonical coordinates.
fn eigvec_canonical<T: Real>(f: &Frame3<T>) -> (SymbolMatrix<T>, SymbolMatrix<T>) {
    let (a, b) = (f.a, f.b);
    let [p1, p2, p3] = f.unit;
    let [t1, t2, t3] = f.unit_eps;
    let s = p2 * p2 + p3 * p3;
    let st = t2 * t2 + t3 * t3;
    let dl = f.n / f.ne;
    let sd = dl.sqrt();
    let sb = b.sqrt();
    let half = T::lit(0.5);
    let z = T::zero();
    let rs = (dl * s).sqrt();
    let rst = (dl * st).sqrt();
    let sst = st.sqrt();
    let ss = s.sqrt();
    let rows_m = [
        [z, t1 / a, z, z, rst, -rst],
        [z, t2 / b, -p3 / (sb * rs), p3 / (sb * rs), -sd * t1 * t2 / sst, sd * t1 * t2 / sst],
        [z, t3 / b, p2 / (sb * rs), -p2 / (sb * rs), -sd * t1 * t3 / sst, sd * t1 * t3 / sst],
        [p1, z, -ss / sd, -ss / sd, z, z],
        [p2, z, p1 * p2 / rs, p1 * p2 / rs, -sd * t3 / sst, -sd * t3 / sst],
        [p3, z, p1 * p3 / rs, p1 * p3 / rs, sd * t2 / sst, sd * t2 / sst],
    ];
    let ab = a * b;
    let rows_inv = [
        [z, z, z, p1, p2, p3],
        [ab * t1, ab * t2, ab * t3, z, z, z],
        [
            z,
            -half * sb * sd * t3 / sst,
            half * sb * sd * t2 / sst,
            -half * sst / sd,
            half * p1 * p2 * sd / ss,
            half * p1 * p3 * sd / ss,
        ],
        [
            z,
            half * sb * sd * t3 / sst,
            -half * sb * sd * t2 / sst,
            -half * sst / sd,
            half * p1 * p2 * sd / ss,
            half * p1 * p3 * sd / ss,
        ],
        [
            half * a * sst / sd,
            -half * b * t1 * t2 / rst,
            -half * b * t1 * t3 / rst,
            z,
            -half * p3 / rs,
            half * p2 / rs,
        ],
        [
            -half * a * sst / sd,
            half * b * t1 * t2 / rst,
            half * b * t1 * t3 / rst,
            z,
            -half * p3 / rs,
            half * p2 / rs,
        ],
    ];
    let to_c = |rows: &[[T; 6]; 6]| SymbolMatrix::from_fn(6, |i, j| Complex::new(rows[i][j], T::zero()));
    (to_c(&rows_m), to_c(&rows_inv))
}

/// Eigenvalues of the canonical 3D symbol, in the column order of `m`.
pub(crate) fn eigenvalues_3d<T: Real>(omega: Complex<T>, f: &Frame3<T>) -> [Complex<T>; 6] {
    let i = imag_unit::<T>();
    let rb = f.b.sqrt() * f.n;
    [
        i * omega,
        i * omega,
        i * (omega - rb),
        i * (omega + rb),
        i * (omega - f.ne),
        i * (omega + f.ne),
    ]
}

/// 3D diagonalization with the renormalized (bounded) eigenvector matrix.
/// Fails within `DEGENERACY_ETA` of the distinguished axis.
pub fn eigen_decomposition_3d<T: Real>(
    omega: Complex<T>,
    xi: &[T; 3],
    mat: &Material3<T>,
) -> Result<EigenDecomposition<T>, SymbolError> {
    let f = Frame3::new(xi, mat)?;
    if f.is_degenerate() {
        return Err(SymbolError::DegenerateDirection { eta: DEGENERACY_ETA });
    }
    let (m, m_inv) = eigvec_canonical(&f);
    let d = SymbolMatrix::diagonal(&eigenvalues_3d(omega, &f));
    if mat.is_canonical() {
        return Ok(EigenDecomposition { m, d, m_inv });
    }
    Ok(EigenDecomposition {
        m: lift_from_canonical(&m, mat, true, false),
        d,
        m_inv: lift_from_canonical(&m_inv, mat, false, true),
    })
}

pub fn eigen_decomposition<T: Real>(
    omega: Complex<T>,
    xi: &[T],
    mat: &Material<T>,
) -> Result<EigenDecomposition<T>, SymbolError> {
    match mat {
        Material::Planar(m) => {
            check_dim(xi, 2)?;
            eigen_decomposition_2d(omega, &[xi[0], xi[1]], m)
        }
        Material::Uniaxial(m) => {
            check_dim(xi, 3)?;
            eigen_decomposition_3d(omega, &[xi[0], xi[1], xi[2]], m)
        }
    }
}

/// Determinant data of the 3D eigenvector matrices (canonical frame).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DetDiagnostics<T> {
    /// `(xi_2^2 + xi_3^2)^{1/2} / (|xi| |xi|_eps)^{1/2}`.
    pub alpha: T,
    /// `|xi| / |xi|_eps`.
    pub delta: T,
    /// Determinant of the unnormalized eigenvector matrix.
    pub det_m: Complex<T>,
    /// Determinant of the renormalized eigenvector matrix.
    pub det_m_tilde: Complex<T>,
}

/// Unnormalized eigenvectors `v1..v6` of the canonical 3D symbol, as columns.
fn raw_eigvec_canonical<T: Real>(f: &Frame3<T>) -> SymbolMatrix<T> {
    let (a, b) = (f.a, f.b);
    let [p1, p2, p3] = f.unit;
    let [t1, t2, t3] = f.unit_eps;
    let s = p2 * p2 + p3 * p3;
    let st = t2 * t2 + t3 * t3;
    let sb = b.sqrt();
    let z = T::zero();
    let cols = [
        [z, z, z, p1, p2, p3],
        [t1 / a, t2 / b, t3 / b, z, z, z],
        [z, -p3 / sb, p2 / sb, -s, p1 * p2, p1 * p3],
        [z, p3 / sb, -p2 / sb, -s, p1 * p2, p1 * p3],
        [st, -t1 * t2, -t1 * t3, z, -t3, t2],
        [-st, t1 * t2, t1 * t3, z, -t3, t2],
    ];
    SymbolMatrix::from_fn(6, |i, j| Complex::new(cols[j][i], T::zero()))
}

pub fn det_diagnostics<T: Real>(xi: &[T; 3], mat: &Material3<T>) -> Result<DetDiagnostics<T>, SymbolError> {
    let f = Frame3::new(xi, mat)?;
    if f.is_degenerate() {
        return Err(SymbolError::DegenerateDirection { eta: DEGENERACY_ETA });
    }
    let alpha = ((f.xi[1] * f.xi[1] + f.xi[2] * f.xi[2]) / (f.n * f.ne)).sqrt();
    let (m_tilde, _) = eigvec_canonical(&f);
    Ok(DetDiagnostics {
        alpha,
        delta: f.n / f.ne,
        det_m: raw_eigvec_canonical(&f).det(),
        det_m_tilde: m_tilde.det(),
    })
}

/// Closed form of `det m / alpha^4` for canonical coefficients `a`, `b`.
pub fn det_ratio_closed_form<T: Real>(a: T, b: T) -> T {
    T::lit(4.0) / (a * b * b.sqrt())
}

/// Records how a 3D problem was mapped to canonical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformRecord<T> {
    pub original: Material3<T>,
}

impl<T: Real> TransformRecord<T> {
    /// Maps a canonical-frame solution `(D, B')` back to `(D, B)` in the original frame.
    pub fn restore(&self, solution: &Field<T>) -> Field<T> {
        let shift = (3 - self.original.axis.index()) % 3;
        let mut out = solution.permute_cyclic(shift);
        out.scale_components(3..6, Complex::new(self.original.mu, T::zero()));
        out
    }
}

/// Rotates the distinguished axis to the first coordinate and absorbs `mu`.
///
/// Returns the canonical material, the currents `(J_e, J_m / mu)` on the
/// relabeled grid, and the record needed to map solutions back.
pub fn canonicalize<T: Real>(
    mat: &Material3<T>,
    currents: &Field<T>,
) -> Result<(Material3<T>, Field<T>, TransformRecord<T>), SymbolError> {
    if currents.grid().dim() != 3 {
        return Err(SymbolError::DimensionMismatch { expected: 3, got: currents.grid().dim() });
    }
    let mut moved = currents.permute_cyclic(mat.axis.index());
    moved.scale_components(3..6, Complex::new(T::one() / mat.mu, T::zero()));
    Ok((mat.canonical(), moved, TransformRecord { original: *mat }))
}

/// Grid after the same relabeling that `canonicalize` applies.
pub fn canonical_grid<T: Real>(grid: &Grid<T>, mat: &Material3<T>) -> Grid<T> {
    grid.permute_cyclic(mat.axis.index())
}

/// True when `p(w, 0) = i w I` holds exactly.
pub fn is_scalar_at_origin<T: Real>(omega: Complex<T>, mat: &Material<T>) -> bool {
    let zero = vec![T::zero(); mat.dim()];
    let p = symbol_p(omega, &zero, mat).expect("dimension matches");
    let id = SymbolMatrix::identity(mat.components()).scale(imag_unit::<T>() * omega);
    (p - id).max_abs() == T::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn mat2() -> Material2<f64> {
        Material2::new(2.0, 0.3, 0.7, 1.3).unwrap()
    }

    #[test]
    fn eps_prime_norm_examples() {
        let m = Material2::<f64>::new(1.0, 0.0, 4.0, 1.0).unwrap();
        assert!((norm_eps_prime(&[2.0, 0.0], &m) - 1.0).abs() < 1e-15);
        let iso = Material2::<f64>::isotropic(1.0, 1.0).unwrap();
        assert!((norm_eps_prime(&[3.0, 4.0], &iso) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn eps_norm_examples() {
        let m = Material3::<f64>::new(0.25, 1.0, Axis::X1, 1.0).unwrap();
        assert!((norm_eps(&[0.0, 3.0, 4.0], &m) - 10.0).abs() < 1e-14);
        let m = Material3::<f64>::new(1.0 / 9.0, 0.25, Axis::X1, 1.0).unwrap();
        assert!((norm_eps(&[2.0, 0.0, 0.0], &m) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_coefficients_from_principal_values() {
        let m = Material3::<f64>::from_principal([2.0, 3.0, 3.0], 1.0).unwrap();
        assert_eq!(m.axis, Axis::X1);
        assert!((m.a() - 0.5).abs() < 1e-15 && (m.b() - 1.0 / 3.0).abs() < 1e-15);
        let m = Material3::from_principal([3.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!(m.axis, Axis::X2);
        assert_eq!(
            Material3::from_principal([1.0, 2.0, 3.0], 1.0),
            Err(SymbolError::NotPartiallyAnisotropic)
        );
    }

    #[test]
    fn invalid_materials_rejected() {
        assert_eq!(Material2::new(1.0, 2.0, 1.0, 1.0), Err(SymbolError::NotPositiveDefinite));
        assert!(matches!(Material2::new(1.0, 0.0, 1.0, 0.0), Err(SymbolError::NonPositivePermeability(_))));
        assert!(Material3::new(-1.0, 1.0, Axis::X1, 1.0).is_err());
    }

    #[test]
    fn symbol_at_origin_is_scalar() {
        let w = cplx(0.7, 0.2);
        for mat in [Material::from(mat2()), Material::from(Material3::new(0.5, 2.0, Axis::X2, 1.4).unwrap())] {
            assert!(is_scalar_at_origin(w, &mat));
        }
    }

    #[test]
    fn planar_first_column_along_xi1() {
        let iso = Material2::<f64>::isotropic(1.0, 1.0).unwrap();
        let e = eigen_decomposition_2d(cplx(1.0, 0.5), &[1.0, 0.0], &iso).unwrap();
        assert!((e.m[(0, 0)] - cplx(0.5, 0.0)).norm() < 1e-15);
        assert!(e.m[(1, 0)].norm() < 1e-15 && e.m[(2, 0)].norm() < 1e-15);
        assert!((e.m.det() - cplx(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn planar_reconstruction() {
        let w = cplx(0.4, -0.9);
        let xi = [0.8, -1.7];
        let e = eigen_decomposition_2d(w, &xi, &mat2()).unwrap();
        let p = symbol_p_2d(w, &xi, &mat2());
        assert!((e.reconstruct() - p).max_abs() < 1e-14 * p.max_abs());
        assert!((e.m * e.m_inv - SymbolMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn spatial_reconstruction_canonical_and_rotated() {
        let w = cplx(1.1, 0.3);
        for mat in [
            Material3::new(0.25, 1.0, Axis::X1, 1.0).unwrap(),
            Material3::new(0.7, 1.9, Axis::X3, 2.5).unwrap(),
        ] {
            let xi = [0.3, -1.2, 0.8];
            let e = eigen_decomposition_3d(w, &xi, &mat).unwrap();
            let p = symbol_p_3d(w, &xi, &mat);
            assert!((e.reconstruct() - p).max_abs() < 1e-13 * p.max_abs());
            assert!((e.m * e.m_inv - SymbolMatrix::identity(6)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn axis_direction_refused() {
        let mat = Material3::new(0.25, 1.0, Axis::X1, 1.0).unwrap();
        let r = eigen_decomposition_3d(cplx(1.0, 0.1), &[1.0, 1e-5, 0.0], &mat);
        assert!(matches!(r, Err(SymbolError::DegenerateDirection { .. })));
    }

    #[test]
    fn det_ratio_matches_closed_form() {
        let mat = Material3::<f64>::new(0.5, 2.0, Axis::X1, 1.0).unwrap();
        let dd = det_diagnostics(&[0.4, 1.1, -0.3], &mat).unwrap();
        let ratio = dd.det_m.re / dd.alpha.powi(4);
        let expect = det_ratio_closed_form(mat.a(), mat.b());
        assert!((ratio - expect).abs() < 1e-12 * expect);
        assert!((dd.det_m_tilde.re - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn norm_flavor_unit_frame_roundtrip() {
        let fl = NormFlavor::eps_prime(&mat2());
        let xi = fl.from_unit_frame(&[0.6, 0.8]);
        assert!((fl.norm(&xi[..2]) - 1.0).abs() < 1e-14);
    }
}
