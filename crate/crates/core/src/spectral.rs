//! Periodic-grid Fourier engine.
//!
//! A `Field` holds complex samples on a periodic box, component-major and
//! row-major within each component (last axis fastest). Multipliers are
//! applied exactly on the discrete frequency lattice `2 pi k / length`,
//! `k in [-n/2, n/2)`.

use std::ops::Range;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fft::fft_nd;
use crate::linalg::SymbolMatrix;
use crate::multiplier::{resolvent_matrix_2d, resolvent_matrix_3d_with, EntryMutation};
use crate::scalar::{imag_unit, Real};
use crate::symbol::{symbol_p, Material, NormFlavor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("points per axis must be a power of two >= 4, got {0}")]
    BadResolution(usize),
    #[error("period lengths must be positive and finite")]
    BadLength,
    #[error("field has {got} samples, expected {expected}")]
    BadDataLength { expected: usize, got: usize },
    #[error("symbol has a non-finite entry at frequency index {index}")]
    NonFiniteSymbol { index: usize },
    #[error("frequency {0} is real; use the limiting absorption solver")]
    RealFrequency(String),
    #[error("field has {got} components, expected {expected}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error("grid dimension {grid} does not match material dimension {material}")]
    DimensionMismatch { grid: usize, material: usize },
    #[error("negative power needs a mean-zero field, mean is {0:e}")]
    MeanNotZero(f64),
}

/// Periodic box discretization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    n: Vec<usize>,
    length: Vec<T>,
}

impl<T: Real> Grid<T> {
    pub fn new(n: &[usize], length: &[T]) -> Result<Self, SpectralError> {
        let dim = n.len();
        if !(dim == 2 || dim == 3) || length.len() != dim {
            return Err(SpectralError::BadDimension(dim));
        }
        if let Some(&bad) = n.iter().find(|&&k| k < 4 || !k.is_power_of_two()) {
            return Err(SpectralError::BadResolution(bad));
        }
        if length.iter().any(|l| !(*l > T::zero() && l.is_finite())) {
            return Err(SpectralError::BadLength);
        }
        Ok(Self { n: n.to_vec(), length: length.to_vec() })
    }

    /// Same resolution and period on every axis.
    pub fn cubic(dim: usize, n: usize, length: T) -> Result<Self, SpectralError> {
        Self::new(&vec![n; dim], &vec![length; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn lengths(&self) -> &[T] {
        &self.length
    }

    /// Number of grid points.
    #[inline]
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> T {
        self.length[axis] / T::from_usize_lossy(self.n[axis])
    }

    pub fn cell_volume(&self) -> T {
        (0..self.dim()).fold(T::one(), |v, a| v * self.spacing(a))
    }

    pub fn volume(&self) -> T {
        self.length.iter().fold(T::one(), |v, l| v * *l)
    }

    /// Signed integer frequency of storage index `idx` on `axis`.
    #[inline]
    pub fn signed_index(&self, axis: usize, idx: usize) -> isize {
        let n = self.n[axis];
        if idx < n / 2 {
            idx as isize
        } else {
            idx as isize - n as isize
        }
    }

    #[inline]
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rem = flat;
        for a in (0..self.dim()).rev() {
            out[a] = rem % self.n[a];
            rem /= self.n[a];
        }
        out
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.n).fold(0, |acc, (i, n)| acc * n + i)
    }

    /// Angular wavevector of storage index `flat`; unused trailing entries are zero.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [T; 3] {
        let idx = self.multi_index(flat);
        let mut xi = [T::zero(); 3];
        for a in 0..self.dim() {
            let k = T::from_isize(self.signed_index(a, idx[a])).expect("index fits");
            xi[a] = T::lit(2.0) * T::PI() * k / self.length[a];
        }
        xi
    }

    /// Integer frequency vector of storage index `flat`.
    pub fn integer_frequency(&self, flat: usize) -> [isize; 3] {
        let idx = self.multi_index(flat);
        let mut k = [0; 3];
        for a in 0..self.dim() {
            k[a] = self.signed_index(a, idx[a]);
        }
        k
    }

    /// Physical coordinates of grid point `flat`, with samples at `j * spacing`.
    #[inline]
    pub fn point(&self, flat: usize) -> [T; 3] {
        let idx = self.multi_index(flat);
        let mut x = [T::zero(); 3];
        for a in 0..self.dim() {
            x[a] = T::from_usize_lossy(idx[a]) * self.spacing(a);
        }
        x
    }

    /// Grid with axes relabeled so that new axis `k` is old axis `(shift + k) mod 3`.
    pub fn permute_cyclic(&self, shift: usize) -> Self {
        let d = self.dim();
        Self {
            n: (0..d).map(|k| self.n[(shift + k) % d]).collect(),
            length: (0..d).map(|k| self.length[(shift + k) % d]).collect(),
        }
    }

    /// Same grid with every period divided by `factor`.
    pub fn rescaled(&self, factor: T) -> Self {
        Self { n: self.n.clone(), length: self.length.iter().map(|l| *l / factor).collect() }
    }
}

/// Complex samples of an `ncomp`-component field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Real> {
    grid: Grid<T>,
    ncomp: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: &Grid<T>, ncomp: usize) -> Self {
        Self { grid: grid.clone(), ncomp, data: vec![Complex::zero(); ncomp * grid.len()] }
    }

    pub fn from_data(grid: &Grid<T>, ncomp: usize, data: Vec<Complex<T>>) -> Result<Self, SpectralError> {
        let expected = ncomp * grid.len();
        if data.len() != expected {
            return Err(SpectralError::BadDataLength { expected, got: data.len() });
        }
        Ok(Self { grid: grid.clone(), ncomp, data })
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: &Grid<T>, ncomp: usize, f: impl Fn(&[T; 3]) -> Vec<Complex<T>>) -> Self {
        let n = grid.len();
        let mut out = Self::zeros(grid, ncomp);
        for p in 0..n {
            let v = f(&grid.point(p));
            for c in 0..ncomp {
                out.data[c * n + p] = v[c];
            }
        }
        out
    }

    /// Stacks scalar fields on the same grid into one multi-component field.
    pub fn stack(parts: &[&Field<T>]) -> Self {
        let grid = parts[0].grid.clone();
        let mut data = Vec::with_capacity(parts.iter().map(|p| p.data.len()).sum());
        let mut ncomp = 0;
        for p in parts {
            assert_eq!(p.grid, grid, "stacked fields must share a grid");
            data.extend_from_slice(&p.data);
            ncomp += p.ncomp;
        }
        Self { grid, ncomp, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[Complex<T>] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex<T>] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Scalar field holding component `c`.
    pub fn extract(&self, c: usize) -> Field<T> {
        Field { grid: self.grid.clone(), ncomp: 1, data: self.component(c).to_vec() }
    }

    /// Components `range` as a new field.
    pub fn slice_components(&self, range: Range<usize>) -> Field<T> {
        let n = self.grid.len();
        Field {
            grid: self.grid.clone(),
            ncomp: range.len(),
            data: self.data[range.start * n..range.end * n].to_vec(),
        }
    }

    pub fn scale_components(&mut self, range: Range<usize>, s: Complex<T>) {
        let n = self.grid.len();
        for v in &mut self.data[range.start * n..range.end * n] {
            *v = *v * s;
        }
    }

    pub fn scaled(&self, s: Complex<T>) -> Field<T> {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = *v * s);
        out
    }

    pub fn add(&self, other: &Field<T>) -> Field<T> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field<T>) -> Field<T> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Field<T>, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Field<T> {
        assert_eq!(self.ncomp, other.ncomp, "component counts differ");
        assert_eq!(self.grid, other.grid, "grids differ");
        Field {
            grid: self.grid.clone(),
            ncomp: self.ncomp,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn conj(&self) -> Field<T> {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Forward transform of every component (unnormalized DFT).
    pub fn to_spectral(&self) -> Field<T> {
        let mut out = self.clone();
        let n = self.grid.len();
        for c in 0..self.ncomp {
            fft_nd(&mut out.data[c * n..(c + 1) * n], &self.grid.n, false);
        }
        out
    }

    /// Inverse of [`Field::to_spectral`].
    pub fn to_physical(&self) -> Field<T> {
        let mut out = self.clone();
        let n = self.grid.len();
        for c in 0..self.ncomp {
            fft_nd(&mut out.data[c * n..(c + 1) * n], &self.grid.n, true);
        }
        out
    }

    /// Relabels grid axes and vector components cyclically: new axis `k` is old
    /// axis `(shift + k) mod 3`. Components are permuted within each triple.
    pub fn permute_cyclic(&self, shift: usize) -> Field<T> {
        let d = self.grid.dim();
        let shift = shift % d;
        let grid = self.grid.permute_cyclic(shift);
        let n = grid.len();
        let mut out = Field::zeros(&grid, self.ncomp);
        let triples = self.ncomp.is_multiple_of(d) && self.ncomp >= d;
        for new_flat in 0..n {
            let new_idx = grid.multi_index(new_flat);
            let mut old_idx = [0usize; 3];
            for k in 0..d {
                old_idx[(shift + k) % d] = new_idx[k];
            }
            let old_flat = self.grid.flat_index(&old_idx[..d]);
            for c in 0..self.ncomp {
                let src = if triples { (c / d) * d + (shift + c % d) % d } else { c };
                out.data[c * n + new_flat] = self.data[src * n + old_flat];
            }
        }
        out
    }
}

/// Applies a matrix multiplier `symbol(xi)` at every nonzero frequency and
/// `at_zero` at the zero frequency.
pub fn apply_symbol<T, F>(field: &Field<T>, symbol: F, at_zero: &SymbolMatrix<T>) -> Result<Field<T>, SpectralError>
where
    T: Real,
    F: Fn(&[T]) -> SymbolMatrix<T> + Sync,
{
    let ncomp = field.ncomp;
    let grid = field.grid.clone();
    let n = grid.len();
    let d = grid.dim();
    let spec = field.to_spectral();
    let rows: Vec<Result<Vec<Complex<T>>, usize>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let m = if k == 0 {
                *at_zero
            } else {
                let xi = grid.wavevector(k);
                symbol(&xi[..d])
            };
            if !m.is_finite() {
                return Err(k);
            }
            let v: Vec<Complex<T>> = (0..ncomp).map(|c| spec.data[c * n + k]).collect();
            Ok(m.mul_vec(&v))
        })
        .collect();
    let mut out = Field::zeros(&grid, m_order(at_zero, ncomp));
    let oc = out.ncomp;
    for (k, r) in rows.into_iter().enumerate() {
        let v = r.map_err(|index| SpectralError::NonFiniteSymbol { index })?;
        for c in 0..oc {
            out.data[c * n + k] = v[c];
        }
    }
    Ok(out.to_physical())
}

fn m_order<T: Real>(m: &SymbolMatrix<T>, ncomp: usize) -> usize {
    debug_assert_eq!(m.order(), ncomp, "symbol order must match component count");
    m.order()
}

/// Applies a scalar multiplier to every component.
pub fn apply_scalar<T, F>(field: &Field<T>, multiplier: F, at_zero: Complex<T>) -> Result<Field<T>, SpectralError>
where
    T: Real,
    F: Fn(&[T]) -> Complex<T> + Sync,
{
    let grid = field.grid.clone();
    let n = grid.len();
    let d = grid.dim();
    let mut spec = field.to_spectral();
    let factors: Vec<Complex<T>> = (0..n)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                at_zero
            } else {
                multiplier(&grid.wavevector(k)[..d])
            }
        })
        .collect();
    if let Some(index) = factors.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(SpectralError::NonFiniteSymbol { index });
    }
    for c in 0..field.ncomp {
        for (v, f) in spec.data[c * n..(c + 1) * n].iter_mut().zip(&factors) {
            *v = *v * *f;
        }
    }
    Ok(spec.to_physical())
}

fn check_material<T: Real>(field: &Field<T>, mat: &Material<T>) -> Result<(), SpectralError> {
    if field.grid.dim() != mat.dim() {
        return Err(SpectralError::DimensionMismatch { grid: field.grid.dim(), material: mat.dim() });
    }
    if field.ncomp != mat.components() {
        return Err(SpectralError::ComponentMismatch { expected: mat.components(), got: field.ncomp });
    }
    Ok(())
}

/// Solves `P(w, D) u = J` for non-real `w`.
pub fn solve<T: Real>(omega: Complex<T>, currents: &Field<T>, mat: &Material<T>) -> Result<Field<T>, SpectralError> {
    solve_with(omega, currents, mat, None)
}

/// [`solve`] with an optional sign flip in one transverse entry of the 3D inverse.
pub fn solve_with<T: Real>(
    omega: Complex<T>,
    currents: &Field<T>,
    mat: &Material<T>,
    mutation: Option<EntryMutation>,
) -> Result<Field<T>, SpectralError> {
    if omega.im == T::zero() {
        return Err(SpectralError::RealFrequency(format!("{omega}")));
    }
    check_material(currents, mat)?;
    let i = imag_unit::<T>();
    let at_zero = SymbolMatrix::identity(mat.components()).scale((i * omega).inv());
    match mat {
        Material::Planar(m) => apply_symbol(currents, |xi| resolvent_matrix_2d(omega, &[xi[0], xi[1]], m), &at_zero),
        Material::Uniaxial(m) => apply_symbol(
            currents,
            |xi| resolvent_matrix_3d_with(omega, &[xi[0], xi[1], xi[2]], m, mutation),
            &at_zero,
        ),
    }
}

/// Applies `P(w, D)`; valid for real `w` as well.
pub fn forward_operator<T: Real>(omega: Complex<T>, u: &Field<T>, mat: &Material<T>) -> Result<Field<T>, SpectralError> {
    check_material(u, mat)?;
    let zero = vec![T::zero(); mat.dim()];
    let at_zero = symbol_p(omega, &zero, mat).expect("dimension checked");
    apply_symbol(u, |xi| symbol_p(omega, xi, mat).expect("dimension checked"), &at_zero)
}

/// Riesz transform `xi_i / |xi|_flavor` of a scalar field; the mean is sent to 0.
pub fn riesz<T: Real>(f: &Field<T>, axis: usize, flavor: &NormFlavor<T>) -> Result<Field<T>, SpectralError> {
    apply_scalar(f, |xi| Complex::new(xi[axis] / flavor.norm(xi), T::zero()), Complex::zero())
}

/// Multiplier by `|xi|^s`; zero frequency to 0. For `s < 0` the input must be mean-zero.
pub fn fractional_laplacian<T: Real>(f: &Field<T>, s: T) -> Result<Field<T>, SpectralError> {
    if s < T::zero() {
        let n = T::from_usize_lossy(f.grid.len());
        let scale = T::one().max(f.max_abs());
        for c in 0..f.ncomp {
            let mean = f.component(c).iter().fold(Complex::zero(), |a, v| a + *v) / n;
            if mean.norm() > T::lit(1e-12) * scale {
                return Err(SpectralError::MeanNotZero(mean.norm().as_f64()));
            }
        }
    }
    apply_scalar(
        f,
        |xi| {
            let r = xi.iter().fold(T::zero(), |a, v| a + *v * *v).sqrt();
            Complex::new(r.powf(s), T::zero())
        },
        Complex::zero(),
    )
}

/// Scalar resolvent branch: `e_- = (w - r)^{-1}`, `e_+ = (w + r)^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Minus,
    Plus,
}

/// `e_+-` in the given norm flavor, for non-real `w`.
pub fn half_laplacian_resolvent<T: Real>(
    f: &Field<T>,
    omega: Complex<T>,
    branch: Branch,
    flavor: &NormFlavor<T>,
) -> Result<Field<T>, SpectralError> {
    if omega.im == T::zero() {
        return Err(SpectralError::RealFrequency(format!("{omega}")));
    }
    let sgn = match branch {
        Branch::Minus => -T::one(),
        Branch::Plus => T::one(),
    };
    apply_scalar(f, |xi| (omega + sgn * flavor.norm(xi)).inv(), omega.inv())
}

/// Electric and magnetic charges `i xi . J` (magnetic charge is zero in 2D).
#[derive(Clone, Debug)]
pub struct Charges<T: Real> {
    pub rho_e: Field<T>,
    pub rho_m: Field<T>,
}

/// Spectral divergence of each vector block of the currents.
pub fn divergence_and_charges<T: Real>(currents: &Field<T>) -> Charges<T> {
    let grid = currents.grid.clone();
    let d = grid.dim();
    let n = grid.len();
    let spec = currents.to_spectral();
    let i = imag_unit::<T>();
    let div = |offset: usize| {
        let mut out = Field::zeros(&grid, 1);
        for k in 1..n {
            let xi = grid.wavevector(k);
            let mut s = Complex::zero();
            for a in 0..d {
                s = s + spec.data[(offset + a) * n + k] * xi[a];
            }
            out.data[k] = i * s;
        }
        out.to_physical()
    };
    let rho_e = div(0);
    let rho_m = if d == 3 && currents.ncomp >= 6 { div(3) } else { Field::zeros(&grid, 1) };
    Charges { rho_e, rho_m }
}

fn project_blocks<T: Real>(j: &Field<T>, direction: impl Fn(&[T; 3], usize) -> [T; 3] + Sync) -> Field<T> {
    let grid = j.grid.clone();
    let d = grid.dim();
    let n = grid.len();
    let mut spec = j.to_spectral();
    let blocks = j.ncomp / d;
    for k in 1..n {
        let xi = grid.wavevector(k);
        for blk in 0..blocks {
            // Removes the component along `dir` measured by the functional xi . v.
            let dir = direction(&xi, blk);
            let dot_xi_dir = (0..d).fold(T::zero(), |a, t| a + xi[t] * dir[t]);
            let mut dot = Complex::zero();
            for a in 0..d {
                dot = dot + spec.data[(blk * d + a) * n + k] * xi[a];
            }
            let coef = dot / dot_xi_dir;
            for a in 0..d {
                let idx = (blk * d + a) * n + k;
                spec.data[idx] = spec.data[idx] - coef * dir[a];
            }
        }
    }
    spec.to_physical()
}

/// Euclidean Leray projection of each vector block (2D: the first pair only).
pub fn leray_project<T: Real>(j: &Field<T>) -> Field<T> {
    let d = j.grid.dim();
    if d == 2 && j.ncomp == 3 {
        let pair = project_blocks(&j.slice_components(0..2), |xi, _| *xi);
        return Field::stack(&[&pair, &j.extract(2)]);
    }
    project_blocks(j, |xi, _| *xi)
}

/// Oblique projection onto divergence-free fields along `eps xi` (electric
/// block) and `xi` (magnetic block); the complement is exactly the part seen
/// by the charge term of the inverse.
pub fn leray_project_material<T: Real>(j: &Field<T>, mat: &Material<T>) -> Field<T> {
    match mat {
        Material::Planar(m) => {
            let dir = |xi: &[T; 3], _: usize| {
                [m.eps11 * xi[0] + m.eps12 * xi[1], m.eps12 * xi[0] + m.eps22 * xi[1], T::zero()]
            };
            let pair = project_blocks(&j.slice_components(0..2), dir);
            Field::stack(&[&pair, &j.extract(2)])
        }
        Material::Uniaxial(m) => {
            let mut eps = [m.eps_perp; 3];
            eps[m.axis.index()] = m.eps_axis;
            project_blocks(j, move |xi, blk| {
                if blk == 0 {
                    [eps[0] * xi[0], eps[1] * xi[1], eps[2] * xi[2]]
                } else {
                    *xi
                }
            })
        }
    }
}

/// Largest `|xi_hat . v_hat|` over nonzero frequencies and vector blocks,
/// relative to the largest spectral coefficient.
pub fn divergence_defect<T: Real>(field: &Field<T>) -> T {
    let grid = &field.grid;
    let d = grid.dim();
    let n = grid.len();
    let spec = field.to_spectral();
    let blocks = if d == 2 { 1 } else { field.ncomp / 3 };
    let vmax = spec.max_abs();
    if vmax == T::zero() {
        return T::zero();
    }
    let mut worst = T::zero();
    for k in 1..n {
        let xi = grid.wavevector(k);
        let r = (0..d).fold(T::zero(), |a, t| a + xi[t] * xi[t]).sqrt();
        for blk in 0..blocks {
            let mut dot = Complex::zero();
            for a in 0..d {
                dot = dot + spec.data[(blk * d + a) * n + k] * (xi[a] / r);
            }
            worst = worst.max(dot.norm());
        }
    }
    worst / vmax
}

/// Discrete `L^p` norm with cell-volume weights; `p = inf` gives the maximum.
/// Multi-component fields use the pointwise Euclidean magnitude.
pub fn lebesgue_norm<T: Real>(f: &Field<T>, p: T) -> T {
    let n = f.grid.len();
    let mag = |k: usize| (0..f.ncomp).fold(T::zero(), |a, c| a + f.data[c * n + k].norm_sqr()).sqrt();
    if p.is_infinite() {
        return (0..n).fold(T::zero(), |m, k| m.max(mag(k)));
    }
    let dv = f.grid.cell_volume();
    let s = (0..n).fold(T::zero(), |a, k| a + mag(k).powf(p));
    (s * dv).powf(T::one() / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn mode(grid: &Grid<f64>, k: [f64; 3]) -> Field<f64> {
        Field::from_fn(grid, 1, |x| {
            let ph: f64 = (0..grid.dim()).map(|a| 2.0 * std::f64::consts::PI * k[a] * x[a] / grid.lengths()[a]).sum();
            vec![Complex::new(ph.cos(), ph.sin())]
        })
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::<f64>::cubic(2, 6, 1.0).is_err());
        assert!(Grid::<f64>::cubic(2, 2, 1.0).is_err());
        assert!(Grid::<f64>::cubic(4, 8, 1.0).is_err());
        assert!(Grid::<f64>::cubic(3, 8, -1.0).is_err());
        let g = Grid::<f64>::cubic(2, 8, 2.0).unwrap();
        assert_eq!(g.signed_index(0, 4), -4);
        assert_eq!(g.signed_index(0, 3), 3);
    }

    #[test]
    fn constant_field_under_forward_operator() {
        let g = Grid::cubic(2, 8, 1.0).unwrap();
        let mat: Material<f64> = crate::symbol::Material2::new(2.0, 0.1, 1.0, 1.5).unwrap().into();
        let u = Field::from_fn(&g, 3, |_| vec![cplx(1.0, 0.5), cplx(-2.0, 0.0), cplx(0.3, 0.3)]);
        let w = cplx(0.7, 0.2);
        let out = forward_operator(w, &u, &mat).unwrap();
        let expect = u.scaled(cplx::<f64>(0.0, 1.0) * w);
        assert!(out.sub(&expect).max_abs() < 1e-13);
    }

    #[test]
    fn single_mode_eigenfunction_of_fractional_laplacian() {
        let g = Grid::cubic(2, 16, 3.0).unwrap();
        let f = mode(&g, [2.0, -1.0, 0.0]);
        let out = fractional_laplacian(&f, 0.7).unwrap();
        let r = (2.0 * std::f64::consts::PI / 3.0) * 5f64.sqrt();
        assert!(out.sub(&f.scaled(cplx(r.powf(0.7), 0.0))).max_abs() < 1e-12);
    }

    #[test]
    fn negative_power_needs_mean_zero() {
        let g = Grid::cubic(2, 8, 1.0).unwrap();
        let f = Field::from_fn(&g, 1, |_| vec![cplx(1.0, 0.0)]);
        assert!(matches!(fractional_laplacian(&f, -1.0), Err(SpectralError::MeanNotZero(_))));
    }

    #[test]
    fn unit_box_norms_of_constant() {
        let g = Grid::cubic(3, 4, 1.0).unwrap();
        let f = Field::from_fn(&g, 1, |_| vec![cplx(1.0, 0.0)]);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((lebesgue_norm(&f, p) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn real_frequency_rejected() {
        let g = Grid::cubic(2, 8, 1.0).unwrap();
        let mat: Material<f64> = crate::symbol::Material2::isotropic(1.0, 1.0).unwrap().into();
        let j = Field::zeros(&g, 3);
        assert!(matches!(solve(cplx(1.0, 0.0), &j, &mat), Err(SpectralError::RealFrequency(_))));
    }

    #[test]
    fn cyclic_permutation_roundtrip() {
        let g = Grid::new(&[4, 8, 16], &[1.0, 2.0, 3.0]).unwrap();
        let f = Field::from_fn(&g, 6, |x| (0..6).map(|c| cplx(x[0] + 2.0 * x[1] + c as f64, x[2])).collect());
        let back = f.permute_cyclic(1).permute_cyclic(2);
        assert_eq!(back, f);
        assert_eq!(f.permute_cyclic(1).grid().n(), &[8, 16, 4]);
    }
}
