//! Small dense complex matrices (at most 6x6) with partial-pivot LU.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

const CAP: usize = 36;

/// Square complex matrix of order 3 or 6, stored row-major on the stack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolMatrix<T: Real> {
    n: usize,
    data: [Complex<T>; CAP],
}

impl<T: Real> SymbolMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n * n <= CAP, "matrix order {n} exceeds capacity");
        Self { n, data: [Complex::zero(); CAP] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex<T>]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "rows must be square");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> Vec<Complex<T>> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.entries().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn entries(&self) -> impl Iterator<Item = Complex<T>> + '_ {
        self.data[..self.n * self.n].iter().copied()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).fold(Complex::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    /// `self * v` written into `out`, avoiding allocation in hot loops.
    #[inline]
    pub fn mul_vec_into(&self, v: &[Complex<T>], out: &mut [Complex<T>]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let mut acc = Complex::zero();
            for (j, vj) in v.iter().enumerate().take(self.n) {
                acc = acc + self[(i, j)] * *vj;
            }
            *o = acc;
        }
    }

    /// Partial-pivot LU factorization; `None` if a pivot vanishes exactly.
    pub fn lu(&self) -> Option<Lu<T>> {
        let n = self.n;
        let mut a = *self;
        let mut perm = [0usize; 6];
        for (i, p) in perm.iter_mut().enumerate().take(n) {
            *p = i;
        }
        let mut sign = T::one();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[(k, k)].norm();
            for i in (k + 1)..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == T::zero() {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let inv = a[(k, k)].inv();
            for i in (k + 1)..n {
                let f = a[(i, k)] * inv;
                a[(i, k)] = f;
                for j in (k + 1)..n {
                    let t = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - f * t;
                }
            }
        }
        Some(Lu { a, perm, sign })
    }

    pub fn det(&self) -> Complex<T> {
        self.lu().map_or(Complex::zero(), |lu| lu.det())
    }

    pub fn inverse(&self) -> Option<Self> {
        self.lu().map(|lu| lu.inverse())
    }
}

/// LU factors with row permutation.
#[derive(Clone, Copy, Debug)]
pub struct Lu<T: Real> {
    a: SymbolMatrix<T>,
    perm: [usize; 6],
    sign: T,
}

impl<T: Real> Lu<T> {
    pub fn det(&self) -> Complex<T> {
        let mut d = Complex::new(self.sign, T::zero());
        for i in 0..self.a.n {
            d = d * self.a[(i, i)];
        }
        d
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.a.n;
        let mut x: Vec<Complex<T>> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = x[j];
                x[i] = x[i] - self.a[(i, j)] * t;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = x[j];
                x[i] = x[i] - self.a[(i, j)] * t;
            }
            x[i] = x[i] / self.a[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> SymbolMatrix<T> {
        let n = self.a.n;
        let mut inv = SymbolMatrix::zeros(n);
        let mut e = vec![Complex::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex::zero());
            e[j] = Complex::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

impl<T: Real> Index<(usize, usize)> for SymbolMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.n && j < self.n);
        &self.data[i * self.n + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for SymbolMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.n && j < self.n);
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Mul for SymbolMatrix<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for SymbolMatrix<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_fn(self.n, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl<T: Real> Sub for SymbolMatrix<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_fn(self.n, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn lu_inverse_roundtrip() {
        let m = SymbolMatrix::<f64>::from_fn(3, |i, j| {
            cplx((i * 3 + j) as f64 * 0.37 + if i == j { 2.0 } else { 0.0 }, (i as f64) - (j as f64))
        });
        let inv = m.inverse().unwrap();
        let err = (m * inv - SymbolMatrix::identity(3)).max_abs();
        assert!(err < 1e-14, "{err}");
    }

    #[test]
    fn det_of_permutation_is_signed() {
        let mut m = SymbolMatrix::<f64>::zeros(3);
        m[(0, 1)] = cplx(1.0, 0.0);
        m[(1, 0)] = cplx(1.0, 0.0);
        m[(2, 2)] = cplx(1.0, 0.0);
        assert!((m.det() - cplx(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_has_no_lu() {
        let m = SymbolMatrix::<f64>::zeros(3);
        assert!(m.lu().is_none());
        assert_eq!(m.det(), Complex::zero());
    }
}
