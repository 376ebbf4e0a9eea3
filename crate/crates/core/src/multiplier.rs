//! Closed-form inverse symbols `M + M_c` and their Sokhotsky decomposition.
//!
//! Every inverse is linear in the scalar resolvents
//! `A = 1/(i(w - r_1))`, `B = 1/(i(w + r_1))` (and in 3D
//! `C = 1/(i(w - r_2))`, `D = 1/(i(w + r_2))`) plus the charge term
//! `1/(i w)`. The helpers below evaluate the entries for arbitrary scalar
//! values, which yields both the full inverse and the per-term weights.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::SymbolMatrix;
use crate::scalar::{imag_unit, Real};
use crate::symbol::{
    lift_from_canonical, norm_eps_prime, symbol_p_3d, Frame3, Material, Material2, Material3, NormFlavor,
    SymbolError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiplierError {
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("frequency must be real and nonzero for the Sokhotsky split, got {0}")]
    NotRealFrequency(String),
    #[error("symbol is singular at this frequency and wavevector")]
    Singular,
}

/// Sign of the imaginary shift `w +- i0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Side::Plus => T::one(),
            Side::Minus => -T::one(),
        }
    }
}

/// Sign flip of one entry of the 3D transverse block, used to check that the
/// verification suites detect a corrupted formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryMutation {
    pub row: usize,
    pub col: usize,
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Planar transverse block for given scalar values `(A, B)`.
fn planar_block<T: Real>(xi: &[T; 2], mat: &Material2<T>, a: Complex<T>, b: Complex<T>) -> SymbolMatrix<T> {
    let r = norm_eps_prime(xi, mat);
    let (p1, q2) = (xi[0] / r, xi[1] / r);
    let [e11, e12, e22] = mat.inverse_permittivity();
    let half = T::lit(0.5);
    let hm = half / mat.mu;
    let s = a + b;
    let dd = a - b;
    SymbolMatrix::from_rows(&[
        &[s * re(hm * (q2 * q2 * e11 - p1 * q2 * e12)), s * re(hm * (q2 * q2 * e12 - p1 * q2 * e22)), dd * re(hm * q2)],
        &[s * re(hm * (p1 * p1 * e12 - p1 * q2 * e11)), s * re(hm * (p1 * p1 * e22 - e12 * p1 * q2)), -dd * re(hm * p1)],
        &[dd * re(half * (q2 * e11 - p1 * e12)), -dd * re(half * (p1 * e22 - q2 * e12)), s * re(half)],
    ])
}

/// Planar charge block without the `1/(i w)` factor.
fn planar_charge<T: Real>(xi: &[T; 2], mat: &Material2<T>) -> SymbolMatrix<T> {
    let r = norm_eps_prime(xi, mat);
    let (p1, q2) = (xi[0] / r, xi[1] / r);
    let [e11, e12, e22] = mat.inverse_permittivity();
    let im = T::one() / mat.mu;
    let z = Complex::zero();
    SymbolMatrix::from_rows(&[
        &[re(im * (e22 * p1 * p1 - e12 * p1 * q2)), re(im * (e22 * p1 * q2 - e12 * q2 * q2)), z],
        &[re(im * (e11 * p1 * q2 - e12 * p1 * p1)), re(im * (e11 * q2 * q2 - e12 * p1 * q2)), z],
        &[z, z, z],
    ])
}

/// Scalar resolvent `1/(i(z - shift * r))`.
#[inline]
pub fn scalar_resolvent<T: Real>(z: Complex<T>, r: T, shift: T) -> Complex<T> {
    (imag_unit::<T>() * (z - re(shift * r))).inv()
}

/// Planar `M + M_c`. At `xi = 0` the inverse is `(i w)^{-1} I`.
pub fn resolvent_matrix_2d<T: Real>(omega: Complex<T>, xi: &[T; 2], mat: &Material2<T>) -> SymbolMatrix<T> {
    let i = imag_unit::<T>();
    let r = norm_eps_prime(xi, mat);
    if r == T::zero() {
        return SymbolMatrix::identity(3).scale((i * omega).inv());
    }
    let a = scalar_resolvent(omega, r, T::one());
    let b = scalar_resolvent(omega, r, -T::one());
    planar_block(xi, mat, a, b) + planar_charge(xi, mat).scale((i * omega).inv())
}

/// Scalars `[A, B, C, D]` entering the 3D transverse block.
type Quad<T> = [Complex<T>; 4];

/// Canonical 3D transverse block for given scalar values.
fn spatial_block<T: Real>(f: &Frame3<T>, s: Quad<T>) -> SymbolMatrix<T> {
    let [a_, b_, c_, d_] = s;
    let (a, b) = (f.a, f.b);
    let sb = b.sqrt();
    let [p1, p2, p3] = f.unit;
    let [t1, t2, t3] = f.unit_eps;
    let tr = (p2 * p2 + p3 * p3).sqrt();
    let (u2, u3) = (p2 / tr, p3 / tr);
    let h = T::lit(0.5);
    let ab = a_ + b_;
    let amb = a_ - b_;
    let cd = c_ + d_;
    let cmd = c_ - d_;
    let z = Complex::zero();
    let m = [
        [
            cd * re(h * a * (t2 * t2 + t3 * t3)),
            -cd * re(h * b * t1 * t2),
            -cd * re(h * b * t1 * t3),
            z,
            -cmd * re(h * t3),
            cmd * re(h * t2),
        ],
        [
            -cd * re(h * a * t1 * t2),
            ab * re(h * u3 * u3) + cd * re(h * b * t1 * t1 * u2 * u2),
            -ab * re(h * u2 * u3) + cd * re(h * b * t1 * t1 * u2 * u3),
            amb * re(h * p3 / sb),
            -amb * re(h * p1 * u2 * u3 / sb) + cmd * re(h * t1 * u2 * u3),
            -amb * re(h * p1 * u3 * u3 / sb) - cmd * re(h * t1 * u2 * u2),
        ],
        [
            -cd * re(h * a * t1 * t3),
            -ab * re(h * u2 * u3) + cd * re(h * b * t1 * t1 * u2 * u3),
            ab * re(h * u2 * u2) + cd * re(h * b * t1 * t1 * u3 * u3),
            -amb * re(h * p2 / sb),
            amb * re(h * p1 * u2 * u2 / sb) + cmd * re(h * t1 * u3 * u3),
            amb * re(h * p1 * u2 * u3 / sb) - cmd * re(h * t1 * u2 * u3),
        ],
        [
            z,
            amb * re(h * sb * p3),
            -amb * re(h * sb * p2),
            ab * re(h * (p2 * p2 + p3 * p3)),
            -ab * re(h * p1 * p2),
            -ab * re(h * p1 * p3),
        ],
        [
            -cmd * re(h * a * t3),
            -amb * re(h * sb * p1 * u2 * u3) + cmd * re(h * b * t1 * u2 * u3),
            amb * re(h * sb * p1 * u2 * u2) + cmd * re(h * b * t1 * u3 * u3),
            -ab * re(h * p1 * p2),
            ab * re(h * p1 * p1 * u2 * u2) + cd * re(h * u3 * u3),
            ab * re(h * p1 * p1 * u2 * u3) - cd * re(h * u2 * u3),
        ],
        [
            cmd * re(h * a * t2),
            -amb * re(h * sb * p1 * u3 * u3) - cmd * re(h * b * t1 * u2 * u2),
            amb * re(h * sb * p1 * u2 * u3) - cmd * re(h * b * t1 * u2 * u3),
            -ab * re(h * p1 * p3),
            ab * re(h * p1 * p1 * u2 * u3) - cd * re(h * u2 * u3),
            ab * re(h * p1 * p1 * u3 * u3) + cd * re(h * u2 * u2),
        ],
    ];
    SymbolMatrix::from_fn(6, |i, j| m[i][j])
}

/// Canonical 3D charge block without the `1/(i w)` factor.
fn spatial_charge<T: Real>(f: &Frame3<T>) -> SymbolMatrix<T> {
    let scale = [f.b, f.a, f.a];
    let mut m = SymbolMatrix::zeros(6);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = re(scale[i] * f.unit_eps[i] * f.unit_eps[j]);
            m[(i + 3, j + 3)] = re(f.unit[i] * f.unit[j]);
        }
    }
    m
}

fn spatial_scalars<T: Real>(omega: Complex<T>, f: &Frame3<T>) -> Quad<T> {
    let r1 = f.b.sqrt() * f.n;
    let one = T::one();
    [
        scalar_resolvent(omega, r1, one),
        scalar_resolvent(omega, r1, -one),
        scalar_resolvent(omega, f.ne, one),
        scalar_resolvent(omega, f.ne, -one),
    ]
}

/// 3D `M + M_c`, optionally with one transverse entry sign-flipped.
///
/// Within `DEGENERACY_ETA` of the distinguished axis the closed form is
/// ill-conditioned and the symbol is inverted numerically instead.
pub fn resolvent_matrix_3d_with<T: Real>(
    omega: Complex<T>,
    xi: &[T; 3],
    mat: &Material3<T>,
    mutation: Option<EntryMutation>,
) -> SymbolMatrix<T> {
    let i = imag_unit::<T>();
    let f = match Frame3::new(xi, mat) {
        Ok(f) => f,
        Err(_) => return SymbolMatrix::identity(6).scale((i * omega).inv()),
    };
    if f.is_degenerate() {
        return symbol_p_3d(omega, xi, mat)
            .inverse()
            .unwrap_or_else(|| SymbolMatrix::from_fn(6, |_, _| re(T::nan())));
    }
    let mut block = spatial_block(&f, spatial_scalars(omega, &f));
    if let Some(mu) = mutation {
        block[(mu.row, mu.col)] = -block[(mu.row, mu.col)];
    }
    let m = block + spatial_charge(&f).scale((i * omega).inv());
    if mat.is_canonical() {
        m
    } else {
        lift_from_canonical(&m, mat, true, true)
    }
}

pub fn resolvent_matrix_3d<T: Real>(omega: Complex<T>, xi: &[T; 3], mat: &Material3<T>) -> SymbolMatrix<T> {
    resolvent_matrix_3d_with(omega, xi, mat, None)
}

/// Inverse symbol of either dimension.
pub fn resolvent_matrix<T: Real>(
    omega: Complex<T>,
    xi: &[T],
    mat: &Material<T>,
) -> Result<SymbolMatrix<T>, MultiplierError> {
    match mat {
        Material::Planar(m) if xi.len() == 2 => Ok(resolvent_matrix_2d(omega, &[xi[0], xi[1]], m)),
        Material::Uniaxial(m) if xi.len() == 3 => Ok(resolvent_matrix_3d(omega, &[xi[0], xi[1], xi[2]], m)),
        _ => Err(SymbolError::DimensionMismatch { expected: mat.dim(), got: xi.len() }.into()),
    }
}

/// `M_c J` written through the charge `rho = i xi . J`:
/// `(i w mu)^{-1} (rho / (i |xi|_{eps'})) (e22 xi'_1 - e12 xi'_2, e11 xi'_2 - e12 xi'_1, 0)`.
pub fn charge_column_2d<T: Real>(
    omega: Complex<T>,
    xi: &[T; 2],
    mat: &Material2<T>,
    rho: Complex<T>,
) -> [Complex<T>; 3] {
    let i = imag_unit::<T>();
    let r = norm_eps_prime(xi, mat);
    if r == T::zero() {
        return [Complex::zero(); 3];
    }
    let [e11, e12, e22] = mat.inverse_permittivity();
    let (p1, q2) = (xi[0] / r, xi[1] / r);
    let amp = rho / (i * re(r)) / (i * omega * re(mat.mu));
    [amp * re(e22 * p1 - e12 * q2), amp * re(e11 * q2 - e12 * p1), Complex::zero()]
}

/// `M_c J` from the electric and magnetic charges `rho_e = i xi . J_e`,
/// `rho_m = i xi . J_m`, in the original frame.
pub fn charge_column_3d<T: Real>(
    omega: Complex<T>,
    xi: &[T; 3],
    mat: &Material3<T>,
    rho_e: Complex<T>,
    rho_m: Complex<T>,
) -> [Complex<T>; 6] {
    let i = imag_unit::<T>();
    let f = match Frame3::new(xi, mat) {
        Ok(f) => f,
        Err(_) => return [Complex::zero(); 6],
    };
    // Charges are rotation invariant; J_m is rescaled by 1/mu in the canonical frame.
    let rho_m = rho_m / re(mat.mu);
    let ce = rho_e / (i * re(f.ne)) / (i * omega);
    let cm = rho_m / (i * re(f.n)) / (i * omega);
    let scale = [f.b, f.a, f.a];
    let mut canon = [Complex::zero(); 6];
    for k in 0..3 {
        canon[k] = ce * re(scale[k] * f.unit_eps[k]);
        canon[k + 3] = cm * re(f.unit[k]);
    }
    let mut out = [Complex::zero(); 6];
    let j = mat.axis.index();
    for k in 0..3 {
        out[(j + k) % 3] = canon[k];
        out[3 + (j + k) % 3] = canon[k + 3] * re(mat.mu);
    }
    out
}

/// One scalar family `W / (i (z - shift r(xi)))` of the inverse symbol.
#[derive(Clone, Copy, Debug)]
pub struct ResolventTerm<T: Real> {
    /// Index of the norm family: 0 for the `eps'`-norm (2D) or `sqrt(b)|xi|` (3D),
    /// 1 for `|xi|_eps` (3D).
    pub family: usize,
    /// `+1` for the `w - r` branch, `-1` for `w + r`.
    pub shift: T,
    /// `r(xi)` in the family norm.
    pub radius: T,
    pub weight: SymbolMatrix<T>,
}

impl<T: Real> ResolventTerm<T> {
    #[inline]
    pub fn scalar(&self, z: Complex<T>) -> Complex<T> {
        scalar_resolvent(z, self.radius, self.shift)
    }
}

/// `M(z) = sum_t W_t / (i (z - s_t r_t)) + W_c / (i z)`.
#[derive(Clone, Debug)]
pub struct ResolventTerms<T: Real> {
    pub terms: Vec<ResolventTerm<T>>,
    pub charge: SymbolMatrix<T>,
}

impl<T: Real> ResolventTerms<T> {
    pub fn assemble(&self, z: Complex<T>) -> SymbolMatrix<T> {
        let i = imag_unit::<T>();
        let mut m = self.charge.scale((i * z).inv());
        for t in &self.terms {
            m = m + t.weight.scale(t.scalar(z));
        }
        m
    }
}

/// Norm families of the singular spheres of a material.
pub fn norm_families<T: Real>(mat: &Material<T>) -> Vec<NormFlavor<T>> {
    match mat {
        Material::Planar(m) => vec![NormFlavor::eps_prime(m)],
        Material::Uniaxial(m) => {
            vec![NormFlavor::scaled_euclidean(3, m.b().sqrt()), NormFlavor::eps(m)]
        }
    }
}

fn unit_quad<T: Real>(k: usize) -> Quad<T> {
    let mut q = [Complex::zero(); 4];
    q[k] = re(T::one());
    q
}

/// Term decomposition of the inverse symbol at a nonzero wavevector.
pub fn resolvent_terms<T: Real>(xi: &[T], mat: &Material<T>) -> Result<ResolventTerms<T>, MultiplierError> {
    let one = T::one();
    match mat {
        Material::Planar(m) => {
            let x = [xi[0], xi[1]];
            let r = norm_eps_prime(&x, m);
            if r == T::zero() {
                return Err(SymbolError::ZeroWavevector.into());
            }
            let z = Complex::zero();
            let o = re(one);
            Ok(ResolventTerms {
                terms: vec![
                    ResolventTerm { family: 0, shift: one, radius: r, weight: planar_block(&x, m, o, z) },
                    ResolventTerm { family: 0, shift: -one, radius: r, weight: planar_block(&x, m, z, o) },
                ],
                charge: planar_charge(&x, m),
            })
        }
        Material::Uniaxial(m) => {
            let x = [xi[0], xi[1], xi[2]];
            let f = Frame3::new(&x, m)?;
            if f.transverse_fraction() == T::zero() {
                return Err(SymbolError::DegenerateDirection { eta: 0.0 }.into());
            }
            let lift = |w: SymbolMatrix<T>| if m.is_canonical() { w } else { lift_from_canonical(&w, m, true, true) };
            let r1 = f.b.sqrt() * f.n;
            let spec = [(0, one, r1), (0, -one, r1), (1, one, f.ne), (1, -one, f.ne)];
            let terms = spec
                .iter()
                .enumerate()
                .map(|(k, &(family, shift, radius))| ResolventTerm {
                    family,
                    shift,
                    radius,
                    weight: lift(spatial_block(&f, unit_quad(k))),
                })
                .collect();
            Ok(ResolventTerms { terms, charge: lift(spatial_charge(&f)) })
        }
    }
}

/// Pointwise Sokhotsky decomposition at real `w != 0`:
/// `M_+-(w, xi) = regular + sum_t [pv_weight_t p.v. 1/(w - s_t r_t) + surface_weight_t delta(w - s_t r_t)]`.
#[derive(Clone, Debug)]
pub struct MultiplierSplit<T: Real> {
    pub regular: SymbolMatrix<T>,
    pub singular: Vec<SingularPart<T>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SingularPart<T: Real> {
    pub family: usize,
    pub shift: T,
    pub pv_weight: SymbolMatrix<T>,
    pub surface_weight: SymbolMatrix<T>,
    /// Radius of the singular sphere in the family norm, `|w|`.
    pub singular_radius: T,
    /// `r(xi)` in the family norm.
    pub radius: T,
}

impl<T: Real> MultiplierSplit<T> {
    /// Regular part plus principal-value parts evaluated off the spheres.
    pub fn off_sphere_value(&self, omega: T) -> SymbolMatrix<T> {
        let mut m = self.regular;
        for s in &self.singular {
            let den = omega - s.shift * s.radius;
            m = m + s.pv_weight.scale(re(T::one() / den));
        }
        m
    }
}

/// Splits the inverse symbol into regular, principal-value and surface parts.
/// For `w > 0` the `w - r` branches are singular, for `w < 0` the `w + r` branches.
pub fn sokhotsky_split<T: Real>(
    omega: T,
    xi: &[T],
    mat: &Material<T>,
    side: Side,
) -> Result<MultiplierSplit<T>, MultiplierError> {
    if omega == T::zero() || !omega.is_finite() {
        return Err(MultiplierError::NotRealFrequency(format!("{omega}")));
    }
    let terms = resolvent_terms(xi, mat)?;
    let i = imag_unit::<T>();
    let z = re(omega);
    let singular_shift = omega.signum();
    let mut regular = terms.charge.scale((i * z).inv());
    let mut singular = Vec::new();
    for t in &terms.terms {
        if t.shift == singular_shift {
            let pv = t.weight.scale(i.inv());
            singular.push(SingularPart {
                family: t.family,
                shift: t.shift,
                pv_weight: pv,
                // (1/i)(-+ i pi) = -+ pi
                surface_weight: t.weight.scale(re(-side.sign::<T>() * T::PI())),
                singular_radius: omega.abs(),
                radius: t.radius,
            });
        } else {
            regular = regular + t.weight.scale(t.scalar(z));
        }
    }
    Ok(MultiplierSplit { regular, singular })
}
