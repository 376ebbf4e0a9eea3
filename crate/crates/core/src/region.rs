//! Exponent arithmetic, admissible Lebesgue pairs, the uniform-estimate region
//! `Z(l) = {w : kappa(w) <= l}` and empirical norm-scaling probes.
//!
//! `gamma`, `alpha` and set membership are generic over any ordered field, so
//! the same code runs on exact rationals and on floats.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{FromPrimitive, Num, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;
use crate::spectral::{lebesgue_norm, solve, Field, Grid, SpectralError};
use crate::symbol::{Material, NormFlavor};
use crate::multiplier::norm_families;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("exponents must satisfy 0 <= 1/p, 1/q <= 1")]
    OutOfSquare,
    #[error("dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("frequency {0} lies on the singular set of kappa")]
    OnSingularSet(String),
    #[error("the region is empty: alpha = 0 and l = {0} < 1")]
    EmptyRegion(f64),
    #[error("need q > p, got p = {p}, q = {q}")]
    ExponentOrder { p: f64, q: f64 },
    #[error("region parameter {name} must be positive, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("probe needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("probe grid {points} points exceeds the limit {limit}")]
    ProbeTooLarge { points: usize, limit: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Ordered field used for exponent arithmetic: floats or `Ratio<i64>`.
pub trait Exponent: Num + Copy + PartialOrd + FromPrimitive + Debug {}

impl<E: Num + Copy + PartialOrd + FromPrimitive + Debug> Exponent for E {}

fn int<E: Exponent>(k: i64) -> E {
    E::from_i64(k).expect("small integers are representable")
}

fn max<E: Exponent>(a: E, b: E) -> E {
    if b > a {
        b
    } else {
        a
    }
}

/// `(x, y) = (1/p, 1/q)` in dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LebesguePair<E> {
    pub x: E,
    pub y: E,
    pub d: usize,
}

impl<E: Exponent> LebesguePair<E> {
    pub fn new(x: E, y: E, d: usize) -> Result<Self, RegionError> {
        if !(d == 2 || d == 3) {
            return Err(RegionError::BadDimension(d));
        }
        let (zero, one) = (E::zero(), E::one());
        if !(x >= zero && x <= one && y >= zero && y <= one) {
            return Err(RegionError::OutOfSquare);
        }
        Ok(Self { x, y, d })
    }

    /// The pair `(1 - y, 1 - x)` of the dual exponents.
    pub fn dual(&self) -> Self {
        Self { x: E::one() - self.y, y: E::one() - self.x, d: self.d }
    }

    fn dim(&self) -> E {
        int(self.d as i64)
    }
}

/// `max{0, 1 - (d+1)/2 (x - y), (d+1)/2 - d x, d y - (d-1)/2}`.
pub fn gamma<E: Exponent>(pair: &LebesguePair<E>) -> E {
    let d = pair.dim();
    let two = int::<E>(2);
    let half_dp1 = (d + E::one()) / two;
    let t1 = E::one() - half_dp1 * (pair.x - pair.y);
    let t2 = half_dp1 - d * pair.x;
    let t3 = d * pair.y - (d - E::one()) / two;
    max(max(E::zero(), t1), max(t2, t3))
}

/// `1 - d (x - y)`.
pub fn alpha<E: Exponent>(pair: &LebesguePair<E>) -> E {
    E::one() - pair.dim() * (pair.x - pair.y)
}

/// Admissible sets of Lebesgue pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SetId {
    /// `0 <= x - y <= 1/d` minus `(1, (d-1)/d)` and `(1/d, 0)`.
    R0Half,
    /// `R_0^1(d)` with `2/(d+1) <= x - y <= 2/d`, `x > (d+1)/(2d)`, `y < (d-1)/(2d)`.
    R1,
    /// `x - y >= 2/(d+1)`, `x > (d+1)/(2d)`, `y < (d-1)/(2d)`.
    P,
}

/// `{0 <= x - y <= s/d} \ {(1, (d-s)/d), (s/d, 0)}`.
fn r0<E: Exponent>(pair: &LebesguePair<E>, s: E) -> bool {
    let d = pair.dim();
    let diff = pair.x - pair.y;
    let inside = diff >= E::zero() && diff <= s / d;
    let excluded = (pair.x == E::one() && pair.y == (d - s) / d) || (pair.x == s / d && pair.y == E::zero());
    inside && !excluded
}

fn p_set<E: Exponent>(pair: &LebesguePair<E>) -> bool {
    let d = pair.dim();
    let two = int::<E>(2);
    pair.x - pair.y >= two / (d + E::one())
        && pair.x > (d + E::one()) / (two * d)
        && pair.y < (d - E::one()) / (two * d)
}

/// Exact membership test.
pub fn membership<E: Exponent>(pair: &LebesguePair<E>, set: SetId) -> bool {
    let two = int::<E>(2);
    match set {
        SetId::R0Half => r0(pair, E::one()),
        SetId::P => p_set(pair),
        SetId::R1 => r0(pair, two) && p_set(pair) && pair.x - pair.y <= two / pair.dim(),
    }
}

/// Distance notion in `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KappaVariant {
    /// `dist(w, R) = |Im w|`.
    RealAxis,
    /// `dist(w, [0, inf))`, for the half-Laplacian resolvent.
    Ray,
}

fn float_pair<T: Real>(pair: &LebesguePair<T>) -> (T, T) {
    (gamma(pair), alpha(pair))
}

/// `|w|^{-alpha + gamma} dist(w)^{-gamma}`.
pub fn kappa<T: Real>(pair: &LebesguePair<T>, omega: Complex<T>, variant: KappaVariant) -> Result<T, RegionError> {
    let dist = match variant {
        KappaVariant::RealAxis => omega.im.abs(),
        KappaVariant::Ray => {
            if omega.re >= T::zero() {
                omega.im.abs()
            } else {
                omega.norm()
            }
        }
    };
    if dist == T::zero() {
        return Err(RegionError::OnSingularSet(format!("{omega}")));
    }
    let (g, a) = float_pair(pair);
    Ok(omega.norm().powf(g - a) * dist.powf(-g))
}

/// Parameters of the uniform-estimate region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionQuery<T> {
    pub pair: LebesguePair<T>,
    pub ell: T,
    /// Constant of the resolvent estimate; `None` uses 1 and flags it.
    pub constant: Option<T>,
    pub t: T,
}

impl<T: Real> RegionQuery<T> {
    pub fn new(pair: LebesguePair<T>, ell: T, constant: Option<T>, t: T) -> Result<Self, RegionError> {
        if !(ell > T::zero()) {
            return Err(RegionError::BadParameter { name: "ell", value: ell.as_f64() });
        }
        if let Some(c) = constant {
            if !(c > T::zero()) {
                return Err(RegionError::BadParameter { name: "C", value: c.as_f64() });
            }
        }
        if !(t > T::zero() && t < T::one()) {
            return Err(RegionError::BadParameter { name: "t", value: t.as_f64() });
        }
        Ok(Self { pair, ell, constant, t })
    }
}

/// `kappa(w) <= l` for non-real `w`.
pub fn z_region<T: Real>(query: &RegionQuery<T>, omega: Complex<T>) -> Result<bool, RegionError> {
    Ok(kappa(&query.pair, omega, KappaVariant::RealAxis)? <= query.ell)
}

/// Shape of the boundary of `Z(l)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BoundaryKind<T> {
    /// `alpha != 0`: the curve `|w| = (l sin^gamma(theta))^{-1/alpha}`.
    Curve,
    /// `alpha = 0`, `gamma > 0`: the lines `|Im w| = slope |w|`.
    Cone { slope: T },
    /// `alpha = 0`, `gamma = 0`, `l >= 1`: every non-real `w` belongs to the region.
    Everything,
}

/// Boundary polylines of `Z(l)` as points `[Re w, Im w]`, one polyline per
/// connected branch, built from the upper-right quarter by exact reflection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZBoundary<T> {
    pub kind: BoundaryKind<T>,
    pub branches: Vec<Vec<[T; 2]>>,
}

/// Traces `kappa = l` in polar form with `resolution` samples per quarter, out to `radius_max`.
pub fn z_boundary<T: Real>(query: &RegionQuery<T>, resolution: usize, radius_max: T) -> Result<ZBoundary<T>, RegionError> {
    let (g, a) = float_pair(&query.pair);
    let ell = query.ell;
    let res = resolution.max(2);
    if a == T::zero() {
        if ell < T::one() {
            return Err(RegionError::EmptyRegion(ell.as_f64()));
        }
        if g == T::zero() {
            return Ok(ZBoundary { kind: BoundaryKind::Everything, branches: Vec::new() });
        }
        // |sin theta| = l^{-1/gamma}
        let s = ell.powf(-T::one() / g);
        let c = (T::one() - s * s).max(T::zero()).sqrt();
        let quarter: Vec<[T; 2]> = (0..res)
            .map(|k| {
                let r = radius_max * T::from_usize_lossy(k + 1) / T::from_usize_lossy(res);
                [r * c, r * s]
            })
            .collect();
        return Ok(ZBoundary { kind: BoundaryKind::Cone { slope: s }, branches: reflect_rays(&quarter) });
    }
    // r(theta) = (l sin^gamma theta)^{-1/alpha}; keep the part with r <= radius_max.
    let radius = |theta: T| (ell * theta.sin().powf(g)).powf(-T::one() / a);
    let half_pi = T::FRAC_PI_2();
    let theta_min = if g > T::zero() && a > T::zero() {
        // smallest angle with r(theta) <= radius_max
        let s = (radius_max.powf(-a) / ell).powf(T::one() / g);
        if s >= T::one() {
            half_pi
        } else {
            s.asin()
        }
    } else {
        T::zero()
    };
    let quarter: Vec<[T; 2]> = (0..res)
        .map(|k| {
            // from theta_min (or just above 0) up to pi/2 inclusive
            let f = T::from_usize_lossy(k) / T::from_usize_lossy(res - 1);
            let lo = if theta_min > T::zero() { theta_min } else { half_pi / T::from_usize_lossy(res * 4) };
            let th = lo + (half_pi - lo) * f;
            let r = radius(th).min(radius_max);
            [r * th.cos(), r * th.sin()]
        })
        .collect();
    Ok(ZBoundary { kind: BoundaryKind::Curve, branches: reflect_curve(&quarter) })
}

/// Upper-right rays `(x, y)` mirrored into the four quadrants.
fn reflect_rays<T: Real>(quarter: &[[T; 2]]) -> Vec<Vec<[T; 2]>> {
    let map = |sx: T, sy: T| quarter.iter().map(|p| [sx * p[0], sy * p[1]]).collect::<Vec<_>>();
    let one = T::one();
    vec![map(one, one), map(-one, one), map(-one, -one), map(one, -one)]
}

/// Quarter curve from near the real axis up to the imaginary axis, joined
/// with its mirror image into the upper and lower branches.
fn reflect_curve<T: Real>(quarter: &[[T; 2]]) -> Vec<Vec<[T; 2]>> {
    let mut upper: Vec<[T; 2]> = quarter.iter().map(|p| [p[0], p[1]]).collect();
    upper.extend(quarter.iter().rev().skip(1).map(|p| [-p[0], p[1]]));
    let lower = upper.iter().map(|p| [p[0], -p[1]]).collect();
    vec![upper, lower]
}

/// Outcome of the eigenvalue enclosure test.
#[derive(Clone, Debug, Serialize)]
pub struct EnclosureReport<T> {
    /// `pq / (q - p)`.
    pub exponent: T,
    pub potential_norm: T,
    /// `t / (C l)`.
    pub threshold: T,
    pub satisfied: bool,
    pub constant: T,
    pub constant_is_default: bool,
    pub r0_half: bool,
    pub r1: bool,
    pub p_set: bool,
    pub boundary: Option<ZBoundary<T>>,
    pub statement: String,
}

/// Relative slack allowed in `|V| <= t/(C l)` to absorb rounding in the norm.
pub const ENCLOSURE_RTOL: f64 = 1e-12;

/// Checks `|V|_{pq/(q-p)} <= t (C l)^{-1}`; if it holds, eigenvalues of the
/// perturbed operator lie outside `Z(l)`.
pub fn eigenvalue_enclosure<T: Real>(
    query: &RegionQuery<T>,
    potential: &Field<T>,
    p: T,
    q: T,
) -> Result<EnclosureReport<T>, RegionError> {
    if !(q > p) {
        return Err(RegionError::ExponentOrder { p: p.as_f64(), q: q.as_f64() });
    }
    let exponent = if q.is_infinite() { p } else { p * q / (q - p) };
    let norm = lebesgue_norm(potential, exponent);
    let constant = query.constant.unwrap_or_else(T::one);
    let threshold = query.t / (constant * query.ell);
    let satisfied = norm <= threshold * (T::one() + T::lit(ENCLOSURE_RTOL));
    let boundary = z_boundary(query, 64, T::lit(10.0) * query.ell.max(T::one())).ok();
    let statement = if satisfied {
        format!(
            "|V|_{:.6} = {:.6e} <= {:.6e}: eigenvalues lie in the complement of Z(l = {}){}",
            exponent.as_f64(),
            norm.as_f64(),
            threshold.as_f64(),
            query.ell.as_f64(),
            if query.constant.is_none() { " (C = 1 is a placeholder, not a proven constant)" } else { "" }
        )
    } else {
        format!(
            "|V|_{:.6} = {:.6e} > {:.6e}: no enclosure",
            exponent.as_f64(),
            norm.as_f64(),
            threshold.as_f64()
        )
    };
    Ok(EnclosureReport {
        exponent,
        potential_norm: norm,
        threshold,
        satisfied,
        constant,
        constant_is_default: query.constant.is_none(),
        r0_half: membership(&query.pair, SetId::R0Half),
        r1: membership(&query.pair, SetId::R1),
        p_set: membership(&query.pair, SetId::P),
        boundary,
        statement,
    })
}

/// Input families for norm-scaling probes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ProbeFamily<T> {
    /// Lattice modes of the given grid within `half_width` of the sphere of
    /// radius `Re w`, with a transverse polarization.
    Annulus { half_width: T },
    /// Gaussian cap on the sphere around the last axis: thickness `tau = dist(w, R)`,
    /// angular width `(tau / |w|)^{1/2}`; the grid adapts to each sample.
    Knapp,
    /// Gaussian shell of thickness `tau = dist(w, R)` on the sphere of radius `|Re w|`.
    Radial,
}

/// Parameter the log-log fit runs against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeAxis {
    Distance,
    Modulus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeSample<T> {
    pub omega_re: T,
    pub omega_im: T,
    pub parameter: T,
    pub input_norm: T,
    pub output_norm: T,
    pub ratio: T,
    pub grid: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of the log-log fit.
    pub residual: T,
    /// `-gamma` for the distance axis, `-alpha` for the modulus axis.
    pub predicted: T,
    pub samples: Vec<ProbeSample<T>>,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn loglog_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n = T::from_usize_lossy(xs.len());
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().fold(T::zero(), |a, v| a + *v) / n;
    let my = ly.iter().fold(T::zero(), |a, v| a + *v) / n;
    let sxx = lx.iter().fold(T::zero(), |a, v| a + (*v - mx) * (*v - mx));
    let sxy = lx.iter().zip(&ly).fold(T::zero(), |a, (u, v)| a + (*u - mx) * (*v - my));
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss = lx.iter().zip(&ly).fold(T::zero(), |a, (u, v)| {
        let e = *v - (icpt + slope * *u);
        a + e * e
    });
    (slope, icpt, (rss / n).sqrt())
}

const TAIL: f64 = 6.5;

/// Largest adaptive probe grid, in lattice points.
pub const PROBE_POINT_LIMIT: usize = 1 << 22;

fn checked_grid<T: Real>(n: &[usize], len: &[T]) -> Result<Grid<T>, RegionError> {
    let points: usize = n.iter().product();
    if points > PROBE_POINT_LIMIT {
        return Err(RegionError::ProbeTooLarge { points, limit: PROBE_POINT_LIMIT });
    }
    Ok(Grid::new(n, len)?)
}

fn next_pow2(x: f64) -> usize {
    (x.ceil().max(4.0) as usize).next_power_of_two()
}

/// Unit direction of the cap axis and the transverse polarization of the currents.
fn cap_frame(dim: usize) -> (usize, Vec<Complex<f64>>) {
    if dim == 2 {
        (1, vec![Complex::new(1.0, 0.0), Complex::zero(), Complex::zero()])
    } else {
        let mut v = vec![Complex::zero(); 6];
        v[0] = Complex::new(1.0, 0.0);
        (2, v)
    }
}

/// Divergence-free polarization for isotropic-in-angle families.
fn transverse_polarization<T: Real>(xi: &[T; 3], dim: usize, out: &mut [Complex<T>]) {
    let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    out.iter_mut().for_each(|v| *v = Complex::zero());
    if r == T::zero() {
        return;
    }
    if dim == 2 {
        out[0] = Complex::new(-xi[1] / r, T::zero());
        out[1] = Complex::new(xi[0] / r, T::zero());
    } else {
        // xi_hat x (1, 1, 1) / sqrt 3
        let s = T::one() / T::lit(3.0).sqrt();
        let u = [xi[0] / r, xi[1] / r, xi[2] / r];
        out[0] = Complex::new((u[1] - u[2]) * s, T::zero());
        out[1] = Complex::new((u[2] - u[0]) * s, T::zero());
        out[2] = Complex::new((u[0] - u[1]) * s, T::zero());
    }
}

/// Currents with prescribed continuum density sampled on the lattice of `grid`.
fn lattice_currents<T: Real>(
    grid: &Grid<T>,
    ncomp: usize,
    density: impl Fn(&[T; 3], &mut [Complex<T>]),
) -> Field<T> {
    let n = grid.len();
    let mut spec = Field::zeros(grid, ncomp);
    let inv_dv = T::one() / grid.cell_volume();
    let mut buf = vec![Complex::zero(); ncomp];
    for k in 0..n {
        let xi = grid.wavevector(k);
        density(&xi, &mut buf);
        for c in 0..ncomp {
            spec.data_mut()[c * n + k] = buf[c] * inv_dv;
        }
    }
    spec.to_physical()
}

/// One probe input together with the grid it lives on.
fn family_input<T: Real>(
    family: ProbeFamily<T>,
    omega: Complex<T>,
    mat: &Material<T>,
    base: &Grid<T>,
) -> Result<Field<T>, RegionError> {
    let dim = mat.dim();
    let ncomp = mat.components();
    let flavor: NormFlavor<T> = norm_families(mat)[0];
    let tau = omega.im.abs();
    let radius = omega.re.abs();
    match family {
        ProbeFamily::Annulus { half_width } => Ok(lattice_currents(base, ncomp, |xi, out| {
            let r = flavor.norm(&xi[..dim]);
            if (r - radius).abs() <= half_width {
                transverse_polarization(xi, dim, out);
            } else {
                out.iter_mut().for_each(|v| *v = Complex::zero());
            }
        })),
        ProbeFamily::Knapp => {
            let (axis, pol) = cap_frame(dim);
            let mut unit = [T::zero(); 3];
            unit[axis] = T::one();
            let center = radius / flavor.norm(&unit[..dim]);
            let width = (tau * center).sqrt();
            let dk_par = tau / T::lit(2.0);
            let dk_perp = width / T::lit(3.0);
            let n_par = next_pow2(2.0 * (center + T::lit(TAIL) * tau).as_f64() / dk_par.as_f64());
            let n_perp = next_pow2(2.0 * TAIL * 3.0);
            let two_pi = T::lit(2.0) * T::PI();
            let mut n = vec![n_perp; dim];
            let mut len = vec![two_pi / dk_perp; dim];
            n[axis] = n_par;
            len[axis] = two_pi / dk_par;
            let grid = checked_grid(&n, &len)?;
            let pol: Vec<Complex<T>> = pol.iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect();
            Ok(lattice_currents(&grid, ncomp, |xi, out| {
                let mut perp = T::zero();
                for a in (0..dim).filter(|&a| a != axis) {
                    perp = perp + xi[a] * xi[a];
                }
                let par = xi[axis] - center;
                let g = (-(par * par) / (T::lit(2.0) * tau * tau) - perp / (T::lit(2.0) * width * width)).exp();
                for (o, p) in out.iter_mut().zip(&pol) {
                    *o = *p * g;
                }
            }))
        }
        ProbeFamily::Radial => {
            let dk = tau / T::lit(2.0);
            let stretch = T::one() / smallest_axis_scale(&flavor, dim);
            let reach = (radius + T::lit(TAIL) * tau) * stretch;
            let n1 = next_pow2(2.0 * reach.as_f64() / dk.as_f64());
            let grid = checked_grid(&vec![n1; dim], &vec![T::lit(2.0) * T::PI() / dk; dim])?;
            Ok(lattice_currents(&grid, ncomp, |xi, out| {
                let r = flavor.norm(&xi[..dim]);
                let g = (-(r - radius) * (r - radius) / (T::lit(2.0) * tau * tau)).exp();
                transverse_polarization(xi, dim, out);
                out.iter_mut().for_each(|v| *v = *v * g);
            }))
        }
    }
}

/// Smallest `|e_a|_G` over coordinate axes (norm families here are diagonal or 2x2).
fn smallest_axis_scale<T: Real>(f: &NormFlavor<T>, dim: usize) -> T {
    let g = f.metric();
    if dim == 2 {
        let tr = g[0][0] + g[1][1];
        let disc = (tr * tr / T::lit(4.0) - f.det()).max(T::zero()).sqrt();
        (tr / T::lit(2.0) - disc).sqrt()
    } else {
        g[0][0].min(g[1][1]).min(g[2][2]).sqrt()
    }
}

/// Evaluates `|solve(w, J_w)|_q / |J_w|_p` over `omegas` and fits the log-log slope
/// against `dist(w, R)` or `|w|`.
pub fn norm_scaling_probe<T: Real>(
    pair: &LebesguePair<T>,
    mat: &Material<T>,
    family: ProbeFamily<T>,
    omegas: &[Complex<T>],
    axis: ProbeAxis,
    base: &Grid<T>,
) -> Result<ProbeFit<T>, RegionError> {
    if omegas.len() < 2 {
        return Err(RegionError::TooFewSamples { needed: 2, got: omegas.len() });
    }
    let p = T::one() / pair.x;
    let q = T::one() / pair.y;
    let mut samples = Vec::with_capacity(omegas.len());
    for &w in omegas {
        if w.im == T::zero() {
            return Err(RegionError::OnSingularSet(format!("{w}")));
        }
        let j = family_input(family, w, mat, base)?;
        let u = solve(w, &j, mat)?;
        let nj = lebesgue_norm(&j, p);
        let nu = lebesgue_norm(&u, q);
        let parameter = match axis {
            ProbeAxis::Distance => w.im.abs(),
            ProbeAxis::Modulus => w.norm(),
        };
        samples.push(ProbeSample {
            omega_re: w.re,
            omega_im: w.im,
            parameter,
            input_norm: nj,
            output_norm: nu,
            ratio: nu / nj,
            grid: j.grid().n().to_vec(),
        });
    }
    let xs: Vec<T> = samples.iter().map(|s| s.parameter).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.ratio).collect();
    let (slope, intercept, residual) = loglog_fit(&xs, &ys);
    let predicted = match axis {
        ProbeAxis::Distance => -gamma(pair),
        ProbeAxis::Modulus => -alpha(pair),
    };
    Ok(ProbeFit { slope, intercept, residual, predicted, samples })
}

/// Largest lattice-sphere radius `|xi_k|_G` not exceeding `target`, so that an
/// annulus around it contains modes in exact resonance.
pub fn lattice_resonance<T: Real>(grid: &Grid<T>, mat: &Material<T>, target: T) -> T {
    let flavor = norm_families(mat)[0];
    let dim = grid.dim();
    (1..grid.len())
        .map(|k| flavor.norm(&grid.wavevector(k)[..dim]))
        .filter(|r| *r <= target)
        .fold(T::zero(), T::max)
}

/// Samples `w` along a ray `w = s * w0` for the given moduli.
pub fn ray_samples<T: Real>(direction: Complex<T>, moduli: &[T]) -> Vec<Complex<T>> {
    let u = direction / direction.norm();
    moduli.iter().map(|m| u * *m).collect()
}

/// Samples at fixed `|w|` with prescribed distances to the real axis.
pub fn distance_samples<T: Real>(modulus: T, distances: &[T]) -> Vec<Complex<T>> {
    distances
        .iter()
        .map(|d| Complex::new((modulus * modulus - *d * *d).max(T::zero()).sqrt(), *d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(a: i64, b: i64) -> Q {
        Ratio::new(a, b)
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&LebesguePair::new(q(1, 2), q(1, 2), 2).unwrap()), q(1, 1));
        assert_eq!(gamma(&LebesguePair::new(q(3, 4), q(1, 4), 3).unwrap()), q(0, 1));
    }

    #[test]
    fn membership_witnesses() {
        let p = LebesguePair::new(q(3, 4), q(1, 4), 3).unwrap();
        assert!(membership(&p, SetId::P));
        let e = LebesguePair::new(q(1, 2), q(0, 1), 2).unwrap();
        assert!(!membership(&e, SetId::R0Half));
        let inner = LebesguePair::new(q(1, 2), q(1, 4), 2).unwrap();
        assert!(membership(&inner, SetId::R0Half));
    }

    #[test]
    fn kappa_examples() {
        let p = LebesguePair::new(0.5f64, 0.5, 2).unwrap();
        let k = kappa(&p, Complex::new(3.0, -0.25), KappaVariant::RealAxis).unwrap();
        assert!((k - 4.0).abs() < 1e-14);
        let p = LebesguePair::new(0.75f64, 0.25, 3).unwrap();
        let k = kappa(&p, Complex::new(0.0, 4.0), KappaVariant::RealAxis).unwrap();
        assert!((k - 2.0).abs() < 1e-14);
        assert!(kappa(&p, Complex::new(1.0, 0.0), KappaVariant::RealAxis).is_err());
        assert!(kappa(&p, Complex::new(-1.0, 0.0), KappaVariant::Ray).is_ok());
    }

    #[test]
    fn fit_recovers_power_law() {
        let xs: Vec<f64> = (1..8).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.7)).collect();
        let (s, _, r) = loglog_fit(&xs, &ys);
        assert!((s + 0.7).abs() < 1e-12 && r < 1e-12);
    }
}
