//! Limiting absorption at real frequencies.
//!
//! Sources live on the whole space and are described by their spectral
//! density `J^(xi)`, with `J(x) = (2 pi)^{-d} int J^(xi) e^{i x xi} dxi`.
//! Outputs are evaluated at the points of a [`Grid`] by polar quadrature
//! `xi = rho * e / |e|_G` over Euclidean unit directions `e`, so that each
//! characteristic sphere `{|xi|_G = |w|}` sits at the fixed radius `rho = |w|`.
//!
//! Two independent routes compute `P_+-(w) J`:
//! * `Extrapolate`: `p(w +- i delta, xi)^{-1} J^` by LU at each node, radial
//!   panels graded around the poles, Richardson extrapolation in `delta`.
//! * `Quadrature`: the Sokhotsky split of the closed-form inverse, with a
//!   paired principal-value rule and an exact surface rule on the spheres.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::SymbolMatrix;
use crate::multiplier::{norm_families, resolvent_matrix, sokhotsky_split, MultiplierError, Side};
use crate::quadrature::{richardson, GaussRule};
use crate::region::{norm_scaling_probe, LebesguePair, ProbeAxis, ProbeFamily, ProbeFit, RegionError};
use crate::scalar::Real;
use crate::spectral::{forward_operator, solve, Field, Grid, SpectralError};
use crate::symbol::{symbol_p, Material, NormFlavor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LapError {
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("cutoff needs 0 < r_in < r_out, got r_in = {r_in}, r_out = {r_out}")]
    BadCutoff { r_in: f64, r_out: f64 },
    #[error("cutoff plateau r_in = {r_in} does not contain the characteristic sphere (needs > {needed})")]
    CutoffTooSmall { r_in: f64, needed: f64 },
    #[error("frequency must be real and nonzero, got {0}")]
    ZeroFrequency(f64),
    #[error("absorption parameter must lie in (0, 1/2), got {0}")]
    BadDelta(f64),
    #[error("quadrature did not converge: node doubling changed the result by {change:e} (tolerance {tol:e})")]
    QuadratureNotConverged { change: f64, tol: f64 },
    #[error("extrapolation and quadrature disagree: relative difference {relative:e} exceeds {tol:e}")]
    MethodsDisagree { relative: f64, tol: f64 },
    #[error("source has dimension {source_dim} and {source_ncomp} components; expected {dim} and {ncomp}")]
    SourceMismatch { source_dim: usize, source_ncomp: usize, dim: usize, ncomp: usize },
}

fn smooth_step<T: Real>(t: T) -> T {
    let f = |s: T| if s > T::zero() { (-T::one() / s).exp() } else { T::zero() };
    if t <= T::zero() {
        T::zero()
    } else if t >= T::one() {
        T::one()
    } else {
        let a = f(t);
        a / (a + f(T::one() - t))
    }
}

/// Smooth radial bump: 1 on `|xi| <= r_in`, 0 on `|xi| >= r_out`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec<T> {
    pub r_in: T,
    pub r_out: T,
}

impl<T: Real> CutoffSpec<T> {
    pub fn new(r_in: T, r_out: T) -> Result<Self, LapError> {
        if !(r_in > T::zero() && r_out > r_in && r_out.is_finite()) {
            return Err(LapError::BadCutoff { r_in: r_in.as_f64(), r_out: r_out.as_f64() });
        }
        Ok(Self { r_in, r_out })
    }

    /// Plateau just past the largest characteristic sphere of `mat` at `|w|`.
    pub fn enclosing(omega: T, mat: &Material<T>, margin: T) -> Self {
        let r = sphere_extent(omega.abs(), mat) * (T::one() + margin);
        Self { r_in: r, r_out: r * T::lit(2.0) }
    }

    #[inline]
    pub fn value(&self, radius: T) -> T {
        T::one() - smooth_step((radius - self.r_in) / (self.r_out - self.r_in))
    }

    #[inline]
    pub fn at(&self, xi: &[T; 3]) -> T {
        self.value(euclid(xi))
    }
}

#[inline]
fn euclid<T: Real>(v: &[T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Largest Euclidean radius reached by any characteristic sphere at `|w|`.
pub fn sphere_extent<T: Real>(omega_abs: T, mat: &Material<T>) -> T {
    norm_families(mat)
        .iter()
        .map(|f| omega_abs / smallest_eigenvalue(f).sqrt())
        .fold(T::zero(), T::max)
}

fn smallest_eigenvalue<T: Real>(f: &NormFlavor<T>) -> T {
    let g = f.metric();
    if f.dim() == 2 {
        let tr = g[0][0] + g[1][1];
        let det = f.det();
        let disc = (tr * tr / T::lit(4.0) - det).max(T::zero()).sqrt();
        tr / T::lit(2.0) - disc
    } else {
        // Norm families in 3D are diagonal.
        g[0][0].min(g[1][1]).min(g[2][2])
    }
}

/// Spectral density of a whole-space source.
pub trait SpectralSource<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn ncomp(&self) -> usize;
    /// Writes `J^(xi)` into `out` (length `ncomp`).
    fn spectrum(&self, xi: &[T; 3], out: &mut [Complex<T>]);
    /// Euclidean radius outside which the density is negligible.
    fn support_radius(&self) -> T;
    /// Smallest length scale of spectral features, used to size radial panels.
    fn feature_scale(&self) -> T;
    /// Closed-form physical samples, when available.
    fn physical(&self, _x: &[T; 3]) -> Option<Vec<Complex<T>>> {
        None
    }
}

/// One Gaussian bump `amplitude * exp(-|xi - center|^2 / (2 width^2)) * e^{-i xi . position}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump<T> {
    pub center: [T; 3],
    pub width: T,
    pub position: [T; 3],
    pub amplitude: Vec<Complex<T>>,
}

/// Sum of Gaussian spectral bumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket<T> {
    pub dim: usize,
    pub ncomp: usize,
    pub bumps: Vec<Bump<T>>,
}

impl<T: Real> GaussianPacket<T> {
    pub fn new(dim: usize, ncomp: usize) -> Self {
        Self { dim, ncomp, bumps: Vec::new() }
    }

    pub fn with_bump(mut self, center: [T; 3], width: T, position: [T; 3], amplitude: Vec<Complex<T>>) -> Self {
        assert_eq!(amplitude.len(), self.ncomp, "amplitude length must equal component count");
        self.bumps.push(Bump { center, width, position, amplitude });
        self
    }
}

impl<T: Real> SpectralSource<T> for GaussianPacket<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn ncomp(&self) -> usize {
        self.ncomp
    }

    fn spectrum(&self, xi: &[T; 3], out: &mut [Complex<T>]) {
        out.iter_mut().for_each(|v| *v = Complex::zero());
        for b in &self.bumps {
            let mut r2 = T::zero();
            let mut phase = T::zero();
            for a in 0..self.dim {
                let d = xi[a] - b.center[a];
                r2 = r2 + d * d;
                phase = phase - xi[a] * b.position[a];
            }
            let g = (-r2 / (T::lit(2.0) * b.width * b.width)).exp();
            let f = Complex::from_polar(g, phase);
            for (o, a) in out.iter_mut().zip(&b.amplitude) {
                *o = *o + *a * f;
            }
        }
    }

    fn support_radius(&self) -> T {
        self.bumps
            .iter()
            .map(|b| euclid(&b.center) + T::lit(9.0) * b.width)
            .fold(T::zero(), T::max)
    }

    fn feature_scale(&self) -> T {
        self.bumps.iter().map(|b| b.width).fold(T::infinity(), T::min)
    }

    fn physical(&self, x: &[T; 3]) -> Option<Vec<Complex<T>>> {
        let d = self.dim as i32;
        let two_pi = T::lit(2.0) * T::PI();
        let mut out = vec![Complex::zero(); self.ncomp];
        for b in &self.bumps {
            let mut r2 = T::zero();
            let mut phase = T::zero();
            for a in 0..self.dim {
                let y = x[a] - b.position[a];
                r2 = r2 + y * y;
                phase = phase + b.center[a] * y;
            }
            let scale = (b.width * b.width / two_pi).powi(d).sqrt();
            let f = Complex::from_polar(scale * (-b.width * b.width * r2 / T::lit(2.0)).exp(), phase);
            for (o, a) in out.iter_mut().zip(&b.amplitude) {
                *o = *o + *a * f;
            }
        }
        Some(out)
    }
}

/// The source `conj(J(x))`, whose density is `conj(J^(-xi))`.
pub struct ConjugateSource<'a, T: Real>(pub &'a dyn SpectralSource<T>);

impl<T: Real> SpectralSource<T> for ConjugateSource<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn ncomp(&self) -> usize {
        self.0.ncomp()
    }

    fn spectrum(&self, xi: &[T; 3], out: &mut [Complex<T>]) {
        self.0.spectrum(&[-xi[0], -xi[1], -xi[2]], out);
        out.iter_mut().for_each(|v| *v = v.conj());
    }

    fn support_radius(&self) -> T {
        self.0.support_radius()
    }

    fn feature_scale(&self) -> T {
        self.0.feature_scale()
    }

    fn physical(&self, x: &[T; 3]) -> Option<Vec<Complex<T>>> {
        self.0.physical(x).map(|v| v.into_iter().map(|z| z.conj()).collect())
    }
}

/// Grid samples read as the band-limited function taking these values on the
/// lattice inside the box and zero outside, with a smooth roll-off over the
/// upper half of each Nyquist band.
pub struct SampledField<T: Real> {
    field: Field<T>,
    nyquist: [T; 3],
}

impl<T: Real> SampledField<T> {
    pub fn new(field: Field<T>) -> Self {
        let g = field.grid();
        let mut nyquist = [T::zero(); 3];
        for (a, ny) in nyquist.iter_mut().enumerate().take(g.dim()) {
            *ny = T::PI() / g.spacing(a);
        }
        Self { field, nyquist }
    }

    fn window(&self, xi: &[T; 3]) -> T {
        let half = T::lit(0.5);
        (0..self.field.grid().dim()).fold(T::one(), |w, a| {
            let t = xi[a].abs() / self.nyquist[a];
            w * (T::one() - smooth_step((t - half) / half))
        })
    }
}

impl<T: Real> SpectralSource<T> for SampledField<T> {
    fn dim(&self) -> usize {
        self.field.grid().dim()
    }

    fn ncomp(&self) -> usize {
        self.field.ncomp()
    }

    fn spectrum(&self, xi: &[T; 3], out: &mut [Complex<T>]) {
        let w = self.window(xi);
        out.iter_mut().for_each(|v| *v = Complex::zero());
        if w == T::zero() {
            return;
        }
        let g = self.field.grid();
        let n = g.len();
        let dv = g.cell_volume();
        for k in 0..n {
            let x = g.point(k);
            let ph = -(x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2]);
            let e = Complex::from_polar(w * dv, ph);
            for (c, o) in out.iter_mut().enumerate() {
                *o = *o + self.field.data()[c * n + k] * e;
            }
        }
    }

    fn support_radius(&self) -> T {
        euclid(&self.nyquist)
    }

    fn feature_scale(&self) -> T {
        let g = self.field.grid();
        let lmax = g.lengths().iter().fold(T::zero(), |m, l| m.max(*l));
        T::lit(2.0) * T::PI() / lmax
    }
}

/// Discretization controls shared by all whole-space quadratures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LapOptions<T> {
    /// Angles in 2D; azimuthal nodes in 3D (polar nodes are half as many).
    pub angular: usize,
    /// Gauss-Legendre nodes per radial panel.
    pub radial_order: usize,
    /// Upper bound on radial panel width, in Euclidean wavenumber units.
    pub max_panel: T,
    /// Largest absorption parameter of the extrapolation ladder.
    pub delta0: T,
    /// Ladder length: `delta_k = delta0 2^{-k}`, `k < levels`.
    pub levels: usize,
    /// Relative L2 agreement required between the two methods.
    pub agreement_tol: T,
    /// Relative change allowed under node doubling.
    pub convergence_tol: T,
}

impl<T: Real> Default for LapOptions<T> {
    fn default() -> Self {
        Self {
            angular: 64,
            radial_order: 16,
            max_panel: T::lit(0.25),
            delta0: T::lit(0.1),
            levels: 7,
            agreement_tol: T::lit(1e-5),
            convergence_tol: T::lit(1e-8),
        }
    }
}

impl<T: Real> LapOptions<T> {
    /// Same options with twice the radial and angular resolution.
    pub fn refined(&self) -> Self {
        Self { angular: self.angular * 2, max_panel: self.max_panel / T::lit(2.0), ..self.clone() }
    }
}

/// Euclidean unit directions with solid-angle weights.
struct AngularRule<T> {
    dirs: Vec<([T; 3], T)>,
}

impl<T: Real> AngularRule<T> {
    fn new(dim: usize, n: usize, polar_axis: usize) -> Self {
        let two_pi = T::lit(2.0) * T::PI();
        let mut dirs = Vec::new();
        if dim == 2 {
            let w = two_pi / T::from_usize_lossy(n);
            for j in 0..n {
                let t = w * (T::from_usize_lossy(j) + T::lit(0.5));
                dirs.push(([t.cos(), t.sin(), T::zero()], w));
            }
        } else {
            let ntheta = (n / 2).max(4);
            let theta = GaussRule::<T>::new(ntheta);
            let mut tn = Vec::new();
            theta.push_interval(T::zero(), T::PI(), &mut tn);
            let wphi = two_pi / T::from_usize_lossy(n);
            let (p1, p2) = ((polar_axis + 1) % 3, (polar_axis + 2) % 3);
            for (t, wt) in tn {
                for j in 0..n {
                    let ph = wphi * (T::from_usize_lossy(j) + T::lit(0.5));
                    let mut v = [T::zero(); 3];
                    v[polar_axis] = t.cos();
                    v[p1] = t.sin() * ph.cos();
                    v[p2] = t.sin() * ph.sin();
                    dirs.push((v, wt * t.sin() * wphi));
                }
            }
        }
        Self { dirs }
    }
}

fn polar_axis<T: Real>(mat: &Material<T>) -> usize {
    match mat {
        Material::Planar(_) => 0,
        Material::Uniaxial(m) => m.axis.index(),
    }
}

/// One ray of a polar quadrature: `xi = rho * dir`.
struct Ray<T> {
    /// Direction with `|dir|_family = 1`.
    dir: [T; 3],
    /// Euclidean length of `dir`.
    stretch: T,
}

/// Ray through the Euclidean unit direction `unit`, scaled to unit family norm,
/// with the angular Jacobian `|unit|_G^{-d}` of `xi = rho * unit / |unit|_G`.
fn family_ray<T: Real>(family: &NormFlavor<T>, unit: &[T; 3]) -> ([T; 3], T) {
    let s = family.norm(unit);
    ([unit[0] / s, unit[1] / s, unit[2] / s], T::one() / s.powi(family.dim() as i32))
}

/// Polar integration of `(2 pi)^{-d} int value(xi) e^{i x xi} dxi` at every output point.
///
/// `radial(ray)` returns `(rho, w)` pairs whose weights already include any
/// radial kernel; `value(xi, out)` fills `nchan` channels. Returns a
/// point-major vector of length `points.len() * nchan`.
fn polar_integrate<T, R, V>(
    family: &NormFlavor<T>,
    angular: &AngularRule<T>,
    points: &[[T; 3]],
    nchan: usize,
    radial: R,
    value: V,
) -> Result<Vec<Complex<T>>, LapError>
where
    T: Real,
    R: Fn(&Ray<T>) -> Result<Vec<(T, T)>, LapError> + Sync,
    V: Fn(&[T; 3], &mut [Complex<T>]) -> Result<(), LapError> + Sync,
{
    let d = family.dim();
    let norm = T::one() / (T::lit(2.0) * T::PI()).powi(d as i32);
    let mut out = vec![Complex::zero(); points.len() * nchan];
    const BATCH: usize = 64;
    for chunk in angular.dirs.chunks(BATCH) {
        let rays: Vec<Result<(Vec<[T; 3]>, Vec<Complex<T>>), LapError>> = chunk
            .par_iter()
            .map(|(unit, wa)| {
                let (dir, jac) = family_ray(family, unit);
                let ray = Ray { dir, stretch: euclid(&dir) };
                let nodes = radial(&ray)?;
                let mut xis = Vec::with_capacity(nodes.len());
                let mut vals = vec![Complex::zero(); nodes.len() * nchan];
                for (k, (rho, wr)) in nodes.iter().enumerate() {
                    let xi = [dir[0] * *rho, dir[1] * *rho, dir[2] * *rho];
                    let slot = &mut vals[k * nchan..(k + 1) * nchan];
                    value(&xi, slot)?;
                    let w = *wa * *wr * rho.powi(d as i32 - 1) * jac * norm;
                    slot.iter_mut().for_each(|v| *v = *v * w);
                    xis.push(xi);
                }
                Ok((xis, vals))
            })
            .collect();
        let rays = rays.into_iter().collect::<Result<Vec<_>, _>>()?;
        out.par_chunks_mut(nchan).zip(points.par_iter()).for_each(|(acc, x)| {
            for (xis, vals) in &rays {
                for (k, xi) in xis.iter().enumerate() {
                    let ph = x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2];
                    let e = Complex::new(ph.cos(), ph.sin());
                    for c in 0..nchan {
                        acc[c] = acc[c] + vals[k * nchan + c] * e;
                    }
                }
            }
        });
    }
    Ok(out)
}

/// Converts point-major channel data into a component-major field.
fn to_field<T: Real>(grid: &Grid<T>, ncomp: usize, data: &[Complex<T>], offset: usize, stride: usize) -> Field<T> {
    let n = grid.len();
    let mut out = Field::zeros(grid, ncomp);
    for p in 0..n {
        for c in 0..ncomp {
            out.data_mut()[c * n + p] = data[p * stride + offset + c];
        }
    }
    out
}

fn grid_points<T: Real>(grid: &Grid<T>) -> Vec<[T; 3]> {
    (0..grid.len()).map(|k| grid.point(k)).collect()
}

fn max_point_radius<T: Real>(points: &[[T; 3]]) -> T {
    points.iter().map(euclid).fold(T::zero(), T::max)
}

/// Radial panel width along a ray, from the options, the source and the output extent.
fn panel_width<T: Real>(opts: &LapOptions<T>, source: &dyn SpectralSource<T>, xmax: T, ray: &Ray<T>) -> T {
    let osc = T::lit(4.0) / (xmax + T::one());
    opts.max_panel.min(source.feature_scale()).min(osc) / ray.stretch
}

/// Nodes for `p.v. int_lo^hi g(rho) / (c - rho) drho`, with weights carrying the kernel.
/// Pairs `c -+ t` symmetrically so the integrand seen by each pair is smooth.
fn principal_value_nodes<T: Real>(rule: &GaussRule<T>, c: T, hi: T, width: T) -> Vec<(T, T)> {
    let half = (hi - c).min(c);
    let mut out = Vec::new();
    let mut ts = Vec::new();
    rule.push_composite(T::zero(), half, width, &mut ts);
    for (t, w) in ts {
        out.push((c - t, w / t));
        out.push((c + t, -w / t));
    }
    let mut rest = Vec::new();
    rule.push_composite(T::zero(), c - half, width, &mut rest);
    rule.push_composite(c + half, hi, width, &mut rest);
    out.extend(rest.into_iter().map(|(r, w)| (r, w / (c - r))));
    out
}

fn check_inputs<T: Real>(
    omega: T,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    grid: &Grid<T>,
) -> Result<(), LapError> {
    if omega == T::zero() || !omega.is_finite() {
        return Err(LapError::ZeroFrequency(omega.as_f64()));
    }
    if source.dim() != mat.dim() || source.ncomp() != mat.components() {
        return Err(LapError::SourceMismatch {
            source_dim: source.dim(),
            source_ncomp: source.ncomp(),
            dim: mat.dim(),
            ncomp: mat.components(),
        });
    }
    if grid.dim() != mat.dim() {
        return Err(SpectralError::DimensionMismatch { grid: grid.dim(), material: mat.dim() }.into());
    }
    Ok(())
}

fn check_cutoff<T: Real>(omega: T, mat: &Material<T>, cutoff: &CutoffSpec<T>) -> Result<(), LapError> {
    let needed = sphere_extent(omega.abs(), mat);
    if cutoff.r_in <= needed {
        return Err(LapError::CutoffTooSmall { r_in: cutoff.r_in.as_f64(), needed: needed.as_f64() });
    }
    Ok(())
}

/// Scalar reduced operator `beta f^ / (|xi|_flavor - (w +- i delta))`.
#[allow(clippy::too_many_arguments)]
pub fn e_delta<T: Real>(
    source: &dyn SpectralSource<T>,
    omega: T,
    delta: T,
    side: Side,
    cutoff: &CutoffSpec<T>,
    flavor: &NormFlavor<T>,
    grid: &Grid<T>,
    opts: &LapOptions<T>,
) -> Result<Field<T>, LapError> {
    if !(omega > T::zero()) {
        return Err(LapError::ZeroFrequency(omega.as_f64()));
    }
    if !(delta > T::zero() && delta < T::lit(0.5)) {
        return Err(LapError::BadDelta(delta.as_f64()));
    }
    let points = grid_points(grid);
    let xmax = max_point_radius(&points);
    let rule = GaussRule::new(opts.radial_order);
    let ang = AngularRule::new(grid.dim(), opts.angular, 0);
    let z = Complex::new(omega, side.sign::<T>() * delta);
    let data = polar_integrate(
        flavor,
        &ang,
        &points,
        1,
        |ray| {
            let hi = cutoff.r_out.min(source.support_radius()) / ray.stretch;
            let mut nodes = Vec::new();
            let h = panel_width(opts, source, xmax, ray);
            rule.push_graded(T::zero(), hi, &[omega], delta / T::lit(4.0), h, &mut nodes);
            Ok(nodes)
        },
        |xi, out| {
            let mut f = [Complex::zero()];
            source.spectrum(xi, &mut f);
            let r = flavor.norm(xi);
            out[0] = f[0] * cutoff.at(xi) / (Complex::new(r, T::zero()) - z);
            Ok(())
        },
    )?;
    Ok(to_field(grid, 1, &data, 0, 1))
}

fn pv_part_once<T: Real>(
    source: &dyn SpectralSource<T>,
    omega: T,
    cutoff: &CutoffSpec<T>,
    flavor: &NormFlavor<T>,
    points: &[[T; 3]],
    opts: &LapOptions<T>,
) -> Result<Vec<Complex<T>>, LapError> {
    let xmax = max_point_radius(points);
    let rule = GaussRule::new(opts.radial_order);
    let ang = AngularRule::new(flavor.dim(), opts.angular, 0);
    polar_integrate(
        flavor,
        &ang,
        points,
        1,
        |ray| {
            let hi = cutoff.r_out.min(source.support_radius()) / ray.stretch;
            if hi <= omega {
                let mut nodes = Vec::new();
                rule.push_composite(T::zero(), hi, panel_width(opts, source, xmax, ray), &mut nodes);
                return Ok(nodes.into_iter().map(|(r, w)| (r, w / (omega - r))).collect());
            }
            Ok(principal_value_nodes(&rule, omega, hi, panel_width(opts, source, xmax, ray)))
        },
        |xi, out| {
            let mut f = [Complex::zero()];
            source.spectrum(xi, &mut f);
            // 1 / (r - w) = -1 / (w - r); the kernel 1 / (w - r) sits in the weights.
            out[0] = -f[0] * cutoff.at(xi);
            Ok(())
        },
    )
}

/// `p.v. int beta f^ e^{i x xi} / (|xi|_flavor - w) dxi`, with a node-doubling convergence check.
pub fn pv_part<T: Real>(
    source: &dyn SpectralSource<T>,
    omega: T,
    cutoff: &CutoffSpec<T>,
    flavor: &NormFlavor<T>,
    grid: &Grid<T>,
    opts: &LapOptions<T>,
) -> Result<Field<T>, LapError> {
    if !(omega > T::zero()) {
        return Err(LapError::ZeroFrequency(omega.as_f64()));
    }
    let points = grid_points(grid);
    let coarse = pv_part_once(source, omega, cutoff, flavor, &points, opts)?;
    let fine = pv_part_once(source, omega, cutoff, flavor, &points, &opts.refined())?;
    let scale = fine.iter().fold(T::zero(), |m, v| m.max(v.norm())).max(T::min_positive_value());
    let change = coarse.iter().zip(&fine).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())) / scale;
    if change > opts.convergence_tol {
        return Err(LapError::QuadratureNotConverged { change: change.as_f64(), tol: opts.convergence_tol.as_f64() });
    }
    Ok(to_field(grid, 1, &fine, 0, 1))
}

/// Nodes and weights on the flavor sphere `{|xi|_G = w}`. The weights carry the
/// coarea measure `delta(|xi|_G - w) dxi`.
#[derive(Clone, Debug)]
pub struct SurfaceQuadrature<T> {
    pub nodes: Vec<[T; 3]>,
    pub weights: Vec<T>,
    flavor: NormFlavor<T>,
}

impl<T: Real> SurfaceQuadrature<T> {
    pub fn new(flavor: &NormFlavor<T>, omega: T, angular: usize, polar_axis: usize) -> Self {
        let d = flavor.dim();
        let ang = AngularRule::new(d, angular, polar_axis);
        let (nodes, weights) = ang
            .dirs
            .iter()
            .map(|(unit, w)| {
                let (e, jac) = family_ray(flavor, unit);
                ([e[0] * omega, e[1] * omega, e[2] * omega], *w * jac * omega.powi(d as i32 - 1))
            })
            .unzip();
        Self { nodes, weights, flavor: *flavor }
    }

    /// Sum of weights: the coarea measure, `2 pi w / sqrt(det G)` in 2D and `4 pi w^2 / sqrt(det G)` in 3D.
    pub fn total(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, w| a + *w)
    }

    /// Geometric length or area of the sphere: coarea weights times `|grad |xi|_G|`.
    pub fn geometric_measure(&self) -> T {
        let g = self.flavor.metric();
        let d = self.flavor.dim();
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (xi, w)| {
            let r = self.flavor.norm(xi);
            let mut grad2 = T::zero();
            for i in 0..d {
                let gi = (0..d).fold(T::zero(), |s, j| s + g[i][j] * xi[j]) / r;
                grad2 = grad2 + gi * gi;
            }
            acc + *w * grad2.sqrt()
        })
    }
}

/// `+- i pi int beta f^ e^{i x xi} delta(|xi|_flavor - w) dxi`, normalized by `(2 pi)^{-d}`.
#[allow(clippy::too_many_arguments)]
pub fn surface_part<T: Real>(
    source: &dyn SpectralSource<T>,
    omega: T,
    side: Side,
    cutoff: &CutoffSpec<T>,
    flavor: &NormFlavor<T>,
    quad: &SurfaceQuadrature<T>,
    grid: &Grid<T>,
) -> Result<Field<T>, LapError> {
    if !(omega > T::zero()) {
        return Err(LapError::ZeroFrequency(omega.as_f64()));
    }
    let _ = flavor;
    let d = grid.dim() as i32;
    let norm = T::one() / (T::lit(2.0) * T::PI()).powi(d);
    let factor = Complex::new(T::zero(), side.sign::<T>() * T::PI() * norm);
    let vals: Vec<Complex<T>> = quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(xi, w)| {
            let mut f = [Complex::zero()];
            source.spectrum(xi, &mut f);
            f[0] * cutoff.at(xi) * *w * factor
        })
        .collect();
    let points = grid_points(grid);
    let data: Vec<Complex<T>> = points
        .par_iter()
        .map(|x| {
            quad.nodes.iter().zip(&vals).fold(Complex::zero(), |acc, (xi, v)| {
                let ph = x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2];
                acc + *v * Complex::new(ph.cos(), ph.sin())
            })
        })
        .collect();
    Ok(to_field(grid, 1, &data, 0, 1))
}

/// Numerical route to the limiting solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LapMethod {
    Extrapolate,
    Quadrature,
}

#[derive(Clone, Debug)]
pub struct LapSolution<T: Real> {
    pub field: Field<T>,
    pub method: LapMethod,
    /// Extrapolation: last tableau correction. Quadrature: change under node doubling (if requested, else 0).
    pub error_estimate: T,
}

fn apply_left<T: Real>(m: &SymbolMatrix<T>, v: &[Complex<T>], out: &mut [Complex<T>]) {
    m.mul_vec_into(v, out);
}

fn real_symbol<T: Real>(omega: T, xi: &[T; 3], mat: &Material<T>) -> SymbolMatrix<T> {
    symbol_p(Complex::new(omega, T::zero()), &xi[..mat.dim()], mat).expect("dimension checked")
}

/// `P(w +- i delta_k, D)^{-1} J` for the whole ladder, extrapolated to `delta = 0`.
fn extrapolate<T: Real>(
    omega: T,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    side: Side,
    points: &[[T; 3]],
    opts: &LapOptions<T>,
    forward: bool,
) -> Result<(Vec<Complex<T>>, T), LapError> {
    let ncomp = mat.components();
    let levels = opts.levels.max(2);
    let deltas: Vec<T> = (0..levels).map(|k| opts.delta0 / T::lit(2f64.powi(k as i32))).collect();
    let dmin = deltas[levels - 1];
    let families = norm_families(mat);
    let base = families[0];
    let xmax = max_point_radius(points);
    let rule = GaussRule::new(opts.radial_order);
    let ang = AngularRule::new(mat.dim(), opts.angular, polar_axis(mat));
    let w = omega.abs();
    let data = polar_integrate(
        &base,
        &ang,
        points,
        levels * ncomp,
        |ray| {
            let hi = source.support_radius() / ray.stretch;
            let poles: Vec<T> = families.iter().map(|f| w / f.norm(&ray.dir)).collect();
            let h0 = families.iter().fold(T::infinity(), |m, f| m.min(dmin / (T::lit(4.0) * f.norm(&ray.dir))));
            let mut nodes = Vec::new();
            rule.push_graded(T::zero(), hi, &poles, h0, panel_width(opts, source, xmax, ray), &mut nodes);
            Ok(nodes)
        },
        |xi, out| {
            let mut j = vec![Complex::zero(); ncomp];
            source.spectrum(xi, &mut j);
            let xs = &xi[..mat.dim()];
            let pw = forward.then(|| real_symbol(omega, xi, mat));
            for (k, d) in deltas.iter().enumerate() {
                let z = Complex::new(omega, side.sign::<T>() * *d);
                let p = symbol_p(z, xs, mat).expect("dimension checked");
                let lu = p.lu().ok_or(MultiplierError::Singular)?;
                let v = lu.solve(&j);
                let slot = &mut out[k * ncomp..(k + 1) * ncomp];
                match &pw {
                    Some(pw) => apply_left(pw, &v, slot),
                    None => slot.copy_from_slice(&v),
                }
            }
            Ok(())
        },
    )?;
    let np = points.len();
    let ladder: Vec<Vec<Complex<T>>> = (0..levels)
        .map(|k| {
            let mut v = Vec::with_capacity(np * ncomp);
            for p in 0..np {
                v.extend_from_slice(&data[p * levels * ncomp + k * ncomp..p * levels * ncomp + (k + 1) * ncomp]);
            }
            v
        })
        .collect();
    Ok(richardson(&ladder))
}

/// Which pieces of the Sokhotsky assembly to include.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Parts {
    regular: bool,
    principal: bool,
    surface: bool,
    high: bool,
}

impl Parts {
    const ALL: Parts = Parts { regular: true, principal: true, surface: true, high: true };
    const SURFACE: Parts = Parts { regular: false, principal: false, surface: true, high: false };
}

/// `P^loc beta J + P^high (1 - beta) J` assembled from the Sokhotsky split.
#[allow(clippy::too_many_arguments)]
fn quadrature<T: Real>(
    omega: T,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    side: Side,
    cutoff: &CutoffSpec<T>,
    points: &[[T; 3]],
    opts: &LapOptions<T>,
    parts: Parts,
    forward: bool,
) -> Result<Vec<Complex<T>>, LapError> {
    check_cutoff(omega, mat, cutoff)?;
    let ncomp = mat.components();
    let dim = mat.dim();
    let families = norm_families(mat);
    let xmax = max_point_radius(points);
    let rule = GaussRule::new(opts.radial_order);
    let ang = AngularRule::new(dim, opts.angular, polar_axis(mat));
    let euclidean = NormFlavor::euclidean(dim);
    let w = omega.abs();
    let sgn = omega.signum();
    let r_loc = cutoff.r_out.min(source.support_radius());
    let mut total = vec![Complex::zero(); points.len() * ncomp];
    let mut add = |v: Vec<Complex<T>>| total.iter_mut().zip(v).for_each(|(a, b)| *a = *a + b);

    let finish = |xi: &[T; 3], v: Vec<Complex<T>>, out: &mut [Complex<T>]| {
        if forward {
            apply_left(&real_symbol(omega, xi, mat), &v, out);
        } else {
            out.copy_from_slice(&v);
        }
    };

    if parts.regular {
        add(polar_integrate(
            &euclidean,
            &ang,
            points,
            ncomp,
            |ray| {
                let mut nodes = Vec::new();
                rule.push_composite(T::zero(), r_loc, panel_width(opts, source, xmax, ray), &mut nodes);
                Ok(nodes)
            },
            |xi, out| {
                let split = sokhotsky_split(omega, &xi[..dim], mat, side)?;
                let mut j = vec![Complex::zero(); ncomp];
                source.spectrum(xi, &mut j);
                let b = cutoff.at(xi);
                let v: Vec<_> = split.regular.mul_vec(&j).into_iter().map(|z| z * b).collect();
                finish(xi, v, out);
                Ok(())
            },
        )?);
    }

    for (fi, fam) in families.iter().enumerate() {
        let singular_value = |xi: &[T; 3], surface: bool, out: &mut [Complex<T>]| -> Result<(), LapError> {
            let split = sokhotsky_split(omega, &xi[..dim], mat, side)?;
            let mut j = vec![Complex::zero(); ncomp];
            source.spectrum(xi, &mut j);
            let b = cutoff.at(xi);
            let mut m = SymbolMatrix::zeros(ncomp);
            for s in split.singular.iter().filter(|s| s.family == fi) {
                m = m + if surface { s.surface_weight } else { s.pv_weight };
            }
            // Kernel 1/(w - s r) = sgn / (|w| - r) on the singular branch.
            let k = if surface { T::one() } else { sgn };
            let v: Vec<_> = m.mul_vec(&j).into_iter().map(|z| z * (b * k)).collect();
            finish(xi, v, out);
            Ok(())
        };
        if parts.principal {
            add(polar_integrate(
                fam,
                &ang,
                points,
                ncomp,
                |ray| {
                    let hi = r_loc / ray.stretch;
                    Ok(principal_value_nodes(&rule, w, hi, panel_width(opts, source, xmax, ray)))
                },
                |xi, out| singular_value(xi, false, out),
            )?);
        }
        if parts.surface {
            add(polar_integrate(fam, &ang, points, ncomp, |_| Ok(vec![(w, T::one())]), |xi, out| {
                singular_value(xi, true, out)
            })?);
        }
    }

    if parts.high && source.support_radius() > cutoff.r_in {
        add(polar_integrate(
            &euclidean,
            &ang,
            points,
            ncomp,
            |ray| {
                let mut nodes = Vec::new();
                let h = panel_width(opts, source, xmax, ray).min((cutoff.r_out - cutoff.r_in) / T::lit(4.0));
                rule.push_composite(cutoff.r_in, source.support_radius(), h, &mut nodes);
                Ok(nodes)
            },
            |xi, out| {
                let mut j = vec![Complex::zero(); ncomp];
                source.spectrum(xi, &mut j);
                let m = resolvent_matrix(Complex::new(omega, T::zero()), &xi[..dim], mat)?;
                let b = T::one() - cutoff.at(xi);
                let v: Vec<_> = m.mul_vec(&j).into_iter().map(|z| z * b).collect();
                finish(xi, v, out);
                Ok(())
            },
        )?);
    }
    Ok(total)
}

/// Limiting solution `P_+-(w) J` at real `w != 0`, evaluated at the grid points.
#[allow(clippy::too_many_arguments)]
pub fn lap_solve<T: Real>(
    omega: T,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    side: Side,
    method: LapMethod,
    cutoff: &CutoffSpec<T>,
    grid: &Grid<T>,
    opts: &LapOptions<T>,
) -> Result<LapSolution<T>, LapError> {
    check_inputs(omega, source, mat, grid)?;
    let points = grid_points(grid);
    let ncomp = mat.components();
    let (data, err) = match method {
        LapMethod::Extrapolate => extrapolate(omega, source, mat, side, &points, opts, false)?,
        LapMethod::Quadrature => {
            (quadrature(omega, source, mat, side, cutoff, &points, opts, Parts::ALL, false)?, T::zero())
        }
    };
    Ok(LapSolution { field: to_field(grid, ncomp, &data, 0, ncomp), method, error_estimate: err })
}

/// Both methods and their relative L2 difference.
#[derive(Clone, Debug)]
pub struct CrossValidated<T: Real> {
    pub extrapolated: LapSolution<T>,
    pub quadrature: LapSolution<T>,
    pub relative_difference: T,
}

/// Runs both methods; fails with `MethodsDisagree` beyond `opts.agreement_tol`.
#[allow(clippy::too_many_arguments)]
pub fn lap_solve_checked<T: Real>(
    omega: T,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    side: Side,
    cutoff: &CutoffSpec<T>,
    grid: &Grid<T>,
    opts: &LapOptions<T>,
) -> Result<CrossValidated<T>, LapError> {
    let ex = lap_solve(omega, source, mat, side, LapMethod::Extrapolate, cutoff, grid, opts)?;
    let qu = lap_solve(omega, source, mat, side, LapMethod::Quadrature, cutoff, grid, opts)?;
    let rel = relative_l2(&ex.field, &qu.field);
    if !(rel <= opts.agreement_tol) {
        return Err(LapError::MethodsDisagree { relative: rel.as_f64(), tol: opts.agreement_tol.as_f64() });
    }
    Ok(CrossValidated { extrapolated: ex, quadrature: qu, relative_difference: rel })
}

/// Sum of the surface terms of every characteristic sphere for the given side.
#[allow(clippy::too_many_arguments)]
pub fn surface_terms<T: Real>(
    omega: T,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    side: Side,
    cutoff: &CutoffSpec<T>,
    grid: &Grid<T>,
    opts: &LapOptions<T>,
) -> Result<Field<T>, LapError> {
    check_inputs(omega, source, mat, grid)?;
    let points = grid_points(grid);
    let ncomp = mat.components();
    let data = quadrature(omega, source, mat, side, cutoff, &points, opts, Parts::SURFACE, false)?;
    Ok(to_field(grid, ncomp, &data, 0, ncomp))
}

/// `(2 pi)^{-d} int M(w, xi) J^ e^{i x xi} dxi` without any singular treatment;
/// valid when the spectrum of the source avoids the characteristic spheres,
/// or for non-real `w`.
pub fn apply_regular<T: Real>(
    omega: Complex<T>,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    grid: &Grid<T>,
    opts: &LapOptions<T>,
) -> Result<Field<T>, LapError> {
    let ncomp = mat.components();
    let dim = mat.dim();
    let points = grid_points(grid);
    let xmax = max_point_radius(&points);
    let rule = GaussRule::new(opts.radial_order);
    let ang = AngularRule::new(dim, opts.angular, polar_axis(mat));
    let data = polar_integrate(
        &NormFlavor::euclidean(dim),
        &ang,
        &points,
        ncomp,
        |ray| {
            let mut nodes = Vec::new();
            rule.push_composite(T::zero(), source.support_radius(), panel_width(opts, source, xmax, ray), &mut nodes);
            Ok(nodes)
        },
        |xi, out| {
            let mut j = vec![Complex::zero(); ncomp];
            source.spectrum(xi, &mut j);
            resolvent_matrix(omega, &xi[..dim], mat)?.mul_vec_into(&j, out);
            Ok(())
        },
    )?;
    Ok(to_field(grid, ncomp, &data, 0, ncomp))
}

/// Physical samples of the source: closed form when available, else quadrature of its density.
pub fn source_samples<T: Real>(source: &dyn SpectralSource<T>, grid: &Grid<T>, opts: &LapOptions<T>) -> Field<T> {
    let ncomp = source.ncomp();
    let points = grid_points(grid);
    if let Some(first) = source.physical(&points[0]) {
        let n = points.len();
        let mut out = Field::zeros(grid, ncomp);
        for (p, x) in points.iter().enumerate() {
            let v = if p == 0 { first.clone() } else { source.physical(x).expect("closed form") };
            for c in 0..ncomp {
                out.data_mut()[c * n + p] = v[c];
            }
        }
        return out;
    }
    let xmax = max_point_radius(&points);
    let rule = GaussRule::new(opts.radial_order);
    let ang = AngularRule::new(grid.dim(), opts.angular, 0);
    let data = polar_integrate(
        &NormFlavor::euclidean(grid.dim()),
        &ang,
        &points,
        ncomp,
        |ray| {
            let mut nodes = Vec::new();
            rule.push_composite(T::zero(), source.support_radius(), panel_width(opts, source, xmax, ray), &mut nodes);
            Ok(nodes)
        },
        |xi, out| {
            source.spectrum(xi, out);
            Ok(())
        },
    )
    .expect("plain density quadrature cannot fail");
    to_field(grid, ncomp, &data, 0, ncomp)
}

/// Relative L2 residual `|P(w, D) u - J| / |J|` of the limiting solution, with
/// `P(w, D)` applied inside the spectral integral and `J` from [`source_samples`].
#[allow(clippy::too_many_arguments)]
pub fn limiting_residual<T: Real>(
    omega: T,
    source: &dyn SpectralSource<T>,
    mat: &Material<T>,
    side: Side,
    method: LapMethod,
    cutoff: &CutoffSpec<T>,
    grid: &Grid<T>,
    opts: &LapOptions<T>,
) -> Result<T, LapError> {
    check_inputs(omega, source, mat, grid)?;
    let points = grid_points(grid);
    let ncomp = mat.components();
    let data = match method {
        LapMethod::Extrapolate => extrapolate(omega, source, mat, side, &points, opts, true)?.0,
        LapMethod::Quadrature => quadrature(omega, source, mat, side, cutoff, &points, opts, Parts::ALL, true)?,
    };
    let applied = to_field(grid, ncomp, &data, 0, ncomp);
    Ok(relative_l2(&applied, &source_samples(source, grid, opts)))
}

/// Defect of `P(w, D) u_delta = J +- delta u_delta` on the periodic grid, with
/// `u_delta = P(w +- i delta, D)^{-1} J`; relative to `|J|`.
pub fn delta_defect<T: Real>(
    omega: T,
    delta: T,
    side: Side,
    currents: &Field<T>,
    mat: &Material<T>,
) -> Result<T, LapError> {
    let z = Complex::new(omega, side.sign::<T>() * delta);
    let u = solve(z, currents, mat)?;
    let lhs = forward_operator(Complex::new(omega, T::zero()), &u, mat)?;
    let rhs = currents.add(&u.scaled(Complex::new(side.sign::<T>() * delta, T::zero())));
    Ok(relative_l2(&lhs, &rhs))
}

/// `|a - b|_2 / |b|_2` over all samples.
pub fn relative_l2<T: Real>(a: &Field<T>, b: &Field<T>) -> T {
    let num = a.data().iter().zip(b.data()).fold(T::zero(), |s, (x, y)| s + (*x - *y).norm_sqr());
    let den = b.data().iter().fold(T::zero(), |s, y| s + y.norm_sqr());
    if den == T::zero() {
        return num.sqrt();
    }
    (num / den).sqrt()
}

/// Lower-bound blow-up rate of `P(w +- i delta, D)^{-1}` as `delta -> 0` at a fixed
/// real `w`: the slope of `log |u|_q / |J|_p` against `log delta` over inputs
/// concentrated on the characteristic sphere.
pub fn lap_blowup_probe<T: Real>(
    omega: T,
    pair: &LebesguePair<T>,
    mat: &Material<T>,
    deltas: &[T],
    side: Side,
    family: ProbeFamily<T>,
    grid: &Grid<T>,
) -> Result<ProbeFit<T>, RegionError> {
    let sign = side.sign::<T>();
    let omegas: Vec<Complex<T>> = deltas.iter().map(|d| Complex::new(omega, sign * *d)).collect();
    norm_scaling_probe(pair, mat, family, &omegas, ProbeAxis::Distance, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Material2, Material3, Axis};

    fn packet2(center: [f64; 3], width: f64) -> GaussianPacket<f64> {
        GaussianPacket::new(2, 3).with_bump(
            center,
            width,
            [0.0; 3],
            vec![Complex::new(1.0, 0.2), Complex::new(-0.4, 0.3), Complex::new(0.5, -0.1)],
        )
    }

    #[test]
    fn smooth_step_is_monotone_with_flat_ends() {
        let c = CutoffSpec::new(1.0, 2.0).unwrap();
        assert_eq!(c.value(0.5), 1.0);
        assert_eq!(c.value(2.5), 0.0);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = c.value(1.0 + k as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
        assert!(CutoffSpec::new(2.0, 1.0).is_err());
    }

    #[test]
    fn surface_weights_sum_to_coarea_measure() {
        let f = NormFlavor::<f64>::from_metric(2, [[2.0, 0.3, 0.0], [0.3, 0.7, 0.0], [0.0; 3]]);
        let q = SurfaceQuadrature::new(&f, 1.3, 256, 0);
        assert!((q.total() - 2.0 * std::f64::consts::PI * 1.3 / f.det().sqrt()).abs() < 1e-13);
        let e = NormFlavor::<f64>::euclidean(3);
        let q = SurfaceQuadrature::new(&e, 0.7, 16, 2);
        assert!((q.total() - 4.0 * std::f64::consts::PI * 0.49).abs() < 1e-12);
        assert!((q.geometric_measure() - 4.0 * std::f64::consts::PI * 0.49).abs() < 1e-12);
    }

    struct DensityOnly<'a>(&'a GaussianPacket<f64>);

    impl SpectralSource<f64> for DensityOnly<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn ncomp(&self) -> usize {
            self.0.ncomp()
        }
        fn spectrum(&self, xi: &[f64; 3], out: &mut [Complex<f64>]) {
            self.0.spectrum(xi, out)
        }
        fn support_radius(&self) -> f64 {
            self.0.support_radius()
        }
        fn feature_scale(&self) -> f64 {
            self.0.feature_scale()
        }
    }

    #[test]
    fn gaussian_packet_closed_form_matches_density_quadrature() {
        let src = packet2([0.8, -0.3, 0.0], 0.5);
        let g = Grid::cubic(2, 4, 2.0).unwrap();
        let opts = LapOptions::default();
        let closed = source_samples(&src, &g, &opts);
        let quad = source_samples(&DensityOnly(&src), &g, &opts);
        assert!(relative_l2(&quad, &closed) < 1e-12);
    }

    #[test]
    fn cutoff_must_contain_sphere() {
        let mat: Material<f64> = Material3::new(0.5, 2.0, Axis::X1, 1.0).unwrap().into();
        let src = GaussianPacket::new(3, 6).with_bump([1.0, 0.0, 0.0], 0.3, [0.0; 3], vec![Complex::new(1.0, 0.0); 6]);
        let g = Grid::cubic(3, 4, 1.0).unwrap();
        let c = CutoffSpec::new(1.0, 2.0).unwrap();
        let r = lap_solve(1.0, &src, &mat, Side::Plus, LapMethod::Quadrature, &c, &g, &LapOptions::default());
        assert!(matches!(r, Err(LapError::CutoffTooSmall { .. })));
    }

    #[test]
    fn planar_material_extent() {
        let mat: Material<f64> = Material2::isotropic(1.0, 1.0).unwrap().into();
        assert!((sphere_extent(2.0, &mat) - 2.0).abs() < 1e-14);
    }
}
