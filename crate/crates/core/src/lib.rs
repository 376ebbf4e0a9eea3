//! Resolvents of anisotropic time-harmonic Maxwell systems as Fourier multipliers.
//!
//! The core is generic over the real scalar (`f32` or `f64`); aliases for
//! `f64` live at the crate root.

// `!(a <= b)` is used on purpose so NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fft;
pub mod lap;
pub mod linalg;
pub mod multiplier;
pub mod quadrature;
pub mod region;
pub mod scalar;
pub mod sources;
pub mod spectral;
pub mod symbol;
pub mod verify;

pub use linalg::SymbolMatrix;
pub use multiplier::{
    resolvent_matrix, resolvent_matrix_2d, resolvent_matrix_3d, resolvent_terms, sokhotsky_split,
    EntryMutation, MultiplierError, Side,
};
pub use region::{
    alpha, eigenvalue_enclosure, gamma, kappa, membership, norm_scaling_probe, z_boundary, z_region,
    KappaVariant, LebesguePair, ProbeAxis, ProbeFamily, RegionError, RegionQuery, SetId,
};
pub use lap::{
    lap_blowup_probe, lap_solve, lap_solve_checked, CutoffSpec, GaussianPacket, LapError, LapMethod, LapOptions,
    LapSolution, SpectralSource,
};
pub use scalar::{cplx, Real};
pub use verify::{run_suites, VerifyConfig, VerifyReport};
pub use spectral::{
    divergence_and_charges, forward_operator, fractional_laplacian, half_laplacian_resolvent,
    lebesgue_norm, leray_project, leray_project_material, riesz, solve, Branch, Field, Grid,
    SpectralError,
};
pub use symbol::{
    eigen_decomposition, norm_eps, norm_eps_prime, symbol_p, Axis, Material, Material2, Material3,
    NormFlavor, SymbolError,
};

pub type C64 = num_complex::Complex<f64>;
pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type Material64 = Material<f64>;
pub type Material2F64 = Material2<f64>;
pub type Material3F64 = Material3<f64>;
