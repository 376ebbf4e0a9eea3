//! Seeded band-limited test currents on the periodic grid.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use crate::scalar::Real;
use crate::spectral::{leray_project, Field, Grid};

/// Random spectral coefficients on modes with `|k|_inf <= bandwidth`, zero mean.
pub fn random_band_limited<T: Real, R: Rng>(grid: &Grid<T>, ncomp: usize, bandwidth: usize, rng: &mut R) -> Field<T> {
    let n = grid.len();
    let mut spec = Field::zeros(grid, ncomp);
    let band = bandwidth as isize;
    for c in 0..ncomp {
        for k in 1..n {
            let idx = grid.integer_frequency(k);
            let inside = idx.iter().all(|i| i.abs() <= band);
            spec.data_mut()[c * n + k] = if inside {
                Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
            } else {
                Complex::zero()
            };
        }
    }
    spec.to_physical()
}

/// Divergence-free variant: the Euclidean Leray projection of [`random_band_limited`].
pub fn random_solenoidal<T: Real, R: Rng>(grid: &Grid<T>, ncomp: usize, bandwidth: usize, rng: &mut R) -> Field<T> {
    leray_project(&random_band_limited(grid, ncomp, bandwidth, rng))
}
