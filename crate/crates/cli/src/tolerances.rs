//! Pass/fail thresholds. Defaults are the acceptance values; every report echoes
//! the effective set.

use maxwell_lap::verify::SuiteTolerances;
use serde::Serialize;

use crate::ini::{Ini, IniError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative L2 residual of `P(w, D) solve(w, J) - J`.
    pub residual: f64,
    /// Divergence defect of fields produced from solenoidal currents.
    pub solenoidal: f64,
    /// Forward-applied stored solution against stored source.
    pub roundtrip: f64,
    /// Extrapolation against quadrature for limiting solutions.
    pub lap_agreement: f64,
    pub lap_residual: f64,
    /// `P_+ - P_-` against twice the surface terms.
    pub lap_difference: f64,
    /// Allowed excess of a distance slope over its predicted exponent.
    pub probe_slope: f64,
    /// Allowed excess of a modulus slope over its predicted exponent.
    pub ray_slope: f64,
    pub suites: SuiteTolerances,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-10,
            solenoidal: 1e-11,
            roundtrip: 1e-10,
            lap_agreement: 1e-5,
            lap_residual: 1e-6,
            lap_difference: 1e-6,
            probe_slope: 0.1,
            ray_slope: 0.15,
            suites: SuiteTolerances::default(),
        }
    }
}

impl Tolerances {
    pub fn from_ini(ini: &Ini) -> Result<Self, IniError> {
        let d = Self::default();
        let s = "tolerances";
        let num = "number";
        Ok(Self {
            residual: ini.get_or(s, "residual", num, d.residual)?,
            solenoidal: ini.get_or(s, "solenoidal", num, d.solenoidal)?,
            roundtrip: ini.get_or(s, "roundtrip", num, d.roundtrip)?,
            lap_agreement: ini.get_or(s, "lap_agreement", num, d.lap_agreement)?,
            lap_residual: ini.get_or(s, "lap_residual", num, d.lap_residual)?,
            lap_difference: ini.get_or(s, "lap_difference", num, d.lap_difference)?,
            probe_slope: ini.get_or(s, "probe_slope", num, d.probe_slope)?,
            ray_slope: ini.get_or(s, "ray_slope", num, d.ray_slope)?,
            suites: SuiteTolerances {
                diagonalization: ini.get_or(s, "diagonalization", num, d.suites.diagonalization)?,
                det_2d: ini.get_or(s, "det_2d", num, d.suites.det_2d)?,
                det_3d_ratio: ini.get_or(s, "det_3d_ratio", num, d.suites.det_3d_ratio)?,
                inverse: ini.get_or(s, "inverse", num, d.suites.inverse)?,
                charge: ini.get_or(s, "charge", num, d.suites.charge)?,
            },
        })
    }
}
