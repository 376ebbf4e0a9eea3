//! Job description read from an INI file and validated before any compute.

use std::path::{Path, PathBuf};

use maxwell_lap::multiplier::EntryMutation;
use maxwell_lap::region::{LebesguePair, ProbeAxis, RegionError};
use maxwell_lap::{Axis, GaussianPacket, Grid64, LapOptions, Material2, Material3, Material64, Side, C64};
use serde::Serialize;
use thiserror::Error;

use crate::ini::{Ini, IniError};
use crate::tolerances::Tolerances;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Ini(#[from] IniError),
    #[error("[{section}] {message}")]
    Invalid { section: &'static str, message: String },
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn invalid(section: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { section, message: message.into() }
}

const NUM: &str = "number";
const INT: &str = "non-negative integer";

#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    /// Leray-projected random band-limited currents.
    Solenoidal { bandwidth: usize },
    Random { bandwidth: usize },
    File(PathBuf),
    /// Grid samples of [`JobConfig::packet`].
    Packet,
}

/// What the limiting solver integrates against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LapSourceChoice {
    /// The analytic packet of `[source]`.
    Packet,
    /// The job currents read as band-limited samples; slow on large grids.
    Field,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Both,
    Extrapolate,
    Quadrature,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupSettings {
    pub pair: LebesguePair<f64>,
    pub deltas: Vec<f64>,
    /// The probe runs at the nearest lattice sphere radius below this value.
    pub target: f64,
    pub half_width: f64,
    pub grid_n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LapSettings {
    pub method: MethodChoice,
    pub source: LapSourceChoice,
    /// Evaluation points of the limiting solution.
    pub grid: Grid64,
    pub sides: Vec<Side>,
    pub margin: f64,
    pub options: LapOptions<f64>,
    pub blowup: Option<BlowupSettings>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionSettings {
    pub pair: LebesguePair<f64>,
    pub ell: f64,
    pub constant: Option<f64>,
    pub t: f64,
    pub resolution: usize,
    pub radius_max: f64,
    pub map_size: usize,
    pub points: Vec<(f64, f64)>,
    pub omegas: Vec<C64>,
    pub potential: Option<PathBuf>,
    pub p: f64,
    pub q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    Annulus,
    Knapp,
    Radial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSettings {
    pub family: FamilyChoice,
    pub pair: LebesguePair<f64>,
    pub axis: ProbeAxis,
    /// `|w|` for distance sweeps; for the annulus the resonant radius is the
    /// nearest lattice sphere below it.
    pub modulus: f64,
    pub distances: Vec<f64>,
    pub direction: C64,
    pub moduli: Vec<f64>,
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySettings {
    pub samples: usize,
    pub mutation: Option<EntryMutation>,
    pub source: Option<PathBuf>,
    pub solution: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub dim: usize,
    pub grid: Grid64,
    pub material: Material64,
    pub omega: C64,
    pub seed: u64,
    pub source: SourceSpec,
    pub packet: GaussianPacket<f64>,
    pub charge_exponent: f64,
    pub lap: LapSettings,
    pub region: RegionSettings,
    pub probe: ProbeSettings,
    pub verify: VerifySettings,
    pub tolerances: Tolerances,
}

fn pair(ini: &Ini, section: &'static str, dim: usize, x: f64, y: f64) -> Result<LebesguePair<f64>, ConfigError> {
    let x = ini.get_or(section, "x", NUM, x)?;
    let y = ini.get_or(section, "y", NUM, y)?;
    LebesguePair::new(x, y, dim).map_err(|e: RegionError| invalid(section, format!("(x, y) = ({x}, {y}): {e}")))
}

fn path_in(base: &Path, raw: Option<&str>) -> Option<PathBuf> {
    raw.map(|p| {
        let p = PathBuf::from(p);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    })
}

fn side_list(raw: Option<&str>) -> Result<Vec<Side>, ConfigError> {
    let raw = raw.unwrap_or("plus,minus");
    raw.split(',')
        .map(|s| match s.trim() {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            other => Err(invalid("lap", format!("unknown side {other:?} (plus, minus)"))),
        })
        .collect()
}

fn complex_list(ini: &Ini, section: &'static str, key: &str) -> Result<Vec<C64>, ConfigError> {
    let Some(raw) = ini.raw(section, key) else { return Ok(Vec::new()) };
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (re, im) = s.split_once(':').ok_or_else(|| invalid(section, format!("{key}: expected re:im, got {s:?}")))?;
            let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| invalid(section, format!("{key}: bad number {v:?}")));
            Ok(C64::new(parse(re)?, parse(im)?))
        })
        .collect()
}

fn point_list(ini: &Ini) -> Result<Vec<(f64, f64)>, ConfigError> {
    Ok(complex_list(ini, "region", "points")?.into_iter().map(|z| (z.re, z.im)).collect())
}

fn positive(section: &'static str, name: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(section, format!("{name} must be positive and finite, got {v}")))
    }
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_ini(&Ini::parse(&text)?, base)
    }

    /// Defaults for every unspecified key.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        Self::from_ini(&Ini::parse(text)?, Path::new("."))
    }

    pub fn from_ini(ini: &Ini, base: &Path) -> Result<Self, ConfigError> {
        let dim: usize = ini.get_or("problem", "dimension", INT, 2)?;
        if !(dim == 2 || dim == 3) {
            return Err(invalid("problem", format!("dimension must be 2 or 3, got {dim}")));
        }
        let omega = C64::new(ini.get_or("problem", "omega_re", NUM, 1.0)?, ini.get_or("problem", "omega_im", NUM, 0.5)?);
        let seed = ini.get_or("problem", "seed", INT, 0u64)?;

        let default_n = if dim == 2 { 64 } else { 32 };
        let n = ini.list::<usize>("grid", "n", INT)?.unwrap_or_else(|| vec![default_n]);
        let length = ini.list::<f64>("grid", "length", NUM)?.unwrap_or_else(|| vec![2.0 * std::f64::consts::PI]);
        fn expand<V: Copy>(v: Vec<V>, dim: usize) -> Vec<V> {
            if v.len() == 1 {
                vec![v[0]; dim]
            } else {
                v
            }
        }
        let (n, length) = (expand(n, dim), expand(length, dim));
        if n.len() != dim || length.len() != dim {
            return Err(invalid("grid", format!("n and length need 1 or {dim} entries")));
        }
        let grid = Grid64::new(&n, &length).map_err(|e| invalid("grid", e.to_string()))?;

        let material = Self::material(ini, dim)?;
        let source = Self::source(ini, base)?;
        let packet = Self::packet(ini, dim, material.components())?;
        let charge_exponent = ini.get_or("solve", "charge_q", NUM, 2.0)?;
        if charge_exponent < 1.0 {
            return Err(invalid("solve", format!("charge_q must be >= 1, got {charge_exponent}")));
        }
        Ok(Self {
            dim,
            grid,
            material,
            omega,
            seed,
            source,
            packet,
            charge_exponent,
            lap: Self::lap(ini, dim)?,
            region: Self::region(ini, base, dim)?,
            probe: Self::probe(ini, dim)?,
            verify: Self::verify(ini, base)?,
            tolerances: Tolerances::from_ini(ini)?,
        })
    }

    fn material(ini: &Ini, dim: usize) -> Result<Material64, ConfigError> {
        let s = "material";
        let mu = ini.get_or(s, "mu", NUM, 1.0)?;
        let checked = |r: Result<Material64, maxwell_lap::SymbolError>| r.map_err(|e| invalid(s, e.to_string()));
        if dim == 2 {
            let eps11 = ini.get_or(s, "eps11", NUM, 1.0)?;
            let eps12 = ini.get_or(s, "eps12", NUM, 0.0)?;
            let eps22 = ini.get_or(s, "eps22", NUM, 1.0)?;
            return checked(Material2::new(eps11, eps12, eps22, mu).map(Into::into));
        }
        if let Some(eps) = ini.list::<f64>(s, "eps", NUM)? {
            let eps: [f64; 3] =
                eps.try_into().map_err(|_| invalid(s, "eps needs three principal permittivities"))?;
            return checked(Material3::from_principal(eps, mu).map(Into::into));
        }
        let axis = ini.get_or(s, "axis", INT, 1usize)?;
        let axis = Axis::from_one_based(axis).map_err(|e| invalid(s, e.to_string()))?;
        let eps_axis = ini.get_or(s, "eps_axis", NUM, 1.0)?;
        let eps_perp = ini.get_or(s, "eps_perp", NUM, 1.0)?;
        checked(Material3::new(eps_axis, eps_perp, axis, mu).map(Into::into))
    }

    fn source(ini: &Ini, base: &Path) -> Result<SourceSpec, ConfigError> {
        let s = "source";
        let bandwidth = ini.get_or(s, "bandwidth", INT, 8usize)?;
        match ini.raw(s, "kind").unwrap_or("solenoidal") {
            "solenoidal" => Ok(SourceSpec::Solenoidal { bandwidth }),
            "random" => Ok(SourceSpec::Random { bandwidth }),
            "file" => path_in(base, ini.raw(s, "path"))
                .map(SourceSpec::File)
                .ok_or_else(|| invalid(s, "kind = file needs path")),
            "packet" => Ok(SourceSpec::Packet),
            other => Err(invalid(s, format!("unknown kind {other:?} (solenoidal, random, file, packet)"))),
        }
    }

    fn packet(ini: &Ini, dim: usize, ncomp: usize) -> Result<GaussianPacket<f64>, ConfigError> {
        let s = "source";
        let vec3 = |key: &str, default: [f64; 3]| -> Result<[f64; 3], ConfigError> {
            let Some(v) = ini.list::<f64>(s, key, NUM)? else { return Ok(default) };
            if v.len() != dim {
                return Err(invalid(s, format!("{key} needs {dim} entries")));
            }
            let mut out = [0.0; 3];
            out[..dim].copy_from_slice(&v);
            Ok(out)
        };
        let mut center = vec3("center", [0.6, 0.3, 0.2])?;
        center[dim..].iter_mut().for_each(|c| *c = 0.0);
        let position = vec3("position", [0.0; 3])?;
        let width = positive(s, "width", ini.get_or(s, "width", NUM, 0.4)?)?;
        let default_amp: Vec<f64> = (0..ncomp).map(|c| 1.0 - 0.3 * c as f64).collect();
        let re = ini.list::<f64>(s, "amplitude", NUM)?.unwrap_or(default_amp);
        let im = ini.list::<f64>(s, "amplitude_im", NUM)?.unwrap_or_else(|| vec![0.2; ncomp]);
        if re.len() != ncomp || im.len() != ncomp {
            return Err(invalid(s, format!("amplitude and amplitude_im need {ncomp} entries")));
        }
        let amp = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
        Ok(GaussianPacket::new(dim, ncomp).with_bump(center, width, position, amp))
    }

    fn lap(ini: &Ini, dim: usize) -> Result<LapSettings, ConfigError> {
        let s = "lap";
        let method = match ini.raw(s, "method").unwrap_or("both") {
            "both" => MethodChoice::Both,
            "extrapolate" => MethodChoice::Extrapolate,
            "quadrature" => MethodChoice::Quadrature,
            other => return Err(invalid(s, format!("unknown method {other:?} (both, extrapolate, quadrature)"))),
        };
        let d = LapOptions::<f64>::default();
        let mut options = LapOptions {
            angular: ini.get_or(s, "angular", INT, if dim == 2 { d.angular } else { 32 })?,
            radial_order: ini.get_or(s, "radial_order", INT, d.radial_order)?,
            max_panel: ini.get_or(s, "max_panel", NUM, d.max_panel)?,
            delta0: ini.get_or(s, "delta0", NUM, d.delta0)?,
            levels: ini.get_or(s, "levels", INT, d.levels)?,
            ..d
        };
        options.agreement_tol = ini.get_or("tolerances", "lap_agreement", NUM, d.agreement_tol)?;
        if options.angular < 4 || options.radial_order < 2 || options.levels < 2 {
            return Err(invalid(s, "angular >= 4, radial_order >= 2 and levels >= 2 are required"));
        }
        positive(s, "max_panel", options.max_panel)?;
        if !(options.delta0 > 0.0 && options.delta0 < 0.5) {
            return Err(invalid(s, format!("delta0 must lie in (0, 1/2), got {}", options.delta0)));
        }
        let blowup = match ini.list::<f64>(s, "blowup_deltas", NUM)? {
            None => None,
            Some(deltas) => {
                if deltas.len() < 2 || deltas.iter().any(|d| !(*d > 0.0)) {
                    return Err(invalid(s, "blowup_deltas needs at least two positive entries"));
                }
                let x = ini.get_or(s, "blowup_x", NUM, 0.5)?;
                let y = ini.get_or(s, "blowup_y", NUM, 0.5)?;
                Some(BlowupSettings {
                    pair: LebesguePair::new(x, y, dim).map_err(|e| invalid(s, e.to_string()))?,
                    deltas,
                    target: positive(s, "blowup_omega", ini.get_or(s, "blowup_omega", NUM, 10.0)?)?,
                    half_width: positive(s, "blowup_half_width", ini.get_or(s, "blowup_half_width", NUM, 0.25)?)?,
                    grid_n: ini.get_or(s, "blowup_n", INT, if dim == 2 { 64 } else { 16 })?,
                })
            }
        };
        let source = match ini.raw(s, "source").unwrap_or("packet") {
            "packet" => LapSourceChoice::Packet,
            "field" => LapSourceChoice::Field,
            other => return Err(invalid(s, format!("unknown source {other:?} (packet, field)"))),
        };
        let n = ini.get_or(s, "n", INT, if dim == 2 { 8 } else { 4 })?;
        let length = ini.get_or(s, "length", NUM, 3.0)?;
        let grid = Grid64::cubic(dim, n, length).map_err(|e| invalid(s, e.to_string()))?;
        Ok(LapSettings {
            method,
            source,
            grid,
            sides: side_list(ini.raw(s, "sides"))?,
            margin: ini.get_or(s, "margin", NUM, 0.2)?,
            options,
            blowup,
        })
    }

    fn region(ini: &Ini, base: &Path, dim: usize) -> Result<RegionSettings, ConfigError> {
        let s = "region";
        let p = ini.get_or(s, "p", NUM, 2.0)?;
        let q = match ini.raw(s, "q") {
            Some("inf") | Some("infinity") => f64::INFINITY,
            _ => ini.get_or(s, "q", NUM, 4.0)?,
        };
        let constant = ini.get::<f64>(s, "constant", NUM)?;
        if let Some(c) = constant {
            positive(s, "constant", c)?;
        }
        let t = ini.get_or(s, "t", NUM, 0.5)?;
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid(s, format!("t must lie in (0, 1), got {t}")));
        }
        Ok(RegionSettings {
            pair: pair(ini, s, dim, 0.5, 0.5)?,
            ell: positive(s, "ell", ini.get_or(s, "ell", NUM, 2.0)?)?,
            constant,
            t,
            resolution: ini.get_or(s, "resolution", INT, 256)?,
            radius_max: positive(s, "radius_max", ini.get_or(s, "radius_max", NUM, 20.0)?)?,
            map_size: ini.get_or(s, "map", INT, 101)?,
            points: point_list(ini)?,
            omegas: complex_list(ini, s, "omegas")?,
            potential: path_in(base, ini.raw(s, "potential")),
            p,
            q,
        })
    }

    fn probe(ini: &Ini, dim: usize) -> Result<ProbeSettings, ConfigError> {
        let s = "probe";
        let family = match ini.raw(s, "family").unwrap_or("knapp") {
            "annulus" => FamilyChoice::Annulus,
            "knapp" => FamilyChoice::Knapp,
            "radial" => FamilyChoice::Radial,
            other => return Err(invalid(s, format!("unknown family {other:?} (annulus, knapp, radial)"))),
        };
        let axis = match ini.raw(s, "axis").unwrap_or("distance") {
            "distance" => ProbeAxis::Distance,
            "modulus" => ProbeAxis::Modulus,
            other => return Err(invalid(s, format!("unknown axis {other:?} (distance, modulus)"))),
        };
        let default_dists: Vec<f64> = if family == FamilyChoice::Annulus {
            (0..6).map(|k| 1e-2 * 10f64.powf(-0.4 * k as f64)).collect()
        } else {
            (0..6).map(|k| 0.4 * 2f64.powf(-0.5 * k as f64)).collect()
        };
        let distances = ini.list::<f64>(s, "distances", NUM)?.unwrap_or(default_dists);
        let moduli = ini.list::<f64>(s, "moduli", NUM)?.unwrap_or_else(|| (1..=6).map(|k| 2f64.powi(k)).collect());
        if distances.iter().chain(&moduli).any(|v| !(*v > 0.0)) {
            return Err(invalid(s, "distances and moduli must be positive"));
        }
        let direction = C64::new(ini.get_or(s, "direction_re", NUM, 1.0)?, ini.get_or(s, "direction_im", NUM, 0.1)?);
        if direction.im == 0.0 {
            return Err(invalid(s, "direction must be non-real"));
        }
        let (x0, y0) = if family == FamilyChoice::Annulus { (0.5, 0.5) } else { (0.75, 0.25) };
        Ok(ProbeSettings {
            family,
            pair: pair(ini, s, dim, x0, y0)?,
            axis,
            modulus: positive(s, "modulus", ini.get_or(s, "modulus", NUM, if family == FamilyChoice::Annulus { 10.0 } else { 4.0 })?)?,
            distances,
            direction,
            moduli,
            half_width: positive(s, "half_width", ini.get_or(s, "half_width", NUM, 0.5)?)?,
        })
    }

    fn verify(ini: &Ini, base: &Path) -> Result<VerifySettings, ConfigError> {
        let s = "verify";
        let mutation = match ini.list::<usize>(s, "mutation", INT)? {
            None => None,
            Some(v) if v.len() == 2 && v[0] < 6 && v[1] < 6 => Some(EntryMutation { row: v[0], col: v[1] }),
            Some(_) => return Err(invalid(s, "mutation needs row,col with entries below 6")),
        };
        Ok(VerifySettings {
            samples: ini.get_or(s, "samples", INT, 100_000)?,
            mutation,
            source: path_in(base, ini.raw(s, "source")),
            solution: path_in(base, ini.raw(s, "solution")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = JobConfig::from_text("").unwrap();
        assert_eq!(c.dim, 2);
        assert_eq!(c.grid.n(), &[64, 64]);
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn violations_name_the_constraint() {
        let cases = [
            ("[material]\neps11 = 1\neps12 = 2\neps22 = 1", "positive definite"),
            ("[material]\nmu = -1", "permeability"),
            ("[grid]\nn = 48", "power of two"),
            ("[problem]\ndimension = 4", "dimension"),
            ("[problem]\ndimension = 3\n[material]\neps = 1,2,3", "pairwise distinct"),
            ("[region]\nt = 1.5", "t must"),
            ("[lap]\ndelta0 = 0.7", "delta0"),
        ];
        for (text, needle) in cases {
            let err = JobConfig::from_text(text).unwrap_err().to_string();
            assert!(err.to_lowercase().contains(needle), "{text:?} -> {err}");
        }
    }
}
