use std::path::Path;

use maxwell_lap::region::{distance_samples, lattice_resonance, ray_samples, ProbeFit};
use maxwell_lap::{norm_scaling_probe, ProbeAxis, ProbeFamily, C64};
use serde::Serialize;

use crate::config::{FamilyChoice, JobConfig};
use crate::report::{num, write_json, Table};
use crate::{CliError, Status};

#[derive(Debug, Serialize)]
struct Report {
    family: FamilyChoice,
    axis: ProbeAxis,
    x: f64,
    y: f64,
    fit: ProbeFit<f64>,
    /// Distance slopes may not drop below `predicted - tolerance`; modulus
    /// slopes may not exceed `predicted + tolerance`.
    tolerance: f64,
    passed: bool,
}

pub fn run(job: &JobConfig, out: &Path) -> Result<Status, CliError> {
    let p = &job.probe;
    let family = match p.family {
        FamilyChoice::Annulus => ProbeFamily::Annulus { half_width: p.half_width },
        FamilyChoice::Knapp => ProbeFamily::Knapp,
        FamilyChoice::Radial => ProbeFamily::Radial,
    };
    let omegas: Vec<C64> = match (p.axis, p.family) {
        (ProbeAxis::Distance, FamilyChoice::Annulus) => {
            let w = lattice_resonance(&job.grid, &job.material, p.modulus);
            p.distances.iter().map(|d| C64::new(w, *d)).collect()
        }
        (ProbeAxis::Distance, _) => distance_samples(p.modulus, &p.distances),
        (ProbeAxis::Modulus, _) => ray_samples(p.direction, &p.moduli),
    };
    let fit = norm_scaling_probe(&p.pair, &job.material, family, &omegas, p.axis, &job.grid)?;

    let mut table = Table::create(
        &out.join("probe.csv"),
        &["omega_re", "omega_im", "parameter", "input_norm", "output_norm", "ratio"],
    )?;
    for s in &fit.samples {
        table.row([s.omega_re, s.omega_im, s.parameter, s.input_norm, s.output_norm, s.ratio].map(num))?;
    }
    table.finish()?;

    let (tolerance, passed) = match p.axis {
        ProbeAxis::Distance => (job.tolerances.probe_slope, fit.slope >= fit.predicted - job.tolerances.probe_slope),
        ProbeAxis::Modulus => (job.tolerances.ray_slope, fit.slope <= fit.predicted + job.tolerances.ray_slope),
    };
    println!(
        "{} samples: slope {:.4}  intercept {:.4}  rms {:.2e}  predicted {:.4}  {}",
        fit.samples.len(),
        fit.slope,
        fit.intercept,
        fit.residual,
        fit.predicted + 0.0,
        if passed { "PASS" } else { "FAIL" }
    );
    let report = Report { family: p.family, axis: p.axis, x: p.pair.x, y: p.pair.y, fit, tolerance, passed };
    write_json(&out.join("probe_report.json"), &report)?;
    Ok(if passed { Status::Passed } else { Status::Failed })
}
