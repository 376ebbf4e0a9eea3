use std::path::Path;

use maxwell_lap::lap::relative_l2;
use maxwell_lap::spectral::divergence_defect;
use maxwell_lap::{divergence_and_charges, forward_operator, fractional_laplacian, lebesgue_norm, solve};
use serde::Serialize;

use super::source_field;
use crate::config::{JobConfig, SourceSpec};
use crate::report::write_json;
use crate::{fieldfile, CliError, Status};

#[derive(Debug, Serialize)]
struct SolveReport {
    dim: usize,
    grid: Vec<usize>,
    omega: [f64; 2],
    seed: u64,
    residual: f64,
    residual_tol: f64,
    /// Only checked for solenoidal sources.
    divergence_defect: f64,
    divergence_checked: bool,
    solenoidal_tol: f64,
    charge_exponent: f64,
    electric_charge_norm: f64,
    magnetic_charge_norm: f64,
    passed: bool,
}

pub fn run(job: &JobConfig, out: &Path) -> Result<Status, CliError> {
    if job.omega.im == 0.0 {
        return Err(CliError::Usage(format!(
            "frequency {} is real; the periodic solver needs Im w != 0, use the lap subcommand",
            job.omega.re
        )));
    }
    let j = source_field(job)?;
    let u = solve(job.omega, &j, &job.material)?;
    let residual = relative_l2(&forward_operator(job.omega, &u, &job.material)?, &j);
    let div = divergence_defect(&u);
    let divergence_checked = matches!(job.source, SourceSpec::Solenoidal { .. });
    let charges = divergence_and_charges(&j);
    let charge_norm = |rho| -> Result<f64, CliError> {
        Ok(lebesgue_norm(&fractional_laplacian(rho, -0.5)?, job.charge_exponent))
    };
    let tol = &job.tolerances;
    let passed = residual <= tol.residual && (!divergence_checked || div <= tol.solenoidal);
    let report = SolveReport {
        dim: job.dim,
        grid: job.grid.n().to_vec(),
        omega: [job.omega.re, job.omega.im],
        seed: job.seed,
        residual,
        residual_tol: tol.residual,
        divergence_defect: div,
        divergence_checked,
        solenoidal_tol: tol.solenoidal,
        charge_exponent: job.charge_exponent,
        electric_charge_norm: charge_norm(&charges.rho_e)?,
        magnetic_charge_norm: charge_norm(&charges.rho_m)?,
        passed,
    };
    fieldfile::write(&out.join("source.mxfd"), &j)?;
    fieldfile::write(&out.join("solution.mxfd"), &u)?;
    write_json(&out.join("solve_report.json"), &report)?;
    println!("residual            {:.3e} (tol {:.0e})", report.residual, tol.residual);
    println!(
        "divergence defect   {:.3e}{}",
        report.divergence_defect,
        if divergence_checked { format!(" (tol {:.0e})", tol.solenoidal) } else { " (not checked)".into() }
    );
    println!(
        "charge norms        electric {:.6e}, magnetic {:.6e} (q = {})",
        report.electric_charge_norm, report.magnetic_charge_norm, job.charge_exponent
    );
    println!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { Status::Passed } else { Status::Failed })
}
