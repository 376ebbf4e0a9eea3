use std::path::Path;

use maxwell_lap::lap::{limiting_residual, relative_l2, surface_terms, SampledField};
use maxwell_lap::region::lattice_resonance;
use maxwell_lap::{
    gamma, lap_blowup_probe, lap_solve, lap_solve_checked, CutoffSpec, Field64, Grid64, LapMethod, ProbeFamily,
    Side, SpectralSource, C64,
};
use serde::Serialize;

use super::source_field;
use crate::config::{JobConfig, LapSourceChoice, MethodChoice};
use crate::report::{num, write_json, Table};
use crate::{fieldfile, CliError, Status};

#[derive(Debug, Serialize)]
struct SideReport {
    side: Side,
    /// Relative L2 difference of the two routes (both-method runs only).
    agreement: Option<f64>,
    residual: f64,
    error_estimate: f64,
}

#[derive(Debug, Serialize)]
struct BlowupReport {
    side: Side,
    omega: f64,
    slope: f64,
    predicted: f64,
    /// The slope may not fall below `predicted - tolerance`.
    tolerance: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    omega: f64,
    method: MethodChoice,
    source: LapSourceChoice,
    grid: Vec<usize>,
    cutoff: CutoffSpec<f64>,
    sides: Vec<SideReport>,
    /// `P_+ - P_-` against twice the surface terms of the `+` side.
    difference_defect: Option<f64>,
    blowup: Vec<BlowupReport>,
    passed: bool,
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Plus => "plus",
        Side::Minus => "minus",
    }
}

pub fn run(job: &JobConfig, out: &Path) -> Result<Status, CliError> {
    let omega = job.omega.re;
    if job.omega.im != 0.0 {
        println!("note: limiting solutions use Re w = {omega}; omega_im = {} is ignored", job.omega.im);
    }
    let settings = &job.lap;
    let tol = &job.tolerances;
    let sampled;
    let source: &dyn SpectralSource<f64> = match settings.source {
        LapSourceChoice::Packet => &job.packet,
        LapSourceChoice::Field => {
            sampled = SampledField::new(source_field(job)?);
            &sampled
        }
    };
    let grid: &Grid64 = &settings.grid;
    let mat = &job.material;
    let opts = &settings.options;
    let cutoff = CutoffSpec::enclosing(omega, mat, settings.margin);

    let mut passed = true;
    let mut sides = Vec::new();
    let mut fields: Vec<(Side, Field64)> = Vec::new();
    for &side in &settings.sides {
        let (field, agreement, method, estimate) = match settings.method {
            MethodChoice::Both => {
                let cv = lap_solve_checked(omega, source, mat, side, &cutoff, grid, opts)?;
                let est = cv.extrapolated.error_estimate;
                (cv.quadrature.field, Some(cv.relative_difference), LapMethod::Quadrature, est)
            }
            MethodChoice::Extrapolate | MethodChoice::Quadrature => {
                let method =
                    if settings.method == MethodChoice::Extrapolate { LapMethod::Extrapolate } else { LapMethod::Quadrature };
                let sol = lap_solve(omega, source, mat, side, method, &cutoff, grid, opts)?;
                (sol.field, None, method, sol.error_estimate)
            }
        };
        let residual = limiting_residual(omega, source, mat, side, method, &cutoff, grid, opts)?;
        passed &= residual <= tol.lap_residual;
        println!(
            "side {:<5} agreement {}  residual {:.3e} (tol {:.0e})",
            side_name(side),
            agreement.map_or("n/a".to_string(), |a| format!("{a:.3e} (tol {:.0e})", tol.lap_agreement)),
            residual,
            tol.lap_residual
        );
        fieldfile::write(&out.join(format!("lap_{}.mxfd", side_name(side))), &field)?;
        sides.push(SideReport { side, agreement, residual, error_estimate: estimate });
        fields.push((side, field));
    }

    let plus = fields.iter().find(|(s, _)| *s == Side::Plus).map(|(_, f)| f);
    let minus = fields.iter().find(|(s, _)| *s == Side::Minus).map(|(_, f)| f);
    let difference_defect = match (plus, minus) {
        (Some(p), Some(m)) => {
            let surf = surface_terms(omega, source, mat, Side::Plus, &cutoff, grid, opts)?;
            let defect = relative_l2(&p.sub(m), &surf.scaled(C64::new(2.0, 0.0)));
            passed &= defect <= tol.lap_difference;
            println!("difference defect {:.3e} (tol {:.0e})", defect, tol.lap_difference);
            Some(defect)
        }
        _ => None,
    };

    let mut blowup = Vec::new();
    if let Some(b) = &settings.blowup {
        let probe_grid = Grid64::cubic(job.dim, b.grid_n, 2.0 * std::f64::consts::PI)?;
        let w = lattice_resonance(&probe_grid, mat, b.target);
        let mut table = Table::create(
            &out.join("blowup.csv"),
            &["side", "omega_re", "delta", "input_norm", "output_norm", "ratio"],
        )?;
        for &side in &settings.sides {
            let family = ProbeFamily::Annulus { half_width: b.half_width };
            let fit = lap_blowup_probe(w, &b.pair, mat, &b.deltas, side, family, &probe_grid)?;
            for s in &fit.samples {
                table.row([
                    side_name(side).to_string(),
                    num(w),
                    num(s.parameter),
                    num(s.input_norm),
                    num(s.output_norm),
                    num(s.ratio),
                ])?;
            }
            let predicted = -gamma(&b.pair);
            let ok = fit.slope >= predicted - tol.probe_slope;
            passed &= ok;
            println!(
                "blowup {:<5} at w = {w}: slope {:.4} (lower bound {:.4})",
                side_name(side),
                fit.slope,
                predicted
            );
            blowup.push(BlowupReport { side, omega: w, slope: fit.slope, predicted, tolerance: tol.probe_slope, passed: ok });
        }
        table.finish()?;
    }

    let report = Report {
        omega,
        method: settings.method,
        source: settings.source,
        grid: grid.n().to_vec(),
        cutoff,
        sides,
        difference_defect,
        blowup,
        passed,
    };
    write_json(&out.join("lap_report.json"), &report)?;
    println!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { Status::Passed } else { Status::Failed })
}
