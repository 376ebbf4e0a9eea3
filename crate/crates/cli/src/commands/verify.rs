use std::path::Path;

use maxwell_lap::lap::relative_l2;
use maxwell_lap::{forward_operator, run_suites, VerifyConfig, VerifyReport};
use serde::Serialize;

use crate::config::JobConfig;
use crate::report::write_json;
use crate::{fieldfile, CliError, Status};

#[derive(Debug, Serialize)]
struct Roundtrip {
    source: String,
    solution: String,
    omega: [f64; 2],
    defect: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    suites: VerifyReport,
    roundtrip: Option<Roundtrip>,
    passed: bool,
}

fn roundtrip(job: &JobConfig) -> Result<Option<Roundtrip>, CliError> {
    let (Some(src), Some(sol)) = (&job.verify.source, &job.verify.solution) else {
        if job.verify.source.is_some() || job.verify.solution.is_some() {
            return Err(CliError::Usage("[verify] round trip needs both source and solution".into()));
        }
        return Ok(None);
    };
    let j = fieldfile::read(src)?;
    let u = fieldfile::read(sol)?;
    if j.grid() != u.grid() || j.ncomp() != u.ncomp() || u.ncomp() != job.material.components() {
        return Err(CliError::Usage("stored source and solution do not share a grid and material".into()));
    }
    let defect = relative_l2(&forward_operator(job.omega, &u, &job.material)?, &j);
    let tolerance = job.tolerances.roundtrip;
    Ok(Some(Roundtrip {
        source: src.display().to_string(),
        solution: sol.display().to_string(),
        omega: [job.omega.re, job.omega.im],
        defect,
        tolerance,
        passed: defect <= tolerance,
    }))
}

pub fn run(job: &JobConfig, out: &Path) -> Result<Status, CliError> {
    let config = VerifyConfig {
        samples: job.verify.samples,
        seed: job.seed,
        tolerances: job.tolerances.suites,
        mutation: job.verify.mutation,
    };
    let suites = run_suites(&config);
    let roundtrip = roundtrip(job)?;
    let passed = suites.passed && roundtrip.as_ref().is_none_or(|r| r.passed);
    for s in &suites.suites {
        println!(
            "{:<18} {}D  max {:.3e}  tol {:.0e}  skipped {:>6}  {}",
            s.name,
            s.dim,
            s.max_defect,
            s.tolerance,
            s.skipped,
            if s.passed { "PASS" } else { "FAIL" }
        );
    }
    if let Some(r) = &roundtrip {
        println!("roundtrip            max {:.3e}  tol {:.0e}  {}", r.defect, r.tolerance, if r.passed { "PASS" } else { "FAIL" });
    }
    if let Some((suite, w)) = suites.first_failure() {
        println!(
            "witness: suite {} ({}D), sample {}, entry ({}, {}), defect {:.3e}, point {}",
            suite.name,
            suite.dim,
            w.index,
            w.row,
            w.col,
            w.defect,
            serde_json::to_string(&w.point)?
        );
    }
    write_json(&out.join("verify_report.json"), &Report { suites, roundtrip, passed })?;
    Ok(if passed { Status::Passed } else { Status::Failed })
}
