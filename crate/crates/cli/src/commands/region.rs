use std::path::Path;

use maxwell_lap::region::{BoundaryKind, EnclosureReport};
use maxwell_lap::{
    alpha, eigenvalue_enclosure, gamma, kappa, membership, z_boundary, z_region, KappaVariant, LebesguePair,
    RegionError, RegionQuery, SetId,
};
use serde::Serialize;

use crate::config::JobConfig;
use crate::report::{num, write_json, Table};
use crate::{fieldfile, CliError, Status};

#[derive(Debug, Serialize)]
struct Report {
    x: f64,
    y: f64,
    dim: usize,
    gamma: f64,
    alpha: f64,
    ell: f64,
    /// `None` when the region is empty.
    boundary: Option<String>,
    empty: bool,
    enclosure: Option<EnclosureReport<f64>>,
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn run(job: &JobConfig, out: &Path) -> Result<Status, CliError> {
    let r = &job.region;
    let dim = job.dim;

    let mut map = Table::create(&out.join("gamma_map.csv"), &["x", "y", "gamma"])?;
    let steps = r.map_size.max(2) - 1;
    for i in 0..=steps {
        for j in 0..=steps {
            let (x, y) = (i as f64 / steps as f64, j as f64 / steps as f64);
            let g = gamma(&LebesguePair::new(x, y, dim)?);
            map.row([num(x), num(y), num(g)])?;
        }
    }
    map.finish()?;

    let mut table = Table::create(&out.join("membership.csv"), &["x", "y", "r0_half", "r1", "p_set"])?;
    let points = if r.points.is_empty() { vec![(r.pair.x, r.pair.y)] } else { r.points.clone() };
    for (x, y) in points {
        let pair = LebesguePair::new(x, y, dim)?;
        let row = [SetId::R0Half, SetId::R1, SetId::P].map(|s| flag(membership(&pair, s)));
        table.row([num(x), num(y), row[0].into(), row[1].into(), row[2].into()])?;
        println!("({x}, {y}): R0(1/2) {}  R1 {}  P {}", row[0], row[1], row[2]);
    }
    table.finish()?;

    let query = RegionQuery::new(r.pair, r.ell, r.constant, r.t)?;
    let (boundary, empty) = match z_boundary(&query, r.resolution, r.radius_max) {
        Ok(b) => {
            let mut table = Table::create(&out.join("boundary.csv"), &["branch", "re_omega", "im_omega"])?;
            for (k, branch) in b.branches.iter().enumerate() {
                for p in branch {
                    table.row([k.to_string(), num(p[0]), num(p[1])])?;
                }
            }
            table.finish()?;
            let kind = match b.kind {
                BoundaryKind::Curve => "curve".to_string(),
                BoundaryKind::Cone { slope } => format!("cone |Im w| = {slope} |w|"),
                BoundaryKind::Everything => "whole plane".to_string(),
            };
            println!("boundary: {kind}, {} branches", b.branches.len());
            (Some(kind), false)
        }
        Err(RegionError::EmptyRegion(ell)) => {
            println!("region is empty: alpha = 0 and l = {ell} < 1, no boundary written");
            (None, true)
        }
        Err(e) => return Err(e.into()),
    };

    if !r.omegas.is_empty() {
        let mut table = Table::create(&out.join("z_region.csv"), &["re_omega", "im_omega", "kappa", "inside"])?;
        for &w in &r.omegas {
            let k = kappa(&r.pair, w, KappaVariant::RealAxis)?;
            table.row([num(w.re), num(w.im), num(k), flag(z_region(&query, w)?).into()])?;
        }
        table.finish()?;
    }

    let enclosure = match &r.potential {
        Some(path) => {
            let v = fieldfile::read(path)?;
            let rep = eigenvalue_enclosure(&query, &v, r.p, r.q)?;
            println!("{}", rep.statement);
            Some(rep)
        }
        None => None,
    };

    let report = Report {
        x: r.pair.x,
        y: r.pair.y,
        dim,
        gamma: gamma(&r.pair),
        alpha: alpha(&r.pair),
        ell: r.ell,
        boundary,
        empty,
        enclosure,
    };
    println!("gamma {}  alpha {}", report.gamma, report.alpha);
    write_json(&out.join("region_report.json"), &report)?;
    Ok(Status::Passed)
}
