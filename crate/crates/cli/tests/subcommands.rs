use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn mxr(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("job.ini");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_mxr"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (p.file_name().unwrap().into(), bytes)
        })
        .collect();
    out.sort();
    out
}

#[test]
fn solve_identity_material_passes() {
    let dir = TempDir::new().unwrap();
    let o = mxr(dir.path(), "[grid]\nn = 64\n", &["solve"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let residual: f64 = text.lines().find(|l| l.starts_with("residual")).unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(residual < 1e-10);
    assert!(text.contains("charge norms"));
    for f in ["solution.mxfd", "source.mxfd", "solve_report.json"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn solve_rejects_real_frequency() {
    let dir = TempDir::new().unwrap();
    let o = mxr(dir.path(), "[problem]\nomega_im = 0\n", &["solve"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("use the lap subcommand"));
}

#[test]
fn config_violations_are_named() {
    let cases = [
        ("[material]\neps11 = 1\neps12 = 1.5\neps22 = 1\n", "positive definite"),
        ("[material]\nmu = 0\n", "permeability"),
        ("[grid]\nn = 30\n", "power of two"),
        ("[grid]\nlength = -1\n", "period lengths"),
        ("[problem]\ndimension = 3\n[material]\naxis = 4\n", "axis must be"),
        ("[problem]\ndimension = 3\n[material]\neps = 1,2,3\n", "pairwise distinct"),
        ("[region]\nx = 1.5\n", "[region]"),
        ("[grid]\nn = abc\n", "non-negative integer"),
        ("[problem\n", "line 1"),
    ];
    for (cfg, needle) in cases {
        let dir = TempDir::new().unwrap();
        let o = mxr(dir.path(), cfg, &["solve"]);
        assert_eq!(o.status.code(), Some(1), "{cfg}");
        assert!(stderr(&o).contains(needle), "{cfg:?}: {}", stderr(&o));
        assert!(!dir.path().join("out").join("solution.mxfd").exists());
    }
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = "[material]\neps11 = 2\neps12 = 0.3\neps22 = 1.2\nmu = 0.8\n[problem]\nomega_re = 2.5\nomega_im = 0.01\n";
    assert_eq!(mxr(dir.path(), cfg, &["solve"]).status.code(), Some(0));
    let cfg = format!("{cfg}[verify]\nsamples = 500\nsource = out/source.mxfd\nsolution = out/solution.mxfd\n");
    let o = mxr(dir.path(), &cfg, &["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("roundtrip"));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/verify_report.json")).unwrap()).unwrap();
    assert!(report["roundtrip"]["defect"].as_f64().unwrap() < 1e-10);
    let det = report["suites"]["suites"].as_array().unwrap().iter().find(|s| s["name"] == "det_m" && s["dim"] == 2).unwrap();
    assert!(det["max_defect"].as_f64().unwrap() < 1e-12);
}

#[test]
fn verify_mutation_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let o = mxr(dir.path(), "[verify]\nsamples = 2000\nmutation = 1,2\n", &["verify"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("witness: suite inverse (3D)"), "{text}");
    assert!(text.contains("omega") && text.contains("xi"));
}

#[test]
fn fixed_seed_outputs_are_byte_identical() {
    let cfg = "[problem]\ndimension = 3\nseed = 11\n[grid]\nn = 8\n[source]\nkind = random\nbandwidth = 2\n[verify]\nsamples = 300\n";
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = TempDir::new().unwrap();
            for cmd in ["solve", "verify", "region", "probe"] {
                let o = mxr(dir.path(), cfg, &["--threads", "2", cmd]);
                assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
            }
            files(&dir.path().join("out"))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    // The seed flag overrides the file.
    let dir = TempDir::new().unwrap();
    mxr(dir.path(), cfg, &["--seed", "12", "solve"]);
    assert_ne!(fs::read(dir.path().join("out/source.mxfd")).unwrap(), runs[0].iter().find(|(p, _)| p.ends_with("source.mxfd")).unwrap().1);
}

#[test]
fn lap_reports_agreement_and_blowup() {
    let dir = TempDir::new().unwrap();
    let cfg = "[problem]\nomega_re = 1.3\nomega_im = 0\n[lap]\nblowup_deltas = 1e-2,4e-3,1.6e-3,6.3e-4,2.5e-4,1e-4\n";
    let o = mxr(dir.path(), cfg, &["lap"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("difference defect"));
    let out = dir.path().join("out");
    for f in ["lap_plus.mxfd", "lap_minus.mxfd", "lap_report.json", "blowup.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("lap_report.json")).unwrap()).unwrap();
    assert!(report["difference_defect"].as_f64().unwrap() < 1e-6);
    let slope = report["blowup"][0]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.1, "{slope}");
}

#[test]
fn lap_disagreement_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let o = mxr(dir.path(), "[problem]\nomega_re = 1.3\n[tolerances]\nlap_agreement = 1e-30\n", &["lap"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("disagree"));
}

#[test]
fn region_writes_tables() {
    let dir = TempDir::new().unwrap();
    let cfg = "[region]\nx = 0.75\ny = 0.25\nell = 3\npoints = 0.5:0.5,0.75:0.25,0.6:0.1\nomegas = 1:1,3:0.01\n";
    let o = mxr(dir.path(), cfg, &["region"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    let map = fs::read_to_string(out.join("gamma_map.csv")).unwrap();
    assert!(map.starts_with("x,y,gamma\n"));
    assert_eq!(map.lines().count(), 1 + 101 * 101);
    assert!(!map.contains('\r'));
    let boundary = fs::read_to_string(out.join("boundary.csv")).unwrap();
    assert!(boundary.starts_with("branch,re_omega,im_omega\n"));
    let members = fs::read_to_string(out.join("membership.csv")).unwrap();
    assert_eq!(members.lines().count(), 4);
    assert!(out.join("z_region.csv").exists());
}

#[test]
fn empty_region_is_distinct_and_succeeds() {
    let dir = TempDir::new().unwrap();
    let o = mxr(dir.path(), "[problem]\ndimension = 3\n[region]\nx = 0.3333333333333333\ny = 0\nell = 0.5\n", &["region"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("region is empty"));
    assert!(!dir.path().join("out/boundary.csv").exists());
}

#[test]
fn region_cone_boundary_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let o = mxr(dir.path(), "[problem]\ndimension = 3\n[region]\nx = 0.3333333333333333\ny = 0\nell = 2\n", &["region"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("out/boundary.csv")).unwrap();
    // alpha = 0, gamma = 1: |Im w| = |w| / l.
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').skip(1).map(|s| s.parse().unwrap()).collect();
        let r = v[0].hypot(v[1]);
        assert!((v[1].abs() - r / 2.0).abs() < 1e-10 * r.max(1.0), "{line}");
    }
}

#[test]
fn enclosure_from_stored_potential() {
    let dir = TempDir::new().unwrap();
    let grid = maxwell_lap::Grid64::cubic(2, 8, 1.0).unwrap();
    let v = maxwell_lap::Field64::from_fn(&grid, 1, |_| vec![maxwell_lap::C64::new(0.01, 0.0)]);
    mxr::fieldfile::write(&dir.path().join("v.mxfd"), &v).unwrap();
    let o = mxr(dir.path(), "[region]\nx = 0.75\ny = 0.25\nell = 2\npotential = v.mxfd\np = 2\nq = 4\n", &["region"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("eigenvalues lie in the complement"));
}

#[test]
fn probes_emit_six_samples_and_respect_bounds() {
    for (cfg, lo, hi) in [
        ("[probe]\nfamily = knapp\nx = 0.75\ny = 0.25\n", -0.35, -0.15),
        ("[probe]\nfamily = annulus\nx = 0.5\ny = 0.5\n", -1.1, -0.9),
    ] {
        let dir = TempDir::new().unwrap();
        let o = mxr(dir.path(), cfg, &["probe"]);
        assert_eq!(o.status.code(), Some(0), "{cfg}: {}", stderr(&o));
        let csv = fs::read_to_string(dir.path().join("out/probe.csv")).unwrap();
        assert_eq!(csv.lines().count(), 7);
        let report: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("out/probe_report.json")).unwrap()).unwrap();
        let slope = report["fit"]["slope"].as_f64().unwrap();
        assert!(slope > lo && slope < hi, "{cfg}: {slope}");
    }
}

#[test]
fn probe_violation_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let o = mxr(dir.path(), "[probe]\nfamily = annulus\nx = 0.5\ny = 0.5\n[tolerances]\nprobe_slope = -0.5\n", &["probe"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}
