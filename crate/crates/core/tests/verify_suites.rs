use maxwell_lap::multiplier::EntryMutation;
use maxwell_lap::verify::*;

#[test]
fn default_suites_pass() {
    let report = run_suites(&VerifyConfig { samples: 20_000, ..VerifyConfig::default() });
    assert!(report.passed, "{:?}", report.first_failure());
    assert_eq!(report.suites.len(), 8);
    assert!(report.suites.iter().all(|s| s.skipped == 0));
}

#[test]
fn every_nonzero_entry_flip_is_caught_with_a_witness() {
    for row in 0..6 {
        for col in 0..6 {
            if STRUCTURAL_ZEROS.contains(&(row, col)) {
                continue;
            }
            let r = inverse_suite_3d(2_000, 9, 1e-10, Some(EntryMutation { row, col }));
            assert!(!r.passed, "flip at ({row}, {col}) not detected");
            let w = r.witness.expect("failing suite carries a witness");
            assert!(w.defect > 1e-10);
            assert!(matches!(w.point, SamplePoint::Spatial { .. }));
        }
    }
}

#[test]
fn mutated_full_report_fails_only_the_inverse_suite() {
    let cfg = VerifyConfig { samples: 5_000, mutation: Some(EntryMutation { row: 4, col: 1 }), ..VerifyConfig::default() };
    let report = run_suites(&cfg);
    assert!(!report.passed);
    let failing: Vec<_> = report.suites.iter().filter(|s| !s.passed).map(|s| (s.name.as_str(), s.dim)).collect();
    assert_eq!(failing, vec![("inverse", 3)]);
}

#[test]
fn random_mutations_are_distinct_and_nonzero() {
    let m = random_mutations(10, 3);
    assert_eq!(m.len(), 10);
    for (k, a) in m.iter().enumerate() {
        assert!(!STRUCTURAL_ZEROS.contains(&(a.row, a.col)));
        assert!(m[k + 1..].iter().all(|b| b != a));
    }
}
