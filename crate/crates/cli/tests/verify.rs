use freejacobi_cli::verify::*;
use freejacobi_cli::Failure;

#[test]
fn report_lists_checks_with_tolerances() {
    let r = run_suite("closed-forms", &McSettings::default()).unwrap();
    assert!(r.passed);
    let ids: Vec<&str> = r.criteria.iter().map(|c| c.id).collect();
    assert_eq!(ids, ["centered-delta", "push-forward"]);
    for c in &r.criteria {
        for k in &c.checks {
            assert!(k.measured.unwrap() <= k.tolerance);
        }
    }
}

#[test]
fn failed_computation_fails_the_check() {
    let c = Check::within("x", Err(freejacobi_core::Error::Numeric("boom".into())), 1.0);
    assert!(!c.passed);
    assert_eq!(c.measured, None);
    assert!(Check::within("y", Ok(1.0), 1.0).passed);
    assert!(!Check::within("z", Ok(f64::NAN), 1.0).passed);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let e = run_suite("everything", &McSettings::default()).unwrap_err();
    assert!(matches!(e, Failure::Usage(_)));
    assert_eq!(e.exit_code(), 2);
}
