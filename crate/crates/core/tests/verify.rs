use shellzeta::sampling::SamplingPlan;
use shellzeta::verify::{verify_suite, Selection};

#[test]
fn every_check_passes() {
    let rep = verify_suite(Selection::All, &SamplingPlan::default());
    let failed: Vec<_> = rep.checks.iter().filter(|c| !c.pass).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    for g in ["contents", "zeta", "two-param", "sphere", "surface"] {
        assert!(rep.checks.iter().any(|c| c.group == g), "no checks in {g}");
    }
}

#[test]
fn reports_are_deterministic() {
    let plan = SamplingPlan::new(7, 8, 2_000).unwrap();
    for sel in [Selection::Sphere, Selection::Contents] {
        let a = serde_json::to_string(&verify_suite(sel, &plan)).unwrap();
        let b = serde_json::to_string(&verify_suite(sel, &plan)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn selection_names() {
    assert_eq!("two-param".parse::<Selection>().unwrap(), Selection::TwoParam);
    assert!("everything".parse::<Selection>().is_err());
}
