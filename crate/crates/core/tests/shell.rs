use proptest::prelude::*;
use shellzeta::region::Region;
use shellzeta::sampling::SamplingPlan;
use shellzeta::shell::{layer_cake_check, shell_volume, tube_volume, tube_volume_mc, Method};
use shellzeta::Error;

#[test]
fn monte_carlo_error_bars_cover_exact_values() {
    for region in [Region::full_space(2).unwrap(), Region::half_space(2).unwrap(), Region::strip(1.0).unwrap()] {
        let mut covered = 0;
        for seed in 0..1000 {
            let plan = SamplingPlan::new(seed, 4, 500).unwrap();
            let (lo, hi) = (2.0, 5.0);
            let mc = tube_volume_mc(&region, lo, hi, &plan).unwrap();
            let exact = region.exact_tube_volume(lo, hi).unwrap();
            if (mc.value - exact).abs() <= mc.abs_error {
                covered += 1;
            }
        }
        assert!(covered >= 990, "{:?}: {covered}/1000", region.params());
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let r = Region::envelope(1.0, 0.5).unwrap();
    let plan = SamplingPlan::new(7, 8, 2000).unwrap();
    let a = tube_volume_mc(&r, 3.0, 300.0, &plan).unwrap();
    let b = tube_volume_mc(&r, 3.0, 300.0, &plan).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.abs_error.to_bits(), b.abs_error.to_bits());
    let c = tube_volume_mc(&r, 3.0, 300.0, &plan.with_seed(8)).unwrap();
    assert_ne!(a.value.to_bits(), c.value.to_bits());
}

#[test]
fn exact_path_is_preferred_and_labelled() {
    let plan = SamplingPlan::default();
    let v = tube_volume(&Region::strip(1.0).unwrap(), 1.0, 2.0, &plan).unwrap();
    assert_eq!(v.method, Method::Exact);
    assert_eq!(v.abs_error, 0.0);
    // Euclidean stacked shells have no closed form
    let fam = shellzeta::closed_form::TwoParamFamily::new(1.0 / 3.0, 2.0).unwrap();
    let text = format!(r#"{{"kind": "stacked_two_param", "params": {{"a": {}, "b": 2}}, "norm": "euclidean"}}"#, 1.0 / 3.0);
    let eu = shellzeta::parse_region(&text).unwrap();
    let v = tube_volume(&eu, 10.0, 20.0, &plan).unwrap();
    assert_eq!(v.method, Method::MonteCarlo);
    assert!(v.value > 0.0 && v.value < 2.0 * fam.strip_height * 10.0 + v.abs_error);
}

#[test]
fn invalid_radii_are_rejected() {
    let plan = SamplingPlan::default();
    let fs = Region::full_space(2).unwrap();
    assert!(matches!(shell_volume(&fs, 1.0, 1.0, &plan), Err(Error::Input(_))));
    assert!(matches!(shell_volume(&fs, -1.0, 2.0, &plan), Err(Error::Input(_))));
    assert!(tube_volume(&fs, 2.0, 1.0, &plan).is_err());
}

#[test]
fn layer_cake_identity() {
    let plan = SamplingPlan::default();
    let fs = Region::full_space(2).unwrap();
    let l = layer_cake_check(&fs, 1.0, 1.0, &plan).unwrap();
    assert!((l.lhs - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    assert!(l.abs_gap < 1e-6);
    for (b, t0, sigma) in [(1.0, 10.0, -1.0), (3.0, 1.0, -3.5), (2.0, 5.0, -2.5)] {
        let r = Region::envelope(1.0, b).unwrap();
        let l = layer_cake_check(&r, t0, sigma, &plan).unwrap();
        assert!(l.abs_gap < 1e-6, "b={b}: {l:?}");
    }
    assert!(matches!(layer_cake_check(&fs, 1.0, -2.5, &plan), Err(Error::Divergence(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shell_volume_is_monotone_in_phi(which in 0usize..4, lt in 0.5f64..5.0, p1 in 1.01f64..4.0, dp in 0.0f64..4.0) {
        let region = match which {
            0 => Region::full_space(3).unwrap(),
            1 => Region::strip(2.0).unwrap(),
            2 => Region::envelope(1.0, 1.5).unwrap(),
            _ => Region::tent(0.5).unwrap(),
        };
        let plan = SamplingPlan::default();
        let t = 10f64.powf(lt);
        let a = shell_volume(&region, t, p1, &plan).unwrap().value;
        let b = shell_volume(&region, t, p1 + dp, &plan).unwrap().value;
        prop_assert!(a <= b * (1.0 + 1e-12) + 1e-300, "{} > {}", a, b);
    }

    #[test]
    fn monte_carlo_tube_volume_is_additive(seed in 0u64..1000, t1 in 2.0f64..10.0, t2 in 10.0f64..50.0) {
        let region = Region::envelope(1.0, 0.5).unwrap();
        let plan = SamplingPlan::new(seed, 4, 2000).unwrap();
        let whole = tube_volume_mc(&region, 1.0, t2, &plan).unwrap();
        let a = tube_volume_mc(&region, 1.0, t1, &plan).unwrap();
        let b = tube_volume_mc(&region, t1, t2, &plan).unwrap();
        let gap = (whole.value - a.value - b.value).abs();
        prop_assert!(gap <= whole.abs_error + a.abs_error + b.abs_error, "gap {}", gap);
    }
}

#[test]
fn dimensions_above_six_are_refused() {
    assert!(matches!(Region::full_space(7), Err(Error::Constraint(_))));
    assert!(Region::full_space(6).is_ok());
}
