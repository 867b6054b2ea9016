use std::f64::consts::PI;

use proptest::prelude::*;
use shellzeta::content::GridSpec;
use shellzeta::region::{Norm, Region, RegionParams};
use shellzeta::sampling::SamplingPlan;
use shellzeta::shell::tube_volume;
use shellzeta::sphere::*;
use shellzeta::Error;

fn plan() -> SamplingPlan {
    SamplingPlan::new(42, 8, 20_000).unwrap()
}

#[test]
fn full_space_volume_is_sphere_area() {
    let p = plan();
    assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
    assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
    assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    for n in 1..=3 {
        let fs = Region::full_space(n).unwrap();
        let v = spherical_volume(&fs, &p).unwrap();
        assert!((v.value - sphere_area(n)).abs() < 1e-8, "N={n}: {}", v.value);
        let mc = spherical_volume_mc(&fs, &p).unwrap();
        assert!((mc.value - sphere_area(n)).abs() <= mc.abs_error, "N={n}: {mc:?}");
    }
    let hp = Region::half_space(2).unwrap();
    assert!((spherical_volume(&hp, &p).unwrap().value - 2.0 * PI).abs() < 1e-8);
}

#[test]
fn caps_around_the_north_pole() {
    let p = plan();
    let fs = Region::full_space(2).unwrap();
    for delta in [0.3, 1.0, PI / 2.0, 2.5] {
        let v = spherical_nbhd_volume(&fs, delta, &p).unwrap();
        assert!((v.value - cap_area(2, delta)).abs() < 1e-8 * cap_area(2, delta).max(1.0));
        assert!((cap_area(2, delta) - 2.0 * PI * (1.0 - delta.cos())).abs() < 1e-12);
    }
    assert!(spherical_nbhd_volume(&fs, 0.0, &p).is_err());
    assert!(spherical_nbhd_volume(&fs, PI, &p).is_err());
}

#[test]
fn direct_sampling_agrees_with_quadrature() {
    let p = plan();
    for (region, delta) in [(Region::strip(1.0).unwrap(), 0.5), (Region::envelope(1.0, 3.0).unwrap(), 1.0), (Region::tent(0.5).unwrap(), 0.8)] {
        let a = spherical_nbhd_volume(&region, delta, &p).unwrap();
        let b = spherical_nbhd_volume_direct(&region, delta, &p).unwrap();
        assert!((a.value - b.value).abs() <= a.abs_error + b.abs_error, "{a:?} {b:?}");
    }
}

#[test]
fn spherical_comparison_holds() {
    let p = plan();
    let g = GridSpec::default();
    for (region, r) in [(Region::envelope(1.0, 3.0).unwrap(), -4.0), (Region::envelope(1.0, 2.5).unwrap(), -3.5)] {
        let rep = check_sphere_comparison(&region, r, &g, &p).unwrap();
        assert_eq!(rep.entries.len(), 3);
        assert!(rep.all_hold(), "{rep:?}");
    }
    // r must lie below -N and the measure must be finite
    let e = Region::envelope(1.0, 3.0).unwrap();
    assert!(matches!(check_sphere_comparison(&e, -1.0, &g, &p), Err(Error::Unsupported(_))));
    let st = Region::strip(1.0).unwrap();
    assert!(matches!(check_sphere_comparison(&st, -4.0, &g, &p), Err(Error::Unsupported(_))));
}

#[test]
fn lower_constant_sits_below_two_to_the_r() {
    for r in [-2.5, -3.0, -4.0, -6.0] {
        let c = sphere_lower_constant(2, r);
        assert!(c > 0.0 && c < 2f64.powf(r), "r={r}: {c}");
    }
}

#[test]
fn surface_contents() {
    let p = plan();
    let g = GridSpec::default();
    let c = surface_content(&Region::full_space(2).unwrap(), 0.0, &g, &p).unwrap();
    assert!((c.upper - 2.0 * PI).abs() < 1e-12 && (c.lower - 2.0 * PI).abs() < 1e-12);
    let c = surface_content(&Region::strip(1.0).unwrap(), -1.0, &g, &p).unwrap();
    assert!((c.upper - 2.0).abs() < 1e-3 && (c.lower - 2.0).abs() < 1e-3, "{c:?}");
    let s = surface_measure(&Region::half_space(2).unwrap(), 3.0, &p).unwrap();
    assert!((s.value - 3.0 * PI).abs() < 1e-12);
}

#[test]
fn derivative_relation_holds() {
    let p = plan();
    for (region, grid) in [
        (Region::full_space(2).unwrap(), vec![2.0, 50.0]),
        (Region::strip(1.0).unwrap(), vec![3.0, 50.0, 200.0]),
        (Region::envelope(1.0, 1.0).unwrap(), vec![10.0, 100.0]),
    ] {
        let rep = check_derivative_relation(&region, &grid, &p).unwrap();
        assert_eq!(rep.entries.len(), 2 * grid.len());
        assert!(rep.all_hold(), "{rep:?}");
    }
    // 8 = a_1 is a kink of the tent profile, 9 has one inside [t, 1.1 t]
    let rep = check_derivative_relation(&Region::tent(0.5).unwrap(), &[8.0, 9.0, 100.0], &p).unwrap();
    assert!(rep.all_hold());
    assert!(rep.notes.iter().any(|n| n.contains("skipped")));
}

#[test]
fn shell_quotient_converges_at_first_order() {
    let p = plan();
    let st = Region::strip(1.0).unwrap();
    let t = 50.0;
    let target = t * surface_measure(&st, t, &p).unwrap().value;
    let err = |phi: f64| (tube_volume(&st, t, phi * t, &p).unwrap().value / phi.ln() - target).abs();
    let ratio = err(1.01) / err(1.001);
    assert!((ratio - 10.0).abs() < 0.5, "{ratio}");
}

#[test]
fn sup_norm_is_refused() {
    let p = plan();
    let r = Region::build(RegionParams::Strip { h: 1.0 }, Some(Norm::Sup)).unwrap();
    assert!(matches!(spherical_volume(&r, &p), Err(Error::Unsupported(_))));
    assert!(matches!(surface_measure(&r, 2.0, &p), Err(Error::Unsupported(_))));
    assert!(matches!(check_derivative_relation(&r, &[3.0], &p), Err(Error::Unsupported(_))));
}

#[test]
fn north_pole_has_no_preimage() {
    let n = SpherePoint::north_pole(3);
    assert!(matches!(inverse_project(&n), Err(Error::Degenerate(_))));
    assert!(SpherePoint::new(vec![1.0, 1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn projection_round_trip(x in prop::collection::vec(-1e8f64..1e8, 1..5)) {
        let y = stereographic_project(&x);
        let n2: f64 = y.coordinates.iter().map(|v| v * v).sum();
        prop_assert!((n2 - 1.0).abs() < 1e-12);
        let back = inverse_project(&y).unwrap();
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn far_points_approach_the_pole(k in 3.0f64..12.0, dir in 0.0f64..(2.0 * PI)) {
        let r = 10f64.powf(k);
        let y = stereographic_project(&[r * dir.cos(), r * dir.sin()]);
        prop_assert!((y.distance_to_north() * r / 2.0 - 1.0).abs() < 1e-6);
    }
}
