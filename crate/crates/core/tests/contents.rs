use std::f64::consts::PI;

use proptest::prelude::*;
use shellzeta::content::{
    check_comparison_inequalities, classic_content_at_infinity, estimate_phi_dimension, floor_log, phi_shell_content, Comparison,
    GridSpec,
};
use shellzeta::region::{MeasureClass, Region};
use shellzeta::sampling::SamplingPlan;
use shellzeta::verify::{tent_brute_force, tent_grid};
use shellzeta::Error;

fn builtins() -> Vec<(&'static str, Region, GridSpec)> {
    let g = GridSpec::default();
    vec![
        ("full space", Region::full_space(2).unwrap(), g.clone()),
        ("strip", Region::strip(1.0).unwrap(), g.clone()),
        ("hyperbola", Region::envelope(1.0, 1.0).unwrap(), GridSpec::new(1e3, 1e6, 16).unwrap()),
        ("envelope b=3", Region::envelope(1.0, 3.0).unwrap(), g.clone()),
        ("tent", Region::tent(0.5).unwrap(), tent_grid(0.5, 1e2, 1e6)),
        ("stacked", Region::stacked(1.0 / 3.0, 2.0).unwrap(), g),
    ]
}

#[test]
fn full_space_content_and_dimension() {
    let plan = SamplingPlan::default();
    let fs = Region::full_space(2).unwrap();
    let c = phi_shell_content(&fs, 2.0, 0.0, &GridSpec::default(), &plan).unwrap();
    assert!((c.upper / (3.0 * PI) - 1.0).abs() < 5e-3);
    assert!((c.lower / (3.0 * PI) - 1.0).abs() < 5e-3);
    let d = estimate_phi_dimension(&fs, 2.0, &GridSpec::default(), &plan).unwrap();
    assert!(d.upper_dim.abs() < 0.02 && d.lower_dim.abs() < 0.02);
    // general N: π^{N/2}(φ^N - 1)/Γ(N/2 + 1)
    let c3 = phi_shell_content(&Region::full_space(3).unwrap(), 2.0, 0.0, &GridSpec::default(), &plan).unwrap();
    assert!((c3.upper - 4.0 / 3.0 * PI * 7.0).abs() < 1e-9);
}

#[test]
fn hyperbola_and_strip_examples() {
    let plan = SamplingPlan::default();
    let hyp = Region::envelope(1.0, 1.0).unwrap();
    let g = GridSpec::new(1e3, 1e6, 16).unwrap();
    for phi in [2.0f64, 4.0] {
        let c = phi_shell_content(&hyp, phi, -2.0, &g, &plan).unwrap();
        assert!((c.upper / phi.ln() - 1.0).abs() < 0.02);
        let d = estimate_phi_dimension(&hyp, phi, &g, &plan).unwrap();
        assert!((d.upper_dim + 2.0).abs() < 0.05);
    }
    let strip = Region::strip(1.0).unwrap();
    for phi in [1.5, 2.0, 3.0] {
        let c = phi_shell_content(&strip, phi, -1.0, &GridSpec::default(), &plan).unwrap();
        assert!((c.upper / (2.0 * (phi - 1.0)) - 1.0).abs() < 0.02);
    }
}

#[test]
fn tent_contents() {
    let plan = SamplingPlan::default();
    let q = 0.5;
    let tent = Region::tent(q).unwrap();
    let g = tent_grid(q, 1e2, 1e6);
    let c2 = phi_shell_content(&tent, 2.0, -1.5, &g, &plan).unwrap();
    assert_eq!(c2.lower, 0.0);
    let d2 = estimate_phi_dimension(&tent, 2.0, &g, &plan).unwrap();
    assert!(d2.lower_is_neg_infinity && d2.lower_dim == f64::NEG_INFINITY);
    let c4 = phi_shell_content(&tent, 4.0, -1.5, &g, &plan).unwrap();
    // sup attained at t = a_n + ℓ_{n+1}/4, inf at t = a_n + ℓ_n
    assert!((c4.upper / (2f64.sqrt() * (1.0 + 3.0 / 32.0 * 4.0)) - 1.0).abs() < 1e-6);
    assert!((c4.lower * 2f64.sqrt() - 1.0).abs() < 1e-6);
    for p in &c4.per_point_errors {
        assert!((p.volume - tent_brute_force(q, p.t, 4.0 * p.t)).abs() < 1e-12);
    }
}

#[test]
fn grid_spec_is_validated() {
    let plan = SamplingPlan::default();
    let fs = Region::full_space(2).unwrap();
    for g in [GridSpec::new(0.5, 1e3, 16), GridSpec::new(10.0, 500.0, 16), GridSpec::new(1e2, 1e6, 4)] {
        assert!(matches!(g, Err(Error::Input(_))));
    }
    let bad = GridSpec { t_min: 10.0, t_max: 20.0, ..GridSpec::default() };
    assert!(phi_shell_content(&fs, 2.0, 0.0, &bad, &plan).is_err());
    assert!(phi_shell_content(&fs, 1.0, 0.0, &GridSpec::default(), &plan).is_err());
}

#[test]
fn classic_contents_need_finite_measure() {
    let plan = SamplingPlan::default();
    let e = Region::envelope(1.0, 3.0).unwrap();
    let c = classic_content_at_infinity(&e, -4.0, &GridSpec::default(), &plan).unwrap();
    assert!((c.upper - 0.5).abs() < 1e-6 && (c.lower - 0.5).abs() < 1e-6);
    assert!(classic_content_at_infinity(&Region::strip(1.0).unwrap(), -3.0, &GridSpec::default(), &plan).is_err());
}

#[test]
fn content_above_the_dimension_decays() {
    let plan = SamplingPlan::default();
    let e = Region::envelope(1.0, 3.0).unwrap();
    let c = phi_shell_content(&e, 2.0, -3.5, &GridSpec::default(), &plan).unwrap();
    let pts = &c.per_point_errors;
    assert!(pts.last().unwrap().normalized < 0.5 * pts[0].normalized);
    assert!(c.upper < 0.01);
}

#[test]
fn content_scales_with_r_on_exact_regions() {
    // r' > r'' above the dimension: upper(r') <= upper(r'') t_min^{r'' - r'}
    let plan = SamplingPlan::default();
    for (_, region, grid) in builtins() {
        let d = region.known_dimension().unwrap_or(0.0);
        let (r1, r2) = (d + 0.3, d + 0.1);
        let a = phi_shell_content(&region, 2.0, r1, &grid, &plan).unwrap();
        let b = phi_shell_content(&region, 2.0, r2, &grid, &plan).unwrap();
        let t_min = grid.window_start();
        assert!(a.upper <= b.upper * t_min.powf(r2 - r1) * (1.0 + 1e-9), "{:?}", region.params());
    }
}

#[test]
fn comparison_suites_hold() {
    let plan = SamplingPlan::default();
    let g = GridSpec::default();
    let e3 = Region::envelope(1.0, 3.0).unwrap();
    for phi in [2.0, 4.0, 10.0] {
        let rep = check_comparison_inequalities(&e3, &Comparison::PhiVsClassic { phi, r: -4.0 }, &g, &plan).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
    }
    let rep = check_comparison_inequalities(
        &Region::strip(1.0).unwrap(),
        &Comparison::Phi1VsPhi2 { phi1: 2.0, phi2: 8.0, r: -1.0 },
        &g,
        &plan,
    )
    .unwrap();
    assert!(rep.all_hold(), "{rep:?}");
    assert!(check_comparison_inequalities(&e3, &Comparison::PhiVsClassic { phi: 2.0, r: -1.0 }, &g, &plan).is_err());
    assert!(check_comparison_inequalities(&e3, &Comparison::Phi1VsPhi2 { phi1: 4.0, phi2: 2.0, r: -4.0 }, &g, &plan).is_err());
}

#[test]
fn floor_log_is_robust_at_exact_powers() {
    assert_eq!(floor_log(2.0, 8.0), 3);
    assert_eq!(floor_log(1.5, 1.5f64.powi(5)), 5);
    assert_eq!(floor_log(3.0, 8.9), 1);
    assert_eq!(floor_log(10.0, 1000.0), 3);
}

#[test]
fn dimension_ranges() {
    let plan = SamplingPlan::default();
    for (name, region, grid) in builtins() {
        let n = region.dim() as f64;
        for phi in [2.0, 4.0] {
            let d = estimate_phi_dimension(&region, phi, &grid, &plan).unwrap();
            assert!(d.lower_dim <= d.upper_dim + 1e-9, "{name}: {d:?}");
            assert!(d.upper_dim <= 0.05, "{name}");
            if region.measure_class() == MeasureClass::Infinite {
                assert!(d.upper_dim >= -n - 0.05, "{name}");
            }
        }
    }
}

#[test]
fn upper_content_is_nondecreasing_in_phi() {
    let plan = SamplingPlan::default();
    for (name, region, grid) in builtins() {
        let d = region.known_dimension().unwrap();
        let mut prev = 0.0;
        for phi in [1.5, 2.0, 4.0, 8.0] {
            let c = phi_shell_content(&region, phi, d, &grid, &plan).unwrap();
            assert!(c.lower <= c.upper);
            assert!(c.upper >= prev - 1e-9 - c.upper_error, "{name}: phi={phi}");
            prev = c.upper;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn upper_dimension_does_not_depend_on_phi(which in 0usize..6, i in 0usize..3, j in 0usize..3) {
        let phis = [1.5, 2.0, 4.0];
        let (_, region, grid) = builtins().swap_remove(which);
        let plan = SamplingPlan::default();
        let a = estimate_phi_dimension(&region, phis[i], &grid, &plan).unwrap();
        let b = estimate_phi_dimension(&region, phis[j], &grid, &plan).unwrap();
        prop_assert!((a.upper_dim - b.upper_dim).abs() <= 0.05, "{} vs {}", a.upper_dim, b.upper_dim);
    }
}
