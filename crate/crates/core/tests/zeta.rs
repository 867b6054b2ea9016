use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use shellzeta::content::{phi_shell_content, GridSpec};
use shellzeta::region::Region;
use shellzeta::sampling::SamplingPlan;
use shellzeta::zeta::{
    check_residue_bounds, convergence_abscissa, residue_at_dimension, residue_limit_phi, with_bounds, zeta_derivative,
    zeta_derivative_fd, zeta_eval, zeta_eval_with, Route, DEFAULT_PSI_GRID,
};
use shellzeta::{Error, QuadScheme};

/// ∫_{T1}^{T2} t^{-s-N} H(t) dt by composite Simpson in ln t.
fn annulus_moment(region: &Region, s: C, t1: f64, t2: f64) -> C {
    let n = region.dim() as f64;
    let m = 20_000;
    let (a, b) = (t1.ln(), t2.ln());
    let h = (b - a) / m as f64;
    let f = |u: f64| {
        let t = u.exp();
        let w = region.exact_surface_measure(t).unwrap();
        (-(s + n) * u).exp() * w * t
    };
    let mut acc = f(a) + f(b);
    for i in 1..m {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn full_space_closed_form() {
    let plan = SamplingPlan::default();
    let fs = Region::full_space(2).unwrap();
    for (s, t0) in [(C::new(1.0, 0.0), 1.0), (C::new(0.5, 3.0), 1.0), (C::new(2.0, -1.0), 5.0)] {
        let z = zeta_eval(&fs, s, t0, &plan).unwrap();
        let want = 2.0 * PI * C::new(t0, 0.0).powc(-s) / s;
        assert!((z.value - want).norm() < 1e-8 * want.norm(), "{s}: {} vs {want}", z.value);
        let d = zeta_derivative(&fs, s, t0, &plan).unwrap();
        let dwant = -want / s - want * t0.ln();
        assert!((d.value - dwant).norm() < 1e-8 * dwant.norm(), "{s}: {} vs {dwant}", d.value);
    }
}

#[test]
fn divergence_at_and_below_the_abscissa() {
    let plan = SamplingPlan::default();
    let fs = Region::full_space(2).unwrap();
    for s in [-2.5, 0.0, 0.02] {
        assert!(matches!(zeta_eval(&fs, C::new(s, 0.0), 1.0, &plan), Err(Error::Divergence(_))), "s={s}");
    }
    let strip = Region::strip(1.0).unwrap();
    assert!(matches!(zeta_eval(&strip, C::new(-0.99, 0.0), 1.0, &plan), Err(Error::Divergence(_))));
    assert!(matches!(zeta_eval(&fs, C::new(1.0, 0.0), -1.0, &plan), Err(Error::Input(_))));
    // the value grows towards the abscissa
    let near = zeta_eval(&strip, C::new(-0.9, 0.0), 10.0, &plan).unwrap().value.re;
    let far = zeta_eval(&strip, C::new(-0.5, 0.0), 10.0, &plan).unwrap().value.re;
    assert!(near > 5.0 * far);
}

#[test]
fn routes_follow_the_measure_class() {
    let plan = SamplingPlan::default();
    let (d, route) = convergence_abscissa(&Region::envelope(1.0, 3.0).unwrap(), 1.0, &plan).unwrap();
    assert_eq!(route, Route::Complement);
    assert!((d + 4.0).abs() < 1e-12);
    let (d, route) = convergence_abscissa(&Region::strip(1.0).unwrap(), 1.0, &plan).unwrap();
    assert_eq!(route, Route::Tube);
    assert!((d + 1.0).abs() < 1e-12);
}

#[test]
fn refined_panels_agree() {
    let plan = SamplingPlan::default();
    for (region, s) in [
        (Region::strip(1.0).unwrap(), C::new(-0.5, 2.0)),
        (Region::envelope(1.0, 1.0).unwrap(), C::new(-1.5, 0.5)),
        (Region::envelope(1.0, 3.0).unwrap(), C::new(-3.5, 1.0)),
        (Region::tent(0.5).unwrap(), C::new(-1.2, 0.0)),
        (Region::stacked(1.0 / 3.0, 2.0).unwrap(), C::new(-2.0, 4.0)),
    ] {
        let a = zeta_eval_with(&region, s, 1.0, &plan, &QuadScheme::standard()).unwrap();
        let b = zeta_eval_with(&region, s, 1.0, &plan, &QuadScheme::refined()).unwrap();
        let gap = (a.value - b.value).norm();
        assert!(gap <= a.quad_error.max(b.quad_error), "{:?} s={s}: gap {gap:e}, errors {:e} {:e}", region.params(), a.quad_error, b.quad_error);
    }
}

#[test]
fn changing_t_adds_the_annulus_integral() {
    let plan = SamplingPlan::default();
    for (region, s, t1) in [
        (Region::strip(1.0).unwrap(), C::new(-0.4, 1.0), 2.0),
        (Region::full_space(2).unwrap(), C::new(0.7, -2.0), 1.0),
        (Region::envelope(1.0, 1.0).unwrap(), C::new(-1.0, 0.3), 2.0),
    ] {
        // t1 clear of the kinks (t = h, t = sqrt 2), where Simpson loses its order
        let t2 = 30.0;
        let z1 = zeta_eval(&region, s, t1, &plan).unwrap();
        let z2 = zeta_eval(&region, s, t2, &plan).unwrap();
        let direct = annulus_moment(&region, s, t1, t2);
        let gap = (z1.value - z2.value - direct).norm();
        assert!(gap <= z1.quad_error + z2.quad_error + 1e-9 * direct.norm(), "{:?}: {gap:e}", region.params());
    }
}

#[test]
fn derivative_matches_central_difference() {
    let plan = SamplingPlan::default();
    for (region, s) in [
        (Region::full_space(2).unwrap(), C::new(1.5, 0.0)),
        (Region::strip(1.0).unwrap(), C::new(-0.5, 1.0)),
        (Region::envelope(1.0, 1.0).unwrap(), C::new(-1.0, 0.0)),
        (Region::envelope(1.0, 3.0).unwrap(), C::new(-3.0, -2.0)),
        (Region::stacked(1.0 / 3.0, 2.0).unwrap(), C::new(0.0, 1.0)),
    ] {
        let a = zeta_derivative(&region, s, 1.0, &plan).unwrap().value;
        let f = zeta_derivative_fd(&region, s, 1.0, &plan, 1e-4).unwrap();
        assert!((a - f).norm() < 1e-5 * a.norm(), "{:?} s={s}: {a} vs {f}", region.params());
    }
}

#[test]
fn residues_and_their_bounds() {
    let plan = SamplingPlan::default();
    let g = GridSpec::default();
    let strip = Region::strip(1.0).unwrap();
    let r = residue_at_dimension(&strip, -1.0, 1.0, &plan).unwrap();
    assert!((r.value - 2.0).abs() < 0.1);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    let l = residue_limit_phi(&strip, -1.0, &DEFAULT_PSI_GRID, &g, &plan).unwrap();
    assert!((l.limit_estimate - 2.0).abs() < 0.06);
    // residues do not depend on T
    let r10 = residue_at_dimension(&strip, -1.0, 10.0, &plan).unwrap();
    assert!((r10.value - r.value).abs() < 1e-3);

    let e3 = Region::envelope(1.0, 3.0).unwrap();
    let r = residue_at_dimension(&e3, -4.0, 1.0, &plan).unwrap();
    let c = phi_shell_content(&e3, 2.0, -4.0, &g, &plan).unwrap();
    let rep = check_residue_bounds(&e3, -4.0, 2.0, &r, &c).unwrap();
    assert!(rep.all_hold(), "{rep:?}");
    let r = with_bounds(r, &rep);
    let b = r.bounds.unwrap();
    assert!(b.lower_bound <= r.value + r.total_error() && r.value <= b.upper_bound + r.total_error());
}

#[test]
fn double_pole_is_flagged() {
    // V(1, t) ~ ln t for the hyperbola, so ζ has a double pole at -2
    let plan = SamplingPlan::default();
    let hyp = Region::envelope(1.0, 1.0).unwrap();
    match residue_at_dimension(&hyp, -2.0, 1.0, &plan) {
        Ok(r) => assert!(!r.warnings.is_empty(), "{r:?}"),
        Err(e) => assert!(matches!(e, Error::Divergence(_) | Error::Precision(_)), "{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conjugate_symmetry(which in 0usize..4, dre in 0.1f64..2.0, im in -6.0f64..6.0) {
        let (region, d) = match which {
            0 => (Region::full_space(2).unwrap(), 0.0),
            1 => (Region::strip(1.0).unwrap(), -1.0),
            2 => (Region::envelope(1.0, 3.0).unwrap(), -4.0),
            _ => (Region::stacked(1.0 / 3.0, 2.0).unwrap(), 2f64.ln() / 3f64.ln() - 3.0),
        };
        let plan = SamplingPlan::default();
        let s = C::new(d + dre, im);
        let a = zeta_eval(&region, s, 1.0, &plan).unwrap();
        let b = zeta_eval(&region, s.conj(), 1.0, &plan).unwrap();
        prop_assert!((a.value - b.value.conj()).norm() <= a.quad_error + b.quad_error);
        prop_assert!(a.quad_error >= 0.0);
    }

    #[test]
    fn real_arguments_give_real_values(dre in 0.1f64..3.0) {
        let plan = SamplingPlan::default();
        let z = zeta_eval(&Region::envelope(1.0, 2.0).unwrap(), C::new(-3.0 + dre, 0.0), 1.0, &plan).unwrap();
        prop_assert_eq!(z.value.im, 0.0);
    }
}
