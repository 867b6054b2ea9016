use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use shellzeta::closed_form::{
    fit_asymptotics, two_param_complex_dimensions, two_param_shell_volume, two_param_zeta, PoleKind, PoleWindow,
    QuasiperiodicProfile, TwoParamFamily,
};
use shellzeta::content::{estimate_phi_dimension, GridSpec};
use shellzeta::sampling::SamplingPlan;
use shellzeta::verify::two_param_points;
use shellzeta::zeta::zeta_eval;
use shellzeta::Error;

#[test]
fn quadrature_reproduces_the_closed_form() {
    let plan = SamplingPlan::default();
    let fam = TwoParamFamily::new(1.0 / 3.0, 2.0).unwrap();
    let region = fam.region().unwrap();
    let pts = two_param_points(fam.lattice_real());
    assert_eq!(pts.len(), 10);
    assert!(pts.iter().filter(|s| s.im != 0.0).count() >= 2);
    for s in pts {
        assert!(s.re >= fam.lattice_real() + 0.2 - 1e-12);
        let z = zeta_eval(&region, s, 1.0, &plan).unwrap().value;
        let cf = two_param_zeta(1.0 / 3.0, 2.0, s).unwrap();
        assert!((z - cf).norm() < 1e-6 * cf.norm(), "s={s}: {z} vs {cf}");
        let direct = 1.0 / ((s + 3.0) * (C::new(3.0, 0.0).powc(s + 3.0) - 2.0));
        assert!((cf - direct).norm() < 1e-12 * direct.norm());
    }
}

#[test]
fn other_parameters_match_too() {
    let plan = SamplingPlan::default();
    for (a, b) in [(0.25, 1.0), (0.2, 3.0)] {
        let fam = TwoParamFamily::new(a, b).unwrap();
        let region = fam.region().unwrap();
        for s in [C::new(fam.lattice_real() + 0.3, 0.0), C::new(fam.lattice_real() + 0.5, 1.5)] {
            let z = zeta_eval(&region, s, 1.0, &plan).unwrap().value;
            let cf = fam.zeta(s).unwrap();
            assert!((z - cf).norm() < 1e-6 * cf.norm(), "a={a} b={b} s={s}");
        }
    }
}

#[test]
fn poles_are_refused() {
    let fam = TwoParamFamily::new(1.0 / 3.0, 2.0).unwrap();
    assert!(matches!(fam.zeta(C::new(-3.0, 0.0)), Err(Error::PoleProximity(_))));
    let s = C::new(fam.lattice_real(), fam.imag_spacing());
    assert!(matches!(fam.zeta(s), Err(Error::PoleProximity(_))));
    assert!(TwoParamFamily::new(0.6, 2.0).is_err());
    assert!(TwoParamFamily::new(1.0 / 3.0, 0.5).is_err());
}

#[test]
fn lattice_and_residues() {
    let l = two_param_complex_dimensions(1.0 / 3.0, 2.0, &PoleWindow::imag(-20.0, 20.0)).unwrap();
    assert_eq!(l.principal_pole, -3.0);
    assert!((l.lattice_real - (2f64.ln() / 3f64.ln() - 3.0)).abs() < 1e-12);
    assert!((l.imag_spacing - 2.0 * PI / 3f64.ln()).abs() < 1e-12);
    assert_eq!(l.poles.iter().filter(|p| p.kind == PoleKind::Principal).count(), 1);
    // 2π/ln 3 ≈ 5.72, so k = -3..=3 fit in [-20, 20]
    assert_eq!(l.poles.len(), 8);
    for p in &l.poles {
        // residue from the Laurent coefficient, via a small circle
        let m = 256;
        let r = 1e-3;
        let mut acc = C::new(0.0, 0.0);
        for j in 0..m {
            let e = C::from_polar(r, 2.0 * PI * j as f64 / m as f64);
            acc += two_param_zeta(1.0 / 3.0, 2.0, p.s + e).unwrap() * e;
        }
        let res = acc / m as f64;
        assert!((res - p.residue).norm() < 1e-6 * p.residue.norm(), "{:?}: {res}", p.kind);
        assert_eq!(p.order, 1);
    }
    // the window excludes the principal pole when asked to
    let w = PoleWindow { re_min: Some(-2.5), im_min: -1.0, im_max: 1.0 };
    let l = two_param_complex_dimensions(1.0 / 3.0, 2.0, &w).unwrap();
    assert_eq!(l.poles.len(), 1);
}

#[test]
fn worked_shell_volumes() {
    assert!((two_param_shell_volume(1.0 / 3.0, 2.0, 3.0, 9.0).unwrap() - 2.0 / 9.0).abs() < 1e-14);
    assert!((two_param_shell_volume(1.0 / 3.0, 2.0, 9.0, 27.0).unwrap() - 2.0 / 9.0).abs() < 1e-14);
    let fam = TwoParamFamily::new(1.0 / 3.0, 2.0).unwrap();
    assert!(matches!(fam.shell_volume(0.5 * fam.strip_height, 9.0), Err(Error::Unsupported(_))));
}

#[test]
fn dimension_and_log_periodic_profile() {
    let plan = SamplingPlan::default();
    let fam = TwoParamFamily::new(1.0 / 3.0, 2.0).unwrap();
    let region = fam.region().unwrap();
    for phi in [2.0, 4.0] {
        let d = estimate_phi_dimension(&region, phi, &GridSpec::default(), &plan).unwrap();
        assert!((d.upper_dim - fam.lattice_real()).abs() < 0.05);
    }
    let profile = fam.profile(4096).unwrap();
    let fit = fit_asymptotics(&region, fam.lattice_real(), Some(&profile), &GridSpec::default(), &plan).unwrap();
    assert!(fit.rms_misfit < 0.01, "{fit:?}");
    // a constant cannot follow the oscillation
    let flat = fit_asymptotics(&region, fam.lattice_real(), None, &GridSpec::default(), &plan).unwrap();
    assert!(flat.rms_misfit > 5.0 * fit.rms_misfit);
}

#[test]
fn quasiperiodic_profiles() {
    let t = [1.0, 2f64.sqrt()];
    let f1 = |x: f64| (2.0 * PI * x).sin();
    let f2 = |x: f64| 2.0 + (2.0 * PI * x / 2f64.sqrt()).cos();
    let p = QuasiperiodicProfile::from_fns(t.to_vec(), &[&f1, &f2], 4096, shellzeta::closed_form::ProfileKind::Transcendental)
        .unwrap();
    for tau in [0.1, 1.7, -3.2, 40.0] {
        assert!((p.eval(tau) - f1(tau) - f2(tau)).abs() < 1e-5);
    }
    let flat = QuasiperiodicProfile::new(vec![1.0, 2.0], vec![vec![1.0, 1.0], vec![0.0, 1.0]], shellzeta::closed_form::ProfileKind::Algebraic);
    assert!(matches!(flat, Err(Error::Constraint(_))));
    let many = QuasiperiodicProfile::new(
        (1..=10).map(|k| k as f64).collect(),
        (1..=10).map(|_| vec![0.0, 1.0]).collect(),
        shellzeta::closed_form::ProfileKind::Algebraic,
    )
    .unwrap();
    assert!(many.truncated && many.quasiperiods.len() == 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pole_spacing_is_exact(a in 0.05f64..0.49, extra in 0.01f64..3.0, lo in -50.0f64..0.0, width in 10.0f64..80.0) {
        let c = 1.0 / a;
        let b = 2f64.ln() / c.ln() + extra;
        let l = two_param_complex_dimensions(a, b, &PoleWindow::imag(lo, lo + width)).unwrap();
        let ims: Vec<f64> = l.poles.iter().filter(|p| p.kind != PoleKind::Principal).map(|p| p.s.im).collect();
        for w in ims.windows(2) {
            prop_assert!((w[1] - w[0] - 2.0 * PI / c.ln()).abs() < 1e-12);
        }
        for p in &l.poles {
            prop_assert!(p.s.im >= lo && p.s.im <= lo + width);
        }
        prop_assert!((l.lattice_real - l.principal_pole - 2f64.ln() / c.ln()).abs() < 1e-12);
    }

    #[test]
    fn stacked_points_never_exceed_strip_height(a in 0.05f64..0.49, extra in 0.01f64..3.0, lx in 0.0f64..8.0, dy in 1e-9f64..10.0) {
        let c = 1.0 / a;
        let fam = TwoParamFamily::new(a, 2f64.ln() / c.ln() + extra).unwrap();
        let region = fam.region().unwrap();
        let y = fam.strip_height + 1e-12 + dy;
        prop_assert!(!region.contains(&[10f64.powf(lx), y]).unwrap());
    }
}
