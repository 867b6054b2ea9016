//! Tube and shell volumes |B_{T,t}(0) ∩ Ω|, exact or by Monte Carlo, and the
//! layer-cake identity check.

use serde::Serialize;

use crate::error::{input, Result};
use crate::quad::QuadScheme;
use crate::region::Region;
use crate::sampling::{shell_integral, SamplingPlan};
use crate::zeta::{radial_moment, Kernel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShellVolumeResult {
    pub value: f64,
    /// 0 for exact results; 3 pooled standard errors (plus a rounding bound)
    /// for Monte Carlo.
    pub abs_error: f64,
    pub method: Method,
    pub samples_used: u64,
}

impl ShellVolumeResult {
    pub(crate) fn exact(value: f64) -> Self {
        ShellVolumeResult { value, abs_error: 0.0, method: Method::Exact, samples_used: 0 }
    }
}

fn check_radii(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0) || !lo.is_finite() {
        return input(format!("inner radius must be positive and finite, got {lo}"));
    }
    if !(hi >= lo) || !hi.is_finite() {
        return input(format!("outer radius {hi} must be finite and at least the inner radius {lo}"));
    }
    Ok(())
}

/// |B_{T,t}(0) ∩ Ω| in the region's norm. Uses the closed form when there is
/// one, stratified Monte Carlo otherwise.
pub fn tube_volume(region: &Region, lo: f64, hi: f64, plan: &SamplingPlan) -> Result<ShellVolumeResult> {
    check_radii(lo, hi)?;
    match region.exact_tube_volume(lo, hi) {
        Some(v) => Ok(ShellVolumeResult::exact(v)),
        None => tube_volume_mc(region, lo, hi, plan),
    }
}

/// Monte Carlo estimate of |B_{T,t}(0) ∩ Ω| even when a closed form exists.
pub fn tube_volume_mc(region: &Region, lo: f64, hi: f64, plan: &SamplingPlan) -> Result<ShellVolumeResult> {
    check_radii(lo, hi)?;
    if lo == hi {
        return Ok(ShellVolumeResult { value: 0.0, abs_error: 0.0, method: Method::MonteCarlo, samples_used: 0 });
    }
    let (value, se, n) = shell_integral(region, lo, hi, plan, &|_| 1.0);
    Ok(ShellVolumeResult {
        value,
        abs_error: 3.0 * se + 16.0 * f64::EPSILON * value,
        method: Method::MonteCarlo,
        samples_used: n,
    })
}

/// |B_{t,φt}(0) ∩ Ω|.
pub fn shell_volume(region: &Region, t: f64, phi: f64, plan: &SamplingPlan) -> Result<ShellVolumeResult> {
    if !(phi > 1.0) || !phi.is_finite() {
        return input(format!("shell ratio phi must exceed 1, got {phi}"));
    }
    if !(t > 0.0) {
        return input(format!("shell radius t must be positive, got {t}"));
    }
    tube_volume(region, t, phi * t, plan)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LayerCakeReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_gap: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

/// Compares two independent quadratures of ∫_{B_T(0)^c ∩ Ω} |x|^{-σ-N} dx
/// written through the tube function.
pub fn layer_cake_check(region: &Region, t0: f64, sigma: f64, plan: &SamplingPlan) -> Result<LayerCakeReport> {
    if !(t0 > 0.0) {
        return input(format!("truncation radius T must be positive, got {t0}"));
    }
    let s = num_complex::Complex64::new(sigma, 0.0);
    let a = radial_moment(region, s, t0, plan, &QuadScheme::standard(), Kernel::Value)?;
    let b = radial_moment(region, s, t0, plan, &QuadScheme::refined(), Kernel::Value)?;
    Ok(LayerCakeReport {
        lhs: a.value.re,
        rhs: b.value.re,
        abs_gap: (a.value.re - b.value.re).abs(),
        lhs_error: a.quad_error,
        rhs_error: b.quad_error,
    })
}
