//! Exact analytics for the stacked two-parameter family, and quasiperiodic
//! profiles for checking log-periodic tube asymptotics.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::content::{outer_volume, GridSpec};
use crate::error::{constraint, input, unsupported, Error, Result};
use crate::region::stacked::Stacked;
use crate::region::Region;
use crate::sampling::SamplingPlan;
use crate::shell::tube_volume;

/// Distance to a pole below which evaluation is refused.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Components kept from an ∞-quasiperiodic profile.
pub const MAX_COMPONENTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoParamFamily {
    pub a: f64,
    pub b: f64,
    pub strip_height: f64,
}

impl TwoParamFamily {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < 0.5) {
            return input(format!("a must lie in (0, 1/2), got {a}"));
        }
        let lc2 = 2f64.ln() / (1.0 / a).ln();
        if !(b > lc2) || !b.is_finite() {
            return input(format!("b must exceed log_(1/a) 2 = {lc2}, got {b}"));
        }
        let ab = a.powf(b);
        Ok(TwoParamFamily { a, b, strip_height: ab / (1.0 - 2.0 * ab) })
    }

    /// ln(1/a)
    fn ln_c(&self) -> f64 {
        -self.a.ln()
    }

    /// log_{1/a} 2
    pub fn log_c2(&self) -> f64 {
        2f64.ln() / self.ln_c()
    }

    pub fn finite_measure(&self) -> bool {
        self.b > 1.0 + self.log_c2()
    }

    pub fn principal_pole(&self) -> f64 {
        -(self.b + 1.0)
    }

    /// Real part of the pole lattice, also the φ-shell dimension.
    pub fn lattice_real(&self) -> f64 {
        self.log_c2() - (self.b + 1.0)
    }

    pub fn imag_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ln_c()
    }

    pub fn region(&self) -> Result<Region> {
        Region::stacked(self.a, self.b)
    }

    /// Sup-norm ζ(s;T) for any T in [strip_height, 1/a].
    pub fn zeta(&self, s: C) -> Result<C> {
        let sigma = s + self.b + 1.0;
        if sigma.norm() < POLE_TOLERANCE {
            return Err(Error::PoleProximity(format!("s = {s} is the pole -(b+1)")));
        }
        let d = (-sigma * self.a.ln()).exp() - 2.0;
        if d.norm() < POLE_TOLERANCE {
            return Err(Error::PoleProximity(format!("s = {s} lies on the pole lattice")));
        }
        Ok(1.0 / (sigma * d))
    }

    pub fn complex_dimensions(&self, window: &PoleWindow) -> Result<Vec<Pole>> {
        let re_min = window.re_min.unwrap_or(self.log_c2() - self.b - 3.0);
        if !(re_min > -self.b - 3.0) {
            return input(format!("window re_min must exceed -b-3 = {}, got {re_min}", -self.b - 3.0));
        }
        let mut out = Vec::new();
        if window.im_max < window.im_min {
            return Ok(out);
        }
        let p = self.principal_pole();
        if p > re_min && window.im_min <= 0.0 && 0.0 <= window.im_max {
            out.push(Pole { s: C::new(p, 0.0), order: 1, residue: C::new(-1.0, 0.0), kind: PoleKind::Principal });
        }
        let re = self.lattice_real();
        if re > re_min {
            let h = self.imag_spacing();
            let k0 = (window.im_min / h).ceil() as i64;
            let k1 = (window.im_max / h).floor() as i64;
            for k in k0..=k1 {
                let s = C::new(re, k as f64 * h);
                let residue = 1.0 / ((s + self.b + 1.0) * self.ln_c() * 2.0);
                out.push(Pole { s, order: 1, residue, kind: PoleKind::Lattice { k } });
            }
        }
        Ok(out)
    }

    /// Sup-norm shell volume |{t1 <= |x|_∞ < t2} ∩ Ω| for t1 >= strip_height.
    pub fn shell_volume(&self, t1: f64, t2: f64) -> Result<f64> {
        if t1 < self.strip_height {
            return unsupported(format!(
                "shells below the strip height {} do not reduce to x-slabs (t1 = {t1})",
                self.strip_height
            ));
        }
        if t2 < t1 || t2.is_nan() {
            return input(format!("need t1 <= t2, got {t1} and {t2}"));
        }
        Ok(Stacked::new(self.a, self.b).slab_area(t1, t2))
    }

    /// Limit profile G of the normalized tube (infinite measure) or
    /// complement (finite measure) volume, sampled on one period ln(1/a).
    pub fn profile(&self, samples: usize) -> Result<QuasiperiodicProfile> {
        let (b, c) = (self.b, 1.0 / self.a);
        let g: Vec<f64> = (0..samples)
            .map(|j| {
                let th = j as f64 / samples as f64;
                let two = 2f64.powf(-th);
                if self.finite_measure() {
                    let rho = 2.0 * c.powf(1.0 - b);
                    two * (1.0 + c.powf((1.0 - th) * (1.0 - b)) / (1.0 - rho)) / (b - 1.0)
                } else {
                    self.tube_profile(th)
                }
            })
            .collect();
        QuasiperiodicProfile::periodic(self.ln_c(), g)
    }

    /// Leading term of V(T,t)/t^{N+D} at t = c^{m+θ} when the set has
    /// infinite measure.
    fn tube_profile(&self, th: f64) -> f64 {
        let (b, c) = (self.b, 1.0 / self.a);
        let two = 2f64.powf(-th);
        let rho = 2.0 * c.powf(1.0 - b);
        let u = |x: f64| c.powf(x * (1.0 - b));
        if (b - 1.0).abs() < 1e-12 {
            // Σ_{k<=m} 2^{k-1} ln(t/c^k), normalized by 2^u
            let lc = c.ln();
            return two * lc * (th + 1.0);
        }
        // Σ_{k<=m} 2^{k-1} (c^{k(1-b)} - t^{1-b})/(1-b) normalized by t^{1-b} 2^u,
        // with ρ = 2 c^{1-b} > 1 here
        two / (1.0 - b) * (u(-th) * rho / (rho - 1.0) - 1.0)
    }
}

/// Free-function form of [`TwoParamFamily::zeta`].
pub fn two_param_zeta(a: f64, b: f64, s: C) -> Result<C> {
    TwoParamFamily::new(a, b)?.zeta(s)
}

pub fn two_param_complex_dimensions(a: f64, b: f64, window: &PoleWindow) -> Result<ComplexDimensionLattice> {
    let f = TwoParamFamily::new(a, b)?;
    Ok(ComplexDimensionLattice {
        principal_pole: f.principal_pole(),
        lattice_real: f.lattice_real(),
        imag_spacing: f.imag_spacing(),
        window: *window,
        poles: f.complex_dimensions(window)?,
    })
}

pub fn two_param_shell_volume(a: f64, b: f64, t1: f64, t2: f64) -> Result<f64> {
    TwoParamFamily::new(a, b)?.shell_volume(t1, t2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleWindow {
    /// Defaults to log_{1/a} 2 - b - 3.
    pub re_min: Option<f64>,
    pub im_min: f64,
    pub im_max: f64,
}

impl PoleWindow {
    pub fn imag(im_min: f64, im_max: f64) -> Self {
        PoleWindow { re_min: None, im_min, im_max }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum PoleKind {
    Principal,
    Lattice { k: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pole {
    pub s: C,
    pub order: u32,
    pub residue: C,
    pub kind: PoleKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexDimensionLattice {
    pub principal_pole: f64,
    pub lattice_real: f64,
    pub imag_spacing: f64,
    pub window: PoleWindow,
    pub poles: Vec<Pole>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Algebraic,
    Transcendental,
    /// Single period; not quasiperiodic in the strict sense.
    Periodic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combiner {
    #[default]
    Sum,
    Product,
}

/// G(τ) = H(g_1(τ), ..., g_n(τ)) with g_k periodic of period T_k, stored as
/// equally spaced samples over one period starting at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiperiodicProfile {
    pub quasiperiods: Vec<f64>,
    pub component_profiles: Vec<Vec<f64>>,
    pub kind: ProfileKind,
    #[serde(default)]
    pub combiner: Combiner,
    /// Set when more than [`MAX_COMPONENTS`] were supplied.
    #[serde(default)]
    pub truncated: bool,
}

fn check_component(t: f64, samples: &[f64]) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return input(format!("quasiperiods must be positive and finite, got {t}"));
    }
    if samples.len() < 2 || samples.iter().any(|v| !v.is_finite()) {
        return input("each component needs at least two finite samples");
    }
    let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1e-300) {
        return constraint("profile components must be nonconstant over their period");
    }
    Ok(())
}

impl QuasiperiodicProfile {
    pub fn new(quasiperiods: Vec<f64>, mut components: Vec<Vec<f64>>, kind: ProfileKind) -> Result<Self> {
        if quasiperiods.len() != components.len() {
            return input("one sample vector per quasiperiod is required");
        }
        if quasiperiods.len() < 2 {
            return input("a quasiperiodic profile needs at least two quasiperiods");
        }
        let mut periods = quasiperiods;
        let truncated = periods.len() > MAX_COMPONENTS;
        periods.truncate(MAX_COMPONENTS);
        components.truncate(MAX_COMPONENTS);
        for (t, c) in periods.iter().zip(&components) {
            check_component(*t, c)?;
        }
        Ok(QuasiperiodicProfile { quasiperiods: periods, component_profiles: components, kind, combiner: Combiner::Sum, truncated })
    }

    pub fn periodic(period: f64, samples: Vec<f64>) -> Result<Self> {
        check_component(period, &samples)?;
        Ok(QuasiperiodicProfile {
            quasiperiods: vec![period],
            component_profiles: vec![samples],
            kind: ProfileKind::Periodic,
            combiner: Combiner::Sum,
            truncated: false,
        })
    }

    pub fn with_combiner(mut self, combiner: Combiner) -> Self {
        self.combiner = combiner;
        self
    }

    /// Samples a function over one period of each component.
    pub fn from_fns(quasiperiods: Vec<f64>, fns: &[&dyn Fn(f64) -> f64], samples: usize, kind: ProfileKind) -> Result<Self> {
        let comps = quasiperiods
            .iter()
            .zip(fns)
            .map(|(t, f)| (0..samples).map(|j| f(t * j as f64 / samples as f64)).collect())
            .collect();
        Self::new(quasiperiods, comps, kind)
    }

    fn component(&self, k: usize, tau: f64) -> f64 {
        let t = self.quasiperiods[k];
        let v = &self.component_profiles[k];
        let n = v.len();
        let x = (tau / t).rem_euclid(1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let w = x - i as f64;
        v[i] * (1.0 - w) + v[(i + 1) % n] * w
    }

    /// G(τ)
    pub fn eval(&self, tau: f64) -> f64 {
        let vals = (0..self.quasiperiods.len()).map(|k| self.component(k, tau));
        match self.combiner {
            Combiner::Sum => vals.sum(),
            Combiner::Product => vals.product(),
        }
    }
}

pub fn quasiperiodic_profile_eval(profile: &QuasiperiodicProfile, tau: f64) -> f64 {
    profile.eval(tau)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecadeMisfit {
    pub t_start: f64,
    pub rms_misfit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticsFit {
    pub d: f64,
    /// Relative RMS misfit over the top decade.
    pub rms_misfit: f64,
    pub per_decade: Vec<DecadeMisfit>,
    /// Constant used when no profile was supplied.
    pub fitted_constant: Option<f64>,
    /// Tube volume V(1,t) when D >= -N, complement volume otherwise.
    pub uses_complement: bool,
}

/// Relative RMS misfit of the normalized tube volume against G(ln t), decade
/// by decade. With no profile, G is the constant fitted over the top decade.
pub fn fit_asymptotics(
    region: &Region,
    d: f64,
    profile: Option<&QuasiperiodicProfile>,
    grid: &GridSpec,
    plan: &SamplingPlan,
) -> Result<AsymptoticsFit> {
    grid.validate()?;
    let n = region.dim() as f64;
    let complement = d < -n;
    let pts = grid.points();
    use rayon::prelude::*;
    let vals: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&t| {
            let v = if complement { outer_volume(region, t, plan)?.0 } else { tube_volume(region, 1.0, t, plan)?.value };
            Ok((t, v / ((n + d) * t.ln()).exp()))
        })
        .collect::<Result<Vec<_>>>()?;
    let top = grid.window_start() * (1.0 - 1e-12);
    let fitted_constant = match profile {
        Some(_) => None,
        None => {
            let w: Vec<f64> = vals.iter().filter(|p| p.0 >= top).map(|p| p.1).collect();
            Some(w.iter().sum::<f64>() / w.len() as f64)
        }
    };
    let g = |t: f64| match profile {
        Some(p) => p.eval(t.ln()),
        None => fitted_constant.unwrap_or(0.0),
    };
    let rms = |sel: &[(f64, f64)]| -> f64 {
        let num: f64 = sel.iter().map(|&(t, v)| (v - g(t)).powi(2)).sum();
        let den: f64 = sel.iter().map(|&(t, _)| g(t).powi(2)).sum();
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            f64::INFINITY
        }
    };
    let mut per_decade = Vec::new();
    let mut lo = grid.t_min;
    while lo < grid.t_max * (1.0 - 1e-12) {
        let hi = (lo * 10.0).min(grid.t_max);
        let sel: Vec<(f64, f64)> = vals.iter().copied().filter(|p| p.0 >= lo * (1.0 - 1e-12) && p.0 <= hi * (1.0 + 1e-12)).collect();
        per_decade.push(DecadeMisfit { t_start: lo, rms_misfit: rms(&sel) });
        lo = hi;
    }
    let top_sel: Vec<(f64, f64)> = vals.iter().copied().filter(|p| p.0 >= top).collect();
    Ok(AsymptoticsFit { d, rms_misfit: rms(&top_sel), per_decade, fitted_constant, uses_complement: complement })
}
