//! Windowed φ-shell contents and dimensions at infinity, the classical
//! content of finite-measure regions, and their comparison inequalities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, unsupported, Error, Result};
use crate::region::{MeasureClass, Region};
use crate::report::InequalityReport;
use crate::sampling::SamplingPlan;
use crate::shell::{shell_volume, tube_volume, Method};
use crate::stats::{linear_fit, LinearFit};

/// Geometric evaluation grid standing in for t → ∞.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
    pub refinement_rounds: usize,
    /// Extra points added to the grid, e.g. a sequence the extremum is
    /// known to follow.
    #[serde(default)]
    pub anchors: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { t_min: 1e2, t_max: 1e6, points_per_decade: 16, refinement_rounds: 1, anchors: Vec::new() }
    }
}

impl GridSpec {
    pub fn new(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Self> {
        let g = GridSpec { t_min, t_max, points_per_decade, ..GridSpec::default() };
        g.validate()?;
        Ok(g)
    }

    pub fn with_anchors(mut self, anchors: Vec<f64>) -> Self {
        self.anchors = anchors;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min >= 1.0) || !self.t_max.is_finite() {
            return input(format!("grid needs t_min >= 1 and finite t_max, got [{}, {}]", self.t_min, self.t_max));
        }
        if !(self.t_max / self.t_min >= 100.0 * (1.0 - 1e-12)) {
            return input(format!("grid must span at least two decades, got [{}, {}]", self.t_min, self.t_max));
        }
        if self.points_per_decade < 8 {
            return input(format!("grid needs at least 8 points per decade, got {}", self.points_per_decade));
        }
        Ok(())
    }

    /// Sorted grid points including anchors inside [t_min, t_max].
    pub fn points(&self) -> Vec<f64> {
        let decades = (self.t_max / self.t_min).log10();
        let n = (decades * self.points_per_decade as f64).round().max(1.0) as usize;
        let step = (self.t_max / self.t_min).ln() / n as f64;
        let mut pts: Vec<f64> = (0..=n).map(|i| if i == n { self.t_max } else { self.t_min * (step * i as f64).exp() }).collect();
        pts.extend(self.anchors.iter().copied().filter(|a| *a >= self.t_min && *a <= self.t_max));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Lower end of the top decade.
    pub fn window_start(&self) -> f64 {
        self.t_max / 10.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub t: f64,
    /// Raw volume at t (shell, outer or surface depending on the estimate).
    pub volume: f64,
    pub abs_error: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContentEstimate {
    pub r: f64,
    pub phi: f64,
    /// Windowed sup of the normalized volume over the top decade.
    pub upper: f64,
    /// Windowed inf.
    pub lower: f64,
    pub window: GridSpec,
    pub argmax_t: f64,
    pub argmin_t: f64,
    pub upper_error: f64,
    pub lower_error: f64,
    pub per_point_errors: Vec<GridPoint>,
    pub warnings: Vec<String>,
}

impl ContentEstimate {
    pub fn max_error(&self) -> f64 {
        self.upper_error.max(self.lower_error)
    }
}

/// Sup/inf of `f` over the top decade, refined around each extremum.
pub(crate) struct Windowed {
    pub upper: f64,
    pub lower: f64,
    pub argmax: f64,
    pub argmin: f64,
    pub upper_error: f64,
    pub lower_error: f64,
    pub points: Vec<GridPoint>,
}

pub(crate) fn windowed_extrema(
    window: &[f64],
    rounds: usize,
    f: &(dyn Fn(f64) -> Result<GridPoint> + Sync),
) -> Result<Windowed> {
    let mut pts: Vec<GridPoint> = window.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let pick = |pts: &[GridPoint], max: bool| -> usize {
        let mut best = 0;
        for (i, p) in pts.iter().enumerate() {
            let better = if max { p.normalized > pts[best].normalized } else { p.normalized < pts[best].normalized };
            if better {
                best = i;
            }
        }
        best
    };
    for _ in 0..rounds {
        for max in [true, false] {
            let i = pick(&pts, max);
            let lo = pts[i.saturating_sub(1)].t;
            let hi = pts[(i + 1).min(pts.len() - 1)].t;
            if hi <= lo {
                continue;
            }
            let k = 8;
            let extra: Vec<f64> = (1..k)
                .map(|j| lo * ((hi / lo).ln() * j as f64 / k as f64).exp())
                .filter(|t| pts.iter().all(|p| p.t != *t))
                .collect();
            let new: Vec<GridPoint> = extra.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
            pts.extend(new);
            pts.sort_by(|a, b| a.t.total_cmp(&b.t));
        }
    }
    let imax = pick(&pts, true);
    let imin = pick(&pts, false);
    Ok(Windowed {
        upper: pts[imax].normalized,
        lower: pts[imin].normalized,
        argmax: pts[imax].t,
        argmin: pts[imin].t,
        upper_error: pts[imax].abs_error,
        lower_error: pts[imin].abs_error,
        points: pts,
    })
}

fn window_points(grid: &GridSpec) -> Vec<f64> {
    let start = grid.window_start() * (1.0 - 1e-12);
    grid.points().into_iter().filter(|t| *t >= start).collect()
}

/// t^{N+r} as a normalizer.
fn scale(t: f64, exponent: f64) -> f64 {
    (exponent * t.ln()).exp()
}

fn precision_warnings(w: &Windowed) -> Vec<String> {
    let mut out = Vec::new();
    for (label, v, e) in [("sup", w.upper, w.upper_error), ("inf", w.lower, w.lower_error)] {
        if e > 0.1 * v.abs() && e > 0.0 {
            out.push(format!("precision: Monte Carlo error {e:.3e} exceeds 10% of the windowed {label} {v:.3e}"));
        }
    }
    out
}

/// Windowed upper/lower φ-shell content of order r.
pub fn phi_shell_content(region: &Region, phi: f64, r: f64, grid: &GridSpec, plan: &SamplingPlan) -> Result<ContentEstimate> {
    if !(phi > 1.0) || !phi.is_finite() {
        return input(format!("phi must exceed 1, got {phi}"));
    }
    grid.validate()?;
    let n = region.dim() as f64;
    let f = |t: f64| -> Result<GridPoint> {
        let v = shell_volume(region, t, phi, plan)?;
        let s = scale(t, n + r);
        Ok(GridPoint { t, volume: v.value, abs_error: v.abs_error / s, normalized: v.value / s })
    };
    let w = windowed_extrema(&window_points(grid), grid.refinement_rounds, &f)?;
    Ok(ContentEstimate {
        r,
        phi,
        upper: w.upper,
        lower: w.lower,
        window: grid.clone(),
        argmax_t: w.argmax,
        argmin_t: w.argmin,
        upper_error: w.upper_error,
        lower_error: w.lower_error,
        warnings: precision_warnings(&w),
        per_point_errors: w.points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub phi: f64,
    pub upper_dim: f64,
    /// `-inf` when `lower_is_neg_infinity` is set.
    pub lower_dim: f64,
    pub lower_is_neg_infinity: bool,
    /// Fit through the running-maximum envelope.
    pub slope_fit: LinearFit,
    pub lower_fit: Option<LinearFit>,
    pub points: Vec<GridPoint>,
    pub warnings: Vec<String>,
}

/// Upper/lower φ-shell dimension by log-log regression of one-decade sliding
/// max/min envelopes of the shell function.
pub fn estimate_phi_dimension(region: &Region, phi: f64, grid: &GridSpec, plan: &SamplingPlan) -> Result<DimensionEstimate> {
    if !(phi > 1.0) || !phi.is_finite() {
        return input(format!("phi must exceed 1, got {phi}"));
    }
    grid.validate()?;
    let n = region.dim() as f64;
    let ts = grid.points();
    let pts: Vec<GridPoint> = ts
        .par_iter()
        .map(|&t| {
            let v = shell_volume(region, t, phi, plan)?;
            Ok(GridPoint { t, volume: v.value, abs_error: v.abs_error, normalized: v.value })
        })
        .collect::<Result<Vec<_>>>()?;
    if pts.iter().all(|p| p.volume == 0.0) {
        return Err(Error::Degenerate("every shell volume on the grid is zero".into()));
    }
    let last = grid.t_max / 10.0 * (1.0 + 1e-12);
    let mut env_max = Vec::new();
    let mut env_min = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        if p.t > last {
            break;
        }
        let top = p.t * 10.0 * (1.0 + 1e-12);
        let win = pts[i..].iter().take_while(|q| q.t <= top);
        let (mx, mn) = win.fold((0.0f64, f64::INFINITY), |(a, b), q| (a.max(q.volume), b.min(q.volume)));
        env_max.push((p.t, mx));
        env_min.push((p.t, mn));
    }
    let mut warnings = Vec::new();
    let fit_env = |env: &[(f64, f64)]| -> Option<LinearFit> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = env.iter().filter(|p| p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).unzip();
        (xs.len() >= 3).then(|| linear_fit(&xs, &ys))
    };
    let upper = fit_env(&env_max).ok_or_else(|| Error::Degenerate("too few nonzero shell volumes to fit".into()))?;
    if env_max.iter().any(|p| p.1 == 0.0) {
        warnings.push("some one-decade windows contain only empty shells; they were left out of the upper fit".into());
    }
    let zero_decades = {
        let mut d: Vec<i64> = env_min
            .iter()
            .filter(|p| p.1 == 0.0)
            .map(|p| ((p.0 / grid.t_min).log10() + 1e-9).floor() as i64)
            .collect();
        d.dedup();
        d.len()
    };
    let (lower_dim, lower_fit, flag) = if zero_decades >= 3 {
        (f64::NEG_INFINITY, None, true)
    } else {
        if zero_decades > 0 {
            warnings.push("the running minimum vanishes on some windows; they were left out of the lower fit".into());
        }
        match fit_env(&env_min) {
            Some(f) => (f.slope - n, Some(f), false),
            None => (f64::NEG_INFINITY, None, true),
        }
    };
    Ok(DimensionEstimate {
        phi,
        upper_dim: upper.slope - n,
        lower_dim,
        lower_is_neg_infinity: flag,
        slope_fit: upper,
        lower_fit,
        points: pts,
        warnings,
    })
}

/// |Ω \ B_t(0)| with an absolute error; Monte Carlo truncates at a radius
/// chosen so the fitted geometric tail stays below 1e-3 of the total.
pub(crate) fn outer_volume(region: &Region, t: f64, plan: &SamplingPlan) -> Result<(f64, f64, Method)> {
    if let Some(w) = region.exact_outer_volume(t) {
        return Ok((w, 0.0, Method::Exact));
    }
    let mut total = 0.0;
    let mut err = 0.0;
    let mut prev: Option<f64> = None;
    let mut lo = t;
    for _ in 0..60 {
        let d = tube_volume(region, lo, 10.0 * lo, plan)?;
        total += d.value;
        err += d.abs_error;
        lo *= 10.0;
        if let Some(p) = prev {
            if p > 0.0 && d.value < p {
                let rho = d.value / p;
                let tail = d.value * rho / (1.0 - rho);
                if tail < 1e-3 * total {
                    return Ok((total + tail, err + tail, Method::MonteCarlo));
                }
            }
        }
        prev = Some(d.value);
    }
    Err(Error::Precision(format!("outer volume beyond t = {t:.3e} did not settle within 60 decades")))
}

/// Windowed classical content lim |Ω \ B_t(0)| / t^{N+r} of a finite-measure region.
pub fn classic_content_at_infinity(region: &Region, r: f64, grid: &GridSpec, plan: &SamplingPlan) -> Result<ContentEstimate> {
    if region.measure_class() != MeasureClass::Finite {
        return unsupported("the classical content at infinity needs a region of finite Lebesgue measure");
    }
    let n = region.dim() as f64;
    if !(r < -n) {
        return input(format!("the classical content at infinity needs r < -N = {}, got {r}", -n));
    }
    grid.validate()?;
    let f = |t: f64| -> Result<GridPoint> {
        let (w, e, _) = outer_volume(region, t, plan)?;
        let s = scale(t, n + r);
        Ok(GridPoint { t, volume: w, abs_error: e / s, normalized: w / s })
    };
    let w = windowed_extrema(&window_points(grid), grid.refinement_rounds, &f)?;
    Ok(ContentEstimate {
        r,
        phi: f64::INFINITY,
        upper: w.upper,
        lower: w.lower,
        window: grid.clone(),
        argmax_t: w.argmax,
        argmin_t: w.argmin,
        upper_error: w.upper_error,
        lower_error: w.lower_error,
        warnings: precision_warnings(&w),
        per_point_errors: w.points,
    })
}

/// Which comparison to run, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Comparison {
    /// φ-shell against classical content (finite measure, r < -N).
    PhiVsClassic { phi: f64, r: f64 },
    /// Two shell ratios 1 < φ1 < φ2.
    Phi1VsPhi2 { phi1: f64, phi2: f64, r: f64 },
}

/// ⌊log_{φ1} φ2⌋, robust to rounding when φ2 is an exact power of φ1.
pub fn floor_log(phi1: f64, phi2: f64) -> u32 {
    let mut k = (phi2.ln() / phi1.ln()).floor().max(0.0) as u32;
    while phi1.powi(k as i32 + 1) <= phi2 * (1.0 + 1e-14) {
        k += 1;
    }
    while k > 0 && phi1.powi(k as i32) > phi2 * (1.0 + 1e-14) {
        k -= 1;
    }
    k
}

pub fn check_comparison_inequalities(
    region: &Region,
    comparison: &Comparison,
    grid: &GridSpec,
    plan: &SamplingPlan,
) -> Result<InequalityReport> {
    let n = region.dim() as f64;
    let mut rep = InequalityReport::default();
    match *comparison {
        Comparison::PhiVsClassic { phi, r } => {
            if region.measure_class() != MeasureClass::Finite {
                return input("phi-vs-classic comparison needs a region of finite measure");
            }
            if !(r < -n) {
                return input(format!("phi-vs-classic comparison needs r < -N = {}, got {r}", -n));
            }
            let shell = phi_shell_content(region, phi, r, grid, plan)?;
            let classic = classic_content_at_infinity(region, r, grid, plan)?;
            let k = 1.0 / (1.0 - phi.powf(n + r));
            let tol = 1e-9 + shell.max_error() * k + classic.max_error();
            rep.push("upper shell <= upper classic", shell.upper, classic.upper, tol);
            rep.push("upper classic <= upper shell / (1 - phi^(N+r))", classic.upper, k * shell.upper, tol);
            rep.push("lower shell / (1 - phi^(N+r)) <= lower classic", k * shell.lower, classic.lower, tol);
            rep.notes.push(format!("phi = {phi}, r = {r}"));
        }
        Comparison::Phi1VsPhi2 { phi1, phi2, r } => {
            if !(phi1 > 1.0 && phi2 > phi1) {
                return input(format!("phi1-vs-phi2 comparison needs 1 < phi1 < phi2, got {phi1}, {phi2}"));
            }
            let c1 = phi_shell_content(region, phi1, r, grid, plan)?;
            let c2 = phi_shell_content(region, phi2, r, grid, plan)?;
            let k = floor_log(phi1, phi2);
            let (up, low) = if (n + r).abs() < 1e-12 {
                (k as f64 + 1.0, k as f64)
            } else {
                let q = phi1.powf(n + r);
                let g = |m: u32| (1.0 - q.powi(m as i32)) / (1.0 - q);
                (g(k + 1), g(k))
            };
            let tol = 1e-9 + up * c1.max_error() + c2.max_error();
            rep.push("upper phi1 <= upper phi2", c1.upper, c2.upper, tol);
            rep.push("upper phi2 <= factor * upper phi1", c2.upper, up * c1.upper, tol);
            rep.push("factor * lower phi1 <= lower phi2", low * c1.lower, c2.lower, tol);
            let d1 = estimate_phi_dimension(region, phi1, grid, plan)?;
            let d2 = estimate_phi_dimension(region, phi2, grid, plan)?;
            rep.push("|upper dim phi1 - upper dim phi2| <= 0.05", (d1.upper_dim - d2.upper_dim).abs(), 0.05, 0.0);
            rep.push("lower dim phi1 <= lower dim phi2", d1.lower_dim, d2.lower_dim, 0.05);
            rep.notes.push(format!(
                "phi1 = {phi1}, phi2 = {phi2}, r = {r}, floor(log_phi1 phi2) = {k}, lower dims {} and {}",
                d1.lower_dim, d2.lower_dim
            ));
        }
    }
    Ok(rep)
}
