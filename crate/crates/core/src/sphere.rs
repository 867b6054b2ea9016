//! Stereographic compactification, spherical contents at the north pole and
//! surface measures on centered spheres.

use num_complex::Complex64 as C;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::content::{classic_content_at_infinity, windowed_extrema, GridPoint, GridSpec};
use crate::error::{input, unsupported, Error, Result};
use crate::quad::{integrate_radial, integrate_linear, QuadScheme, Tail};
use crate::region::{unit_ball_volume, MeasureClass, Norm, Region};
use crate::report::InequalityReport;
use crate::sampling::{direction, shell_integral, stratum_rng, SamplingPlan};
use crate::shell::{tube_volume, Method};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpherePoint {
    pub coordinates: Vec<f64>,
}

impl SpherePoint {
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        let n2: f64 = coordinates.iter().map(|y| y * y).sum();
        if coordinates.len() < 2 || (n2 - 1.0).abs() > 1e-12 {
            return input(format!("sphere points need at least two coordinates and unit norm, got |y|^2 = {n2}"));
        }
        Ok(SpherePoint { coordinates })
    }

    pub fn north_pole(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        SpherePoint { coordinates: c }
    }

    /// Euclidean distance to the north pole.
    pub fn distance_to_north(&self) -> f64 {
        let (last, rest) = self.coordinates.split_last().expect("nonempty");
        (rest.iter().map(|y| y * y).sum::<f64>() + (1.0 - last).powi(2)).sqrt()
    }
}

/// Ψ(x) = (2x, |x|² - 1) / (|x|² + 1).
pub fn stereographic_project(x: &[f64]) -> SpherePoint {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let mut c: Vec<f64> = if r2.is_finite() && r2 < 1e300 {
        let d = r2 + 1.0;
        let mut c: Vec<f64> = x.iter().map(|v| 2.0 * v / d).collect();
        // (r² - 1)/(r² + 1) = 1 - 2/(r² + 1)
        c.push(if r2 > 1.0 { 1.0 - 2.0 / d } else { (r2 - 1.0) / d });
        c
    } else {
        let r = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let s: f64 = x.iter().map(|v| (v / r).powi(2)).sum::<f64>();
        let mut c: Vec<f64> = x.iter().map(|v| 2.0 * (v / r) / (s * r)).collect();
        c.push(1.0);
        c
    };
    if x.is_empty() {
        c = vec![-1.0];
    }
    SpherePoint { coordinates: c }
}

/// Ψ^{-1}; the north pole has no preimage.
pub fn inverse_project(y: &SpherePoint) -> Result<Vec<f64>> {
    let (last, rest) = y.coordinates.split_last().expect("nonempty");
    // 1 - y_{N+1} without cancellation near the north pole
    let gap = if *last > 0.0 { rest.iter().map(|v| v * v).sum::<f64>() / (1.0 + last) } else { 1.0 - last };
    if gap == 0.0 {
        return Err(Error::Degenerate("the north pole is the image of infinity".into()));
    }
    Ok(rest.iter().map(|v| v / gap).collect())
}

/// Area of the unit sphere S^N ⊂ R^{N+1}.
pub fn sphere_area(n: usize) -> f64 {
    (n + 1) as f64 * unit_ball_volume(n + 1)
}

/// Density of the pulled-back spherical volume, 2^N/(1+t²)^N.
fn weight(n: usize, t: f64) -> f64 {
    let t2 = t * t;
    if t2 > 1e100 {
        (n as f64 * (2.0f64.ln() - t2.ln())).exp() * (-(n as f64) * (1.0 / t2).ln_1p()).exp()
    } else {
        (2.0 / (1.0 + t2)).powi(n as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedVolume {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
    pub route: &'static str,
}

fn require_euclidean(region: &Region) -> Result<()> {
    if region.norm() != Norm::Euclidean {
        return unsupported("spherical and surface quantities are defined for Euclidean-norm regions only");
    }
    Ok(())
}

/// ∫_R^∞ g(t) dt for a nonnegative g with power-law decay.
fn radial_real(g: &(dyn Fn(f64) -> f64 + Sync), start: f64, kinks: &[f64]) -> Result<(f64, f64)> {
    let f = |t: f64| (C::new(g(t), 0.0), 0.0);
    let tail = |t: f64| -> Result<Option<Tail>> {
        let (g0, g1, g2) = (g(t), g(t / 10.0), g(t / 100.0));
        if !(g0 > 0.0 && g1 > 0.0 && g2 > 0.0) {
            return Ok(None);
        }
        let e1 = (g0 / g2).ln() / 100f64.ln();
        let e3 = (g0 / g1).ln() / 10f64.ln();
        if e1 >= -1.0 - 1e-3 {
            return Err(Error::Divergence(format!("integrand decays like t^{e1:.3}, too slowly to integrate")));
        }
        let v = g0 * t / (-e1 - 1.0);
        let v3 = if e3 < -1.0 { g0 * t / (-e3 - 1.0) } else { 2.0 * v };
        Ok(Some(Tail { value: C::new(v, 0.0), error: (v - v3).abs() + 1e-3 * v }))
    };
    let r = integrate_radial(&f, &tail, start, kinks, &QuadScheme::standard(), true)?;
    Ok((r.value.re, r.total_error()))
}

/// Uniform point of the ball of radius `hi`.
fn ball_point<R: Rng>(rng: &mut R, hi: f64, out: &mut [f64]) {
    let n = out.len() as f64;
    let u: f64 = rng.random();
    let r = hi * u.powf(1.0 / n);
    direction(rng, out);
    out.iter_mut().for_each(|x| *x *= r);
}

/// Monte Carlo ∫_{Ω \ B_R} 2^N/(1+|x|²)^N dx.
fn weighted_mc(region: &Region, radius: f64, plan: &SamplingPlan) -> WeightedVolume {
    let n = region.dim();
    let w = |p: &[f64]| weight(n, p.iter().map(|v| v * v).sum::<f64>().sqrt());
    let mut value = 0.0;
    let mut var = 0.0;
    let lo = radius.max(1.0);
    if radius < 1.0 {
        let ball = unit_ball_volume(n);
        let parts: Vec<(f64, f64)> = (0..plan.strata)
            .into_par_iter()
            .map(|k| {
                let mut rng = stratum_rng(plan.seed, &[radius, -1.0], k);
                let mut p = vec![0.0; n];
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..plan.samples_per_stratum {
                    ball_point(&mut rng, 1.0, &mut p);
                    let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let v = if r >= radius && region.contains_unchecked(&p) { w(&p) } else { 0.0 };
                    s1 += v;
                    s2 += v * v;
                }
                (s1, s2)
            })
            .collect();
        let m = (plan.strata * plan.samples_per_stratum) as f64;
        let (s1, s2) = parts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let mean = s1 / m;
        value += ball * mean;
        var += ball * ball * (s2 / m - mean * mean).max(0.0) / (m - 1.0);
    }
    // the full-space remainder beyond t is at most 2^N ω_N t^{-N}
    let bound = |t: f64| 2f64.powi(n as i32) * unit_ball_volume(n) * t.powi(-(n as i32));
    let mut hi = lo * 10.0;
    while bound(hi) > 1e-9 * bound(lo) {
        hi *= 10.0;
    }
    let (v, se, _) = shell_integral(region, lo, hi, plan, &w);
    value += v;
    var += se * se;
    WeightedVolume {
        value,
        abs_error: 3.0 * var.sqrt() + bound(hi) + 16.0 * f64::EPSILON * value,
        method: Method::MonteCarlo,
        route: "monte_carlo",
    }
}

/// ∫_{Ω \ B_R(0)} 2^N/(1+|x|²)^N dx by the best available route.
fn weighted_outer(region: &Region, radius: f64, plan: &SamplingPlan) -> Result<WeightedVolume> {
    let n = region.dim();
    let kinks = region.nonsmooth_radii(radius, 1e200);
    let start = radius;
    if region.exact_surface_measure(radius.max(1.0)).is_some() {
        let g = |t: f64| weight(n, t) * region.exact_surface_measure(t).unwrap_or(f64::NAN);
        let (value, err) = radial_real(&g, start, &kinks)?;
        return Ok(WeightedVolume { value, abs_error: err, method: Method::Exact, route: "surface_quadrature" });
    }
    if region.exact_tube_volume(radius, radius + 1.0).is_some() {
        // integration by parts: ∫ w dV = -∫ w'(t) V(R,t) dt
        let nf = n as f64;
        let g = |t: f64| {
            let v = region.exact_tube_volume(radius, t).unwrap_or(f64::NAN);
            2.0 * nf * t / (1.0 + t * t) * weight(n, t) * v
        };
        let (value, err) = radial_real(&g, start, &kinks)?;
        return Ok(WeightedVolume { value, abs_error: err, method: Method::Exact, route: "tube_quadrature" });
    }
    Ok(weighted_mc(region, radius, plan))
}

/// |Ψ(Ω)|_S.
pub fn spherical_volume(region: &Region, plan: &SamplingPlan) -> Result<WeightedVolume> {
    require_euclidean(region)?;
    weighted_outer(region, 0.0, plan)
}

/// |Ψ(Ω)|_S by Monte Carlo even when a quadrature route exists.
pub fn spherical_volume_mc(region: &Region, plan: &SamplingPlan) -> Result<WeightedVolume> {
    require_euclidean(region)?;
    Ok(weighted_mc(region, 0.0, plan))
}

fn check_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < std::f64::consts::PI) {
        return input(format!("delta must lie in (0, pi), got {delta}"));
    }
    Ok(1.0 / (0.5 * delta).tan())
}

/// |{N}_{δ,S} ∩ Ψ(Ω)|_S computed in R^N as the weighted volume of Ω outside
/// B_{cot(δ/2)}(0).
pub fn spherical_nbhd_volume(region: &Region, delta: f64, plan: &SamplingPlan) -> Result<WeightedVolume> {
    require_euclidean(region)?;
    let radius = check_delta(delta)?;
    weighted_outer(region, radius, plan)
}

/// Area of the geodesic cap of radius δ on S^N.
pub fn cap_area(n: usize, delta: f64) -> f64 {
    let f = |t: f64| (C::new(t.sin().powi(n as i32 - 1), 0.0), 0.0);
    let p = integrate_linear(&f, 0.0, delta, &[], &QuadScheme::standard(), true);
    n as f64 * unit_ball_volume(n) * p.value.re
}

/// Same quantity sampled directly on the sphere: uniform points of the
/// geodesic cap are pulled back and tested for membership.
pub fn spherical_nbhd_volume_direct(region: &Region, delta: f64, plan: &SamplingPlan) -> Result<WeightedVolume> {
    require_euclidean(region)?;
    check_delta(delta)?;
    let n = region.dim();
    let hits: Vec<u64> = (0..plan.strata)
        .into_par_iter()
        .map(|k| {
            let mut rng = stratum_rng(plan.seed, &[delta, -2.0], k);
            let mut dir = vec![0.0; n];
            let mut count = 0u64;
            let mut done = 0;
            while done < plan.samples_per_stratum {
                // θ with density ∝ sin^{N-1}θ on [0, δ] by rejection from θ^{N-1}
                let u: f64 = rng.random();
                let th = delta * u.powf(1.0 / n as f64);
                if n > 1 {
                    let acc = if th > 0.0 { (th.sin() / th).powi(n as i32 - 1) } else { 1.0 };
                    if rng.random::<f64>() >= acc {
                        continue;
                    }
                }
                done += 1;
                direction(&mut rng, &mut dir);
                let r = 1.0 / (0.5 * th).tan();
                let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                if region.contains_unchecked(&x) {
                    count += 1;
                }
            }
            count
        })
        .collect();
    let m = (plan.strata * plan.samples_per_stratum) as f64;
    let p = hits.iter().sum::<u64>() as f64 / m;
    let area = cap_area(n, delta);
    let se = area * (p * (1.0 - p) / (m - 1.0)).sqrt();
    Ok(WeightedVolume {
        value: area * p,
        abs_error: 3.0 * se + 16.0 * f64::EPSILON * area,
        method: Method::MonteCarlo,
        route: "cap_sampling",
    })
}

/// Geometric grid of spherical radii δ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaGrid {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points_per_decade: usize,
}

impl Default for DeltaGrid {
    fn default() -> Self {
        DeltaGrid { delta_min: 1e-6, delta_max: 1e-2, points_per_decade: 16 }
    }
}

impl DeltaGrid {
    /// δ-window matching the top decade of a t-grid through t = cot(δ/2).
    pub fn matching(grid: &GridSpec) -> Self {
        let d = |t: f64| 2.0 * (1.0 / t).atan();
        DeltaGrid { delta_min: d(grid.t_max), delta_max: d(grid.window_start()), points_per_decade: grid.points_per_decade }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta_min > 0.0 && self.delta_max > self.delta_min && self.delta_max < std::f64::consts::PI) {
            return input(format!("delta grid needs 0 < delta_min < delta_max < pi, got [{}, {}]", self.delta_min, self.delta_max));
        }
        if self.points_per_decade < 2 {
            return input("delta grid needs at least two points per decade");
        }
        Ok(())
    }

    /// Points of the lowest decade, where the estimate is taken.
    fn window(&self) -> Vec<f64> {
        let top = (self.delta_min * 10.0).min(self.delta_max);
        let k = (((top / self.delta_min).log10() * self.points_per_decade as f64).round() as usize).max(1);
        (0..=k).map(|i| self.delta_min * ((top / self.delta_min).ln() * i as f64 / k as f64).exp()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphericalContentEstimate {
    pub r: f64,
    pub upper: f64,
    pub lower: f64,
    pub delta_window: (f64, f64),
    pub upper_error: f64,
    pub lower_error: f64,
    pub points: Vec<GridPoint>,
}

/// Windowed sup/inf of |{N}_{δ,S} ∩ Ψ(Ω)|_S / δ^{N-r} over the lowest
/// decade of the δ-grid.
pub fn spherical_content(region: &Region, r: f64, grid: &DeltaGrid, plan: &SamplingPlan) -> Result<SphericalContentEstimate> {
    require_euclidean(region)?;
    grid.validate()?;
    let n = region.dim() as f64;
    let f = |d: f64| -> Result<GridPoint> {
        let v = spherical_nbhd_volume(region, d, plan)?;
        let s = ((n - r) * d.ln()).exp();
        Ok(GridPoint { t: d, volume: v.value, abs_error: v.abs_error / s, normalized: v.value / s })
    };
    let pts = grid.window();
    let w = windowed_extrema(&pts, 0, &f)?;
    Ok(SphericalContentEstimate {
        r,
        upper: w.upper,
        lower: w.lower,
        delta_window: (pts[0], *pts.last().expect("nonempty")),
        upper_error: w.upper_error,
        lower_error: w.lower_error,
        points: w.points,
    })
}

/// Constant of the lower spherical comparison bound.
pub fn sphere_lower_constant(n: usize, r: f64) -> f64 {
    let n = n as f64;
    let e = (n + r) / (n - r);
    -e * (2.0 * n / (n - r)).powf(-e) * 2f64.powf(r)
}

/// Both inequalities between upper spherical and classical contents and the
/// one between the lower contents.
pub fn check_sphere_comparison(region: &Region, r: f64, grid: &GridSpec, plan: &SamplingPlan) -> Result<InequalityReport> {
    require_euclidean(region)?;
    let n = region.dim();
    if region.measure_class() != MeasureClass::Finite {
        return unsupported("the spherical comparison needs a region of finite Lebesgue measure");
    }
    if !(r < -(n as f64)) {
        return unsupported(format!("the spherical comparison needs r < -N = {}, got {r}", -(n as f64)));
    }
    let classic = classic_content_at_infinity(region, r, grid, plan)?;
    let sph = spherical_content(region, r, &DeltaGrid::matching(grid), plan)?;
    let two_r = 2f64.powf(r);
    let low = sphere_lower_constant(n, r);
    let tol = |a: f64, b: f64| 1e-9 + a + b + 1e-6 * two_r * classic.upper.abs();
    let mut rep = InequalityReport::default();
    rep.push(
        "lower constant * upper classic <= upper spherical",
        low * classic.upper,
        sph.upper,
        tol(low * classic.upper_error, sph.upper_error),
    );
    rep.push("upper spherical <= 2^r upper classic", sph.upper, two_r * classic.upper, tol(sph.upper_error, two_r * classic.upper_error));
    rep.push("lower spherical <= 2^r lower classic", sph.lower, two_r * classic.lower, tol(sph.lower_error, two_r * classic.lower_error));
    rep.notes.push(format!(
        "r = {r}, lower constant {low:.6}, delta window [{:.3e}, {:.3e}]",
        sph.delta_window.0, sph.delta_window.1
    ));
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceMeasure {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

/// H^{N-1}(S_t(0) ∩ Ω).
pub fn surface_measure(region: &Region, t: f64, plan: &SamplingPlan) -> Result<SurfaceMeasure> {
    require_euclidean(region)?;
    if !(t > 0.0) || !t.is_finite() {
        return input(format!("sphere radius must be positive and finite, got {t}"));
    }
    if let Some(v) = region.exact_surface_measure(t) {
        return Ok(SurfaceMeasure { value: v, abs_error: 0.0, method: Method::Exact });
    }
    let n = region.dim();
    let area = n as f64 * unit_ball_volume(n) * t.powi(n as i32 - 1);
    let hits: Vec<u64> = (0..plan.strata)
        .into_par_iter()
        .map(|k| {
            let mut rng = stratum_rng(plan.seed, &[t, -3.0], k);
            let mut p = vec![0.0; n];
            let mut c = 0;
            for _ in 0..plan.samples_per_stratum {
                direction(&mut rng, &mut p);
                p.iter_mut().for_each(|x| *x *= t);
                if region.contains_unchecked(&p) {
                    c += 1;
                }
            }
            c
        })
        .collect();
    let m = (plan.strata * plan.samples_per_stratum) as f64;
    let p = hits.iter().sum::<u64>() as f64 / m;
    Ok(SurfaceMeasure {
        value: area * p,
        abs_error: 3.0 * area * (p * (1.0 - p) / (m - 1.0)).sqrt() + 16.0 * f64::EPSILON * area,
        method: Method::MonteCarlo,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceContentEstimate {
    pub r: f64,
    pub upper: f64,
    pub lower: f64,
    pub t_window: GridSpec,
    pub upper_error: f64,
    pub lower_error: f64,
    pub points: Vec<GridPoint>,
}

/// Windowed sup/inf of H^{N-1}(S_t(0) ∩ Ω)/t^{N-1+r} over the top decade.
pub fn surface_content(region: &Region, r: f64, grid: &GridSpec, plan: &SamplingPlan) -> Result<SurfaceContentEstimate> {
    require_euclidean(region)?;
    grid.validate()?;
    let n = region.dim() as f64;
    let f = |t: f64| -> Result<GridPoint> {
        let v = surface_measure(region, t, plan)?;
        let s = ((n - 1.0 + r) * t.ln()).exp();
        Ok(GridPoint { t, volume: v.value, abs_error: v.abs_error / s, normalized: v.value / s })
    };
    let start = grid.window_start() * (1.0 - 1e-12);
    let pts: Vec<f64> = grid.points().into_iter().filter(|t| *t >= start).collect();
    let w = windowed_extrema(&pts, grid.refinement_rounds, &f)?;
    Ok(SurfaceContentEstimate {
        r,
        upper: w.upper,
        lower: w.lower,
        t_window: grid.clone(),
        upper_error: w.upper_error,
        lower_error: w.lower_error,
        points: w.points,
    })
}

/// Shell ratios used for the φ ↓ 1 limit.
pub const DERIVATIVE_PHIS: [f64; 3] = [1.1, 1.01, 1.001];

/// Relative tolerance of both derivative checks.
pub const DERIVATIVE_TOL: f64 = 1e-3;

/// Compares d/dt |B_t ∩ Ω| and the φ ↓ 1 limit of |B_{t,φt} ∩ Ω|/ln φ with
/// H^{N-1}(S_t ∩ Ω) and t H^{N-1}(S_t ∩ Ω). Grid points whose stencil meets a
/// non-smooth radius are skipped with a note.
pub fn check_derivative_relation(region: &Region, t_grid: &[f64], plan: &SamplingPlan) -> Result<InequalityReport> {
    require_euclidean(region)?;
    let mut rep = InequalityReport::default();
    for &t in t_grid {
        if !(t > 0.0) || !t.is_finite() {
            return input(format!("grid radii must be positive and finite, got {t}"));
        }
        let h = 1e-5 * t;
        if region.exact_tube_volume(t - h, t + h).is_none() || region.exact_surface_measure(t).is_none() {
            return unsupported("the derivative relation needs exact tube volumes and surface measures");
        }
        let top = t * DERIVATIVE_PHIS[0];
        if let Some(k) = region.nonsmooth_radii(t - h, top).first() {
            rep.notes.push(format!("t = {t}: skipped, non-smooth radius {k} inside [t - h, 1.1 t]"));
            continue;
        }
        let s = surface_measure(region, t, plan)?.value;
        let scale = s.abs().max(1e-300);
        let d = tube_volume(region, t - h, t + h, plan)?.value / (2.0 * h);
        rep.push(format!("t = {t}: |dV/dt - H| / H"), (d - s).abs() / scale, DERIVATIVE_TOL, 0.0);
        let q: Vec<f64> = DERIVATIVE_PHIS
            .iter()
            .map(|&p| Ok(tube_volume(region, t, p * t, plan)?.value / p.ln()))
            .collect::<Result<Vec<_>>>()?;
        // linear extrapolation in φ - 1 through the two smallest ratios
        let (x1, x2) = (DERIVATIVE_PHIS[1] - 1.0, DERIVATIVE_PHIS[2] - 1.0);
        let lim = q[2] - (q[1] - q[2]) / (x1 - x2) * x2;
        let target = t * s;
        rep.push(format!("t = {t}: |lim shell/ln(phi) - t H| / (t H)"), (lim - target).abs() / (t * scale), DERIVATIVE_TOL, 0.0);
        let ratio = (q[1] - target).abs() / (q[2] - target).abs().max(1e-300 * target.abs());
        rep.notes.push(format!(
            "t = {t}: shell/ln(phi) at phi = 1.1, 1.01, 1.001 is {:.10e}, {:.10e}, {:.10e}; error ratio per decade {ratio:.2}",
            q[0], q[1], q[2]
        ));
    }
    Ok(rep)
}
