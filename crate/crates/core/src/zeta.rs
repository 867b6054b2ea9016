//! Distance zeta function at infinity through its radial (tube) form.
//!
//! Two equivalent radial forms are used:
//! tube:       ζ(s;T) = (s+N) ∫_T^∞ t^{-s-N-1} V(T,t) dt,
//! complement: ζ(s;T) = T^{-s-N} W(T) - (s+N) ∫_T^∞ t^{-s-N-1} W(t) dt,
//! with V(T,t) = |B_{T,t}(0) ∩ Ω| and W(t) = |Ω \ B_t(0)|. The second one is
//! an integration by parts of the first and converges down to the dimension
//! for finite-measure regions, where the tube form stops at Re s = -N.

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::content::{estimate_phi_dimension, phi_shell_content, ContentEstimate, GridSpec};
use crate::error::{input, Error, Result};
use crate::quad::{integrate_radial, QuadScheme, Tail};
use crate::region::{MeasureClass, Region};
use crate::report::InequalityReport;
use crate::sampling::SamplingPlan;
use crate::shell::{tube_volume_mc, Method};

/// Margin kept between Re s and the abscissa of convergence.
pub const ABSCISSA_MARGIN: f64 = 0.05;

const T_NOTE: &str = "value depends on the truncation radius T; changing T adds an entire function of s";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Tube,
    Complement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kernel {
    Value,
    Derivative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaValue {
    pub s: C,
    #[serde(rename = "T")]
    pub t_trunc: f64,
    pub value: C,
    /// Quadrature, tail and propagated Monte Carlo error combined.
    pub quad_error: f64,
    pub route: Route,
    pub method: Method,
    pub t_note: String,
}

struct Volumes<'a> {
    region: &'a Region,
    plan: SamplingPlan,
    exact: bool,
}

impl Volumes<'_> {
    fn tube(&self, lo: f64, hi: f64) -> (f64, f64) {
        if self.exact {
            (self.region.exact_tube_volume(lo, hi).unwrap_or(f64::NAN), 0.0)
        } else {
            match tube_volume_mc(self.region, lo, hi, &self.plan) {
                Ok(r) => (r.value, r.abs_error),
                Err(_) => (f64::NAN, 0.0),
            }
        }
    }

    fn outer(&self, t: f64) -> (f64, f64) {
        (self.region.exact_outer_volume(t).unwrap_or(f64::NAN), 0.0)
    }
}

/// Route the evaluation will take and the abscissa it converges beyond.
pub fn convergence_abscissa(region: &Region, t0: f64, plan: &SamplingPlan) -> Result<(f64, Route)> {
    let d = match region.known_dimension() {
        Some(d) => d,
        None => estimate_phi_dimension(region, 2.0, &GridSpec::default(), plan)?.upper_dim,
    };
    let n = region.dim() as f64;
    let route = choose_route(region, t0);
    Ok(match route {
        Route::Complement => (d, route),
        Route::Tube => (d.max(-n), route),
    })
}

fn choose_route(region: &Region, t0: f64) -> Route {
    if region.measure_class() == MeasureClass::Finite
        && region.exact_outer_volume(t0).is_some()
        && region.exact_outer_volume(t0 * 1e6).is_some()
    {
        Route::Complement
    } else {
        Route::Tube
    }
}

/// t^{-s-N} F as a complex number, computed in log form.
fn power_times(s_plus_n: C, lt: f64, f: f64) -> C {
    if f <= 0.0 {
        return C::new(0.0, 0.0);
    }
    (C::new(f.ln(), 0.0) - s_plus_n * lt).exp()
}

/// Radial evaluation of ζ(s;T) or ζ'(s;T) with no margin check; divergence
/// is still detected by the quadrature itself.
pub(crate) fn radial_moment(
    region: &Region,
    s: C,
    t0: f64,
    plan: &SamplingPlan,
    scheme: &QuadScheme,
    kernel: Kernel,
) -> Result<ZetaValue> {
    if !(t0 > 0.0) || !t0.is_finite() {
        return input(format!("truncation radius T must be positive and finite, got {t0}"));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return input("s must be finite");
    }
    let n = region.dim() as f64;
    let sn = s + n;
    let route = choose_route(region, t0);
    let exact = region.exact_tube_volume(t0, 2.0 * t0).is_some() && region.exact_tube_volume(t0, 1e6 * t0).is_some();
    let vols = Volumes { region, plan: *plan, exact: exact || route == Route::Complement };
    let method = if vols.exact { Method::Exact } else { Method::MonteCarlo };
    let sign = match route {
        Route::Tube => 1.0,
        Route::Complement => -1.0,
    };
    let vol = |t: f64| match route {
        Route::Tube => vols.tube(t0, t),
        Route::Complement => vols.outer(t),
    };
    // kernel factor K(t) with f(t) = sign * t^{-s-N-1} F(t) K(t)
    let factor = |lt: f64| match kernel {
        Kernel::Value => sn,
        Kernel::Derivative => C::new(1.0, 0.0) - sn * lt,
    };
    let integrand = |t: f64| -> (C, f64) {
        let (f, e) = vol(t);
        // volumes near the subnormal range have lost their relative precision;
        // reporting them as non-finite hands over to the analytic tail
        if !f.is_finite() || (f > 0.0 && f < 1e-280) {
            return (C::new(f64::NAN, f64::NAN), 0.0);
        }
        let lt = t.ln();
        let k = factor(lt) * sign / t;
        let v = power_times(sn, lt, f) * k;
        let err = if e > 0.0 && f > 0.0 { v.norm() * e / f } else { power_times(sn, lt, e).norm() * k.norm() };
        (v, err)
    };
    let tail = |t: f64| -> Result<Option<Tail>> {
        if t / 1e3 < t0 * (1.0 - 1e-12) {
            return Ok(None);
        }
        let (f0, e0) = vol(t);
        let f1 = vol(t / 10.0).0;
        let f2 = vol(t / 100.0).0;
        let f3 = vol(t / 1000.0).0;
        if !(f0 > 0.0 && f1 > 0.0 && f2 > 0.0 && f3 > 0.0) {
            return Ok(None);
        }
        let lt = t.ln();
        let base = power_times(sn, lt, f0) * sign;
        let model = |e: f64| -> C {
            let alpha = sn - e;
            match kernel {
                Kernel::Value => base * sn / alpha,
                Kernel::Derivative => base * (alpha.inv() - sn * (lt / alpha + (alpha * alpha).inv())),
            }
        };
        let ln100 = 100f64.ln();
        let e1 = (f0 / f2).ln() / ln100;
        let e2 = (f1 / f3).ln() / ln100;
        let e3 = (f0 / f1).ln() / 10f64.ln();
        let alpha_re = (sn.re - e1).min(sn.re - e3);
        if alpha_re <= 1e-3 {
            return Err(Error::Divergence(format!(
                "volume growth exponent {e1:.4} at t = {t:.3e} leaves Re(s) + N - exponent = {alpha_re:.2e} <= 0; the \
                 integral diverges at or below the abscissa of convergence"
            )));
        }
        let v1 = model(e1);
        let spread = (v1 - model(e2)).norm().max((v1 - model(e3)).norm());
        let mc = if f0 > 0.0 { v1.norm() * e0 / f0 } else { 0.0 };
        Ok(Some(Tail { value: v1, error: spread + 1e-3 * v1.norm() + mc }))
    };
    let kinks = region.nonsmooth_radii(t0, scheme.t_cap);
    let r = integrate_radial(&integrand, &tail, t0, &kinks, scheme, vols.exact)?;
    let mut value = r.value;
    let mut error = r.total_error();
    if route == Route::Complement {
        let (w, _) = vols.outer(t0);
        let lt = t0.ln();
        let boundary = power_times(sn, lt, w);
        value += match kernel {
            Kernel::Value => boundary,
            Kernel::Derivative => -boundary * lt,
        };
        error += 4.0 * f64::EPSILON * boundary.norm();
    }
    if s.im == 0.0 {
        value.im = 0.0;
    }
    Ok(ZetaValue { s, t_trunc: t0, value, quad_error: error, route, method, t_note: T_NOTE.to_string() })
}

fn check_half_plane(region: &Region, s: C, t0: f64, plan: &SamplingPlan) -> Result<()> {
    let (abscissa, _) = convergence_abscissa(region, t0, plan)?;
    if s.re <= abscissa + ABSCISSA_MARGIN {
        return Err(Error::Divergence(format!(
            "Re s = {} is not above the abscissa of convergence {abscissa:.4} plus margin {ABSCISSA_MARGIN}; the \
             half-plane of convergence is optimal, so the integral diverges or is numerically unreliable there",
            s.re
        )));
    }
    Ok(())
}

/// ζ_{∞,Ω}(s;T) through the radial functional equation.
pub fn zeta_eval(region: &Region, s: C, t0: f64, plan: &SamplingPlan) -> Result<ZetaValue> {
    zeta_eval_with(region, s, t0, plan, &QuadScheme::standard())
}

/// As [`zeta_eval`] with an explicit panel scheme.
pub fn zeta_eval_with(region: &Region, s: C, t0: f64, plan: &SamplingPlan, scheme: &QuadScheme) -> Result<ZetaValue> {
    check_half_plane(region, s, t0, plan)?;
    radial_moment(region, s, t0, plan, scheme, Kernel::Value)
}

/// ζ'_{∞,Ω}(s;T) by differentiating the radial integrand in s.
pub fn zeta_derivative(region: &Region, s: C, t0: f64, plan: &SamplingPlan) -> Result<ZetaValue> {
    check_half_plane(region, s, t0, plan)?;
    radial_moment(region, s, t0, plan, &QuadScheme::standard(), Kernel::Derivative)
}

/// Central difference (ζ(s+h) - ζ(s-h)) / 2h, the cross-check for
/// [`zeta_derivative`].
pub fn zeta_derivative_fd(region: &Region, s: C, t0: f64, plan: &SamplingPlan, h: f64) -> Result<C> {
    let plus = zeta_eval(region, s + h, t0, plan)?;
    let minus = zeta_eval(region, s - h, t0, plan)?;
    Ok((plus.value - minus.value) / (2.0 * h))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidueBounds {
    pub lower_bound: f64,
    pub upper_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueEstimate {
    #[serde(rename = "D")]
    pub d: f64,
    pub value: f64,
    pub extrapolation_error: f64,
    /// Quadrature error carried through the extrapolation.
    pub quad_error: f64,
    /// ε·ζ(D+ε) for ε = 0.2, 0.1, 0.05, 0.025.
    pub samples: Vec<(f64, f64)>,
    pub bounds: Option<ResidueBounds>,
    pub warnings: Vec<String>,
}

impl ResidueEstimate {
    pub fn total_error(&self) -> f64 {
        self.extrapolation_error + self.quad_error
    }
}

pub const RESIDUE_EPSILONS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Richardson table for a series in powers of ε sampled with halving steps.
fn richardson(g: &[f64]) -> Vec<Vec<f64>> {
    let mut table = vec![g.to_vec()];
    for j in 1..g.len() {
        let prev = &table[j - 1];
        let f = 2f64.powi(j as i32);
        let row: Vec<f64> = (1..prev.len()).map(|k| (f * prev[k] - prev[k - 1]) / (f - 1.0)).collect();
        table.push(row);
    }
    table
}

/// Richardson extrapolation of ε·ζ(D+ε) to ε → 0⁺.
pub fn residue_at_dimension(region: &Region, d: f64, t0: f64, plan: &SamplingPlan) -> Result<ResidueEstimate> {
    if !d.is_finite() {
        return input("residue location D must be finite");
    }
    let mut samples = Vec::new();
    let mut qerr: f64 = 0.0;
    for &eps in &RESIDUE_EPSILONS {
        let z = radial_moment(region, C::new(d + eps, 0.0), t0, plan, &QuadScheme::standard(), Kernel::Value)?;
        samples.push((eps, eps * z.value.re));
        qerr = qerr.max(eps * z.quad_error);
    }
    let g: Vec<f64> = samples.iter().map(|p| p.1).collect();
    let table = richardson(&g);
    let value = table[3][0];
    let extrapolation_error = (value - table[2][1]).abs().max(0.5 * (value - table[2][0]).abs());
    // worst-case amplification of per-level errors by the extrapolation weights
    let gain: f64 = (0..4)
        .map(|k| {
            let mut unit = [0.0; 4];
            unit[k] = 1.0;
            richardson(&unit)[3][0].abs()
        })
        .sum();
    let mut warnings = Vec::new();
    let diffs: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let signs: Vec<f64> = diffs.iter().filter(|d| d.abs() > 1e-9 * scale).map(|d| d.signum()).collect();
    if signs.windows(2).any(|w| w[0] != w[1]) {
        warnings.push("extrapolant is not monotone in ε; the pole may not be simple or D may be misestimated".into());
    }
    if g[3].abs() > 1.5 * g[2].abs() && g[2].abs() > 1.5 * g[1].abs() {
        warnings.push("ε·ζ(D+ε) grows as ε shrinks; the pole at D appears to be of higher order or D is too large".into());
    }
    Ok(ResidueEstimate { d, value, extrapolation_error, quad_error: gain * qerr, samples, bounds: None, warnings })
}

/// Residue sandwich between scaled lower and upper φ-shell contents at D.
pub fn check_residue_bounds(
    region: &Region,
    d: f64,
    phi: f64,
    residue: &ResidueEstimate,
    contents: &ContentEstimate,
) -> Result<InequalityReport> {
    if !(phi > 1.0) {
        return input(format!("phi must exceed 1, got {phi}"));
    }
    if (contents.r - d).abs() > 1e-12 || (contents.phi - phi).abs() > 1e-12 {
        return input("contents must be evaluated at r = D and the same phi");
    }
    let n = region.dim() as f64;
    let lphi = phi.ln();
    let (lo_factor, hi_factor, label) = if d >= -n {
        (1.0 / (phi.powf(n + d) * lphi), 1.0 / lphi, "D in [-N, 0]")
    } else {
        let f = -(n + d) / (1.0 - phi.powf(n + d));
        (f, f, "D < -N")
    };
    let lower_bound = lo_factor * contents.lower;
    let upper_bound = hi_factor * contents.upper;
    let tol = residue.total_error() + lo_factor.max(hi_factor) * contents.max_error() + 1e-9;
    let mut rep = InequalityReport::default();
    rep.notes.push(format!("branch {label}, phi = {phi}"));
    rep.push("lower content bound <= residue", lower_bound, residue.value, tol);
    rep.push("residue <= upper content bound", residue.value, upper_bound, tol);
    Ok(rep)
}

/// Attaches sandwich bounds to a residue estimate.
pub fn with_bounds(mut residue: ResidueEstimate, report: &InequalityReport) -> ResidueEstimate {
    if report.entries.len() == 2 {
        residue.bounds = Some(ResidueBounds { lower_bound: report.entries[0].lhs, upper_bound: report.entries[1].rhs });
    }
    residue
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueLimit {
    pub limit_estimate: f64,
    /// (ψ, upper content / ln ψ, lower content / ln ψ)
    pub points: Vec<(f64, f64, f64)>,
    pub warnings: Vec<String>,
}

pub const DEFAULT_PSI_GRID: [f64; 4] = [1.5, 1.25, 1.1, 1.05];

/// lim_{ψ→1⁺} M_ψ^D / ln ψ, extrapolated linearly in ψ - 1.
pub fn residue_limit_phi(
    region: &Region,
    d: f64,
    psi_grid: &[f64],
    grid: &GridSpec,
    plan: &SamplingPlan,
) -> Result<ResidueLimit> {
    if psi_grid.len() < 2 {
        return input("psi grid needs at least two ratios");
    }
    if psi_grid.iter().any(|p| !(*p > 1.0)) {
        return input("every psi must exceed 1");
    }
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for &psi in psi_grid {
        let c = phi_shell_content(region, psi, d, grid, plan)?;
        let l = psi.ln();
        if c.upper > 0.0 && (c.upper - c.lower) > 0.05 * c.upper {
            warnings.push(format!(
                "not psi-shell measurable on the window at psi = {psi}: upper {:.6} vs lower {:.6}",
                c.upper, c.lower
            ));
        }
        points.push((psi, c.upper / l, c.lower / l));
    }
    // least-squares line through the midpoints against ψ - 1
    let xs: Vec<f64> = points.iter().map(|p| p.0 - 1.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| 0.5 * (p.1 + p.2)).collect();
    let fit = crate::stats::linear_fit(&xs, &ys);
    Ok(ResidueLimit { limit_estimate: fit.intercept, points, warnings })
}
