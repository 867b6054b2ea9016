//! Unbounded measurable regions Ω ⊆ R^N.
//!
//! A [`Region`] is immutable once built. It carries a membership predicate and,
//! where a closed form is known, exact tube, outer and surface volumes.

mod envelope;
mod spec;
pub(crate) mod stacked;
mod tent;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{constraint, input, Result};
use envelope::Envelope;
pub use spec::{parse_region, region_to_json};
use stacked::Stacked;
use tent::Tent;

/// Largest ambient dimension accepted.
pub const MAX_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    Euclidean,
    Sup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureClass {
    Finite,
    Infinite,
    Unknown,
}

/// Builder parameters for every supported family.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionParams {
    /// All of R^N.
    FullSpace { dim: usize },
    /// {x_N > 0} in R^N.
    HalfSpace { dim: usize },
    /// {0 < y < h} in R².
    Strip { h: f64 },
    /// {x > x0, 0 < y < x^{-b}} in R².
    Envelope { x0: f64, b: f64 },
    /// ∪_{n>=0} (2^{2n+1}, 2^{2n+1} + 4^{-nq}) in R.
    Tent { q: f64 },
    /// The stacked two-parameter set in R².
    StackedTwoParam { a: f64, b: f64 },
    /// Union of components assumed pairwise disjoint (not checked).
    DisjointUnion(Vec<RegionParams>),
    Translate { inner: Box<RegionParams>, offset: Vec<f64> },
    Scale { inner: Box<RegionParams>, factor: f64 },
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    FullSpace,
    HalfSpace,
    Strip(f64),
    Envelope(Envelope),
    Tent(Tent),
    Stacked(Stacked),
    Union(Vec<Shape>),
    Translate(Box<Shape>, Vec<f64>),
    Scale(Box<Shape>, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    params: RegionParams,
    shape: Shape,
    dim: usize,
    norm: Norm,
    measure_class: MeasureClass,
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Unit ball volume of the given norm.
pub(crate) fn norm_ball_volume(norm: Norm, n: usize) -> f64 {
    match norm {
        Norm::Euclidean => unit_ball_volume(n),
        Norm::Sup => 2f64.powi(n as i32),
    }
}

/// c (t^n - T^n) without overflow or cancellation.
pub(crate) fn annulus(c: f64, n: usize, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let ni = n as i32;
    if lo < 1e-8 * hi {
        return c * (hi.powi(ni) - lo.powi(ni));
    }
    c * lo.powi(ni) * (n as f64 * (hi / lo).ln()).exp_m1()
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return constraint(format!("{name} must be a positive finite number, got {v}"));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return constraint(format!("ambient dimension must satisfy 1 <= N <= {MAX_DIM}, got {dim}"));
    }
    Ok(())
}

impl Shape {
    fn build(p: &RegionParams) -> Result<(Shape, usize)> {
        Ok(match p {
            RegionParams::FullSpace { dim } => {
                check_dim(*dim)?;
                (Shape::FullSpace, *dim)
            }
            RegionParams::HalfSpace { dim } => {
                check_dim(*dim)?;
                (Shape::HalfSpace, *dim)
            }
            RegionParams::Strip { h } => {
                check_positive("strip height h", *h)?;
                (Shape::Strip(*h), 2)
            }
            RegionParams::Envelope { x0, b } => {
                check_positive("envelope start x0", *x0)?;
                check_positive("envelope exponent b", *b)?;
                (Shape::Envelope(Envelope { x0: *x0, b: *b }), 2)
            }
            RegionParams::Tent { q } => {
                check_positive("tent exponent q", *q)?;
                (Shape::Tent(Tent { q: *q }), 1)
            }
            RegionParams::StackedTwoParam { a, b } => {
                if !(*a > 0.0 && *a < 0.5) {
                    return constraint(format!("stacked family needs a in (0, 1/2), got {a}"));
                }
                let bmin = 2f64.ln() / (1.0 / a).ln();
                if !(*b > bmin) || !b.is_finite() {
                    return constraint(format!("stacked family needs b > log_(1/a) 2 = {bmin}, got {b}"));
                }
                (Shape::Stacked(Stacked::new(*a, *b)), 2)
            }
            RegionParams::DisjointUnion(parts) => {
                if parts.is_empty() {
                    return constraint("disjoint union needs at least one component");
                }
                let mut shapes = Vec::new();
                let mut dim = None;
                for part in parts {
                    let (s, d) = Shape::build(part)?;
                    if *dim.get_or_insert(d) != d {
                        return constraint(format!("union components live in different dimensions ({} and {d})", dim.unwrap()));
                    }
                    shapes.push(s);
                }
                (Shape::Union(shapes), dim.unwrap())
            }
            RegionParams::Translate { inner, offset } => {
                let (s, d) = Shape::build(inner)?;
                if offset.len() != d {
                    return constraint(format!("translation vector has {} coordinates, region has {d}", offset.len()));
                }
                if offset.iter().any(|v| !v.is_finite()) {
                    return constraint("translation vector must be finite");
                }
                (Shape::Translate(Box::new(s), offset.clone()), d)
            }
            RegionParams::Scale { inner, factor } => {
                check_positive("scale factor", *factor)?;
                let (s, d) = Shape::build(inner)?;
                (Shape::Scale(Box::new(s), *factor), d)
            }
        })
    }

    fn contains(&self, p: &[f64]) -> bool {
        match self {
            Shape::FullSpace => true,
            Shape::HalfSpace => p[p.len() - 1] > 0.0,
            Shape::Strip(h) => p[1] > 0.0 && p[1] < *h,
            Shape::Envelope(e) => p[0] > e.x0 && p[1] > 0.0 && p[1] < e.env(p[0]),
            Shape::Tent(t) => t.contains(p[0]),
            Shape::Stacked(s) => s.contains(p[0], p[1]),
            Shape::Union(parts) => parts.iter().any(|s| s.contains(p)),
            Shape::Translate(inner, off) => {
                let q: Vec<f64> = p.iter().zip(off).map(|(x, o)| x - o).collect();
                inner.contains(&q)
            }
            Shape::Scale(inner, k) => {
                let q: Vec<f64> = p.iter().map(|x| x / k).collect();
                inner.contains(&q)
            }
        }
    }

    /// |[lo, hi) ∩ Ω| for subsets of the real line.
    fn measure_1d(&self, lo: f64, hi: f64) -> Option<f64> {
        if !(hi > lo) {
            return Some(0.0);
        }
        match self {
            Shape::FullSpace => Some(hi - lo),
            Shape::HalfSpace => Some((hi - lo.max(0.0)).max(0.0)),
            Shape::Tent(t) => Some(t.measure(lo, hi)),
            Shape::Union(parts) => parts.iter().map(|s| s.measure_1d(lo, hi)).sum(),
            Shape::Translate(inner, off) => inner.measure_1d(lo - off[0], hi - off[0]),
            Shape::Scale(inner, k) => inner.measure_1d(lo / k, hi / k).map(|v| v * k),
            _ => None,
        }
    }

    fn tube(&self, dim: usize, norm: Norm, lo: f64, hi: f64) -> Option<f64> {
        if dim == 1 {
            let right = self.measure_1d(lo, hi)?;
            let left = self.measure_1d(-hi, -lo)?;
            // the mirrored interval is (-hi, -lo]; endpoints carry no mass
            return Some(right + left);
        }
        match self {
            Shape::FullSpace => Some(annulus(norm_ball_volume(norm, dim), dim, lo, hi)),
            Shape::HalfSpace => Some(0.5 * annulus(norm_ball_volume(norm, dim), dim, lo, hi)),
            Shape::Strip(h) => Some(match norm {
                Norm::Euclidean => strip_disc(*h, hi) - strip_disc(*h, lo),
                Norm::Sup => 2.0 * (hi * hi.min(*h) - lo * lo.min(*h)),
            }),
            Shape::Envelope(e) => match norm {
                Norm::Euclidean if e.b > 1.0 => Some(e.area_outside(lo) - e.area_outside(hi)),
                Norm::Euclidean => Some(e.area_inside(hi) - e.area_inside(lo)),
                Norm::Sup if e.x0 >= 1.0 => Some(e.env_integral(lo.max(e.x0), hi.max(e.x0))),
                Norm::Sup => None,
            },
            Shape::Stacked(s) => match norm {
                Norm::Sup if lo >= s.height || s.height <= s.c => Some(s.slab_area(lo, hi)),
                _ => None,
            },
            Shape::Tent(_) => None,
            Shape::Union(parts) => parts.iter().map(|s| s.tube(dim, norm, lo, hi)).sum(),
            Shape::Translate(inner, off) => {
                if matches!(**inner, Shape::FullSpace) || off.iter().all(|o| *o == 0.0) {
                    inner.tube(dim, norm, lo, hi)
                } else {
                    None
                }
            }
            Shape::Scale(inner, k) => {
                inner.tube(dim, norm, lo / k, hi / k).map(|v| v * k.powi(dim as i32))
            }
        }
    }

    /// |Ω \ B_t(0)| when exactly known.
    fn outer(&self, dim: usize, norm: Norm, t: f64) -> Option<f64> {
        if dim == 1 {
            let right = self.measure_1d(t, f64::INFINITY)?;
            let left = self.measure_1d(f64::NEG_INFINITY, -t)?;
            return (right + left).is_finite().then_some(right + left);
        }
        match self {
            Shape::Envelope(e) if e.b > 1.0 => match norm {
                Norm::Euclidean => Some(e.area_outside(t)),
                Norm::Sup if e.x0 >= 1.0 => Some(e.env_integral(t.max(e.x0), f64::INFINITY)),
                Norm::Sup => None,
            },
            Shape::Stacked(s) if s.finite_measure() => match norm {
                Norm::Sup if t >= s.height || s.height <= s.c => Some(s.slab_area(t, f64::INFINITY)),
                _ => None,
            },
            Shape::Union(parts) => parts.iter().map(|s| s.outer(dim, norm, t)).sum(),
            Shape::Translate(inner, off) if off.iter().all(|o| *o == 0.0) => inner.outer(dim, norm, t),
            Shape::Scale(inner, k) => inner.outer(dim, norm, t / k).map(|v| v * k.powi(dim as i32)),
            _ => None,
        }
    }

    /// H^{N-1}(S_t(0) ∩ Ω) for the Euclidean sphere.
    fn surface(&self, dim: usize, t: f64) -> Option<f64> {
        if dim == 1 {
            let count = [t, -t].iter().filter(|&&x| self.contains(&[x])).count();
            return Some(count as f64);
        }
        let sphere = dim as f64 * unit_ball_volume(dim) * t.powi(dim as i32 - 1);
        match self {
            Shape::FullSpace => Some(sphere),
            Shape::HalfSpace => Some(0.5 * sphere),
            Shape::Strip(h) => Some(if t > *h { 2.0 * t * (h / t).asin() } else { PI * t }),
            Shape::Envelope(e) => Some(e.arc(t)),
            Shape::Union(parts) => parts.iter().map(|s| s.surface(dim, t)).sum(),
            Shape::Translate(inner, off) => {
                if matches!(**inner, Shape::FullSpace) || off.iter().all(|o| *o == 0.0) {
                    inner.surface(dim, t)
                } else {
                    None
                }
            }
            Shape::Scale(inner, k) => inner.surface(dim, t / k).map(|v| v * k.powi(dim as i32 - 1)),
            _ => None,
        }
    }

    fn total(&self, dim: usize) -> Option<f64> {
        match self {
            Shape::Envelope(e) if e.b > 1.0 => Some(e.total()),
            Shape::Tent(t) => Some(t.total()),
            Shape::Stacked(s) if s.finite_measure() => Some(s.total()),
            Shape::Union(parts) => parts.iter().map(|s| s.total(dim)).sum(),
            Shape::Translate(inner, _) => inner.total(dim),
            Shape::Scale(inner, k) => inner.total(dim).map(|v| v * k.powi(dim as i32)),
            _ => None,
        }
    }

    fn kinks(&self, norm: Norm, lo: f64, hi: f64) -> Vec<f64> {
        let keep = |v: Vec<f64>| v.into_iter().filter(|r| *r >= lo && *r <= hi).collect::<Vec<_>>();
        match self {
            Shape::FullSpace | Shape::HalfSpace => Vec::new(),
            Shape::Strip(h) => keep(vec![*h]),
            Shape::Envelope(e) => match norm {
                Norm::Euclidean => keep(e.kinks()),
                Norm::Sup => keep(vec![e.x0]),
            },
            Shape::Tent(t) => t.kinks(lo, hi),
            Shape::Stacked(s) => s.kinks(lo, hi),
            Shape::Union(parts) => parts.iter().flat_map(|s| s.kinks(norm, lo, hi)).collect(),
            Shape::Translate(inner, off) => {
                if off.len() == 1 {
                    // 1-D: endpoints move to |e + c|
                    let c = off[0];
                    let mut out: Vec<f64> = inner
                        .kinks(norm, 0.0, hi + c.abs())
                        .into_iter()
                        .map(|e| (e + c).abs())
                        .filter(|r| *r >= lo && *r <= hi)
                        .collect();
                    if c.abs() >= lo && c.abs() <= hi {
                        out.push(c.abs());
                    }
                    out
                } else {
                    inner.kinks(norm, lo, hi)
                }
            }
            Shape::Scale(inner, k) => inner.kinks(norm, lo / k, hi / k).into_iter().map(|r| r * k).collect(),
        }
    }

    fn dimension(&self, dim: usize) -> Option<f64> {
        match self {
            Shape::FullSpace | Shape::HalfSpace => Some(0.0),
            Shape::Strip(_) => Some(-1.0),
            Shape::Envelope(e) => Some(-1.0 - e.b),
            Shape::Tent(t) => Some(-1.0 - t.q),
            Shape::Stacked(s) => Some(s.dimension()),
            Shape::Union(parts) => parts
                .iter()
                .map(|s| s.dimension(dim))
                .try_fold(f64::NEG_INFINITY, |acc, d| d.map(|d| acc.max(d))),
            Shape::Translate(inner, _) | Shape::Scale(inner, _) => inner.dimension(dim),
        }
    }

    fn measure_class(&self) -> MeasureClass {
        match self {
            Shape::FullSpace | Shape::HalfSpace | Shape::Strip(_) => MeasureClass::Infinite,
            Shape::Envelope(e) => {
                if e.b > 1.0 {
                    MeasureClass::Finite
                } else {
                    MeasureClass::Infinite
                }
            }
            Shape::Tent(_) => MeasureClass::Finite,
            Shape::Stacked(s) => {
                if s.finite_measure() {
                    MeasureClass::Finite
                } else {
                    MeasureClass::Infinite
                }
            }
            Shape::Union(_) => MeasureClass::Unknown,
            Shape::Translate(inner, _) | Shape::Scale(inner, _) => inner.measure_class(),
        }
    }

    fn default_norm(&self) -> Norm {
        match self {
            Shape::Stacked(_) => Norm::Sup,
            Shape::Translate(inner, _) | Shape::Scale(inner, _) => inner.default_norm(),
            Shape::Union(parts) if parts.iter().all(|s| s.default_norm() == Norm::Sup) => Norm::Sup,
            _ => Norm::Euclidean,
        }
    }
}

/// |B_R(0) ∩ {0 < y < h}| = c sqrt(R² - c²) + R² asin(c/R), c = min(h, R).
fn strip_disc(h: f64, radius: f64) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    let c = h.min(radius);
    c * ((radius - c) * (radius + c)).sqrt() + radius * (radius * (c / radius).asin())
}

impl Region {
    /// Builds a region. `norm = None` picks the family default (sup for the
    /// stacked family, Euclidean otherwise).
    pub fn build(params: RegionParams, norm: Option<Norm>) -> Result<Region> {
        let (shape, dim) = Shape::build(&params)?;
        let norm = norm.unwrap_or_else(|| shape.default_norm());
        let measure_class = shape.measure_class();
        Ok(Region { params, shape, dim, norm, measure_class })
    }

    /// Overrides the declared measure class, e.g. for a union whose measure is
    /// known to the caller.
    pub fn with_measure_class(mut self, class: MeasureClass) -> Region {
        self.measure_class = class;
        self
    }

    pub fn full_space(dim: usize) -> Result<Region> {
        Region::build(RegionParams::FullSpace { dim }, None)
    }

    pub fn half_space(dim: usize) -> Result<Region> {
        Region::build(RegionParams::HalfSpace { dim }, None)
    }

    pub fn strip(h: f64) -> Result<Region> {
        Region::build(RegionParams::Strip { h }, None)
    }

    pub fn envelope(x0: f64, b: f64) -> Result<Region> {
        Region::build(RegionParams::Envelope { x0, b }, None)
    }

    pub fn tent(q: f64) -> Result<Region> {
        Region::build(RegionParams::Tent { q }, None)
    }

    pub fn stacked(a: f64, b: f64) -> Result<Region> {
        Region::build(RegionParams::StackedTwoParam { a, b }, None)
    }

    pub fn params(&self) -> &RegionParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn measure_class(&self) -> MeasureClass {
        self.measure_class
    }

    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        if point.len() != self.dim {
            return input(format!("point has {} coordinates, region lives in R^{}", point.len(), self.dim));
        }
        Ok(self.shape.contains(point))
    }

    /// Membership without the dimension check; `point.len()` must equal `dim()`.
    pub(crate) fn contains_unchecked(&self, point: &[f64]) -> bool {
        self.shape.contains(point)
    }

    /// |B_{T,t}(0) ∩ Ω| when a closed form applies to this (T, t).
    pub fn exact_tube_volume(&self, lo: f64, hi: f64) -> Option<f64> {
        if !(lo >= 0.0) || !(hi >= lo) {
            return None;
        }
        self.shape.tube(self.dim, self.norm, lo, hi).map(|v| v.max(0.0))
    }

    /// |Ω \ B_t(0)| when a closed form applies (finite-measure families only).
    pub fn exact_outer_volume(&self, t: f64) -> Option<f64> {
        if !(t >= 0.0) {
            return None;
        }
        self.shape.outer(self.dim, self.norm, t).map(|v| v.max(0.0))
    }

    /// H^{N-1}(S_t(0) ∩ Ω) on the Euclidean sphere, when a closed form applies.
    pub fn exact_surface_measure(&self, t: f64) -> Option<f64> {
        if self.norm != Norm::Euclidean || !(t > 0.0) {
            return None;
        }
        self.shape.surface(self.dim, t)
    }

    /// |Ω| for families with a known finite total.
    pub fn total_measure(&self) -> Option<f64> {
        self.shape.total(self.dim)
    }

    /// Radii in [lo, hi] where the tube function fails to be smooth.
    pub fn nonsmooth_radii(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut v = self.shape.kinks(self.norm, lo, hi);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Upper φ-shell dimension at infinity when known in closed form.
    pub fn known_dimension(&self) -> Option<f64> {
        self.shape.dimension(self.dim)
    }
}
