//! Euclidean geometry of the envelope region {x > x0, 0 < y < x^{-b}} in R².
//!
//! Everything reduces to where the circle of radius R crosses the envelope
//! curve. h(x) = x^{-b} - sqrt(R² - x²) is convex on (x0, R), so there are at
//! most two crossings r1 <= r2. The right crossing sits extremely close to R
//! for large R and is tracked through u = R - r2.

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Envelope {
    pub x0: f64,
    pub b: f64,
}

/// Crossing structure of the circle of radius R with the envelope.
#[derive(Clone, Copy, Debug)]
enum Cut {
    /// R <= x0: the disc misses the region.
    Outside,
    /// The arc lies under the envelope on all of (x0, R).
    Below,
    /// Envelope is lower on (r1, R - u); r1 == x0 when the crossing is at the
    /// left boundary.
    /// `theta` is the angle of the right arc piece, `arc` its length.
    Crossing { r1: f64, u: f64, theta: f64, arc: f64 },
}

/// ∫_{R cos θ}^{R} sqrt(R² - x²) dx, written to stay finite for huge R.
pub(crate) fn segment(radius: f64, theta: f64) -> f64 {
    let x = 2.0 * theta;
    let f = if x < 1e-2 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x - x.sin()
    };
    0.25 * radius * (radius * f)
}

/// 2 asin(sqrt(u / 2R)) = acos((R - u)/R) without cancellation.
fn angle_from_gap(radius: f64, u: f64) -> f64 {
    2.0 * (u / (2.0 * radius)).sqrt().min(1.0).asin()
}

impl Envelope {
    pub fn env(&self, x: f64) -> f64 {
        x.powf(-self.b)
    }

    /// ∫_{x1}^{x2} x^{-b} dx for x0 <= x1 <= x2 (x2 may be infinite when b > 1).
    pub fn env_integral(&self, x1: f64, x2: f64) -> f64 {
        if x2 <= x1 {
            return 0.0;
        }
        let b = self.b;
        if x2.is_infinite() {
            return if b > 1.0 { x1.powf(1.0 - b) / (b - 1.0) } else { f64::INFINITY };
        }
        let l = (x2 / x1).ln();
        if b == 1.0 {
            l
        } else {
            x1.powf(1.0 - b) * (-((1.0 - b) * l).exp_m1()) / (b - 1.0)
        }
    }

    pub fn total(&self) -> f64 {
        self.env_integral(self.x0, f64::INFINITY)
    }

    fn h(&self, radius: f64, x: f64) -> f64 {
        self.env(x) - (radius - x).max(0.0).sqrt() * (radius + x).sqrt()
    }

    fn cut(&self, radius: f64) -> Cut {
        let x0 = self.x0;
        if radius <= x0 {
            return Cut::Outside;
        }
        let b = self.b;
        // argmin of h on [x0, R): h' = -b x^{-b-1} + x / sqrt(R² - x²) is increasing
        let dh = |x: f64| -b * x.powf(-b - 1.0) + x / ((radius - x).sqrt() * (radius + x).sqrt());
        let xm = if dh(x0) >= 0.0 {
            x0
        } else {
            let (mut lo, mut hi) = (x0, radius);
            for _ in 0..200 {
                let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
                if mid <= lo || mid >= hi {
                    break;
                }
                if dh(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        if self.h(radius, xm) >= 0.0 {
            return Cut::Below;
        }
        let r1 = if self.h(radius, x0) <= 0.0 {
            x0
        } else {
            let (mut lo, mut hi) = (x0, xm);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.h(radius, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let u = self.right_gap(radius, xm);
        let (theta, arc) = if u > 0.0 {
            let th = angle_from_gap(radius, u);
            (th, radius * th)
        } else {
            // u underflowed; to leading order the angle is R^{-b-1}
            let ln_r = radius.ln();
            ((-(self.b + 1.0) * ln_r).exp(), (-self.b * ln_r).exp())
        };
        Cut::Crossing { r1, u, theta, arc }
    }

    /// u = R - r2 where r2 is the right crossing; solves
    /// (R-u)^{-b} = sqrt(u (2R - u)) on (0, R - xm).
    fn right_gap(&self, radius: f64, xm: f64) -> f64 {
        let b = self.b;
        let approx = (-(2.0 * b + 1.0) * radius.ln() - std::f64::consts::LN_2).exp();
        if approx < f64::MIN_POSITIVE {
            return 0.0;
        }
        if approx < 1e-6 * radius {
            // contraction with factor ~ u/R
            let mut u = approx;
            for _ in 0..8 {
                u = (radius - u).powf(-2.0 * b) / (2.0 * radius - u);
            }
            return u;
        }
        let g = |u: f64| (radius - u).powf(-b) - (u * (2.0 * radius - u)).sqrt();
        let (mut lo, mut hi) = (0.0_f64, radius - xm);
        for _ in 0..200 {
            let mid = if lo > 0.0 && hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn theta0(&self, radius: f64) -> f64 {
        (self.x0 / radius).min(1.0).acos()
    }

    /// |B_R(0) ∩ Ω|.
    pub fn area_inside(&self, radius: f64) -> f64 {
        match self.cut(radius) {
            Cut::Outside => 0.0,
            Cut::Below => segment(radius, self.theta0(radius)),
            Cut::Crossing { r1, u, theta, .. } => {
                let left = if r1 > self.x0 {
                    segment(radius, self.theta0(radius)) - segment(radius, (r1 / radius).acos())
                } else {
                    0.0
                };
                let r2 = radius - u;
                left + self.env_integral(r1, r2) + segment(radius, theta)
            }
        }
    }

    /// |Ω \ B_R(0)|; only meaningful for b > 1.
    pub fn area_outside(&self, radius: f64) -> f64 {
        match self.cut(radius) {
            Cut::Crossing { r1, u, theta, .. } if r1 <= self.x0 => {
                let r2 = radius - u;
                self.env_integral(r2, f64::INFINITY) - segment(radius, theta)
            }
            _ => self.total() - self.area_inside(radius),
        }
    }

    /// H¹(S_R(0) ∩ Ω).
    pub fn arc(&self, radius: f64) -> f64 {
        match self.cut(radius) {
            Cut::Outside => 0.0,
            Cut::Below => radius * self.theta0(radius),
            Cut::Crossing { r1, arc, .. } => {
                let left = if r1 > self.x0 {
                    self.theta0(radius) - (r1 / radius).acos()
                } else {
                    0.0
                };
                radius * left + arc
            }
        }
    }

    /// Radii where the crossing structure changes.
    pub fn kinks(&self) -> Vec<f64> {
        let x0 = self.x0;
        let corner = x0.hypot(self.env(x0));
        let crosses = |r: f64| matches!(self.cut(r), Cut::Crossing { .. });
        let mut out = vec![x0, corner];
        let probe = corner * (1.0 - 1e-12);
        if probe > x0 && crosses(probe) {
            let (mut lo, mut hi) = (x0, probe);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if crosses(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-free Simpson on ∫ min(x^{-b}, sqrt(R²-x²)) over (x0, R).
    fn brute_area(e: &Envelope, radius: f64) -> f64 {
        if radius <= e.x0 {
            return 0.0;
        }
        let n = 2_000_000;
        let h = (radius - e.x0) / n as f64;
        let f = |x: f64| e.env(x).min(((radius - x) * (radius + x)).max(0.0).sqrt());
        let mut s = f(e.x0) + f(radius);
        for i in 1..n {
            let x = e.x0 + i as f64 * h;
            s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn area_matches_brute_force_at_moderate_radii() {
        for &(x0, b) in &[(1.0, 1.0), (1.0, 3.0), (0.3, 0.5), (2.0, 2.0)] {
            let e = Envelope { x0, b };
            for &r in &[0.5, 1.2, 1.5, 2.0, 3.0, 7.5] {
                let exact = e.area_inside(r);
                let brute = brute_area(&e, r);
                assert!((exact - brute).abs() < 1e-6 * (1.0 + brute), "x0={x0} b={b} r={r}: {exact} vs {brute}");
            }
        }
    }

    #[test]
    fn outside_plus_inside_is_total() {
        let e = Envelope { x0: 1.0, b: 3.0 };
        for &r in &[1.1, 2.0, 10.0, 1e3, 1e6] {
            let sum = e.area_inside(r) + e.area_outside(r);
            assert!((sum - e.total()).abs() < 1e-13 * e.total());
        }
        // far out the outer area behaves like R^{-2}/2
        let r: f64 = 1e6;
        assert!((e.area_outside(r) * r * r - 0.5).abs() < 1e-9);
    }

    #[test]
    fn arc_is_derivative_of_area() {
        for &(x0, b) in &[(1.0, 1.0), (1.0, 3.0), (0.5, 0.5)] {
            let e = Envelope { x0, b };
            for &r in &[3.0, 10.0, 1e3] {
                let h = 1e-5 * r;
                let fd = (e.area_inside(r + h) - e.area_inside(r - h)) / (2.0 * h);
                let arc = e.arc(r);
                assert!((fd - arc).abs() < 1e-5 * arc, "x0={x0} b={b} r={r}: {fd} vs {arc}");
            }
        }
    }

    #[test]
    fn huge_radii_stay_finite() {
        let e = Envelope { x0: 1.0, b: 1.0 };
        let a = e.area_inside(1e200);
        assert!((a - 200.0 * std::f64::consts::LN_10).abs() < 1e-9);
        assert!((e.arc(1e200) * 1e200 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kinks_of_unit_hyperbola() {
        let e = Envelope { x0: 1.0, b: 1.0 };
        let k = e.kinks();
        assert!((k[0] - 1.0).abs() < 1e-15);
        assert!((k[k.len() - 1] - 2f64.sqrt()).abs() < 1e-12);
    }
}
