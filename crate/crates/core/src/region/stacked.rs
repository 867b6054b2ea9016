//! Geometry of the stacked two-parameter set.
//!
//! Level m >= 1 consists of 2^{m-1} copies of {x > c^m, 0 < y < x^{-b}}
//! (c = 1/a), each of height a^{mb}. Copies are stacked upward in order of
//! increasing m and, inside a level, increasing copy index.

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Stacked {
    pub a: f64,
    pub b: f64,
    /// 1/a
    pub c: f64,
    /// total height a^b / (1 - 2 a^b)
    pub height: f64,
    /// bottom of level m is offsets[m - 1]
    offsets: Vec<f64>,
}

/// log(e^x - 1) style helper: ln(2^k - 1) for k >= 1.
fn ln_pow2_minus_one(k: i64) -> f64 {
    let kl = k as f64 * std::f64::consts::LN_2;
    if kl > 40.0 {
        kl
    } else {
        kl.exp_m1().ln()
    }
}

impl Stacked {
    pub fn new(a: f64, b: f64) -> Self {
        let ab = a.powf(b);
        let height = ab / (1.0 - 2.0 * ab);
        let mut offsets = vec![0.0];
        let mut y = 0.0;
        for m in 1..4000 {
            let band = 2f64.powi(m - 1) * a.powf(m as f64 * b);
            y += band;
            offsets.push(y);
            if band < 1e-17 * height || !band.is_finite() {
                break;
            }
        }
        Stacked { a, b, c: 1.0 / a, height, offsets }
    }

    pub fn level_start(&self, m: i64) -> f64 {
        self.c.powi(m as i32)
    }

    pub fn finite_measure(&self) -> bool {
        self.b > 1.0 + 2f64.ln() / self.c.ln()
    }

    pub fn dimension(&self) -> f64 {
        2f64.ln() / self.c.ln() - (self.b + 1.0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        if !(y > 0.0) || !(y < self.height) {
            return false;
        }
        // level: last offset <= y
        let idx = self.offsets.partition_point(|&o| o <= y);
        if idx == 0 || idx >= self.offsets.len() {
            return false;
        }
        let m = idx as i64;
        let width = self.a.powf(m as f64 * self.b);
        let local = y - self.offsets[idx - 1];
        let copy = (local / width).floor();
        let yy = local - copy * width;
        x > self.level_start(m) && yy > 0.0 && yy < x.powf(-self.b)
    }

    /// ln of ∫_{x1}^{x2} x^{-b} dx (x2 may be infinite if b > 1), or -inf if empty.
    fn ln_slab(&self, x1: f64, x2: f64) -> f64 {
        if !(x2 > x1) {
            return f64::NEG_INFINITY;
        }
        let b = self.b;
        if x2.is_infinite() {
            return (1.0 - b) * x1.ln() - (b - 1.0).ln();
        }
        let l = (x2 / x1).ln();
        if b == 1.0 {
            l.ln()
        } else {
            (1.0 - b) * x1.ln() + ((-((1.0 - b) * l).exp_m1()) / (b - 1.0)).ln()
        }
    }

    /// number of levels m >= 1 with c^m <= t
    fn levels_below(&self, t: f64) -> i64 {
        if t < self.c {
            return 0;
        }
        let mut m = (t.ln() / self.c.ln()).floor() as i64;
        while m > 0 && self.level_start(m) > t {
            m -= 1;
        }
        while self.level_start(m + 1) <= t {
            m += 1;
        }
        m
    }

    /// Σ_m 2^{m-1} ∫_{max(c^m, t1)}^{max(c^m, t2)} x^{-b} dx, i.e. the area of
    /// {t1 <= x < t2} ∩ Ω (t2 may be infinite in the finite-measure case).
    pub fn slab_area(&self, t1: f64, t2: f64) -> f64 {
        if !(t2 > t1) {
            return 0.0;
        }
        let ln2 = std::f64::consts::LN_2;
        let m1 = self.levels_below(t1);
        let mut sum = 0.0;
        if m1 > 0 {
            sum += (ln_pow2_minus_one(m1) + self.ln_slab(t1, t2)).exp();
        }
        if t2.is_infinite() {
            // levels m > m1: Σ 2^{m-1} c^{m(1-b)}/(b-1), geometric with ratio 2 c^{1-b}
            let ln_c = self.c.ln();
            let ratio = (ln2 + (1.0 - self.b) * ln_c).exp();
            let m = (m1 + 1) as f64;
            let ln_first = (m - 1.0) * ln2 + m * (1.0 - self.b) * ln_c - (self.b - 1.0).ln();
            return sum + ln_first.exp() / (1.0 - ratio);
        }
        let mut m = m1 + 1;
        loop {
            let start = self.level_start(m);
            if !(start < t2) {
                break;
            }
            sum += ((m - 1) as f64 * ln2 + self.ln_slab(start, t2)).exp();
            m += 1;
        }
        sum
    }

    pub fn total(&self) -> f64 {
        self.slab_area(0.0, f64::INFINITY)
    }

    pub fn kinks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut m = 1;
        loop {
            let s = self.level_start(m);
            if s > hi || !s.is_finite() {
                break;
            }
            if s >= lo {
                out.push(s);
            }
            m += 1;
        }
        if self.height >= lo && self.height <= hi {
            out.push(self.height);
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_formula() {
        let s = Stacked::new(1.0 / 3.0, 2.0);
        assert!((s.height - (1.0 / 9.0) / (1.0 - 2.0 / 9.0)).abs() < 1e-15);
        assert!((s.offsets.last().unwrap() - s.height).abs() < 1e-15);
    }

    #[test]
    fn slab_examples() {
        let s = Stacked::new(1.0 / 3.0, 2.0);
        assert!((s.slab_area(3.0, 9.0) - 2.0 / 9.0).abs() < 1e-15);
        assert!((s.slab_area(9.0, 27.0) - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(s.slab_area(5.0, 5.0), 0.0);
    }

    #[test]
    fn membership_follows_stacking_order() {
        let s = Stacked::new(1.0 / 3.0, 2.0);
        // level 1 occupies y in (0, 1/9), needs x > 3
        assert!(s.contains(4.0, 0.05));
        assert!(!s.contains(2.9, 0.05));
        assert!(!s.contains(4.0, 0.07)); // above 4^{-2}
        // level 2 copies start at y = 1/9, height 1/81, need x > 9
        assert!(s.contains(10.0, 1.0 / 9.0 + 0.005));
        assert!(!s.contains(8.0, 1.0 / 9.0 + 0.005));
        assert!(s.contains(10.0, 1.0 / 9.0 + 1.0 / 81.0 + 0.005));
        assert!(!s.contains(1e9, s.height + 1e-12));
    }

    #[test]
    fn finite_total_matches_direct_series() {
        let s = Stacked::new(1.0 / 3.0, 2.0);
        let direct: f64 = (1..200).map(|m| 2f64.powi(m - 1) * 3f64.powi(-m)).sum();
        assert!((s.total() - direct).abs() < 1e-14);
    }
}
