//! The 1-D union of intervals (2^{2n+1}, 2^{2n+1} + 4^{-nq}), n >= 0.

const LN4: f64 = 2.0 * std::f64::consts::LN_2;
/// Beyond this index the left endpoints exceed f64 range.
const N_MAX: i32 = 510;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tent {
    pub q: f64,
}

impl Tent {
    pub fn start(n: i32) -> f64 {
        2f64.powi(2 * n + 1)
    }

    pub fn len(&self, n: i32) -> f64 {
        (-(n as f64) * self.q * LN4).exp()
    }

    pub fn total(&self) -> f64 {
        1.0 / -(-self.q * LN4).exp_m1()
    }

    pub fn contains(&self, x: f64) -> bool {
        if x <= 2.0 || !x.is_finite() {
            return false;
        }
        let n = self.index_below(x);
        x - Self::start(n) < self.len(n)
    }

    /// Largest n with start(n) <= x (x > 2).
    fn index_below(&self, x: f64) -> i32 {
        let mut n = (((x / 2.0).log2() / 2.0).floor() as i32).clamp(0, N_MAX);
        while n > 0 && Self::start(n) > x {
            n -= 1;
        }
        while n < N_MAX && Self::start(n + 1) <= x {
            n += 1;
        }
        n
    }

    /// |[lo, hi) ∩ Ω|. Offsets are taken against the power-of-two endpoints
    /// so the tiny interval lengths survive.
    pub fn measure(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(2.0);
        if !(hi > lo) {
            return 0.0;
        }
        let first = if lo <= 2.0 { 0 } else { self.index_below(lo) };
        let overlap = |n: i32| -> f64 {
            let a = Self::start(n);
            let l = self.len(n);
            let top = if hi.is_infinite() { l } else { l.min(hi - a) };
            let bottom = (lo - a).max(0.0);
            (top - bottom).max(0.0)
        };
        let mut sum = overlap(first);
        if first >= N_MAX {
            return sum;
        }
        // last interval whose left end is below hi
        let last = if hi.is_infinite() {
            N_MAX
        } else if hi <= Self::start(first + 1) {
            return sum;
        } else {
            self.index_below(hi)
        };
        if last > first + 1 {
            // full intervals first+1 ..= last-1 as a geometric sum
            let k = (last - first - 1) as f64;
            let r = -self.q * LN4;
            sum += self.len(first + 1) * (k * r).exp_m1() / r.exp_m1();
        }
        if last > first {
            sum += overlap(last);
        }
        if hi.is_infinite() {
            // intervals past N_MAX
            sum += self.len(N_MAX + 1) / -(-self.q * LN4).exp_m1();
        }
        sum
    }

    /// Interval endpoints inside [lo, hi].
    pub fn kinks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for n in 0..=N_MAX {
            let a = Self::start(n);
            if a > hi {
                break;
            }
            for e in [a, a + self.len(n)] {
                if e >= lo && e <= hi {
                    out.push(e);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(t: &Tent, lo: f64, hi: f64) -> f64 {
        (0..=N_MAX)
            .map(|n| {
                let a = Tent::start(n);
                let l = t.len(n);
                let top = if hi.is_infinite() { l } else { l.min(hi - a) };
                (top - (lo - a).max(0.0)).max(0.0)
            })
            .sum()
    }

    #[test]
    fn membership_examples() {
        let t = Tent { q: 0.5 };
        assert!(t.contains(2.5));
        assert!(!t.contains(3.5));
        assert!(t.contains(8.4));
        assert!(!t.contains(8.6));
        assert!(!t.contains(2.0));
    }

    #[test]
    fn measure_matches_termwise_sum() {
        let t = Tent { q: 0.5 };
        for &(lo, hi) in &[(0.0, 1e6), (2.5, 8.3), (8.2, 9.0), (3.0, 1e12), (1e5, f64::INFINITY)] {
            let a = t.measure(lo, hi);
            let b = brute(&t, lo, hi);
            assert!((a - b).abs() <= 1e-13 * b.max(1e-300), "{lo} {hi}: {a} vs {b}");
        }
        assert!((t.measure(0.0, f64::INFINITY) - 2.0).abs() < 1e-14);
    }
}
