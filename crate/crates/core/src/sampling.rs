//! Seeded stratified Monte Carlo over radial shells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::region::{norm_ball_volume, Norm, Region};

/// Monte Carlo configuration. Identical plans on identical inputs give
/// bit-identical results regardless of thread scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub seed: u64,
    /// Radial subdivisions per shell (per decade for wide shells).
    pub strata: usize,
    pub samples_per_stratum: usize,
}

impl SamplingPlan {
    pub fn new(seed: u64, strata: usize, samples_per_stratum: usize) -> Result<Self> {
        if strata < 1 {
            return input("sampling plan needs at least one stratum");
        }
        if samples_per_stratum < 100 {
            return input(format!("sampling plan needs at least 100 samples per stratum, got {samples_per_stratum}"));
        }
        Ok(SamplingPlan { seed, strata, samples_per_stratum })
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SamplingPlan { seed, ..self }
    }
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan { seed: 42, strata: 8, samples_per_stratum: 20_000 }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for one stratum of one estimate; `tag` identifies the estimate.
pub(crate) fn stratum_rng(seed: u64, tag: &[f64], stratum: usize) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for v in tag {
        h = splitmix(h ^ v.to_bits());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    rng.set_stream(stratum as u64);
    rng
}

/// Uniform direction on the Euclidean unit sphere S^{n-1}.
pub(crate) fn direction<R: Rng>(rng: &mut R, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return;
    }
    loop {
        let mut s = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            s += *x * *x;
        }
        if s > 1e-300 {
            let inv = 1.0 / s.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Uniform point of the norm-shell {lo <= |x| < hi}.
pub(crate) fn shell_point<R: Rng>(rng: &mut R, norm: Norm, lo: f64, hi: f64, out: &mut [f64]) {
    let n = out.len() as f64;
    let u: f64 = rng.random();
    // inverse CDF of the density ∝ r^{n-1}, written relative to lo
    let ratio_n = (n * (hi / lo).ln()).exp_m1();
    let r = (lo * ((u * ratio_n).ln_1p() / n).exp()).min(hi);
    match norm {
        Norm::Euclidean => {
            direction(rng, out);
            out.iter_mut().for_each(|x| *x *= r);
        }
        Norm::Sup => {
            // every face of the cube shell has the same area
            let len = out.len();
            let face = rng.random_range(0..2 * len);
            for x in out.iter_mut() {
                *x = r * (2.0 * rng.random::<f64>() - 1.0);
            }
            out[face / 2] = if face % 2 == 0 { r } else { -r };
        }
    }
}

/// Stratified estimate of ∫_{B_{lo,hi}(0) ∩ Ω} w(x) dx with its standard error.
pub(crate) fn shell_integral(
    region: &Region,
    lo: f64,
    hi: f64,
    plan: &SamplingPlan,
    weight: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> (f64, f64, u64) {
    let n = region.dim();
    let norm = region.norm();
    let decades = (hi / lo).log10().ceil().max(1.0) as usize;
    let strata = plan.strata * decades;
    let step = (hi / lo).ln() / strata as f64;
    let unit = norm_ball_volume(norm, n);
    let parts: Vec<(f64, f64)> = (0..strata)
        .into_par_iter()
        .map(|k| {
            let a = lo * (step * k as f64).exp();
            let b = if k + 1 == strata { hi } else { lo * (step * (k + 1) as f64).exp() };
            let vol = crate::region::annulus(unit, n, a, b);
            let mut rng = stratum_rng(plan.seed, &[lo, hi], k);
            let mut p = vec![0.0; n];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..plan.samples_per_stratum {
                shell_point(&mut rng, norm, a, b, &mut p);
                let w = if region.contains_unchecked(&p) { weight(&p) } else { 0.0 };
                s1 += w;
                s2 += w * w;
            }
            let m = plan.samples_per_stratum as f64;
            let mean = s1 / m;
            let var = ((s2 / m - mean * mean).max(0.0)) / (m - 1.0).max(1.0);
            (vol * mean, vol * vol * var)
        })
        .collect();
    let value: f64 = parts.iter().map(|p| p.0).sum();
    let var: f64 = parts.iter().map(|p| p.1).sum();
    (value, var.sqrt(), (strata * plan.samples_per_stratum) as u64)
}
