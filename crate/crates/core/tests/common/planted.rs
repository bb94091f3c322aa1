//! Balanced subject x thickness x ASiR data with known variance components.

#![allow(dead_code)]

use radrepro_core::repro::Observation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Planted {
    pub sigma2_s: f64,
    /// Dispersion sum (b_l - mean b)^2 / (T - 1) of the thickness effects.
    pub sigma2_t: f64,
    pub sigma2_a: f64,
    pub sigma2_e: f64,
}

/// Effects spread evenly around zero with the requested dispersion.
pub fn fixed_effects(levels: usize, dispersion: f64) -> Vec<f64> {
    let mid = (levels as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..levels).map(|k| k as f64 - mid).collect();
    if levels < 2 {
        return vec![0.0; levels];
    }
    let d = raw.iter().map(|v| v * v).sum::<f64>() / (levels as f64 - 1.0);
    let c = (dispersion / d).sqrt();
    raw.iter().map(|v| v * c).collect()
}

pub fn generate(
    p: &Planted,
    n: usize,
    thicknesses: &[f64],
    asirs: &[f64],
    seed: u64,
) -> Vec<Observation<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = fixed_effects(thicknesses.len(), p.sigma2_t);
    let gamma = fixed_effects(asirs.len(), p.sigma2_a);
    let mut out = Vec::with_capacity(n * thicknesses.len() * asirs.len());
    for s in 0..n {
        let subject: f64 = rng.sample::<f64, _>(StandardNormal) * p.sigma2_s.sqrt();
        for (l, &t) in thicknesses.iter().enumerate() {
            for (k, &a) in asirs.iter().enumerate() {
                let e: f64 = rng.sample::<f64, _>(StandardNormal) * p.sigma2_e.sqrt();
                out.push(Observation {
                    subject: s,
                    thickness: t,
                    asir: Some(a),
                    value: 10.0 + subject + beta[l] + gamma[k] + e,
                });
            }
        }
    }
    out
}
