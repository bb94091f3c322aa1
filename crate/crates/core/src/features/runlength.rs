//! Features of the size-distribution matrices: GLRLM (runs), GLSZM (zones)
//! and GLDM (dependences). All three are `P(i, j)` tables over gray level `i`
//! and size `j`, and share the emphasis/non-uniformity/variance/entropy
//! definitions.

use alloc::vec;
use alloc::vec::Vec;

use super::entropy2;
use super::matrices::{covered_voxels, TextureMatrix};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

struct Sums {
    /// Total count (runs, zones or voxels).
    n: f64,
    small: f64,
    large: f64,
    gray_nu: f64,
    size_nu: f64,
    gray_var: f64,
    size_var: f64,
    entropy: f64,
    low_gray: f64,
    high_gray: f64,
    small_low: f64,
    small_high: f64,
    large_low: f64,
    large_high: f64,
}

fn sums(m: &TextureMatrix) -> Option<Sums> {
    let n = m.total();
    if n <= 0.0 {
        return None;
    }
    let mut pg = vec![0.0; m.rows];
    let mut ps = vec![0.0; m.cols];
    let mut s = Sums {
        n,
        small: 0.0,
        large: 0.0,
        gray_nu: 0.0,
        size_nu: 0.0,
        gray_var: 0.0,
        size_var: 0.0,
        entropy: 0.0,
        low_gray: 0.0,
        high_gray: 0.0,
        small_low: 0.0,
        small_high: 0.0,
        large_low: 0.0,
        large_high: 0.0,
    };
    let mut mu_i = 0.0;
    let mut mu_j = 0.0;
    let mut probs = Vec::with_capacity(m.rows * m.cols);
    for r in 0..m.rows {
        let i = (r + 1) as f64;
        let i2 = i * i;
        for c in 0..m.cols {
            let v = m.get(r, c);
            if v == 0.0 {
                continue;
            }
            let j = (c + 1) as f64;
            let j2 = j * j;
            pg[r] += v;
            ps[c] += v;
            s.small += v / j2;
            s.large += v * j2;
            s.low_gray += v / i2;
            s.high_gray += v * i2;
            s.small_low += v / (i2 * j2);
            s.small_high += v * i2 / j2;
            s.large_low += v * j2 / i2;
            s.large_high += v * i2 * j2;
            let p = v / n;
            mu_i += p * i;
            mu_j += p * j;
            probs.push(p);
        }
    }
    for r in 0..m.rows {
        for c in 0..m.cols {
            let v = m.get(r, c);
            if v != 0.0 {
                let p = v / n;
                s.gray_var += p * ((r + 1) as f64 - mu_i).powi(2);
                s.size_var += p * ((c + 1) as f64 - mu_j).powi(2);
            }
        }
    }
    s.gray_nu = pg.iter().map(|v| v * v).sum();
    s.size_nu = ps.iter().map(|v| v * v).sum();
    s.entropy = entropy2(&probs);
    Some(s)
}

/// GLRLM and GLSZM share one 16-feature layout.
fn sixteen(m: &TextureMatrix) -> Vec<Option<f64>> {
    let Some(s) = sums(m) else {
        return vec![None; 16];
    };
    let n = s.n;
    let voxels = covered_voxels(m);
    vec![
        Some(s.small / n),
        Some(s.large / n),
        Some(s.gray_nu / n),
        Some(s.gray_nu / (n * n)),
        Some(s.size_nu / n),
        Some(s.size_nu / (n * n)),
        Some(n / voxels),
        Some(s.gray_var),
        Some(s.size_var),
        Some(s.entropy),
        Some(s.low_gray / n),
        Some(s.high_gray / n),
        Some(s.small_low / n),
        Some(s.small_high / n),
        Some(s.large_low / n),
        Some(s.large_high / n),
    ]
}

pub fn glrlm_features(m: &TextureMatrix) -> Vec<Option<f64>> {
    sixteen(m)
}

pub fn glszm_features(m: &TextureMatrix) -> Vec<Option<f64>> {
    sixteen(m)
}

pub fn gldm_features(m: &TextureMatrix) -> Vec<Option<f64>> {
    let Some(s) = sums(m) else {
        return vec![None; 14];
    };
    let n = s.n;
    vec![
        Some(s.small / n),
        Some(s.large / n),
        Some(s.gray_nu / n),
        Some(s.size_nu / n),
        Some(s.size_nu / (n * n)),
        Some(s.gray_var),
        Some(s.size_var),
        Some(s.entropy),
        Some(s.low_gray / n),
        Some(s.high_gray / n),
        Some(s.small_low / n),
        Some(s.small_high / n),
        Some(s.large_low / n),
        Some(s.large_high / n),
    ]
}
