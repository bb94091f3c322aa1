//! Neighborhood gray-tone difference features (5).

use alloc::vec;
use alloc::vec::Vec;

use super::defined;
use super::matrices::TextureMatrix;

pub fn ngtdm_features(m: &TextureMatrix) -> Vec<Option<f64>> {
    let nvp: f64 = (0..m.rows).map(|r| m.get(r, 0)).sum();
    if nvp <= 0.0 {
        return vec![None; 5];
    }
    // (gray level, p_i, s_i) for present levels
    let present: Vec<(f64, f64, f64)> = (0..m.rows)
        .filter(|&r| m.get(r, 0) > 0.0)
        .map(|r| ((r + 1) as f64, m.get(r, 0) / nvp, m.get(r, 1)))
        .collect();
    let ngp = present.len() as f64;
    let s_total: f64 = present.iter().map(|t| t.2).sum();
    let ps_sum: f64 = present.iter().map(|t| t.1 * t.2).sum();

    let coarseness = if ps_sum > 0.0 {
        defined(1.0 / ps_sum)
    } else {
        None
    };

    let mut pair_contrast = 0.0;
    let mut busy_den = 0.0;
    let mut complexity = 0.0;
    let mut strength_num = 0.0;
    for &(i, pi, si) in &present {
        for &(j, pj, sj) in &present {
            pair_contrast += pi * pj * (i - j) * (i - j);
            busy_den += (i * pi - j * pj).abs();
            complexity += (i - j).abs() * (pi * si + pj * sj) / (pi + pj);
            strength_num += (pi + pj) * (i - j) * (i - j);
        }
    }
    let contrast = if ngp > 1.0 {
        defined(pair_contrast / (ngp * (ngp - 1.0)) * s_total / nvp)
    } else {
        None
    };
    let busyness = if busy_den > 0.0 {
        defined(ps_sum / busy_den)
    } else {
        None
    };
    let strength = if s_total > 0.0 {
        defined(strength_num / s_total)
    } else {
        None
    };
    vec![
        coarseness,
        contrast,
        busyness,
        Some(complexity / nvp),
        strength,
    ]
}
