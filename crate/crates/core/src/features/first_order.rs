//! First-order (histogram) features (18).
//!
//! Location/spread statistics use the resegmented raw HU values; entropy and
//! uniformity use the discretized gray-level histogram.

use alloc::vec;
use alloc::vec::Vec;

use super::{defined, entropy2};
use crate::stats::percentile_sorted;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

/// `values` are the ROI's HU values, `histogram` its gray-level counts and
/// `voxel_volume` the voxel size in mm^3.
pub fn first_order_features(
    values: &[f64],
    histogram: &[usize],
    voxel_volume: f64,
) -> Vec<Option<f64>> {
    let n = values.len();
    if n == 0 {
        return vec![None; 18];
    }
    let nf = n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let energy: f64 = values.iter().map(|v| v * v).sum();
    let mean = values.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    let mut mad = 0.0;
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        mad += d.abs();
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    mad /= nf;
    let p10 = percentile_sorted(&sorted, 10.0);
    let p90 = percentile_sorted(&sorted, 90.0);
    let robust: Vec<f64> = values
        .iter()
        .copied()
        .filter(|&v| v >= p10 && v <= p90)
        .collect();
    let rmad = if robust.is_empty() {
        None
    } else {
        let rm = robust.iter().sum::<f64>() / robust.len() as f64;
        Some(robust.iter().map(|v| (v - rm).abs()).sum::<f64>() / robust.len() as f64)
    };
    let hist_total: usize = histogram.iter().sum();
    let probs: Vec<f64> = histogram
        .iter()
        .map(|&c| c as f64 / hist_total as f64)
        .collect();
    let (skew, kurt) = if m2 > 0.0 {
        (defined(m3 / m2.powf(1.5)), defined(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    vec![
        Some(energy),
        Some(voxel_volume * energy),
        Some(entropy2(&probs)),
        Some(sorted[0]),
        Some(p10),
        Some(p90),
        Some(sorted[n - 1]),
        Some(mean),
        Some(percentile_sorted(&sorted, 50.0)),
        Some(percentile_sorted(&sorted, 75.0) - percentile_sorted(&sorted, 25.0)),
        Some(sorted[n - 1] - sorted[0]),
        Some(mad),
        rmad,
        Some((energy / nf).sqrt()),
        skew,
        kurt,
        Some(m2),
        Some(probs.iter().map(|p| p * p).sum()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::registry::FIRST_ORDER;

    fn get(v: &[Option<f64>], name: &str) -> Option<f64> {
        v[FIRST_ORDER.iter().position(|n| *n == name).unwrap()]
    }

    #[test]
    fn constant_roi() {
        let f = first_order_features(&[100.0; 6], &[6], 1.0);
        for name in ["Mean", "Median", "Minimum", "Maximum"] {
            assert_eq!(get(&f, name), Some(100.0));
        }
        assert_eq!(get(&f, "Variance"), Some(0.0));
        assert_eq!(get(&f, "Skewness"), None);
        assert_eq!(get(&f, "Kurtosis"), None);
        assert_eq!(get(&f, "Entropy"), Some(0.0));
        assert_eq!(get(&f, "Uniformity"), Some(1.0));
    }

    #[test]
    fn small_set_by_hand() {
        let f = first_order_features(&[1.0, 2.0, 3.0, 4.0], &[1, 1, 1, 1], 0.5);
        assert_eq!(get(&f, "Mean"), Some(2.5));
        assert_eq!(get(&f, "Variance"), Some(1.25));
        assert_eq!(get(&f, "Range"), Some(3.0));
        assert_eq!(get(&f, "Energy"), Some(30.0));
        assert_eq!(get(&f, "TotalEnergy"), Some(15.0));
        assert_eq!(get(&f, "MeanAbsoluteDeviation"), Some(1.0));
        assert_eq!(get(&f, "Median"), Some(2.5));
        assert_eq!(get(&f, "InterquartileRange"), Some(1.5));
        assert_eq!(get(&f, "Skewness"), Some(0.0));
        // m4 = (2*(1.5^4) + 2*(0.5^4)) / 4 = 2.5625, m2^2 = 1.5625
        assert!((get(&f, "Kurtosis").unwrap() - 2.5625 / 1.5625).abs() < 1e-15);
        assert_eq!(get(&f, "Entropy"), Some(2.0));
        assert_eq!(get(&f, "Uniformity"), Some(0.25));
        assert!((get(&f, "RootMeanSquared").unwrap() - 7.5f64.sqrt()).abs() < 1e-15);
        assert!((get(&f, "10Percentile").unwrap() - 1.3).abs() < 1e-12);
    }
}
