use alloc::format;

use crate::error::{Error, Result};

/// Moment convention for [`pairwise_ccc_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Moments {
    /// 1/n moments, as in Lin's definition.
    #[default]
    Population,
    /// 1/(n-1) variance and covariance; the mean shift term is unchanged.
    Sample,
}

/// Lin's concordance correlation coefficient with population moments.
pub fn pairwise_ccc(x: &[f64], y: &[f64]) -> Result<f64> {
    pairwise_ccc_with(x, y, Moments::Population)
}

pub fn pairwise_ccc_with(x: &[f64], y: &[f64], moments: Moments) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Argument(format!(
            "paired series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} pairs, need at least 3",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Argument(
            "paired series contain missing or non-finite values".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 && syy == 0.0 {
        return Ok(if mx == my { 1.0 } else { 0.0 });
    }
    let d = match moments {
        Moments::Population => n,
        Moments::Sample => n - 1.0,
    };
    let shift = mx - my;
    let ccc = 2.0 * sxy / d / (sxx / d + syy / d + shift * shift);
    Ok(ccc.clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_series() {
        let c = pairwise_ccc(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((c - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn identical_series() {
        let x = [0.3, -1.0, 2.5, 4.0];
        assert_eq!(pairwise_ccc(&x, &x).unwrap(), 1.0);
    }

    #[test]
    fn constant_series() {
        assert_eq!(pairwise_ccc(&[2.0; 4], &[2.0; 4]).unwrap(), 1.0);
        assert_eq!(pairwise_ccc(&[2.0; 4], &[3.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn too_short_or_mismatched() {
        assert!(matches!(
            pairwise_ccc(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            pairwise_ccc(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::Argument(_))
        ));
        assert!(pairwise_ccc(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn sample_moments() {
        // cov = var = 1 with 1/(n-1); shift 1 -> 2 / (1 + 1 + 1)
        let c = pairwise_ccc_with(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0], Moments::Sample).unwrap();
        assert!((c - 2.0 / 3.0).abs() < 1e-12);
    }
}
