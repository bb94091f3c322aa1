use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One measurement of a feature on one reconstruction of one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<S> {
    pub subject: S,
    pub thickness: f64,
    pub asir: Option<f64>,
    pub value: f64,
}

/// Method-of-moments variance components, each clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VarianceComponents {
    pub sigma2_s: f64,
    pub sigma2_t: f64,
    pub sigma2_a: f64,
    pub sigma2_e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedCcc {
    pub ccc: f64,
    pub components: VarianceComponents,
    /// Names of components whose raw estimate was negative and clamped to 0.
    pub clamped: Vec<&'static str>,
    pub n_subjects: usize,
    pub n_thickness: usize,
    pub n_asir: usize,
}

fn levels(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| a.total_cmp(b).is_eq());
    v
}

fn position(levels: &[f64], v: f64) -> usize {
    levels
        .binary_search_by(|x| x.total_cmp(&v))
        .expect("level present")
}

/// Generalized CCC from a random-subject, fixed thickness and ASiR additive
/// model fitted by balanced ANOVA:
///
/// * `sigma2_s = (MS_s - MS_e) / (T A)`
/// * `sigma2_t = (MS_t - MS_e) / (n A)`, the unbiased estimate of the
///   thickness-effect dispersion `sum (b_l - mean b)^2 / (T - 1)`
/// * `sigma2_a = (MS_a - MS_e) / (n T)` (reported only)
/// * `sigma2_e = MS_e`
///
/// `ccc = sigma2_s / (sigma2_s + sigma2_t + sigma2_e)`.
pub fn generalized_ccc<S: Ord + Clone>(obs: &[Observation<S>]) -> Result<GeneralizedCcc> {
    if obs.iter().any(|o| !o.value.is_finite()) {
        return Err(Error::Argument(
            "observations contain non-finite values".into(),
        ));
    }
    let mut subjects: BTreeMap<&S, usize> = BTreeMap::new();
    for o in obs {
        let next = subjects.len();
        subjects.entry(&o.subject).or_insert(next);
    }
    let thick = levels(obs.iter().map(|o| o.thickness));
    // None sorts as its own level
    let asir = levels(obs.iter().map(|o| o.asir.unwrap_or(f64::NEG_INFINITY)));
    let (n, t, a) = (subjects.len(), thick.len(), asir.len());
    if t < 2 {
        return Err(Error::InsufficientData(format!(
            "{t} slice thickness level(s), need at least 2"
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "{n} subject(s), need at least 2"
        )));
    }
    let mut cell = vec![f64::NAN; n * t * a];
    for o in obs {
        let s = subjects[&o.subject];
        let k = (s * t + position(&thick, o.thickness)) * a
            + position(&asir, o.asir.unwrap_or(f64::NEG_INFINITY));
        if !cell[k].is_nan() {
            return Err(Error::UnbalancedDesign(
                "duplicate (subject, thickness, asir) observation".into(),
            ));
        }
        cell[k] = o.value;
    }
    let missing = cell.iter().filter(|v| v.is_nan()).count();
    if missing > 0 {
        return Err(Error::UnbalancedDesign(format!(
            "{missing} of {} (subject, thickness, asir) cells missing",
            cell.len()
        )));
    }

    let total = (n * t * a) as f64;
    let grand = cell.iter().sum::<f64>() / total;
    let mut ms = vec![0.0; n];
    let mut mt = vec![0.0; t];
    let mut ma = vec![0.0; a];
    for s in 0..n {
        for l in 0..t {
            for k in 0..a {
                let v = cell[(s * t + l) * a + k];
                ms[s] += v;
                mt[l] += v;
                ma[k] += v;
            }
        }
    }
    ms.iter_mut().for_each(|v| *v /= (t * a) as f64);
    mt.iter_mut().for_each(|v| *v /= (n * a) as f64);
    ma.iter_mut().for_each(|v| *v /= (n * t) as f64);

    let ss = |means: &[f64], reps: usize| {
        reps as f64 * means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>()
    };
    let ss_s = ss(&ms, t * a);
    let ss_t = ss(&mt, n * a);
    let ss_a = ss(&ma, n * t);
    let mut ss_e = 0.0;
    let mut ss_total = 0.0;
    for s in 0..n {
        for l in 0..t {
            for k in 0..a {
                let v = cell[(s * t + l) * a + k];
                let r = v - ms[s] - mt[l] - ma[k] + 2.0 * grand;
                ss_e += r * r;
                ss_total += (v - grand) * (v - grand);
            }
        }
    }
    if ss_total == 0.0 {
        return Err(Error::DegenerateData(
            "feature is constant across all subjects and reconstructions".into(),
        ));
    }
    let df_e = (n * t * a + 2 - n - t - a) as f64;
    let ms_e = ss_e / df_e;
    let ms_s = ss_s / (n - 1) as f64;
    let ms_t = ss_t / (t - 1) as f64;
    let ms_a = if a > 1 { ss_a / (a - 1) as f64 } else { ms_e };

    let mut clamped = Vec::new();
    let mut clamp = |name: &'static str, v: f64| {
        if v < 0.0 {
            clamped.push(name);
            0.0
        } else {
            v
        }
    };
    let components = VarianceComponents {
        sigma2_s: clamp("sigma2_s", (ms_s - ms_e) / (t * a) as f64),
        sigma2_t: clamp("sigma2_t", (ms_t - ms_e) / (n * a) as f64),
        sigma2_a: clamp("sigma2_a", (ms_a - ms_e) / (n * t) as f64),
        sigma2_e: ms_e.max(0.0),
    };
    let denom = components.sigma2_s + components.sigma2_t + components.sigma2_e;
    if !(denom > 0.0) {
        return Err(Error::DegenerateData(
            "no subject, thickness or residual variance".into(),
        ));
    }
    Ok(GeneralizedCcc {
        ccc: (components.sigma2_s / denom).clamp(0.0, 1.0),
        components,
        clamped,
        n_subjects: n,
        n_thickness: t,
        n_asir: a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(
        f: impl Fn(usize, usize, usize) -> f64,
        n: usize,
        t: usize,
        a: usize,
    ) -> Vec<Observation<usize>> {
        let mut out = Vec::new();
        for s in 0..n {
            for l in 0..t {
                for k in 0..a {
                    out.push(Observation {
                        subject: s,
                        thickness: [2.5, 3.75, 5.0][l],
                        asir: Some(10.0 * k as f64),
                        value: f(s, l, k),
                    });
                }
            }
        }
        out
    }

    #[test]
    fn subject_only_variation_gives_one() {
        let g = generalized_ccc(&grid(|s, _, _| (s * s) as f64, 6, 3, 7)).unwrap();
        assert!((g.ccc - 1.0).abs() < 1e-12);
        assert!(g.components.sigma2_t < 1e-12 && g.components.sigma2_e < 1e-12);
    }

    #[test]
    fn exact_components_on_noise_free_additive_data() {
        // subject effects 0,1,2,3 (dispersion 5/3), thickness effects -1,0,1,
        // ASiR effects 0,0.5; no residual
        let g = generalized_ccc(&grid(
            |s, l, k| s as f64 + l as f64 - 1.0 + 0.5 * k as f64,
            4,
            3,
            2,
        ))
        .unwrap();
        let c = g.components;
        assert!((c.sigma2_s - 5.0 / 3.0).abs() < 1e-12);
        assert!((c.sigma2_t - 1.0).abs() < 1e-12);
        assert!((c.sigma2_a - 0.125).abs() < 1e-12);
        assert!(c.sigma2_e.abs() < 1e-12);
        assert!((g.ccc - (5.0 / 3.0) / (8.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_and_degenerate() {
        let mut obs = grid(|s, l, _| (s + l) as f64, 3, 3, 2);
        obs.pop();
        assert!(matches!(
            generalized_ccc(&obs),
            Err(Error::UnbalancedDesign(_))
        ));
        let mut dup = grid(|s, l, _| (s + l) as f64, 3, 3, 2);
        dup.push(dup[0].clone());
        assert!(matches!(
            generalized_ccc(&dup),
            Err(Error::UnbalancedDesign(_))
        ));
        assert!(matches!(
            generalized_ccc(&grid(|_, _, _| 4.0, 3, 3, 2)),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            generalized_ccc(&grid(|s, _, _| s as f64, 3, 1, 2)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn negative_estimate_is_clamped_and_flagged() {
        // subject means identical, large residual
        let g = generalized_ccc(&grid(
            |s, l, k| if (s + l + k) % 2 == 0 { 1.0 } else { -1.0 },
            4,
            2,
            2,
        ))
        .unwrap();
        assert!(g.clamped.contains(&"sigma2_s"));
        assert_eq!(g.components.sigma2_s, 0.0);
        assert_eq!(g.ccc, 0.0);
    }
}
