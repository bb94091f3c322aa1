use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Outcome;
use crate::error::{Error, Result};

/// Concordance counts with ties kept exact: `concordant2 = 2 * concordant +
/// risk ties`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Concordance {
    pub concordant2: u64,
    pub comparable: u64,
}

impl Concordance {
    pub fn cindex(self) -> Option<f64> {
        (self.comparable > 0).then(|| self.concordant2 as f64 / (2 * self.comparable) as f64)
    }
}

pub(crate) fn validate(risk: &[f64], outcomes: &[Outcome]) -> Result<()> {
    if risk.len() != outcomes.len() {
        return Err(Error::Argument(format!(
            "{} risks for {} outcomes",
            risk.len(),
            outcomes.len()
        )));
    }
    if risk.iter().any(|r| !r.is_finite()) {
        return Err(Error::Argument("risk scores must be finite".into()));
    }
    if outcomes
        .iter()
        .any(|o| !(o.time > 0.0 && o.time.is_finite()))
    {
        return Err(Error::Argument("survival times must be positive".into()));
    }
    Ok(())
}

/// Harrell's concordance counts in O(n log n).
///
/// A pair (i, j) is comparable when `time_i < time_j` and `i` had the event;
/// it is concordant when `risk_i > risk_j` and counts one half on a risk tie.
pub fn concordance(risk: &[f64], outcomes: &[Outcome]) -> Result<Concordance> {
    validate(risk, outcomes)?;
    let n = risk.len();
    let mut sorted_risk: Vec<f64> = risk.to_vec();
    sorted_risk.sort_by(f64::total_cmp);
    sorted_risk.dedup();
    let rank = |r: f64| sorted_risk.partition_point(|&v| v < r);
    // Fenwick tree over risk ranks of subjects with strictly later times
    let mut tree = vec![0u64; sorted_risk.len() + 1];
    let add = |tree: &mut Vec<u64>, mut i: usize| {
        i += 1;
        while i < tree.len() {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    };
    let below = |tree: &Vec<u64>, mut i: usize| {
        // count of ranks < i
        let mut s = 0;
        while i > 0 {
            s += tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| outcomes[b].time.total_cmp(&outcomes[a].time));
    let mut out = Concordance::default();
    let mut inserted = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && outcomes[order[j]].time == outcomes[order[i]].time {
            j += 1;
        }
        for &s in &order[i..j] {
            if outcomes[s].event {
                let r = rank(risk[s]);
                let lower = below(&tree, r);
                let tied = below(&tree, r + 1) - lower;
                out.concordant2 += 2 * lower + tied;
                out.comparable += inserted;
            }
        }
        for &s in &order[i..j] {
            add(&mut tree, rank(risk[s]));
            inserted += 1;
        }
        i = j;
    }
    Ok(out)
}

/// Harrell's C-index; an error when no pair is comparable.
pub fn harrell_cindex(risk: &[f64], outcomes: &[Outcome]) -> Result<f64> {
    if risk.len() < 2 {
        return Err(Error::InsufficientData(
            "C-index needs at least 2 subjects".into(),
        ));
    }
    concordance(risk, outcomes)?.cindex().ok_or_else(|| {
        Error::Undefined("no comparable pairs (no event precedes another time)".into())
    })
}

/// Folds a C-index into [0.5, 1]; the flag reports whether it was negated.
pub fn fold_cindex(c: f64) -> (f64, bool) {
    if c < 0.5 {
        (1.0 - c, true)
    } else {
        (c, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcomes(times: &[f64], events: &[bool]) -> Vec<Outcome> {
        times
            .iter()
            .zip(events)
            .map(|(&time, &event)| Outcome { time, event })
            .collect()
    }

    fn brute(risk: &[f64], o: &[Outcome]) -> (u64, u64) {
        let (mut c2, mut n) = (0, 0);
        for i in 0..o.len() {
            for j in 0..o.len() {
                if o[i].event && o[i].time < o[j].time {
                    n += 1;
                    c2 += if risk[i] > risk[j] {
                        2
                    } else if risk[i] == risk[j] {
                        1
                    } else {
                        0
                    };
                }
            }
        }
        (c2, n)
    }

    #[test]
    fn perfect_and_tied() {
        let o = outcomes(&[1.0, 2.0, 3.0, 4.0], &[true; 4]);
        assert_eq!(harrell_cindex(&[4.0, 3.0, 2.0, 1.0], &o).unwrap(), 1.0);
        assert_eq!(harrell_cindex(&[1.0; 4], &o).unwrap(), 0.5);
    }

    #[test]
    fn six_subject_example_matches_brute_force() {
        let o = outcomes(
            &[2.0, 4.0, 5.0, 7.0, 9.0, 11.0],
            &[true, true, false, true, false, true],
        );
        let risk = [0.7, 0.1, 0.5, 0.5, -0.2, 0.9];
        let c = concordance(&risk, &o).unwrap();
        assert_eq!((c.concordant2, c.comparable), brute(&risk, &o));
    }

    #[test]
    fn equal_times_are_not_comparable() {
        let o = outcomes(&[3.0, 3.0], &[true, true]);
        assert!(matches!(
            harrell_cindex(&[1.0, 0.0], &o),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn all_censored_is_undefined() {
        let o = outcomes(&[5.0, 5.0, 5.0], &[false; 3]);
        assert!(matches!(
            harrell_cindex(&[1.0, 2.0, 3.0], &o),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn folding() {
        assert!((fold_cindex(0.38).0 - 0.62).abs() < 1e-15);
        assert!(fold_cindex(0.38).1);
        assert_eq!(fold_cindex(0.5), (0.5, false));
        assert_eq!(fold_cindex(0.6176), (0.6176, false));
    }
}
