use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::stats::pearson;

/// Greedy minimum-redundancy maximum-relevance selection.
///
/// The first pick maximizes `relevance`; each later pick maximizes
/// `relevance[f] - mean over selected s of |pearson(f, s)|`. Ties go to the
/// higher relevance, then the smaller id. Returns indices into `columns` in
/// selection order, `min(k, columns.len())` of them.
pub fn mrmr_select<K: Ord>(
    columns: &[Vec<f64>],
    relevance: &[f64],
    ids: &[K],
    k: usize,
) -> Vec<usize> {
    assert_eq!(columns.len(), relevance.len());
    assert_eq!(columns.len(), ids.len());
    let m = columns.len();
    let mut selected = Vec::with_capacity(k.min(m));
    let mut taken = vec![false; m];
    let mut redundancy = vec![0.0; m];
    while selected.len() < k.min(m) {
        let score = |f: usize| {
            if selected.is_empty() {
                relevance[f]
            } else {
                relevance[f] - redundancy[f] / selected.len() as f64
            }
        };
        let better = |a: usize, b: usize| -> bool {
            match score(a).total_cmp(&score(b)) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => match relevance[a].total_cmp(&relevance[b]) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => ids[a] < ids[b],
                },
            }
        };
        let mut best: Option<usize> = None;
        for f in (0..m).filter(|&f| !taken[f]) {
            if best.is_none_or(|b| better(f, b)) {
                best = Some(f);
            }
        }
        let pick = best.expect("candidate available");
        taken[pick] = true;
        selected.push(pick);
        for f in (0..m).filter(|&f| !taken[f]) {
            redundancy[f] += pearson(&columns[f], &columns[pick]).abs();
        }
    }
    selected
}
