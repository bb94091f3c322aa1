use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::repro::GroupKey;
use crate::table::{FeatureId, Roi};

/// A (feature, roi, extractor) with its reproducibility and folded C-index.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub key: GroupKey,
    pub ccc: f64,
    pub cindex: f64,
}

/// Indices of the Pareto-efficient points when maximizing both coordinates,
/// sorted by descending first coordinate (then descending second, then
/// index). A point is dominated when another is at least as good in both
/// coordinates and strictly better in one, so duplicates of an efficient
/// point are all kept. Points with non-finite coordinates are never efficient.
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len())
        .filter(|&i| points[i].0.is_finite() && points[i].1.is_finite())
        .collect();
    order.sort_by(|&a, &b| {
        points[b]
            .0
            .total_cmp(&points[a].0)
            .then(points[b].1.total_cmp(&points[a].1))
            .then(a.cmp(&b))
    });
    let mut front = Vec::new();
    let mut best_above = f64::NEG_INFINITY;
    let mut i = 0;
    while i < order.len() {
        let x = points[order[i]].0;
        let top = points[order[i]].1;
        let mut j = i;
        while j < order.len() && points[order[j]].0 == x {
            if points[order[j]].1 == top && top > best_above {
                front.push(order[j]);
            }
            j += 1;
        }
        best_above = best_above.max(top);
        i = j;
    }
    front
}

/// Joined statistics for one (feature, roi, extractor).
#[derive(Debug, Clone, PartialEq)]
pub struct FrontInput {
    pub key: GroupKey,
    pub ccc: Option<f64>,
    pub cindex: Option<f64>,
}

/// Extractor sets of one (roi, feature) across extractors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFront {
    pub roi: Roi,
    pub feature: FeatureId,
    pub best_ccc: Vec<String>,
    pub best_cindex: Vec<String>,
    pub pareto: Vec<String>,
    /// Features of the same ROI with identical statistics on every extractor
    /// share a duplicate group (the smallest feature id of the group).
    pub duplicate_of: Option<FeatureId>,
}

/// Per-extractor membership counts; `dedup` counts each group of identical
/// features once.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtractorCounts {
    pub extractor: String,
    pub best_ccc: usize,
    pub best_cindex: usize,
    pub pareto: usize,
    pub best_ccc_dedup: usize,
    pub best_cindex_dedup: usize,
    pub pareto_dedup: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontsReport {
    pub fronts: Vec<FeatureFront>,
    pub counts: Vec<ExtractorCounts>,
    /// Inputs missing either statistic.
    pub excluded: Vec<GroupKey>,
}

fn argmax(values: &[(String, f64)]) -> Vec<String> {
    let top = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .filter(|v| v.1 == top)
        .map(|v| v.0.clone())
        .collect()
}

/// Pareto fronts across extractors for every (roi, feature), plus the
/// per-extractor counts behind the extractor bar plots.
pub fn per_feature_extractor_fronts(inputs: &[FrontInput]) -> FrontsReport {
    let mut report = FrontsReport::default();
    let mut groups: BTreeMap<(Roi, FeatureId), Vec<(String, f64, f64)>> = BTreeMap::new();
    for i in inputs {
        match (
            i.ccc.filter(|v| v.is_finite()),
            i.cindex.filter(|v| v.is_finite()),
        ) {
            (Some(c), Some(h)) => groups.entry((i.key.roi, i.key.feature)).or_default().push((
                i.key.extractor.clone(),
                c,
                h,
            )),
            _ => report.excluded.push(i.key.clone()),
        }
    }
    // duplicate detection on the exact statistics of every extractor
    let mut signature: BTreeMap<(Roi, Vec<(String, u64, u64)>), FeatureId> = BTreeMap::new();
    let mut counts: BTreeMap<String, ExtractorCounts> = BTreeMap::new();
    for ((roi, feature), mut rows) in groups {
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let sig: Vec<(String, u64, u64)> = rows
            .iter()
            .map(|r| (r.0.clone(), r.1.to_bits(), r.2.to_bits()))
            .collect();
        let duplicate_of = match signature.get(&(roi, sig.clone())) {
            Some(&first) => Some(first),
            None => {
                signature.insert((roi, sig), feature);
                None
            }
        };
        let best_ccc = argmax(&rows.iter().map(|r| (r.0.clone(), r.1)).collect::<Vec<_>>());
        let best_cindex = argmax(&rows.iter().map(|r| (r.0.clone(), r.2)).collect::<Vec<_>>());
        let coords: Vec<(f64, f64)> = rows.iter().map(|r| (r.1, r.2)).collect();
        let pareto: Vec<String> = pareto_front(&coords)
            .into_iter()
            .map(|i| rows[i].0.clone())
            .collect();
        for r in &rows {
            counts
                .entry(r.0.clone())
                .or_insert_with(|| ExtractorCounts {
                    extractor: r.0.clone(),
                    ..Default::default()
                });
        }
        let first = duplicate_of.is_none();
        for e in &best_ccc {
            let c = counts.get_mut(e).expect("extractor");
            c.best_ccc += 1;
            c.best_ccc_dedup += first as usize;
        }
        for e in &best_cindex {
            let c = counts.get_mut(e).expect("extractor");
            c.best_cindex += 1;
            c.best_cindex_dedup += first as usize;
        }
        for e in &pareto {
            let c = counts.get_mut(e).expect("extractor");
            c.pareto += 1;
            c.pareto_dedup += first as usize;
        }
        report.fronts.push(FeatureFront {
            roi,
            feature,
            best_ccc,
            best_cindex,
            pareto,
            duplicate_of,
        });
    }
    report.counts = counts.into_values().collect();
    report
}
