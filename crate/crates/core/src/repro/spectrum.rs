//! Feature-table level reproducibility analysis.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ccc::pairwise_ccc;
use super::generalized::{generalized_ccc, Observation, VarianceComponents};
use super::wilcoxon::{wilcoxon_signed_rank, WilcoxonResult};
use crate::stats::percentile;
use crate::table::{FeatureId, FeatureTable, Roi};

/// ASiR level at which pairwise thickness CCCs are computed.
pub const REFERENCE_ASIR: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub extractor: String,
    pub roi: Roi,
    pub feature: FeatureId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReproKind {
    Generalized,
    Pairwise { thickness_a: f64, thickness_b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproResult {
    pub key: GroupKey,
    pub kind: ReproKind,
    pub ccc: f64,
    pub components: Option<VarianceComponents>,
    pub flags: Vec<String>,
}

/// A (feature, roi, extractor) group left out of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub key: GroupKey,
    pub reason: String,
}

/// All observations of one (feature, roi, extractor). Subjects are indices
/// into the table-wide subject list; `None` values are missing.
#[derive(Debug, Clone)]
pub struct FeatureGroup {
    pub key: GroupKey,
    pub observations: Vec<Observation<usize>>,
    pub missing: usize,
}

/// Table-wide reconstruction grid every group must cover.
#[derive(Debug, Clone)]
pub struct Grid {
    pub subjects: Vec<String>,
    /// (thickness, asir) cells, sorted.
    pub cells: Vec<(f64, Option<f64>)>,
}

#[derive(Debug, Clone, Default)]
pub struct Spectrum {
    pub results: Vec<ReproResult>,
    pub excluded: Vec<Exclusion>,
}

fn cell_key(t: f64, a: Option<f64>) -> (u64, Option<u64>) {
    // +0.0 canonicalizes -0.0
    ((t + 0.0).to_bits(), a.map(|v| (v + 0.0).to_bits()))
}

/// Splits a feature table into per-(extractor, roi, feature) groups in key
/// order and derives the reconstruction grid.
pub fn group_table(table: &FeatureTable) -> (Vec<FeatureGroup>, Grid) {
    let subjects: BTreeSet<&str> = table
        .records
        .iter()
        .map(|r| r.subject_id.as_str())
        .collect();
    let subjects: Vec<String> = subjects.into_iter().map(ToString::to_string).collect();
    let mut cells: Vec<(f64, Option<f64>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for r in &table.records {
        if seen.insert(cell_key(r.slice_thickness_mm, r.asir_percent)) {
            cells.push((r.slice_thickness_mm, r.asir_percent));
        }
    }
    cells.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then_with(|| {
            a.1.unwrap_or(f64::NEG_INFINITY)
                .total_cmp(&b.1.unwrap_or(f64::NEG_INFINITY))
        })
    });
    let mut groups: BTreeMap<GroupKey, FeatureGroup> = BTreeMap::new();
    for r in &table.records {
        let key = GroupKey {
            extractor: r.extractor.clone(),
            roi: r.roi,
            feature: r.feature,
        };
        let g = groups.entry(key.clone()).or_insert_with(|| FeatureGroup {
            key,
            observations: Vec::new(),
            missing: 0,
        });
        match r.value {
            Some(v) if v.is_finite() => {
                let subject = subjects
                    .binary_search_by(|s| s.as_str().cmp(&r.subject_id))
                    .expect("subject");
                g.observations.push(Observation {
                    subject,
                    thickness: r.slice_thickness_mm,
                    asir: r.asir_percent,
                    value: v,
                })
            }
            _ => g.missing += 1,
        }
    }
    (groups.into_values().collect(), Grid { subjects, cells })
}

/// Generalized CCC followed by pairwise CCCs for every thickness pair at the
/// reference ASiR level (all reconstructions when the table has no ASiR).
pub fn analyze_group(
    group: &FeatureGroup,
    grid: &Grid,
    reference_asir: f64,
) -> Result<Vec<ReproResult>, Exclusion> {
    let exclude = |reason: String| Exclusion {
        key: group.key.clone(),
        reason,
    };
    let expected = grid.subjects.len() * grid.cells.len();
    if group.missing > 0 || group.observations.len() != expected {
        let present = group.observations.len();
        return Err(exclude(format!(
            "{} of {expected} grid values missing",
            expected.saturating_sub(present)
        )));
    }
    let g = generalized_ccc(&group.observations).map_err(|e| exclude(e.to_string()))?;
    let mut out = Vec::new();
    out.push(ReproResult {
        key: group.key.clone(),
        kind: ReproKind::Generalized,
        ccc: g.ccc,
        components: Some(g.components),
        flags: g.clamped.iter().map(|c| format!("clamped_{c}")).collect(),
    });

    let at_reference = |o: &Observation<usize>| match o.asir {
        Some(a) => a == reference_asir,
        None => true,
    };
    let mut by_thickness: BTreeMap<u64, (f64, Vec<(usize, f64)>)> = BTreeMap::new();
    for o in group.observations.iter().filter(|o| at_reference(o)) {
        by_thickness
            .entry(o.thickness.to_bits())
            .or_insert((o.thickness, Vec::new()))
            .1
            .push((o.subject, o.value));
    }
    let mut levels: Vec<(f64, Vec<(usize, f64)>)> = by_thickness.into_values().collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    for series in levels.iter_mut() {
        series.1.sort_by_key(|p| p.0);
    }
    for i in 0..levels.len() {
        for j in i + 1..levels.len() {
            let x: Vec<f64> = levels[i].1.iter().map(|p| p.1).collect();
            let y: Vec<f64> = levels[j].1.iter().map(|p| p.1).collect();
            if let Ok(ccc) = pairwise_ccc(&x, &y) {
                out.push(ReproResult {
                    key: group.key.clone(),
                    kind: ReproKind::Pairwise {
                        thickness_a: levels[i].0,
                        thickness_b: levels[j].0,
                    },
                    ccc,
                    components: None,
                    flags: Vec::new(),
                });
            }
        }
    }
    Ok(out)
}

/// Spectrum of CCCs over every (feature, roi, extractor) in the table.
pub fn ccc_spectrum(table: &FeatureTable, reference_asir: f64) -> Spectrum {
    let (groups, grid) = group_table(table);
    let mut spectrum = Spectrum::default();
    for g in &groups {
        match analyze_group(g, &grid, reference_asir) {
            Ok(r) => spectrum.results.extend(r),
            Err(e) => spectrum.excluded.push(e),
        }
    }
    spectrum
}

/// Paired comparison of the pairwise CCCs of two thickness pairs, paired
/// over (roi, feature) within one extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub extractor: String,
    pub pair_a: (f64, f64),
    pub pair_b: (f64, f64),
    pub median_a: f64,
    pub median_b: f64,
    pub test: WilcoxonResult,
}

pub fn thickness_pair_wilcoxon(results: &[ReproResult]) -> Vec<PairComparison> {
    type Pair = (u64, u64);
    let mut table: BTreeMap<&str, BTreeMap<Pair, ((f64, f64), BTreeMap<(Roi, FeatureId), f64>)>> =
        BTreeMap::new();
    for r in results {
        if let ReproKind::Pairwise {
            thickness_a,
            thickness_b,
        } = r.kind
        {
            table
                .entry(r.key.extractor.as_str())
                .or_default()
                .entry((thickness_a.to_bits(), thickness_b.to_bits()))
                .or_insert(((thickness_a, thickness_b), BTreeMap::new()))
                .1
                .insert((r.key.roi, r.key.feature), r.ccc);
        }
    }
    let mut out = Vec::new();
    for (extractor, pairs) in table {
        let mut pairs: Vec<_> = pairs.into_values().collect();
        pairs.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let (mut x, mut y) = (Vec::new(), Vec::new());
                for (k, v) in &pairs[i].1 {
                    if let Some(w) = pairs[j].1.get(k) {
                        x.push(*v);
                        y.push(*w);
                    }
                }
                let Ok(test) = wilcoxon_signed_rank(&x, &y) else {
                    continue;
                };
                out.push(PairComparison {
                    extractor: extractor.to_string(),
                    pair_a: pairs[i].0,
                    pair_b: pairs[j].0,
                    median_a: if x.is_empty() {
                        f64::NAN
                    } else {
                        percentile(&x, 50.0)
                    },
                    median_b: if y.is_empty() {
                        f64::NAN
                    } else {
                        percentile(&y, 50.0)
                    },
                    test,
                });
            }
        }
    }
    out
}
