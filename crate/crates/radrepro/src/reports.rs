//! Analysis reports: clustered heatmaps, dendrogram tables and Pareto sets.
//! All files are deterministic functions of their inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use radrepro_core::analysis::{
    pareto_front, per_feature_extractor_fronts, ward_cluster, Axis, Clustering, Dendrogram,
    FrontInput,
};
use radrepro_core::repro::{GroupKey, ReproKind, ReproResult};
use radrepro_core::table::{FeatureId, Roi};
use serde::Serialize;

use crate::error::{AppError, Result};
use crate::pipeline::{SetRun, Univariate};
use crate::tables::write_rows;

/// Number of flat clusters reported per heatmap axis.
pub const CLUSTER_COUNT: usize = 4;

/// A labeled matrix with possibly missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

/// A complete matrix after dropping rows with missing cells, with rows and
/// columns in dendrogram leaf order.
#[derive(Debug, Clone)]
pub struct ClusteredMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub row_clusters: Vec<usize>,
    pub column_clusters: Vec<usize>,
    pub row_dendrogram: Option<Dendrogram>,
    pub column_dendrogram: Option<Dendrogram>,
    pub dropped_rows: Vec<String>,
}

/// Flat cluster label per leaf (in leaf order) after cutting the dendrogram
/// into `k` clusters. Labels count up in leaf order.
pub fn cut_clusters(d: &Dendrogram, k: usize) -> Vec<usize> {
    let n = d.n_leaves;
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let merges = n.saturating_sub(k.max(1));
    for (i, m) in d.merges.iter().take(merges).enumerate() {
        let (a, b) = (find(&mut parent, m.a), find(&mut parent, m.b));
        parent[a] = n + i;
        parent[b] = n + i;
    }
    let mut labels = BTreeMap::new();
    d.leaf_order
        .iter()
        .map(|&leaf| {
            let root = find(&mut parent, leaf);
            let next = labels.len();
            *labels.entry(root).or_insert(next)
        })
        .collect()
}

fn cluster_axis(
    matrix: &[Vec<Option<f64>>],
    axis: Axis,
    len: usize,
) -> Result<(Vec<usize>, Vec<usize>, Option<Dendrogram>)> {
    if len < 2 {
        return Ok(((0..len).collect(), vec![0; len], None));
    }
    let Clustering {
        dendrogram, kept, ..
    } = ward_cluster(matrix, axis)?;
    if !dendrogram.exact_order {
        log::warn!(
            "{} leaves exceed the exact leaf-ordering limit; using dendrogram order",
            dendrogram.n_leaves
        );
    }
    let order: Vec<usize> = dendrogram.leaf_order.iter().map(|&l| kept[l]).collect();
    let clusters = cut_clusters(&dendrogram, CLUSTER_COUNT);
    Ok((order, clusters, Some(dendrogram)))
}

/// Drops rows with missing cells, then clusters rows and columns with Ward
/// linkage and optimal leaf ordering.
pub fn cluster_matrix(m: &LabeledMatrix) -> Result<ClusteredMatrix> {
    let (complete, dropped): (Vec<usize>, Vec<usize>) =
        (0..m.rows.len()).partition(|&r| m.values[r].iter().all(|v| v.is_some_and(f64::is_finite)));
    let sub: Vec<Vec<Option<f64>>> = complete.iter().map(|&r| m.values[r].clone()).collect();
    let (row_order, row_clusters, row_dendrogram) = cluster_axis(&sub, Axis::Rows, sub.len())?;
    let n_cols = if sub.is_empty() { 0 } else { m.columns.len() };
    let (col_order, column_clusters, column_dendrogram) =
        cluster_axis(&sub, Axis::Columns, n_cols)?;
    Ok(ClusteredMatrix {
        rows: row_order
            .iter()
            .map(|&r| m.rows[complete[r]].clone())
            .collect(),
        columns: col_order.iter().map(|&c| m.columns[c].clone()).collect(),
        values: row_order
            .iter()
            .map(|&r| {
                col_order
                    .iter()
                    .map(|&c| sub[r][c].expect("complete row"))
                    .collect()
            })
            .collect(),
        row_clusters,
        column_clusters,
        row_dendrogram,
        column_dendrogram,
        dropped_rows: dropped.iter().map(|&r| m.rows[r].clone()).collect(),
    })
}

fn feature_label(f: FeatureId) -> String {
    f.to_string()
}

/// Generalized CCC per feature, with one column per (extractor, roi):
/// both ROIs joined side by side.
pub fn ccc_matrix(repro: &[ReproResult]) -> LabeledMatrix {
    let mut cells: BTreeMap<(FeatureId, (String, Roi)), f64> = BTreeMap::new();
    for r in repro.iter().filter(|r| r.kind == ReproKind::Generalized) {
        cells.insert((r.key.feature, (r.key.extractor.clone(), r.key.roi)), r.ccc);
    }
    let features: Vec<FeatureId> = cells
        .keys()
        .map(|k| k.0)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let columns: Vec<(String, Roi)> = cells
        .keys()
        .map(|k| k.1.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    LabeledMatrix {
        rows: features.iter().map(|&f| feature_label(f)).collect(),
        columns: columns
            .iter()
            .map(|(e, r)| format!("{e}|{}", r.as_str()))
            .collect(),
        values: features
            .iter()
            .map(|&f| {
                columns
                    .iter()
                    .map(|c| cells.get(&(f, c.clone())).copied())
                    .collect()
            })
            .collect(),
    }
}

/// Folded univariate C-index per feature and extractor for one ROI.
pub fn cindex_matrix(univariate: &[Univariate], roi: Roi) -> LabeledMatrix {
    let mut cells: BTreeMap<(FeatureId, String), f64> = BTreeMap::new();
    for u in univariate.iter().filter(|u| u.key.roi == roi) {
        if let Some(c) = u.folded {
            cells.insert((u.key.feature, u.key.extractor.clone()), c);
        }
    }
    let mut features: Vec<FeatureId> = univariate
        .iter()
        .filter(|u| u.key.roi == roi)
        .map(|u| u.key.feature)
        .collect();
    features.sort();
    features.dedup();
    let mut extractors: Vec<String> = univariate.iter().map(|u| u.key.extractor.clone()).collect();
    extractors.sort();
    extractors.dedup();
    LabeledMatrix {
        rows: features.iter().map(|&f| feature_label(f)).collect(),
        values: features
            .iter()
            .map(|&f| {
                extractors
                    .iter()
                    .map(|e| cells.get(&(f, e.clone())).copied())
                    .collect()
            })
            .collect(),
        columns: extractors,
    }
}

#[derive(Serialize, Default)]
struct OrderRow<'a> {
    position: usize,
    label: &'a str,
    cluster: usize,
}

#[derive(Serialize, Default)]
struct MergeRow {
    step: usize,
    a: usize,
    b: usize,
    height: f64,
    size: usize,
}

#[derive(Serialize, Default)]
struct DroppedRow<'a> {
    label: &'a str,
}

/// Writes `{name}.csv`, `{name}.svg`, `{name}_rows.csv`, `{name}_columns.csv`,
/// `{name}_row_merges.csv`, `{name}_column_merges.csv` and
/// `{name}_dropped.csv`.
pub fn write_heatmap(dir: &Path, name: &str, m: &ClusteredMatrix, range: (f64, f64)) -> Result<()> {
    let csv_path = dir.join(format!("{name}.csv"));
    let mut w =
        csv::Writer::from_path(&csv_path).map_err(|e| AppError::table(&csv_path, e.to_string()))?;
    let mut header = vec!["feature".to_string()];
    header.extend(m.columns.iter().cloned());
    w.write_record(&header)
        .map_err(|e| AppError::table(&csv_path, e.to_string()))?;
    for (label, row) in m.rows.iter().zip(&m.values) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)
            .map_err(|e| AppError::table(&csv_path, e.to_string()))?;
    }
    w.flush().map_err(|e| AppError::io(&csv_path, e))?;

    let order = |labels: &[String], clusters: &[usize]| -> Vec<(usize, String, usize)> {
        labels
            .iter()
            .zip(clusters)
            .enumerate()
            .map(|(i, (l, c))| (i, l.clone(), *c))
            .collect()
    };
    for (suffix, labels, clusters) in [
        ("rows", &m.rows, &m.row_clusters),
        ("columns", &m.columns, &m.column_clusters),
    ] {
        let rows = order(labels, clusters);
        write_rows(
            &dir.join(format!("{name}_{suffix}.csv")),
            rows.iter().map(|(position, label, cluster)| OrderRow {
                position: *position,
                label,
                cluster: *cluster,
            }),
        )?;
    }
    for (suffix, d) in [
        ("row_merges", &m.row_dendrogram),
        ("column_merges", &m.column_dendrogram),
    ] {
        let merges = d.as_ref().map_or(&[][..], |d| &d.merges[..]);
        write_rows(
            &dir.join(format!("{name}_{suffix}.csv")),
            merges.iter().enumerate().map(|(step, g)| MergeRow {
                step,
                a: g.a,
                b: g.b,
                height: g.height,
                size: g.size,
            }),
        )?;
    }
    write_rows(
        &dir.join(format!("{name}_dropped.csv")),
        m.dropped_rows.iter().map(|label| DroppedRow { label }),
    )?;
    let svg_path = dir.join(format!("{name}.svg"));
    std::fs::write(&svg_path, heatmap_svg(m, range)).map_err(|e| AppError::io(&svg_path, e))
}

/// Five-stop sequential palette, dark blue to yellow.
const PALETTE: [(u8, u8, u8); 5] = [
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
];

pub fn color(value: f64, (lo, hi): (f64, f64)) -> String {
    let t = if hi > lo {
        ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.5
    };
    let x = t * (PALETTE.len() - 1) as f64;
    let i = (x.floor() as usize).min(PALETTE.len() - 2);
    let f = x - i as f64;
    let mix = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
    let (a, b) = (PALETTE[i], PALETTE[i + 1]);
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const CELL: usize = 12;
const LEFT: usize = 260;
const TOP: usize = 110;

pub fn heatmap_svg(m: &ClusteredMatrix, range: (f64, f64)) -> String {
    let (w, h) = (
        LEFT + CELL * m.columns.len() + 20,
        TOP + CELL * m.rows.len() + 20,
    );
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="9" data-rows="{}" data-columns="{}" data-range="{} {}">"#,
        m.rows.len(),
        m.columns.len(),
        range.0,
        range.1
    );
    for (j, c) in m.columns.iter().enumerate() {
        let x = LEFT + CELL * j + CELL / 2 + 3;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" transform="rotate(-60 {x} {})">{}</text>"#,
            TOP - 4,
            TOP - 4,
            escape(c)
        );
    }
    for (i, (label, row)) in m.rows.iter().zip(&m.values).enumerate() {
        let y = TOP + CELL * i;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 4,
            y + CELL - 2,
            escape(label)
        );
        for (j, v) in row.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" data-value="{v}"><title>{} / {}: {v:.4}</title></rect>"#,
                LEFT + CELL * j,
                color(*v, range),
                escape(label),
                escape(&m.columns[j])
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// A (feature, roi, extractor) with both statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ParetoRow {
    pub feature: String,
    pub roi: String,
    pub extractor: String,
    pub ccc: f64,
    pub cindex: f64,
}

/// Joins generalized CCCs with folded univariate C-indices.
pub fn front_inputs(repro: &[ReproResult], univariate: &[Univariate]) -> Vec<FrontInput> {
    let mut joined: BTreeMap<GroupKey, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for r in repro.iter().filter(|r| r.kind == ReproKind::Generalized) {
        joined.entry(r.key.clone()).or_default().0 = Some(r.ccc);
    }
    for u in univariate {
        joined.entry(u.key.clone()).or_default().1 = u.folded;
    }
    joined
        .into_iter()
        .map(|(key, (ccc, cindex))| FrontInput { key, ccc, cindex })
        .collect()
}

/// Every point with both statistics, and the indices of the global front
/// among them (descending CCC).
pub fn global_front(inputs: &[FrontInput]) -> (Vec<ParetoRow>, Vec<usize>) {
    let points: Vec<ParetoRow> = inputs
        .iter()
        .filter_map(|i| match (i.ccc, i.cindex) {
            (Some(ccc), Some(cindex)) if ccc.is_finite() && cindex.is_finite() => Some(ParetoRow {
                feature: feature_label(i.key.feature),
                roi: i.key.roi.as_str().into(),
                extractor: i.key.extractor.clone(),
                ccc,
                cindex,
            }),
            _ => None,
        })
        .collect();
    let coords: Vec<(f64, f64)> = points.iter().map(|p| (p.ccc, p.cindex)).collect();
    let front = if coords.is_empty() {
        Vec::new()
    } else {
        pareto_front(&coords)
    };
    (points, front)
}

pub fn scatter_svg(points: &[ParetoRow], front: &[usize]) -> String {
    let (w, h, pad) = (520.0, 420.0, 50.0);
    let on_front: std::collections::BTreeSet<usize> = front.iter().copied().collect();
    let lo_c = points.iter().map(|p| p.ccc).fold(1.0, f64::min).min(0.0);
    let x = |c: f64| pad + (c - lo_c) / (1.0 - lo_c).max(1e-12) * (w - 2.0 * pad);
    let y = |c: f64| h - pad - (c - 0.5) / 0.5 * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="10" data-points="{}" data-front="{}">"#,
        points.len(),
        front.len()
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">generalized CCC</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">univariate C-index</text>"#,
        h / 2.0,
        h / 2.0
    );
    let _ = writeln!(
        s,
        r##"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for (i, p) in points.iter().enumerate() {
        let (class, fill, r) = if on_front.contains(&i) {
            ("front", "#d62728", 3.5)
        } else {
            ("point", "#7f7f7f", 2.0)
        };
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"><title>{} {} {}: CCC {:.4}, C {:.4}</title></circle>"#,
            x(p.ccc),
            y(p.cindex),
            escape(&p.feature),
            p.roi,
            escape(&p.extractor),
            p.ccc,
            p.cindex
        );
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Serialize, Default)]
struct UnivariateRow<'a> {
    feature_family: &'a str,
    feature_name: &'a str,
    roi: &'a str,
    extractor: &'a str,
    n: usize,
    cindex: Option<f64>,
    folded_cindex: Option<f64>,
    negated: bool,
}

#[derive(Serialize, Default)]
struct FeatureFrontRow<'a> {
    roi: &'a str,
    feature: String,
    best_ccc: String,
    best_cindex: String,
    pareto: String,
    duplicate_of: String,
}

#[derive(Serialize, Default)]
struct CountRow<'a> {
    extractor: &'a str,
    best_ccc: usize,
    best_cindex: usize,
    pareto: usize,
    best_ccc_dedup: usize,
    best_cindex_dedup: usize,
    pareto_dedup: usize,
}

#[derive(Serialize, Default)]
struct ExcludedRow<'a> {
    feature: String,
    roi: &'a str,
    extractor: &'a str,
}

/// Files written by [`emit_reports`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub ccc_rows: usize,
    pub ccc_dropped: usize,
    pub front_size: usize,
    pub points: usize,
}

/// Writes every analysis artifact under `dir`.
pub fn emit_reports(
    dir: &Path,
    repro: &[ReproResult],
    univariate: &[Univariate],
) -> Result<ReportSummary> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    write_rows(
        &dir.join("univariate_cindex.csv"),
        univariate.iter().map(|u| UnivariateRow {
            feature_family: u.key.feature.family.as_str(),
            feature_name: u.key.feature.name(),
            roi: u.key.roi.as_str(),
            extractor: &u.key.extractor,
            n: u.n,
            cindex: u.cindex,
            folded_cindex: u.folded,
            negated: u.negated,
        }),
    )?;

    let ccc = cluster_matrix(&ccc_matrix(repro))?;
    write_heatmap(dir, "ccc_heatmap", &ccc, (0.0, 1.0))?;
    for roi in [Roi::Tumor, Roi::Liver] {
        let m = cluster_matrix(&cindex_matrix(univariate, roi))?;
        write_heatmap(
            dir,
            &format!("cindex_heatmap_{}", roi.as_str()),
            &m,
            (0.5, 1.0),
        )?;
    }

    let inputs = front_inputs(repro, univariate);
    let (points, front) = global_front(&inputs);
    write_rows(
        &dir.join("pareto_front.csv"),
        front.iter().map(|&i| points[i].clone()),
    )?;
    let svg = dir.join("pareto_scatter.svg");
    std::fs::write(&svg, scatter_svg(&points, &front)).map_err(|e| AppError::io(&svg, e))?;

    let report = per_feature_extractor_fronts(&inputs);
    write_rows(
        &dir.join("extractor_fronts.csv"),
        report.fronts.iter().map(|f| FeatureFrontRow {
            roi: f.roi.as_str(),
            feature: feature_label(f.feature),
            best_ccc: f.best_ccc.join(";"),
            best_cindex: f.best_cindex.join(";"),
            pareto: f.pareto.join(";"),
            duplicate_of: f.duplicate_of.map_or(String::new(), feature_label),
        }),
    )?;
    write_rows(
        &dir.join("extractor_counts.csv"),
        report.counts.iter().map(|c| CountRow {
            extractor: &c.extractor,
            best_ccc: c.best_ccc,
            best_cindex: c.best_cindex,
            pareto: c.pareto,
            best_ccc_dedup: c.best_ccc_dedup,
            best_cindex_dedup: c.best_cindex_dedup,
            pareto_dedup: c.pareto_dedup,
        }),
    )?;
    write_rows(
        &dir.join("fronts_excluded.csv"),
        report.excluded.iter().map(|k| ExcludedRow {
            feature: feature_label(k.feature),
            roi: k.roi.as_str(),
            extractor: &k.extractor,
        }),
    )?;
    Ok(ReportSummary {
        ccc_rows: ccc.rows.len(),
        ccc_dropped: ccc.dropped_rows.len(),
        front_size: front.len(),
        points: points.len(),
    })
}

/// One row of the survival grid summary.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct SummaryRow {
    pub extractor: String,
    pub ccc_threshold: f64,
    pub n_features: usize,
    pub mean_test_cindex: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_train_cindex: f64,
    pub liver_fraction: Option<f64>,
    pub total_folds: usize,
    pub null_folds: usize,
    pub unconverged_folds: usize,
}

pub fn summary_rows(runs: &[SetRun]) -> Vec<SummaryRow> {
    runs.iter()
        .flat_map(|run| {
            run.summaries.iter().map(move |s| SummaryRow {
                extractor: run.extractor_set.clone(),
                ccc_threshold: s.config.ccc_threshold,
                n_features: s.config.feature_count,
                mean_test_cindex: s.mean_test_cindex,
                ci_lo: s.ci_lo,
                ci_hi: s.ci_hi,
                mean_train_cindex: s.mean_train_cindex,
                liver_fraction: s.liver_fraction,
                total_folds: s.total_folds,
                null_folds: s.null_folds,
                unconverged_folds: s.unconverged_folds,
            })
        })
        .collect()
}

/// The ten best cells by mean test C-index; ties keep grid order.
pub fn top_rows(rows: &[SummaryRow], n: usize) -> Vec<SummaryRow> {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| b.mean_test_cindex.total_cmp(&a.mean_test_cindex));
    sorted.truncate(n);
    sorted
}

/// Fixed-width rendering of the top cells for the terminal.
pub fn render_top(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<4} {:<10} {:>6} {:>4} {:>24} {:>6}\n",
        "rank", "extractor", "ccc_t", "k", "test C-index (95% CI)", "liver"
    );
    for (i, r) in rows.iter().enumerate() {
        let ci = format!("{:.3} ({:.3}-{:.3})", r.mean_test_cindex, r.ci_lo, r.ci_hi);
        let liver = r
            .liver_fraction
            .map_or("-".to_string(), |f| format!("{f:.2}"));
        let _ = writeln!(
            s,
            "{:<4} {:<10} {:>6.2} {:>4} {:>24} {:>6}",
            i + 1,
            r.extractor,
            r.ccc_threshold,
            r.n_features,
            ci,
            liver
        );
    }
    s
}

#[derive(Serialize, Default)]
struct SelectionRow<'a> {
    extractor_set: &'a str,
    ccc_threshold: f64,
    n_features: usize,
    feature_family: &'a str,
    feature_name: &'a str,
    roi: &'a str,
    extractor: &'a str,
    ccc: Option<f64>,
    folds_selected: usize,
    total_folds: usize,
}

#[derive(Serialize, Default)]
struct RepetitionRow<'a> {
    extractor: &'a str,
    ccc_threshold: f64,
    n_features: usize,
    repetition: usize,
    test_cindex: f64,
    train_cindex: f64,
    liver_fraction: Option<f64>,
    null_folds: usize,
    unconverged_folds: usize,
}

/// Writes summary.csv, top10.csv, selections.csv and repetitions.csv; returns
/// the top-10 rows.
pub fn write_survival_outputs(dir: &Path, runs: &[SetRun]) -> Result<Vec<SummaryRow>> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let rows = summary_rows(runs);
    write_rows(&dir.join("summary.csv"), rows.iter().cloned())?;
    let top = top_rows(&rows, 10);
    write_rows(&dir.join("top10.csv"), top.iter().cloned())?;
    let selections = runs.iter().flat_map(|run| {
        run.summaries.iter().flat_map(move |s| {
            s.selection_counts.iter().map(move |&(c, count)| {
                let cand = &run.data.candidates[c];
                SelectionRow {
                    extractor_set: &run.extractor_set,
                    ccc_threshold: s.config.ccc_threshold,
                    n_features: s.config.feature_count,
                    feature_family: cand.key.feature.family.as_str(),
                    feature_name: cand.key.feature.name(),
                    roi: cand.key.roi.as_str(),
                    extractor: &cand.key.extractor,
                    ccc: cand.ccc,
                    folds_selected: count,
                    total_folds: s.total_folds,
                }
            })
        })
    });
    write_rows(&dir.join("selections.csv"), selections)?;
    let reps = runs.iter().flat_map(|run| {
        run.summaries
            .iter()
            .zip(&run.repetitions)
            .flat_map(move |(s, reps)| {
                reps.iter().map(move |r| RepetitionRow {
                    extractor: &run.extractor_set,
                    ccc_threshold: s.config.ccc_threshold,
                    n_features: s.config.feature_count,
                    repetition: r.repetition,
                    test_cindex: r.test_cindex,
                    train_cindex: r.train_cindex,
                    liver_fraction: r.liver_fraction,
                    null_folds: r.null_folds,
                    unconverged_folds: r.unconverged_folds,
                })
            })
    });
    write_rows(&dir.join("repetitions.csv"), reps)?;
    Ok(top)
}
