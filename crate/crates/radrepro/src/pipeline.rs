//! Cohort-level drivers. Work fans out over rayon; every result is gathered
//! in a fixed key order so outputs do not depend on the thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

use radrepro_core::features::extract;
use radrepro_core::preprocess::ExtractionConfig;
use radrepro_core::repro::{analyze_group, group_table, GroupKey, Spectrum, REFERENCE_ASIR};
use radrepro_core::survival::{
    fold_cindex, harrell_cindex, run_repetition_grid, summarize, CvData, Outcome,
    PerformanceSummary, RepetitionResult, SurvivalRecord,
};
use radrepro_core::table::{FeatureId, FeatureRecord, FeatureTable, Roi};
use radrepro_core::MaskVolume;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{GridConfig, POOLED};
use crate::error::{AppError, Result};
use crate::manifest::CohortManifest;
use crate::nifti;
use crate::tables::FeatureRow;

pub fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(AppError::Usage("--workers must be at least 1".into()));
        }
        b = b.num_threads(w);
    }
    b.build()
        .map_err(|e| AppError::Usage(format!("cannot start worker pool: {e}")))
}

/// Resumability key of extraction output: (subject, roi, thickness, asir,
/// extractor).
type ExtractionKey = (String, Roi, u64, Option<u64>, String);

fn extraction_key(r: &FeatureRecord) -> ExtractionKey {
    (
        r.subject_id.clone(),
        r.roi,
        r.slice_thickness_mm.to_bits(),
        r.asir_percent.map(f64::to_bits),
        r.extractor.clone(),
    )
}

/// One reconstruction of one subject with all of its ROI masks.
#[derive(Debug, Clone)]
struct ReconstructionJob {
    subject_id: String,
    thickness: f64,
    asir: Option<f64>,
    image: PathBuf,
    masks: Vec<(Roi, PathBuf)>,
}

fn reconstruction_jobs(manifest: &CohortManifest) -> Result<Vec<ReconstructionJob>> {
    let mut jobs: BTreeMap<(String, u64, Option<u64>), ReconstructionJob> = BTreeMap::new();
    for e in &manifest.entries {
        let key = (
            e.subject_id.clone(),
            e.slice_thickness_mm.to_bits(),
            e.asir_percent.map(f64::to_bits),
        );
        let job = jobs.entry(key).or_insert_with(|| ReconstructionJob {
            subject_id: e.subject_id.clone(),
            thickness: e.slice_thickness_mm,
            asir: e.asir_percent,
            image: e.image_path.clone(),
            masks: Vec::new(),
        });
        if job.image != e.image_path {
            return Err(AppError::Data(format!(
                "subject {} thickness {} ASiR {:?} lists two images: {} and {}",
                e.subject_id,
                e.slice_thickness_mm,
                e.asir_percent,
                job.image.display(),
                e.image_path.display()
            )));
        }
        job.masks.push((e.roi, e.mask_path.clone()));
    }
    Ok(jobs.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ExtractionFailure {
    pub subject_id: String,
    pub roi: String,
    pub slice_thickness_mm: f64,
    pub asir_percent: Option<f64>,
    pub extractor: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtractReport {
    /// Feature rows computed in this run.
    pub computed_rows: usize,
    /// Feature rows kept from an earlier run.
    pub resumed_rows: usize,
    pub failures: Vec<ExtractionFailure>,
}

fn run_job(
    job: &ReconstructionJob,
    configs: &[&ExtractionConfig],
    done: &BTreeSet<ExtractionKey>,
) -> (Vec<FeatureRecord>, Vec<ExtractionFailure>) {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let fail = |roi: Roi, extractor: &str, error: String| ExtractionFailure {
        subject_id: job.subject_id.clone(),
        roi: roi.as_str().into(),
        slice_thickness_mm: job.thickness,
        asir_percent: job.asir,
        extractor: extractor.into(),
        error,
    };
    let key = |roi: Roi, extractor: &str| -> ExtractionKey {
        (
            job.subject_id.clone(),
            roi,
            job.thickness.to_bits(),
            job.asir.map(f64::to_bits),
            extractor.into(),
        )
    };
    let pending: Vec<&ExtractionConfig> = configs
        .iter()
        .copied()
        .filter(|c| {
            job.masks
                .iter()
                .any(|(roi, _)| !done.contains(&key(*roi, &c.name)))
        })
        .collect();
    if pending.is_empty() {
        return (records, failures);
    }
    let image = match nifti::read_image(&job.image) {
        Ok(i) => i,
        Err(e) => {
            for c in &pending {
                for (roi, _) in &job.masks {
                    failures.push(fail(*roi, &c.name, format!("{}: {e}", job.image.display())));
                }
            }
            return (records, failures);
        }
    };
    let mut masks: Vec<(Roi, MaskVolume)> = Vec::new();
    for (roi, path) in &job.masks {
        match nifti::read_mask(path) {
            Ok(m) => masks.push((*roi, m)),
            Err(e) => {
                for c in &pending {
                    failures.push(fail(*roi, &c.name, format!("{}: {e}", path.display())));
                }
            }
        }
    }
    for config in pending {
        let todo: Vec<(Roi, MaskVolume)> = masks
            .iter()
            .filter(|(roi, _)| !done.contains(&key(*roi, &config.name)))
            .cloned()
            .collect();
        match extract(&image, &todo, config) {
            Ok(out) => {
                for roi_out in out {
                    match roi_out.result {
                        Ok(fv) => records.extend(fv.values.iter().map(|&(feature, value)| {
                            FeatureRecord {
                                subject_id: job.subject_id.clone(),
                                roi: roi_out.roi,
                                slice_thickness_mm: job.thickness,
                                asir_percent: job.asir,
                                extractor: config.name.clone(),
                                feature,
                                value,
                            }
                        })),
                        Err(e) => failures.push(fail(roi_out.roi, &config.name, e.to_string())),
                    }
                }
            }
            Err(e) => {
                for (roi, _) in &todo {
                    failures.push(fail(*roi, &config.name, e.to_string()));
                }
            }
        }
    }
    (records, failures)
}

/// Rows of a previous (possibly interrupted) run whose key is complete.
/// Unparsable lines, such as a torn final line, are ignored.
fn completed_rows(path: &Path) -> Result<Vec<FeatureRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| AppError::table(path, e.to_string()))?;
    let records: Vec<FeatureRecord> = rdr
        .deserialize::<FeatureRow>()
        .filter_map(|r| r.ok())
        .filter_map(|r| r.to_record().ok())
        .collect();
    let mut features: BTreeMap<ExtractionKey, BTreeSet<FeatureId>> = BTreeMap::new();
    for r in &records {
        features
            .entry(extraction_key(r))
            .or_default()
            .insert(r.feature);
    }
    let complete = |k: &ExtractionKey| {
        features
            .get(k)
            .is_some_and(|f| f.len() == radrepro_core::features::registry::FEATURE_COUNT)
    };
    let mut seen = BTreeSet::new();
    Ok(records
        .into_iter()
        .filter(|r| complete(&extraction_key(r)) && seen.insert((extraction_key(r), r.feature)))
        .collect())
}

fn canonical_order(records: &mut [FeatureRecord]) {
    records.sort_by(|a, b| {
        let key = |r: &FeatureRecord| {
            (
                r.subject_id.clone(),
                r.slice_thickness_mm.to_bits(),
                r.asir_percent.map(f64::to_bits),
                r.extractor.clone(),
                r.roi,
                r.feature,
            )
        };
        key(a).cmp(&key(b))
    });
}

fn write_atomically(path: &Path, records: &[FeatureRecord]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    let mut w = csv::Writer::from_path(&tmp).map_err(|e| AppError::table(&tmp, e.to_string()))?;
    for r in records {
        w.serialize(FeatureRow::from(r))
            .map_err(|e| AppError::table(&tmp, e.to_string()))?;
    }
    w.flush().map_err(|e| AppError::io(&tmp, e))?;
    drop(w);
    std::fs::rename(&tmp, path).map_err(|e| AppError::io(path, e))
}

/// Extracts every (reconstruction, ROI, setting) of the manifest into
/// `out_csv`, skipping keys already complete there. Batches are appended as
/// they finish so an interrupted run can resume; the finished file is
/// rewritten in canonical key order.
pub fn extract_manifest(
    manifest: &CohortManifest,
    configs: &[ExtractionConfig],
    out_csv: &Path,
    batch: usize,
) -> Result<ExtractReport> {
    let jobs = reconstruction_jobs(manifest)?;
    let previous = if out_csv.exists() {
        completed_rows(out_csv)?
    } else {
        Vec::new()
    };
    let done: BTreeSet<ExtractionKey> = previous.iter().map(extraction_key).collect();
    let mut report = ExtractReport {
        resumed_rows: previous.len(),
        ..Default::default()
    };
    write_atomically(out_csv, &previous)?;
    drop(previous);

    let file = OpenOptions::new()
        .append(true)
        .open(out_csv)
        .map_err(|e| AppError::io(out_csv, e))?;
    let needs_header = std::fs::metadata(out_csv)
        .map_err(|e| AppError::io(out_csv, e))?
        .len()
        == 0;
    let mut w = csv::WriterBuilder::new()
        .has_headers(needs_header)
        .from_writer(file);
    let config_refs: Vec<&ExtractionConfig> = configs.iter().collect();
    for chunk in jobs.chunks(batch.max(1)) {
        let results: Vec<_> = chunk
            .par_iter()
            .map(|job| run_job(job, &config_refs, &done))
            .collect();
        for (records, failures) in results {
            for r in &records {
                w.serialize(FeatureRow::from(r))
                    .map_err(|e| AppError::table(out_csv, e.to_string()))?;
            }
            report.computed_rows += records.len();
            for f in &failures {
                log::warn!(
                    "extraction failed for {} {} t={} asir={:?} {}: {}",
                    f.subject_id,
                    f.roi,
                    f.slice_thickness_mm,
                    f.asir_percent,
                    f.extractor,
                    f.error
                );
            }
            report.failures.extend(failures);
        }
        w.flush().map_err(|e| AppError::io(out_csv, e))?;
    }
    drop(w);
    let mut all = completed_rows(out_csv)?;
    canonical_order(&mut all);
    write_atomically(out_csv, &all)?;
    Ok(report)
}

/// Generalized and pairwise CCCs of every (extractor, roi, feature) group,
/// computed in parallel and returned in group order.
pub fn ccc_spectrum(table: &FeatureTable) -> Spectrum {
    let (groups, grid) = group_table(table);
    let outcomes: Vec<_> = groups
        .par_iter()
        .map(|g| analyze_group(g, &grid, REFERENCE_ASIR))
        .collect();
    let mut spectrum = Spectrum {
        results: Vec::new(),
        excluded: Vec::new(),
    };
    for o in outcomes {
        match o {
            Ok(r) => spectrum.results.extend(r),
            Err(e) => spectrum.excluded.push(e),
        }
    }
    spectrum
}

/// All cells of one extractor set.
#[derive(Debug, Clone)]
pub struct SetRun {
    pub extractor_set: String,
    pub data: CvData,
    /// One per grid cell, in `GridConfig::cells` order.
    pub summaries: Vec<PerformanceSummary>,
    pub repetitions: Vec<Vec<RepetitionResult>>,
}

/// Runs the full grid. Repetitions of every extractor set run in parallel;
/// each repetition evaluates all cells on shared folds.
pub fn run_survival_grid(
    table: &FeatureTable,
    repro: &[radrepro_core::repro::ReproResult],
    outcomes: &[SurvivalRecord],
    grid: &GridConfig,
) -> Result<Vec<SetRun>> {
    grid.validate().map_err(AppError::Usage)?;
    let present = table.extractors();
    let mut datasets = Vec::new();
    for set in &grid.extractors {
        let filter = if set == POOLED {
            None
        } else if present.contains(set) {
            Some(std::slice::from_ref(set))
        } else {
            return Err(AppError::Data(format!(
                "extractor set '{set}' has no rows in the feature table"
            )));
        };
        let data = CvData::from_table(table, repro, outcomes, filter)?;
        if data.candidates.is_empty() {
            return Err(AppError::Data(format!(
                "no candidate features for extractor set '{set}'"
            )));
        }
        datasets.push(data);
    }
    let cells = grid.cells();
    let base = grid.base(1);
    let jobs: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|s| (0..grid.repetitions).map(move |r| (s, r)))
        .collect();
    let results: Vec<Vec<RepetitionResult>> = jobs
        .par_iter()
        .map(|&(s, r)| run_repetition_grid(&datasets[s], &cells, &base, r))
        .collect::<std::result::Result<_, _>>()?;
    let mut runs = Vec::new();
    let mut results = results.into_iter();
    for (set, data) in grid.extractors.iter().zip(datasets) {
        let per_rep: Vec<Vec<RepetitionResult>> = results.by_ref().take(grid.repetitions).collect();
        let mut repetitions: Vec<Vec<RepetitionResult>> = vec![Vec::new(); cells.len()];
        for rep in per_rep {
            for (c, r) in rep.into_iter().enumerate() {
                repetitions[c].push(r);
            }
        }
        let summaries = cells
            .iter()
            .zip(&repetitions)
            .map(|(&(t, k), reps)| {
                let config = radrepro_core::survival::CvConfig {
                    ccc_threshold: t,
                    feature_count: k,
                    ..base
                };
                summarize(&config, reps)
            })
            .collect();
        runs.push(SetRun {
            extractor_set: set.clone(),
            data,
            summaries,
            repetitions,
        });
    }
    Ok(runs)
}

/// Univariate C-index of one feature column, before and after folding.
#[derive(Debug, Clone, PartialEq)]
pub struct Univariate {
    pub key: GroupKey,
    pub n: usize,
    pub cindex: Option<f64>,
    pub folded: Option<f64>,
    pub negated: bool,
}

/// Harrell's C-index of every feature column (higher value = higher risk)
/// over the subjects where it is present.
pub fn univariate_cindex(
    table: &FeatureTable,
    outcomes: &[SurvivalRecord],
) -> Result<Vec<Univariate>> {
    let data = CvData::from_table(table, &[], outcomes, None)?;
    Ok(data
        .candidates
        .par_iter()
        .zip(&data.values)
        .map(|(cand, col)| {
            let (risk, out): (Vec<f64>, Vec<Outcome>) = col
                .iter()
                .zip(&data.outcomes)
                .filter_map(|(v, o)| v.map(|v| (v, *o)))
                .unzip();
            let c = harrell_cindex(&risk, &out).ok();
            let (folded, negated) = match c {
                Some(c) => {
                    let (f, n) = fold_cindex(c);
                    (Some(f), n)
                }
                None => (None, false),
            };
            Univariate {
                key: cand.key.clone(),
                n: risk.len(),
                cindex: c,
                folded,
                negated,
            }
        })
        .collect())
}
