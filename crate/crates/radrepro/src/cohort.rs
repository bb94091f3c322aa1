//! Writes synthetic cohorts to disk: NIfTI volumes, a manifest, outcomes
//! and the planted subject parameters.

use std::path::{Path, PathBuf};

use radrepro_core::synth::{
    generate_outcomes, generate_subject, subject_params, SubjectParams, SynthSpec,
};
use radrepro_core::table::Roi;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AppError, Result};
use crate::manifest::{CohortManifest, ManifestEntry, Survival};
use crate::nifti;
use crate::tables::{write_outcomes, write_rows};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const OUTCOMES_FILE: &str = "outcomes.csv";
pub const SUBJECTS_FILE: &str = "subjects.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct CohortSummary {
    pub subjects: usize,
    pub reconstructions: usize,
    pub manifest_rows: usize,
    pub events: usize,
    pub manifest: PathBuf,
}

#[derive(Debug, Serialize, Default)]
struct SubjectRow<'a> {
    subject_id: &'a str,
    tumor_contrast_hu: f64,
    liver_contrast_hu: f64,
    correlation_mm: f64,
    tumor_mean_hu: f64,
    log_hazard: f64,
}

fn nifti_err(path: &Path, source: nifti::NiftiError) -> AppError {
    AppError::Nifti {
        path: path.into(),
        source,
    }
}

fn write_subject(
    spec: &SynthSpec,
    index: usize,
    out: &Path,
    survival: Survival,
) -> Result<Vec<ManifestEntry>> {
    let subject = generate_subject(spec, index)?;
    let id = &subject.params.subject_id;
    let dir = out.join("volumes").join(id);
    std::fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
    let mut entries = Vec::new();
    let mut written_masks: Vec<f64> = Vec::new();
    for r in &subject.reconstructions {
        let t = r.thickness_mm;
        let image = dir.join(format!("t{t}_a{}.nii.gz", r.asir_percent));
        nifti::write_image(&r.image, &image).map_err(|e| nifti_err(&image, e))?;
        for (roi, mask) in [(Roi::Tumor, &r.tumor), (Roi::Liver, &r.liver)] {
            let mask_path = dir.join(format!("{}_t{t}.nii.gz", roi.as_str()));
            if !written_masks.contains(&t) {
                nifti::write_mask(mask, &mask_path).map_err(|e| nifti_err(&mask_path, e))?;
            }
            entries.push(ManifestEntry {
                subject_id: id.clone(),
                roi,
                image_path: image.clone(),
                mask_path,
                slice_thickness_mm: t,
                asir_percent: Some(r.asir_percent),
                survival: Some(survival),
            });
        }
        written_masks.push(t);
    }
    Ok(entries)
}

/// Generates the cohort in parallel (one task per subject) and writes it
/// under `out`. Output is independent of the number of threads.
pub fn write_cohort(spec: &SynthSpec, out: &Path) -> Result<CohortSummary> {
    spec.validate()?;
    std::fs::create_dir_all(out).map_err(|e| AppError::io(out, e))?;
    let params: Vec<SubjectParams> = (0..spec.n_subjects)
        .map(|i| subject_params(spec, i))
        .collect();
    let outcomes = generate_outcomes(spec, &params)?;
    let per_subject: Vec<Vec<ManifestEntry>> = (0..spec.n_subjects)
        .into_par_iter()
        .map(|i| {
            let o = &outcomes[i];
            write_subject(
                spec,
                i,
                out,
                Survival {
                    time_days: o.time,
                    event: o.event,
                },
            )
        })
        .collect::<Result<_>>()?;
    let mut entries: Vec<ManifestEntry> = per_subject.into_iter().flatten().collect();
    entries.sort_by(|a, b| {
        (
            &a.subject_id,
            a.roi,
            a.slice_thickness_mm.to_bits(),
            a.asir_percent.map(f64::to_bits),
        )
            .cmp(&(
                &b.subject_id,
                b.roi,
                b.slice_thickness_mm.to_bits(),
                b.asir_percent.map(f64::to_bits),
            ))
    });
    let manifest = CohortManifest { entries };
    let manifest_path = out.join(MANIFEST_FILE);
    manifest
        .write(&manifest_path)
        .map_err(|e| AppError::table(&manifest_path, e.to_string()))?;
    write_outcomes(&out.join(OUTCOMES_FILE), &outcomes)?;
    write_rows(
        &out.join(SUBJECTS_FILE),
        params.iter().map(|p| SubjectRow {
            subject_id: &p.subject_id,
            tumor_contrast_hu: p.tumor_contrast_hu,
            liver_contrast_hu: p.liver_contrast_hu,
            correlation_mm: p.correlation_mm,
            tumor_mean_hu: p.tumor_mean_hu,
            log_hazard: p.log_hazard(spec),
        }),
    )?;
    Ok(CohortSummary {
        subjects: spec.n_subjects,
        reconstructions: spec.n_subjects * spec.thickness_levels.len() * spec.asir_levels.len(),
        manifest_rows: manifest.entries.len(),
        events: outcomes.iter().filter(|o| o.event).count(),
        manifest: manifest_path,
    })
}
