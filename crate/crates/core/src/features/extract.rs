use alloc::string::String;
use alloc::vec::Vec;

use super::first_order::first_order_features;
use super::{aggregate_features, registry};
use crate::error::Result;
use crate::preprocess::{
    preprocess_roi, resample, target_for, Aggregation, ExtractionConfig, Preprocessed,
};
use crate::table::{Family, FeatureId, Roi};
use crate::volume::{check_same_geometry, ImageVolume, MaskVolume};

/// All 93 features of one ROI under one extractor setting.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub extractor: String,
    pub roi: Roi,
    pub values: Vec<(FeatureId, Option<f64>)>,
    /// Voxels dropped by resegmentation.
    pub removed_voxels: usize,
}

impl FeatureVector {
    pub fn get(&self, id: FeatureId) -> Option<f64> {
        self.values
            .iter()
            .find(|(f, _)| *f == id)
            .and_then(|(_, v)| *v)
    }
}

/// Outcome for one ROI; failures do not affect the other ROIs.
#[derive(Debug, Clone)]
pub struct RoiExtraction {
    pub roi: Roi,
    pub result: Result<FeatureVector>,
}

/// First-order and texture features of a preprocessed ROI, registry order.
pub fn compute_features(prep: &Preprocessed, aggregation: Aggregation) -> Result<Vec<Option<f64>>> {
    let mut out = Vec::with_capacity(registry::FEATURE_COUNT);
    out.extend(first_order_features(
        &prep.intensities,
        &prep.roi.histogram(),
        prep.voxel_volume,
    ));
    for family in &Family::ALL[1..] {
        out.extend(aggregate_features(&prep.roi, *family, aggregation)?);
    }
    debug_assert_eq!(out.len(), registry::FEATURE_COUNT);
    Ok(out)
}

/// Runs preprocessing and feature computation for every ROI of one image.
///
/// The image is resampled once and shared by all ROIs. Errors that concern
/// the whole image (invalid configuration, degenerate resampling) are
/// returned directly; per-ROI errors are recorded in the ROI's entry.
pub fn extract(
    image: &ImageVolume,
    masks: &[(Roi, MaskVolume)],
    config: &ExtractionConfig,
) -> Result<Vec<RoiExtraction>> {
    config.validate()?;
    let resampled = resample(image, target_for(config), config.image_interpolator)?;
    let ids = registry::all();
    Ok(masks
        .iter()
        .map(|(roi, mask)| {
            let result = check_same_geometry(image.geometry(), mask.geometry())
                .and_then(|_| preprocess_roi(&resampled, mask, config))
                .and_then(|prep| {
                    let values = compute_features(&prep, config.aggregation)?;
                    Ok(FeatureVector {
                        extractor: config.name.clone(),
                        roi: *roi,
                        values: ids.iter().copied().zip(values).collect(),
                        removed_voxels: prep.removed,
                    })
                });
            RoiExtraction { roi: *roi, result }
        })
        .collect())
}
