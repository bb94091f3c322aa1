//! Resampling, resegmentation and intensity discretization.
//!
//! The pipeline order is fixed: resample image and mask to the configured
//! grid, resegment the mask to the HU window, then discretize the ROI into a
//! fixed number of gray levels over its own intensity range.

mod config;
mod discretize;
mod resample;

pub use config::{Aggregation, ExtractionConfig, Interpolator, ZSpacing, PRESET_NAMES};
pub use discretize::{discretize, resegment, DiscretizedRoi, IntensityStats, Resegmented};
pub use resample::{bspline3_prefilter, resample, resample_mask, TargetSpacing};

use crate::error::Result;
use crate::volume::{ImageVolume, MaskVolume};

/// Output of the full preprocessing chain for one ROI.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub roi: DiscretizedRoi,
    /// Resegmented raw HU values of the ROI voxels.
    pub intensities: alloc::vec::Vec<f64>,
    /// Voxel volume in mm^3 on the resampled grid.
    pub voxel_volume: f64,
    /// Voxels removed by resegmentation.
    pub removed: usize,
}

/// Target spacing for a configuration given the source spacing.
pub fn target_for(config: &ExtractionConfig) -> TargetSpacing {
    match config.z {
        ZSpacing::Preserve => TargetSpacing::InPlane(config.in_plane_mm),
        ZSpacing::Mm(z) => TargetSpacing::Full([config.in_plane_mm, config.in_plane_mm, z]),
    }
}

/// Preprocesses an already-resampled image with its (unresampled) mask.
///
/// The image is passed separately so that one resampled image can be shared
/// by several ROIs.
pub fn preprocess_roi(
    resampled_image: &ImageVolume,
    mask: &MaskVolume,
    config: &ExtractionConfig,
) -> Result<Preprocessed> {
    let mask = resample_mask(mask, target_for(config))?;
    let reseg = resegment(resampled_image, &mask, config.resegment_window)?;
    let roi = discretize(resampled_image, &reseg.mask, config.bin_count)?;
    let sp = resampled_image.spacing();
    let intensities = roi_values(resampled_image, &reseg.mask);
    Ok(Preprocessed {
        roi,
        intensities,
        voxel_volume: sp[0] * sp[1] * sp[2],
        removed: reseg.removed,
    })
}

pub(crate) fn roi_values(image: &ImageVolume, mask: &MaskVolume) -> alloc::vec::Vec<f64> {
    image
        .data()
        .iter()
        .zip(mask.data())
        .filter(|(_, &m)| m != 0)
        .map(|(&v, _)| v)
        .collect()
}
