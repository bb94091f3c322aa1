use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::glcm::glcm_features;
use super::matrices::{
    build_texture_matrix, Scope, TextureMatrix, DIRECTIONS_3D, IN_PLANE_DIRECTIONS,
};
use super::ngtdm::ngtdm_features;
use super::registry;
use super::runlength::{gldm_features, glrlm_features, glszm_features};
use crate::error::{Error, Result};
use crate::preprocess::{Aggregation, DiscretizedRoi};
use crate::table::Family;

/// Features of one texture matrix in registry order.
pub fn matrix_features(m: &TextureMatrix) -> Vec<Option<f64>> {
    match m.family {
        Family::Glcm => glcm_features(m),
        Family::Glrlm => glrlm_features(m),
        Family::Glszm => glszm_features(m),
        Family::Gldm => gldm_features(m),
        Family::Ngtdm => ngtdm_features(m),
        Family::FirstOrder => vec![None; registry::FIRST_ORDER.len()],
    }
}

/// Mean of per-direction values, summed in sorted order so the result does
/// not depend on the order the directions were visited in.
pub fn direction_mean(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

/// Texture features of one family under the given aggregation.
///
/// Directional families (GLCM, GLRLM) compute features per direction (13
/// directions over the volume for 3D, 4 in-plane directions over merged
/// slices for 2.5D) and average each feature over the directions where it is
/// defined. Non-directional families compute one matrix (volume for 3D,
/// merged in-plane slices for 2.5D).
pub fn aggregate_features(
    roi: &DiscretizedRoi,
    family: Family,
    aggregation: Aggregation,
) -> Result<Vec<Option<f64>>> {
    let scope = match aggregation {
        Aggregation::ThreeD => Scope::Volume,
        Aggregation::TwoAndHalfD => Scope::MergedSlices,
    };
    match family {
        Family::FirstOrder => Err(Error::Argument(format!("{family} is not a texture family"))),
        Family::Glcm | Family::Glrlm => {
            let dirs: &[_] = match aggregation {
                Aggregation::ThreeD => &DIRECTIONS_3D,
                Aggregation::TwoAndHalfD => &IN_PLANE_DIRECTIONS,
            };
            let n = registry::names(family).len();
            let mut per_feature: Vec<Vec<f64>> = vec![Vec::with_capacity(dirs.len()); n];
            for &d in dirs {
                let m = build_texture_matrix(roi, family, Some(d), scope)?;
                for (k, v) in matrix_features(&m).into_iter().enumerate() {
                    if let Some(v) = v {
                        per_feature[k].push(v);
                    }
                }
            }
            Ok(per_feature.iter_mut().map(|v| direction_mean(v)).collect())
        }
        _ => {
            let m = build_texture_matrix(roi, family, None, scope)?;
            Ok(matrix_features(&m))
        }
    }
}
