//! The 93-feature radiomics engine: first-order statistics plus GLCM, GLRLM,
//! GLSZM, GLDM and NGTDM texture features under 2.5D and 3D aggregation.
//!
//! Undefined values (zero denominators, zero variance, empty matrices) are
//! reported as `None`, never as NaN.

mod aggregate;
mod extract;
mod first_order;
mod glcm;
mod matrices;
mod ngtdm;
pub mod registry;
mod runlength;

pub use aggregate::{aggregate_features, direction_mean, matrix_features};
pub use extract::{compute_features, extract, FeatureVector, RoiExtraction};
pub use first_order::first_order_features;
pub use glcm::glcm_features;
pub use matrices::{
    build_texture_matrix, sum_matrices, Offset, Scope, TextureMatrix, DIRECTIONS_3D,
    IN_PLANE_DIRECTIONS,
};
pub use ngtdm::ngtdm_features;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
pub use runlength::{gldm_features, glrlm_features, glszm_features};

/// Shannon entropy in bits over the positive entries of a probability vector.
pub(crate) fn entropy2(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v > 0.0 {
            h -= v * v.log2();
        }
    }
    h
}

#[inline]
pub(crate) fn defined(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}
