//! Hierarchical clustering with optimal leaf ordering, and Pareto analysis
//! of reproducibility against discrimination.

mod cluster;
mod pareto;

pub use cluster::{
    optimal_leaf_order, ward_cluster, ward_linkage, Axis, Clustering, Dendrogram, Merge,
    OLO_EXACT_MAX,
};
pub use pareto::{
    pareto_front, per_feature_extractor_fronts, ExtractorCounts, FeatureFront, FrontInput,
    FrontsReport, ParetoPoint,
};
