//! Reproducibility statistics: pairwise and generalized concordance
//! correlation coefficients and the paired Wilcoxon signed-rank test.

mod ccc;
mod generalized;
mod spectrum;
mod wilcoxon;

pub use ccc::{pairwise_ccc, pairwise_ccc_with, Moments};
pub use generalized::{generalized_ccc, GeneralizedCcc, Observation, VarianceComponents};
pub use spectrum::{
    analyze_group, ccc_spectrum, group_table, thickness_pair_wilcoxon, Exclusion, FeatureGroup,
    Grid, GroupKey, PairComparison, ReproKind, ReproResult, Spectrum, REFERENCE_ASIR,
};
pub use wilcoxon::{
    wilcoxon_signed_rank, wilcoxon_signed_rank_with, WilcoxonMethod, WilcoxonResult,
};
