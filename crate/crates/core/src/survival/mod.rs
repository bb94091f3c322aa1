//! Survival modeling: Harrell's C-index, Cox proportional hazards with Efron
//! ties, MRMR feature selection and the repeated cross-validation protocol.

mod cindex;
mod cox;
mod cv;
mod mrmr;

use alloc::string::String;

pub use cindex::{concordance, fold_cindex, harrell_cindex, Concordance};
pub use cox::{cox_fit, efron_partial_likelihood, CoxModel, PartialLikelihood, MAX_ITERATIONS};
pub use cv::{
    fold_assignment, run_cv, run_repetition, run_repetition_grid, screen_fold, summarize,
    Candidate, CvConfig, CvData, PerformanceSummary, RepetitionResult, Screened,
};
pub use mrmr::mrmr_select;

/// Observed time (days) and event indicator (true = death observed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub time: f64,
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalRecord {
    pub subject_id: String,
    pub time: f64,
    pub event: bool,
}

impl SurvivalRecord {
    pub fn outcome(&self) -> Outcome {
        Outcome {
            time: self.time,
            event: self.event,
        }
    }
}
