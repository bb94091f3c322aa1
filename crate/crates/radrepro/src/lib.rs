//! File-level workbench around `radrepro-core`: NIfTI and CSV IO, synthetic
//! cohorts on disk, parallel pipeline drivers, reports and the CLI.

pub mod cli;
pub mod cohort;
pub mod config;
pub mod error;
pub mod manifest;
pub mod nifti;
pub mod pipeline;
pub mod reports;
pub mod tables;

pub use error::{AppError, Result};
