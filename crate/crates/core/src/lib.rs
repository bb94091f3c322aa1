//! Core algorithms of the radiomics reproducibility workbench.
//!
//! Everything in this crate is pure computation over in-memory data and only
//! needs an allocator: volume geometry, preprocessing (resampling,
//! resegmentation, discretization), the 93-feature texture engine,
//! reproducibility statistics, survival modeling, clustering and Pareto
//! analysis, and the synthetic cohort generator. File formats, orchestration
//! and the command-line interface live in the `radrepro` crate.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod features;
pub mod linalg;
pub mod preprocess;
pub mod repro;
pub mod stats;
pub mod survival;
pub mod synth;
pub mod table;
pub mod volume;

pub use error::{Error, Result};
pub use volume::{Geometry, ImageVolume, MaskVolume, Volume};
