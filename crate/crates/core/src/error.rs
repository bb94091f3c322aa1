use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("empty region of interest: {0}")]
    EmptyRoi(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("unbalanced design: {0}")]
    UnbalancedDesign(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("undefined result: {0}")]
    Undefined(String),
    #[error("collinear covariates in columns {0:?}")]
    Collinear(Vec<usize>),
    #[error("invalid cohort specification: {0}")]
    Spec(String),
}

impl Error {
    /// True for errors that stem from numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Collinear(_) | Error::Undefined(_) | Error::DegenerateData(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
