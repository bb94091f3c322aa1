//! Long-format feature records shared by extraction and the statistics modules.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::features::registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    FirstOrder,
    Glcm,
    Glrlm,
    Glszm,
    Gldm,
    Ngtdm,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::FirstOrder,
        Family::Glcm,
        Family::Glrlm,
        Family::Glszm,
        Family::Gldm,
        Family::Ngtdm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::FirstOrder => "firstorder",
            Family::Glcm => "glcm",
            Family::Glrlm => "glrlm",
            Family::Glszm => "glszm",
            Family::Gldm => "gldm",
            Family::Ngtdm => "ngtdm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Argument(format!("unknown feature family '{s}'")))
    }

    /// Texture families whose matrix is defined per direction.
    pub fn is_directional(self) -> bool {
        matches!(self, Family::Glcm | Family::Glrlm)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Roi {
    Tumor,
    Liver,
}

impl Roi {
    pub fn as_str(self) -> &'static str {
        match self {
            Roi::Tumor => "tumor",
            Roi::Liver => "liver",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tumor" | "tumour" => Ok(Roi::Tumor),
            "liver" => Ok(Roi::Liver),
            _ => Err(Error::Argument(format!(
                "unknown ROI '{s}' (expected tumor or liver)"
            ))),
        }
    }
}

impl fmt::Display for Roi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A feature identified by family and position in the family's registry list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureId {
    pub family: Family,
    index: u8,
}

impl FeatureId {
    pub fn new(family: Family, index: usize) -> Self {
        assert!(
            index < registry::names(family).len(),
            "feature index out of range"
        );
        Self {
            family,
            index: index as u8,
        }
    }

    pub fn parse(family: &str, name: &str) -> Result<Self> {
        let family = Family::parse(family)?;
        registry::names(family)
            .iter()
            .position(|n| *n == name)
            .map(|i| Self::new(family, i))
            .ok_or_else(|| Error::Argument(format!("unknown {family} feature '{name}'")))
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn name(self) -> &'static str {
        registry::names(self.family)[self.index as usize]
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.name())
    }
}

/// One row of the long-format feature table. `value == None` is a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub subject_id: String,
    pub roi: Roi,
    pub slice_thickness_mm: f64,
    pub asir_percent: Option<f64>,
    pub extractor: String,
    pub feature: FeatureId,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    pub records: Vec<FeatureRecord>,
}

impl FeatureTable {
    pub fn new(records: Vec<FeatureRecord>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct extractor names in order of first appearance.
    pub fn extractors(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.extractor) {
                out.push(r.extractor.clone());
            }
        }
        out
    }
}
