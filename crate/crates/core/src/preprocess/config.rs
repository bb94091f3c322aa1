use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Names of the eight built-in extractor settings.
pub const PRESET_NAMES: [&str; 8] = ["L2i", "L2", "L3", "S2i", "S2", "S3", "A2", "A3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aggregation {
    /// In-plane neighbors only, matrices merged over slices.
    TwoAndHalfD,
    /// Full 3D neighborhood over the whole volume.
    ThreeD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolator {
    BSpline3,
    Trilinear,
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZSpacing {
    Preserve,
    Mm(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    pub name: String,
    pub in_plane_mm: f64,
    pub z: ZSpacing,
    pub aggregation: Aggregation,
    pub bin_count: usize,
    pub resegment_window: (f64, f64),
    pub image_interpolator: Interpolator,
}

impl ExtractionConfig {
    pub const DEFAULT_BIN_COUNT: usize = 24;
    pub const DEFAULT_WINDOW: (f64, f64) = (-50.0, 350.0);

    /// One of the eight built-in settings.
    pub fn preset(name: &str) -> Result<Self> {
        let (in_plane, z, aggregation) = match preset_geometry(name) {
            Some(g) => g,
            None => {
                return Err(Error::Argument(format!(
                    "unknown extractor setting '{name}', valid names: {}",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        Ok(Self {
            name: name.to_string(),
            in_plane_mm: in_plane,
            z,
            aggregation,
            bin_count: Self::DEFAULT_BIN_COUNT,
            resegment_window: Self::DEFAULT_WINDOW,
            image_interpolator: Interpolator::BSpline3,
        })
    }

    pub fn presets() -> Vec<Self> {
        PRESET_NAMES
            .iter()
            .map(|n| Self::preset(n).expect("preset"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.in_plane_mm > 0.0) {
            return Err(Error::Argument(format!(
                "{}: in-plane spacing must be positive",
                self.name
            )));
        }
        if let ZSpacing::Mm(z) = self.z {
            if !(z > 0.0) {
                return Err(Error::Argument(format!(
                    "{}: z spacing must be positive",
                    self.name
                )));
            }
        }
        if self.bin_count < 2 {
            return Err(Error::Argument(format!(
                "{}: bin_count must be at least 2",
                self.name
            )));
        }
        if !(self.resegment_window.0 <= self.resegment_window.1) {
            return Err(Error::Argument(format!(
                "{}: resegmentation window is empty",
                self.name
            )));
        }
        if let Some((ip, z, agg)) = preset_geometry(&self.name) {
            if ip != self.in_plane_mm || z != self.z || agg != self.aggregation {
                return Err(Error::Argument(format!(
                    "{}: built-in setting names must keep their resampling and aggregation",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn preset_geometry(name: &str) -> Option<(f64, ZSpacing, Aggregation)> {
    use Aggregation::*;
    Some(match name {
        "L2i" => (1.0, ZSpacing::Preserve, TwoAndHalfD),
        "L2" => (1.0, ZSpacing::Mm(1.0), TwoAndHalfD),
        "L3" => (1.0, ZSpacing::Mm(1.0), ThreeD),
        "S2i" => (0.85, ZSpacing::Preserve, TwoAndHalfD),
        "S2" => (0.85, ZSpacing::Mm(0.85), TwoAndHalfD),
        "S3" => (0.85, ZSpacing::Mm(0.85), ThreeD),
        "A2" => (0.85, ZSpacing::Mm(2.5), TwoAndHalfD),
        "A3" => (0.85, ZSpacing::Mm(2.5), ThreeD),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_follow_naming_scheme() {
        for c in ExtractionConfig::presets() {
            c.validate().unwrap();
            assert_eq!(c.bin_count, 24);
            assert_eq!(c.resegment_window, (-50.0, 350.0));
            let name = c.name.as_str();
            assert_eq!(name.ends_with('i'), c.z == ZSpacing::Preserve);
            if name.ends_with('i') {
                assert_eq!(c.aggregation, Aggregation::TwoAndHalfD);
            }
            let agg = if name.contains('3') {
                Aggregation::ThreeD
            } else {
                Aggregation::TwoAndHalfD
            };
            assert_eq!(c.aggregation, agg);
            let ip = if name.starts_with('L') { 1.0 } else { 0.85 };
            assert_eq!(c.in_plane_mm, ip);
        }
    }

    #[test]
    fn unknown_name_lists_valid_names() {
        let err = ExtractionConfig::preset("X9").unwrap_err();
        let msg = format!("{err}");
        for n in PRESET_NAMES {
            assert!(msg.contains(n));
        }
    }

    #[test]
    fn renamed_geometry_rejected() {
        let mut c = ExtractionConfig::preset("L3").unwrap();
        c.aggregation = Aggregation::TwoAndHalfD;
        assert!(c.validate().is_err());
        c.name = "custom".into();
        c.validate().unwrap();
        c.bin_count = 1;
        assert!(c.validate().is_err());
    }
}
