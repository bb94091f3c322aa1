//! Structured text (TOML) configuration: extractor settings, the survival
//! run matrix and synthetic cohort specifications.

use std::collections::BTreeMap;
use std::path::Path;

use radrepro_core::preprocess::{
    Aggregation, ExtractionConfig, Interpolator, ZSpacing, PRESET_NAMES,
};
use radrepro_core::survival::CvConfig;
use radrepro_core::synth::{HazardLink, SynthSpec};
use serde::Deserialize;

use crate::error::{AppError, Result};

/// Extractor set name meaning "all extractors pooled into one candidate set".
pub const POOLED: &str = "pooled";

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    toml::from_str(&text).map_err(|e| AppError::Config {
        path: path.into(),
        message: e.to_string(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ZField {
    Mm(f64),
    Keyword(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SettingEntry {
    in_plane_mm: Option<f64>,
    z_mm: Option<ZField>,
    aggregation: Option<String>,
    bin_count: Option<usize>,
    resegment_window: Option<(f64, f64)>,
    interpolator: Option<String>,
}

impl SettingEntry {
    fn into_config(self, name: &str) -> std::result::Result<ExtractionConfig, String> {
        let mut c = match ExtractionConfig::preset(name) {
            Ok(c) => c,
            Err(_) => {
                let z = match self
                    .z_mm
                    .as_ref()
                    .ok_or("z_mm is required for a custom setting")?
                {
                    ZField::Mm(v) => ZSpacing::Mm(*v),
                    ZField::Keyword(k) if k == "preserve" => ZSpacing::Preserve,
                    ZField::Keyword(k) => {
                        return Err(format!("z_mm '{k}' is neither a number nor \"preserve\""))
                    }
                };
                let aggregation = match self
                    .aggregation
                    .as_deref()
                    .ok_or("aggregation is required")?
                {
                    "2.5D" | "2_5D" => Aggregation::TwoAndHalfD,
                    "3D" => Aggregation::ThreeD,
                    other => return Err(format!("aggregation '{other}' (expected 2.5D or 3D)")),
                };
                ExtractionConfig {
                    name: name.into(),
                    in_plane_mm: self.in_plane_mm.ok_or("in_plane_mm is required")?,
                    z,
                    aggregation,
                    ..ExtractionConfig::preset("L2").expect("preset")
                }
            }
        };
        if let Some(b) = self.bin_count {
            c.bin_count = b;
        }
        if let Some(w) = self.resegment_window {
            c.resegment_window = w;
        }
        if let Some(i) = self.interpolator.as_deref() {
            c.image_interpolator = match i {
                "bspline3" => Interpolator::BSpline3,
                "trilinear" => Interpolator::Trilinear,
                "nearest" => Interpolator::Nearest,
                other => {
                    return Err(format!(
                        "interpolator '{other}' (expected bspline3, trilinear or nearest)"
                    ))
                }
            };
        }
        c.validate().map_err(|e| e.to_string())?;
        Ok(c)
    }
}

/// Resolves `--settings`: "all", a comma-separated list of built-in names,
/// or a TOML file with one table per setting.
pub fn parse_settings(arg: &str) -> Result<Vec<ExtractionConfig>> {
    let path = Path::new(arg);
    if path.extension().is_some_and(|e| e == "toml") {
        let table: BTreeMap<String, SettingEntry> = read_toml(path)?;
        if table.is_empty() {
            return Err(AppError::Config {
                path: path.into(),
                message: "no settings defined".into(),
            });
        }
        return table
            .into_iter()
            .map(|(name, entry)| {
                entry.into_config(&name).map_err(|m| AppError::Config {
                    path: path.into(),
                    message: format!("[{name}] {m}"),
                })
            })
            .collect();
    }
    if arg.trim() == "all" {
        return Ok(ExtractionConfig::presets());
    }
    let mut out = Vec::new();
    for name in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let c = ExtractionConfig::preset(name).map_err(|_| {
            AppError::Usage(format!(
                "unknown setting '{name}'; valid names: {}, or all",
                PRESET_NAMES.join(", ")
            ))
        })?;
        if !out.iter().any(|o: &ExtractionConfig| o.name == c.name) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(AppError::Usage("no extractor settings given".into()));
    }
    Ok(out)
}

/// The survival run matrix: extractor sets x CCC thresholds x feature counts.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub extractors: Vec<String>,
    pub ccc_thresholds: Vec<f64>,
    pub feature_counts: Vec<usize>,
    pub folds: usize,
    pub repetitions: usize,
    pub univariate_cindex_min: f64,
    pub univariate_p_max: f64,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let base = CvConfig::new(0.0, 1, 0);
        let mut extractors: Vec<String> = PRESET_NAMES.iter().map(|s| s.to_string()).collect();
        extractors.push(POOLED.into());
        Self {
            extractors,
            ccc_thresholds: CvConfig::CCC_THRESHOLDS.to_vec(),
            feature_counts: CvConfig::FEATURE_COUNTS.to_vec(),
            folds: base.folds,
            repetitions: base.repetitions,
            univariate_cindex_min: base.univariate_cindex_min,
            univariate_p_max: base.univariate_p_max,
            seed: base.seed,
        }
    }
}

impl GridConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let g: Self = read_toml(path)?;
        g.validate().map_err(|m| AppError::Config {
            path: path.into(),
            message: m,
        })?;
        Ok(g)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.extractors.is_empty()
            || self.ccc_thresholds.is_empty()
            || self.feature_counts.is_empty()
        {
            return Err("extractors, ccc_thresholds and feature_counts must be non-empty".into());
        }
        if self.ccc_thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err("ccc_thresholds must lie in [0, 1]".into());
        }
        if self.feature_counts.contains(&0) {
            return Err("feature_counts must be positive".into());
        }
        self.base(0).validate().map_err(|e| e.to_string())
    }

    /// Settings shared by every cell; threshold and count are filled per cell.
    pub fn base(&self, feature_count: usize) -> CvConfig {
        CvConfig {
            ccc_threshold: 0.0,
            feature_count: feature_count.max(1),
            folds: self.folds,
            repetitions: self.repetitions,
            univariate_cindex_min: self.univariate_cindex_min,
            univariate_p_max: self.univariate_p_max,
            seed: self.seed,
        }
    }

    /// (threshold, count) cells in grid order.
    pub fn cells(&self) -> Vec<(f64, usize)> {
        self.ccc_thresholds
            .iter()
            .flat_map(|&t| self.feature_counts.iter().map(move |&k| (t, k)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.extractors.len() * self.ccc_thresholds.len() * self.feature_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HazardFile {
    beta_contrast: f64,
    beta_correlation: f64,
}

impl Default for HazardFile {
    fn default() -> Self {
        let h = HazardLink::default();
        Self {
            beta_contrast: h.beta_contrast,
            beta_correlation: h.beta_correlation,
        }
    }
}

/// TOML form of a synthetic cohort specification; omitted keys take the
/// defaults of `SynthSpec`.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpecFile {
    n_subjects: usize,
    fine_spacing_mm: f64,
    fine_slices: usize,
    thickness_levels: Vec<f64>,
    asir_levels: Vec<f64>,
    asir_sigma_mm_per_percent: f64,
    in_plane_dims: [usize; 2],
    in_plane_spacing_mm: f64,
    liver_radii_mm: [f64; 3],
    tumor_radii_mm: [f64; 3],
    tumor_jitter_mm: f64,
    background_hu: f64,
    liver_hu: f64,
    tumor_hu: f64,
    tumor_hu_sd: f64,
    tumor_contrast_hu: (f64, f64),
    liver_contrast_hu: (f64, f64),
    correlation_mm: (f64, f64),
    liver_correlation_mm: f64,
    noise_hu: f64,
    offset_hu: f64,
    hazard: HazardFile,
    baseline_rate_per_day: f64,
    censoring_fraction: f64,
    seed: u64,
}

impl Default for SynthSpecFile {
    fn default() -> Self {
        let s = SynthSpec::default();
        Self {
            n_subjects: s.n_subjects,
            fine_spacing_mm: s.fine_spacing_mm,
            fine_slices: s.fine_slices,
            thickness_levels: s.thickness_levels,
            asir_levels: s.asir_levels,
            asir_sigma_mm_per_percent: s.asir_sigma_mm_per_percent,
            in_plane_dims: s.in_plane_dims,
            in_plane_spacing_mm: s.in_plane_spacing_mm,
            liver_radii_mm: s.liver_radii_mm,
            tumor_radii_mm: s.tumor_radii_mm,
            tumor_jitter_mm: s.tumor_jitter_mm,
            background_hu: s.background_hu,
            liver_hu: s.liver_hu,
            tumor_hu: s.tumor_hu,
            tumor_hu_sd: s.tumor_hu_sd,
            tumor_contrast_hu: s.tumor_contrast_hu,
            liver_contrast_hu: s.liver_contrast_hu,
            correlation_mm: s.correlation_mm,
            liver_correlation_mm: s.liver_correlation_mm,
            noise_hu: s.noise_hu,
            offset_hu: s.offset_hu,
            hazard: HazardFile::default(),
            baseline_rate_per_day: s.baseline_rate_per_day,
            censoring_fraction: s.censoring_fraction,
            seed: s.seed,
        }
    }
}

impl From<SynthSpecFile> for SynthSpec {
    fn from(f: SynthSpecFile) -> Self {
        SynthSpec {
            n_subjects: f.n_subjects,
            fine_spacing_mm: f.fine_spacing_mm,
            fine_slices: f.fine_slices,
            thickness_levels: f.thickness_levels,
            asir_levels: f.asir_levels,
            asir_sigma_mm_per_percent: f.asir_sigma_mm_per_percent,
            in_plane_dims: f.in_plane_dims,
            in_plane_spacing_mm: f.in_plane_spacing_mm,
            liver_radii_mm: f.liver_radii_mm,
            tumor_radii_mm: f.tumor_radii_mm,
            tumor_jitter_mm: f.tumor_jitter_mm,
            background_hu: f.background_hu,
            liver_hu: f.liver_hu,
            tumor_hu: f.tumor_hu,
            tumor_hu_sd: f.tumor_hu_sd,
            tumor_contrast_hu: f.tumor_contrast_hu,
            liver_contrast_hu: f.liver_contrast_hu,
            correlation_mm: f.correlation_mm,
            liver_correlation_mm: f.liver_correlation_mm,
            noise_hu: f.noise_hu,
            offset_hu: f.offset_hu,
            hazard: HazardLink {
                beta_contrast: f.hazard.beta_contrast,
                beta_correlation: f.hazard.beta_correlation,
            },
            baseline_rate_per_day: f.baseline_rate_per_day,
            censoring_fraction: f.censoring_fraction,
            seed: f.seed,
        }
    }
}

/// Loads and validates a cohort specification.
pub fn load_synth_spec(path: &Path) -> Result<SynthSpec> {
    let file: SynthSpecFile = read_toml(path)?;
    let spec = SynthSpec::from(file);
    spec.validate()?;
    Ok(spec)
}

pub fn parse_synth_spec(text: &str) -> std::result::Result<SynthSpec, String> {
    let file: SynthSpecFile = toml::from_str(text).map_err(|e| e.to_string())?;
    Ok(file.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_315_cells() {
        let g = GridConfig::default();
        assert_eq!(g.len(), 315);
        assert_eq!(g.cells().len(), 35);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn settings_list_and_unknown_name() {
        let s = parse_settings("A3, L2").unwrap();
        assert_eq!(
            s.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(),
            ["A3", "L2"]
        );
        assert_eq!(parse_settings("all").unwrap().len(), 8);
        let err = parse_settings("L2,Q9").unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("L2i"));
    }

    #[test]
    fn synth_spec_defaults_and_overrides() {
        let s = parse_synth_spec("n_subjects = 5\n[hazard]\nbeta_contrast = 2.0\n").unwrap();
        assert_eq!(s.n_subjects, 5);
        assert_eq!(s.hazard.beta_contrast, 2.0);
        assert_eq!(s.thickness_levels, SynthSpec::default().thickness_levels);
        assert!(parse_synth_spec("n_subject = 5").is_err());
    }
}
