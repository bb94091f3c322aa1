//! Cohort manifests: one CSV row per (subject, ROI, reconstruction).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use radrepro_core::survival::SurvivalRecord;
use radrepro_core::table::Roi;

pub const COLUMNS: [&str; 8] = [
    "subject_id",
    "roi",
    "image_path",
    "mask_path",
    "slice_thickness_mm",
    "asir_percent",
    "time_days",
    "event",
];

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("line {line}: duplicate entry for subject {subject}, {roi}, thickness {thickness}, ASiR {asir}")]
    Duplicate {
        line: u64,
        subject: String,
        roi: String,
        thickness: f64,
        asir: String,
    },
    #[error("line {line}: {message}")]
    Value { line: u64, message: String },
}

type Result<T> = std::result::Result<T, ManifestError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Survival {
    pub time_days: f64,
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub roi: Roi,
    pub image_path: PathBuf,
    pub mask_path: PathBuf,
    pub slice_thickness_mm: f64,
    pub asir_percent: Option<f64>,
    pub survival: Option<Survival>,
}

impl ManifestEntry {
    fn sort_key(&self) -> (&str, Roi, u64, Option<u64>) {
        let asir = self.asir_percent.map(|a| a.to_bits());
        (
            &self.subject_id,
            self.roi,
            self.slice_thickness_mm.to_bits(),
            asir,
        )
    }
}

/// Validated manifest; entries are kept sorted by key so row order in the
/// file does not matter.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CohortManifest {
    pub entries: Vec<ManifestEntry>,
}

fn value_err(line: u64, message: impl Into<String>) -> ManifestError {
    ManifestError::Value {
        line,
        message: message.into(),
    }
}

fn parse_event(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

impl CohortManifest {
    /// Loads a manifest. Relative paths are resolved against the manifest's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_reader(csv::Reader::from_path(path)?, base)
    }

    pub fn from_reader<R: std::io::Read>(mut rdr: csv::Reader<R>, base: &Path) -> Result<Self> {
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| ManifestError::MissingColumn(name.into()))
        };
        let idx: Vec<usize> = COLUMNS.iter().map(|c| col(c)).collect::<Result<_>>()?;
        let mut entries = Vec::new();
        let mut seen = BTreeMap::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let field = |i: usize| record.get(idx[i]).unwrap_or("").trim();
            let number = |i: usize| -> Result<Option<f64>> {
                let s = field(i);
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|_| value_err(line, format!("{} '{s}' is not a number", COLUMNS[i])))
            };
            let subject_id = field(0).to_string();
            if subject_id.is_empty() {
                return Err(value_err(line, "empty subject_id"));
            }
            let roi = Roi::parse(field(1)).map_err(|e| value_err(line, e.to_string()))?;
            let thickness =
                number(4)?.ok_or_else(|| value_err(line, "missing slice_thickness_mm"))?;
            if !(thickness > 0.0 && thickness.is_finite()) {
                return Err(value_err(
                    line,
                    format!("slice_thickness_mm {thickness} must be positive"),
                ));
            }
            let asir = number(5)?;
            if asir.is_some_and(|a| !(a >= 0.0 && a.is_finite())) {
                return Err(value_err(line, "asir_percent must be non-negative"));
            }
            let survival = match (number(6)?, field(7)) {
                (None, "") => None,
                (Some(t), ev) => {
                    if !(t > 0.0 && t.is_finite()) {
                        return Err(value_err(line, format!("time_days {t} must be positive")));
                    }
                    let event = parse_event(ev)
                        .ok_or_else(|| value_err(line, format!("event '{ev}' is not 0/1")))?;
                    Some(Survival {
                        time_days: t,
                        event,
                    })
                }
                (None, _) => return Err(value_err(line, "event given without time_days")),
            };
            let entry = ManifestEntry {
                subject_id,
                roi,
                image_path: base.join(field(2)),
                mask_path: base.join(field(3)),
                slice_thickness_mm: thickness,
                asir_percent: asir,
                survival,
            };
            let key = (
                entry.subject_id.clone(),
                roi,
                thickness.to_bits(),
                asir.map(f64::to_bits),
            );
            if seen.insert(key, ()).is_some() {
                return Err(ManifestError::Duplicate {
                    line,
                    subject: entry.subject_id,
                    roi: roi.as_str().into(),
                    thickness,
                    asir: asir.map_or("none".into(), |a| a.to_string()),
                });
            }
            entries.push(entry);
        }
        let with_survival = entries.iter().filter(|e| e.survival.is_some()).count();
        if with_survival != 0 && with_survival != entries.len() {
            return Err(value_err(
                0,
                "survival columns must be filled on every row or on none",
            ));
        }
        entries.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(Self { entries })
    }

    pub fn is_survival_cohort(&self) -> bool {
        self.entries.first().is_some_and(|e| e.survival.is_some())
    }

    /// One outcome per subject, in subject order. Rows of one subject must
    /// agree.
    pub fn outcomes(&self) -> std::result::Result<Vec<SurvivalRecord>, String> {
        let mut out: BTreeMap<&str, Survival> = BTreeMap::new();
        for e in &self.entries {
            let Some(s) = e.survival else { continue };
            if let Some(prev) = out.insert(&e.subject_id, s) {
                if prev != s {
                    return Err(format!("subject {} has conflicting outcomes", e.subject_id));
                }
            }
        }
        Ok(out
            .into_iter()
            .map(|(id, s)| SurvivalRecord {
                subject_id: id.into(),
                time: s.time_days,
                event: s.event,
            })
            .collect())
    }

    pub fn write(&self, path: &Path) -> std::result::Result<(), csv::Error> {
        let base = path.parent().unwrap_or(Path::new(""));
        let rel = |p: &Path| {
            p.strip_prefix(base)
                .unwrap_or(p)
                .to_string_lossy()
                .into_owned()
        };
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(COLUMNS)?;
        for e in &self.entries {
            let (time, event) = match e.survival {
                Some(s) => (
                    s.time_days.to_string(),
                    if s.event { "1" } else { "0" }.to_string(),
                ),
                None => (String::new(), String::new()),
            };
            w.write_record([
                e.subject_id.clone(),
                e.roi.as_str().into(),
                rel(&e.image_path),
                rel(&e.mask_path),
                e.slice_thickness_mm.to_string(),
                e.asir_percent.map_or(String::new(), |a| a.to_string()),
                time,
                event,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
