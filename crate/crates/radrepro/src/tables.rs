//! CSV schemas of the pipeline's tabular inputs and outputs.

use std::collections::BTreeMap;
use std::path::Path;

use radrepro_core::repro::{
    Exclusion, GroupKey, PairComparison, ReproKind, ReproResult, VarianceComponents,
};
use radrepro_core::survival::SurvivalRecord;
use radrepro_core::table::{FeatureId, FeatureRecord, FeatureTable, Roi};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

/// Writes serialized rows with a header line. An empty table still gets its
/// header, taken from a default row.
pub fn write_rows<T: Serialize + Default>(
    path: &Path,
    rows: impl IntoIterator<Item = T>,
) -> Result<()> {
    let err = |e: csv::Error| AppError::table(path, e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    let mut empty = true;
    for row in rows {
        w.serialize(row).map_err(err)?;
        empty = false;
    }
    w.flush().map_err(|e| AppError::io(path, e))?;
    if empty {
        let mut probe = csv::Writer::from_writer(Vec::new());
        probe.serialize(T::default()).map_err(err)?;
        let bytes = probe
            .into_inner()
            .map_err(|e| AppError::table(path, e.to_string()))?;
        let header_len = bytes
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |i| i + 1);
        std::fs::write(path, &bytes[..header_len]).map_err(|e| AppError::io(path, e))?;
    }
    Ok(())
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| AppError::table(path, e.to_string()))?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| AppError::table(path, e.to_string())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FeatureRow {
    pub subject_id: String,
    pub roi: String,
    pub slice_thickness_mm: f64,
    pub asir_percent: Option<f64>,
    pub extractor: String,
    pub feature_family: String,
    pub feature_name: String,
    pub value: Option<f64>,
}

impl From<&FeatureRecord> for FeatureRow {
    fn from(r: &FeatureRecord) -> Self {
        Self {
            subject_id: r.subject_id.clone(),
            roi: r.roi.as_str().into(),
            slice_thickness_mm: r.slice_thickness_mm,
            asir_percent: r.asir_percent,
            extractor: r.extractor.clone(),
            feature_family: r.feature.family.as_str().into(),
            feature_name: r.feature.name().into(),
            value: r.value,
        }
    }
}

impl FeatureRow {
    pub fn to_record(&self) -> std::result::Result<FeatureRecord, String> {
        Ok(FeatureRecord {
            subject_id: self.subject_id.clone(),
            roi: Roi::parse(&self.roi).map_err(|e| e.to_string())?,
            slice_thickness_mm: self.slice_thickness_mm,
            asir_percent: self.asir_percent,
            extractor: self.extractor.clone(),
            feature: FeatureId::parse(&self.feature_family, &self.feature_name)
                .map_err(|e| e.to_string())?,
            value: self.value.filter(|v| v.is_finite()),
        })
    }
}

pub fn read_feature_table(path: &Path) -> Result<FeatureTable> {
    let rows: Vec<FeatureRow> = read_rows(path)?;
    let records = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.to_record()
                .map_err(|m| AppError::table(path, format!("row {}: {m}", i + 2)))
        })
        .collect::<Result<_>>()?;
    Ok(FeatureTable::new(records))
}

pub fn write_feature_table(path: &Path, table: &FeatureTable) -> Result<()> {
    write_rows(path, table.records.iter().map(FeatureRow::from))
}

/// Keeps the records of one reconstruction. `asir = None` matches any ASiR
/// level.
pub fn select_reconstruction(
    table: &FeatureTable,
    thickness: f64,
    asir: Option<f64>,
) -> FeatureTable {
    FeatureTable::new(
        table
            .records
            .iter()
            .filter(|r| {
                r.slice_thickness_mm == thickness && asir.is_none_or(|a| r.asir_percent == Some(a))
            })
            .cloned()
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ReproRow {
    pub feature_family: String,
    pub feature_name: String,
    pub roi: String,
    pub extractor: String,
    pub kind: String,
    pub ccc: f64,
    pub sigma2_s: Option<f64>,
    pub sigma2_t: Option<f64>,
    pub sigma2_a: Option<f64>,
    pub sigma2_e: Option<f64>,
    pub flags: String,
}

fn kind_label(kind: ReproKind) -> String {
    match kind {
        ReproKind::Generalized => "generalized".into(),
        ReproKind::Pairwise {
            thickness_a,
            thickness_b,
        } => format!("pairwise:{thickness_a}-{thickness_b}"),
    }
}

fn parse_kind(s: &str) -> Option<ReproKind> {
    if s == "generalized" {
        return Some(ReproKind::Generalized);
    }
    let (a, b) = s.strip_prefix("pairwise:")?.split_once('-')?;
    Some(ReproKind::Pairwise {
        thickness_a: a.parse().ok()?,
        thickness_b: b.parse().ok()?,
    })
}

impl From<&ReproResult> for ReproRow {
    fn from(r: &ReproResult) -> Self {
        let c = r.components;
        Self {
            feature_family: r.key.feature.family.as_str().into(),
            feature_name: r.key.feature.name().into(),
            roi: r.key.roi.as_str().into(),
            extractor: r.key.extractor.clone(),
            kind: kind_label(r.kind),
            ccc: r.ccc,
            sigma2_s: c.map(|c| c.sigma2_s),
            sigma2_t: c.map(|c| c.sigma2_t),
            sigma2_a: c.map(|c| c.sigma2_a),
            sigma2_e: c.map(|c| c.sigma2_e),
            flags: r.flags.join(";"),
        }
    }
}

fn group_key(
    extractor: &str,
    roi: &str,
    family: &str,
    name: &str,
) -> std::result::Result<GroupKey, String> {
    Ok(GroupKey {
        extractor: extractor.into(),
        roi: Roi::parse(roi).map_err(|e| e.to_string())?,
        feature: FeatureId::parse(family, name).map_err(|e| e.to_string())?,
    })
}

impl ReproRow {
    pub fn to_result(&self) -> std::result::Result<ReproResult, String> {
        let components = match (self.sigma2_s, self.sigma2_t, self.sigma2_a, self.sigma2_e) {
            (Some(sigma2_s), Some(sigma2_t), Some(sigma2_a), Some(sigma2_e)) => {
                Some(VarianceComponents {
                    sigma2_s,
                    sigma2_t,
                    sigma2_a,
                    sigma2_e,
                })
            }
            _ => None,
        };
        Ok(ReproResult {
            key: group_key(
                &self.extractor,
                &self.roi,
                &self.feature_family,
                &self.feature_name,
            )?,
            kind: parse_kind(&self.kind).ok_or_else(|| format!("unknown kind '{}'", self.kind))?,
            ccc: self.ccc,
            components,
            flags: self
                .flags
                .split(';')
                .filter(|f| !f.is_empty())
                .map(String::from)
                .collect(),
        })
    }
}

pub fn read_repro(path: &Path) -> Result<Vec<ReproResult>> {
    let rows: Vec<ReproRow> = read_rows(path)?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            r.to_result()
                .map_err(|m| AppError::table(path, format!("row {}: {m}", i + 2)))
        })
        .collect()
}

pub fn write_repro(path: &Path, results: &[ReproResult]) -> Result<()> {
    write_rows(path, results.iter().map(ReproRow::from))
}

#[derive(Debug, Serialize, Default)]
pub struct ExclusionRow<'a> {
    pub feature_family: &'a str,
    pub feature_name: &'a str,
    pub roi: &'a str,
    pub extractor: &'a str,
    pub reason: &'a str,
}

pub fn write_exclusions(path: &Path, excluded: &[Exclusion]) -> Result<()> {
    write_rows(
        path,
        excluded.iter().map(|e| ExclusionRow {
            feature_family: e.key.feature.family.as_str(),
            feature_name: e.key.feature.name(),
            roi: e.key.roi.as_str(),
            extractor: &e.key.extractor,
            reason: &e.reason,
        }),
    )
}

#[derive(Debug, Serialize, Default)]
pub struct WilcoxonRow<'a> {
    pub extractor: &'a str,
    pub pair_a: String,
    pub pair_b: String,
    pub median_ccc_a: f64,
    pub median_ccc_b: f64,
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub method: String,
    pub all_zero: bool,
}

pub fn write_wilcoxon(path: &Path, rows: &[PairComparison]) -> Result<()> {
    write_rows(
        path,
        rows.iter().map(|c| WilcoxonRow {
            extractor: &c.extractor,
            pair_a: format!("{}-{}", c.pair_a.0, c.pair_a.1),
            pair_b: format!("{}-{}", c.pair_b.0, c.pair_b.1),
            median_ccc_a: c.median_a,
            median_ccc_b: c.median_b,
            n: c.test.n,
            statistic: c.test.statistic(),
            p_value: c.test.p_two_sided,
            method: format!("{:?}", c.test.method).to_lowercase(),
            all_zero: c.test.all_zero,
        }),
    )
}

#[derive(Debug, Deserialize)]
struct OutcomeRow {
    subject_id: String,
    time_days: Option<f64>,
    event: Option<String>,
}

/// Reads outcomes from any CSV with `subject_id`, `time_days` and `event`
/// columns (a survival manifest qualifies). Rows of one subject must agree.
pub fn read_outcomes(path: &Path) -> Result<Vec<SurvivalRecord>> {
    let rows: Vec<OutcomeRow> = read_rows(path)?;
    let mut out: BTreeMap<String, (f64, bool)> = BTreeMap::new();
    for (i, r) in rows.into_iter().enumerate() {
        let line = i + 2;
        let (Some(time), Some(event)) = (r.time_days, r.event.as_deref()) else {
            return Err(AppError::table(
                path,
                format!("row {line}: missing time_days or event"),
            ));
        };
        if !(time > 0.0 && time.is_finite()) {
            return Err(AppError::table(
                path,
                format!("row {line}: time_days {time} must be positive"),
            ));
        }
        let event = match event.trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => {
                return Err(AppError::table(
                    path,
                    format!("row {line}: event '{other}' is not 0/1"),
                ))
            }
        };
        if let Some(prev) = out.insert(r.subject_id.clone(), (time, event)) {
            if prev != (time, event) {
                return Err(AppError::table(
                    path,
                    format!("subject {} has conflicting outcomes", r.subject_id),
                ));
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|(subject_id, (time, event))| SurvivalRecord {
            subject_id,
            time,
            event,
        })
        .collect())
}

#[derive(Debug, Serialize, Default)]
struct OutcomeOut<'a> {
    subject_id: &'a str,
    time_days: f64,
    event: u8,
}

pub fn write_outcomes(path: &Path, records: &[SurvivalRecord]) -> Result<()> {
    write_rows(
        path,
        records.iter().map(|r| OutcomeOut {
            subject_id: &r.subject_id,
            time_days: r.time,
            event: r.event as u8,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_labels_round_trip() {
        for k in [
            ReproKind::Generalized,
            ReproKind::Pairwise {
                thickness_a: 2.5,
                thickness_b: 3.75,
            },
        ] {
            assert_eq!(parse_kind(&kind_label(k)), Some(k));
        }
        assert_eq!(parse_kind("pairwise:x"), None);
    }
}
