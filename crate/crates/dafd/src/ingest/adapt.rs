//! Adapter from raw dataset exports to the canonical trial format.
//!
//! The public fall datasets ship as per-trial CSV exports whose column layout
//! varies; a [`ColumnMapping`] (loadable from a small TOML file) tells the
//! adapter where the axes live, the unit, and the sampling rate. File names
//! follow `<subject>_<activity>_<rest>.csv`, e.g. `S03_F1_T2.csv`; the
//! activity code determines the label via the fall prefix rule.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Class, Position, TrialRecord, GRAVITY_M_PER_S2};
use crate::error::{DafdError, Result};

/// A raw-file column referenced either by header name or 0-based index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl ColumnRef {
    fn resolve(&self, header: &[&str], path: &Path) -> Result<usize> {
        match self {
            ColumnRef::Index(i) => {
                if *i < header.len() {
                    Ok(*i)
                } else {
                    Err(DafdError::parse(
                        path,
                        1,
                        format!("column index {i} out of range ({} columns)", header.len()),
                    ))
                }
            }
            ColumnRef::Name(name) => header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| {
                    DafdError::parse(path, 1, format!("column {name:?} not found in header"))
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    G,
    MPerS2,
}

/// Mapping from a raw export's columns to canonical tri-axial samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnMapping {
    #[serde(default)]
    pub time_col: Option<ColumnRef>,
    pub x_col: ColumnRef,
    pub y_col: ColumnRef,
    pub z_col: ColumnRef,
    pub unit: Unit,
    pub rate_hz: f64,
    #[serde(default = "default_fall_prefix")]
    pub label_prefix_fall: String,
}

fn default_fall_prefix() -> String {
    "F".to_string()
}

impl ColumnMapping {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| DafdError::io(path, e))?;
        let mapping: ColumnMapping = toml::from_str(&text)
            .map_err(|e| DafdError::parse(path, 0, format!("bad column mapping: {e}")))?;
        mapping.validate()?;
        Ok(mapping)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_col == self.y_col || self.x_col == self.z_col || self.y_col == self.z_col {
            return Err(DafdError::InvalidSpec(
                "x, y and z columns must be distinct".into(),
            ));
        }
        if !(self.rate_hz > 0.0) {
            return Err(DafdError::InvalidSpec(format!(
                "rate_hz must be positive, got {}",
                self.rate_hz
            )));
        }
        if self.label_prefix_fall.is_empty() {
            return Err(DafdError::InvalidSpec("empty fall label prefix".into()));
        }
        Ok(())
    }
}

fn parse_trial_name(stem: &str) -> Result<(String, String)> {
    let mut parts = stem.split('_');
    let subject = parts.next().unwrap_or_default();
    let activity = parts.next().unwrap_or_default();
    if subject.is_empty() || activity.is_empty() {
        return Err(DafdError::InvalidSpec(format!(
            "raw file name {stem:?} does not match <subject>_<activity>_<rest>"
        )));
    }
    let valid = activity.len() >= 2
        && activity.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && activity.chars().skip(1).all(|c| c.is_ascii_digit());
    if !valid {
        return Err(DafdError::InvalidSpec(format!(
            "unknown activity code {activity:?} in {stem:?}"
        )));
    }
    Ok((subject.to_string(), activity.to_string()))
}

/// Converts every `*.csv` under `raw_dir` (non-recursive, lexicographic file
/// order) into canonical trials expressed in g.
pub fn adapt_dataset(
    raw_dir: &Path,
    mapping: &ColumnMapping,
    dataset_id: &str,
    position: Position,
) -> Result<Vec<TrialRecord>> {
    mapping.validate()?;
    let mut files: Vec<_> = std::fs::read_dir(raw_dir)
        .map_err(|e| DafdError::io(raw_dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();

    let mut trials = Vec::with_capacity(files.len());
    for path in files {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let (subject, activity) = parse_trial_name(&stem)?;
        let samples = read_raw_file(&path, mapping)?;
        let label = if activity.starts_with(&mapping.label_prefix_fall) {
            Class::Fall
        } else {
            Class::Adl
        };
        trials.push(TrialRecord {
            trial_id: stem,
            subject_id: subject,
            dataset_id: dataset_id.to_string(),
            position,
            activity_code: activity,
            label,
            sample_rate_hz: mapping.rate_hz,
            samples,
        });
    }
    Ok(trials)
}

fn read_raw_file(path: &Path, mapping: &ColumnMapping) -> Result<Vec<[f64; 3]>> {
    let text = std::fs::read_to_string(path).map_err(|e| DafdError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let header: Vec<&str> = match lines.next() {
        Some((_, h)) => h.split(',').collect(),
        None => return Err(DafdError::parse(path, 1, "empty raw file")),
    };
    let xi = mapping.x_col.resolve(&header, path)?;
    let yi = mapping.y_col.resolve(&header, path)?;
    let zi = mapping.z_col.resolve(&header, path)?;
    let scale = match mapping.unit {
        Unit::G => 1.0,
        Unit::MPerS2 => 1.0 / GRAVITY_M_PER_S2,
    };
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(DafdError::parse(
                path,
                line_no,
                format!("expected {} columns, got {}", header.len(), fields.len()),
            ));
        }
        let mut sample = [0.0f64; 3];
        for (slot, col) in [xi, yi, zi].into_iter().enumerate() {
            let raw = fields[col].trim();
            let v: f64 = raw
                .parse()
                .map_err(|_| DafdError::parse(path, line_no, format!("bad value {raw:?}")))?;
            if !v.is_finite() {
                return Err(DafdError::parse(
                    path,
                    line_no,
                    format!("non-finite sample {raw:?}"),
                ));
            }
            sample[slot] = v * scale;
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(DafdError::parse(path, 1, "raw file has no samples"));
    }
    Ok(samples)
}
