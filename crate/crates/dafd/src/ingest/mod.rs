//! Canonical trial storage and dataset adapters.
//!
//! Canonical layout: a manifest CSV (`trial_id, subject_id, dataset_id,
//! position, activity_code, label, sample_rate_hz, path`) whose `path` column
//! points at one CSV per trial (`ax, ay, az`, one row per sample, g units,
//! 12 significant digits). Everything is UTF-8, comma-separated, with a
//! header row and `.` as the decimal separator.

mod adapt;
mod synth;

pub use adapt::{adapt_dataset, ColumnMapping, ColumnRef, Unit};
pub use synth::{
    synth_domain_pair, synth_trials, synth_trials_detailed, DomainShift, SynthPair, SynthSpec,
    SynthTrial,
};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{DafdError, Result};

pub const GRAVITY_M_PER_S2: f64 = 9.80665;

/// Binary activity class; `Fall` is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Adl,
    Fall,
}

impl Class {
    /// Class index used by the network heads (ADL = 0, Fall = 1).
    pub fn index(self) -> usize {
        match self {
            Class::Adl => 0,
            Class::Fall => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Class> {
        match i {
            0 => Some(Class::Adl),
            1 => Some(Class::Fall),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Adl => "ADL",
            Class::Fall => "Fall",
        })
    }
}

impl FromStr for Class {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ADL" => Ok(Class::Adl),
            "Fall" => Ok(Class::Fall),
            other => Err(format!("unknown class {other:?} (expected ADL or Fall)")),
        }
    }
}

/// Sensor position codes used by the supported datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    /// Neck.
    N,
    /// Waist.
    WA,
    /// Right pocket.
    RP,
    /// Left pocket.
    LP,
    /// Wrist.
    WR,
    /// Ankle.
    A,
    /// Chest.
    C,
}

impl Position {
    pub const ALL: [Position; 7] = [
        Position::N,
        Position::WA,
        Position::RP,
        Position::LP,
        Position::WR,
        Position::A,
        Position::C,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Position::N => "N",
            Position::WA => "WA",
            Position::RP => "RP",
            Position::LP => "LP",
            Position::WR => "WR",
            Position::A => "A",
            Position::C => "C",
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Position {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Position::ALL
            .into_iter()
            .find(|p| p.code() == s)
            .ok_or_else(|| format!("unknown position code {s:?}"))
    }
}

/// One recorded activity trial: tri-axial acceleration in g at a known rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: String,
    pub subject_id: String,
    pub dataset_id: String,
    pub position: Position,
    pub activity_code: String,
    pub label: Class,
    pub sample_rate_hz: f64,
    pub samples: Vec<[f64; 3]>,
}

impl TrialRecord {
    /// Checks the record invariants: non-empty finite samples, positive rate,
    /// and label consistency with the fall code prefix.
    pub fn validate(&self, fall_prefix: &str) -> Result<()> {
        if self.samples.is_empty() {
            return Err(DafdError::InvalidSpec(format!(
                "trial {}: no samples",
                self.trial_id
            )));
        }
        if !(self.sample_rate_hz > 0.0) {
            return Err(DafdError::InvalidSpec(format!(
                "trial {}: sample rate must be positive, got {}",
                self.trial_id, self.sample_rate_hz
            )));
        }
        if self
            .samples
            .iter()
            .any(|s| s.iter().any(|v| !v.is_finite()))
        {
            return Err(DafdError::NonFinite(format!("trial {}", self.trial_id)));
        }
        let is_fall = self.activity_code.starts_with(fall_prefix);
        if is_fall != (self.label == Class::Fall) {
            return Err(DafdError::InvalidSpec(format!(
                "trial {}: label {} inconsistent with activity code {:?}",
                self.trial_id, self.label, self.activity_code
            )));
        }
        Ok(())
    }
}

const MANIFEST_HEADER: &str =
    "trial_id,subject_id,dataset_id,position,activity_code,label,sample_rate_hz,path";
const TRIAL_HEADER: &str = "ax,ay,az";

fn check_field(value: &str, what: &str, trial: &str) -> Result<()> {
    if value.is_empty() {
        return Err(DafdError::InvalidSpec(format!(
            "trial {trial}: empty {what}"
        )));
    }
    if value
        .chars()
        .any(|c| !(c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')))
    {
        return Err(DafdError::InvalidSpec(format!(
            "trial {trial}: {what} {value:?} may only contain [A-Za-z0-9._-]"
        )));
    }
    Ok(())
}

/// Writes trials in the canonical layout under `dir` and returns the manifest
/// path. Sample values are written with 12 significant digits.
pub fn write_canonical(trials: &[TrialRecord], dir: &Path) -> Result<PathBuf> {
    let trials_dir = dir.join("trials");
    fs::create_dir_all(&trials_dir).map_err(|e| DafdError::io(&trials_dir, e))?;
    let mut manifest = String::from(MANIFEST_HEADER);
    manifest.push('\n');
    for trial in trials {
        trial.validate("F")?;
        for (field, what) in [
            (&trial.trial_id, "trial_id"),
            (&trial.subject_id, "subject_id"),
            (&trial.dataset_id, "dataset_id"),
            (&trial.activity_code, "activity_code"),
        ] {
            check_field(field, what, &trial.trial_id)?;
        }
        let rel = format!("trials/{}.csv", trial.trial_id);
        let mut body = String::from(TRIAL_HEADER);
        body.push('\n');
        for s in &trial.samples {
            body.push_str(&format!("{:.11e},{:.11e},{:.11e}\n", s[0], s[1], s[2]));
        }
        let trial_path = dir.join(&rel);
        fs::write(&trial_path, body).map_err(|e| DafdError::io(&trial_path, e))?;
        manifest.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            trial.trial_id,
            trial.subject_id,
            trial.dataset_id,
            trial.position,
            trial.activity_code,
            trial.label,
            trial.sample_rate_hz,
            rel
        ));
    }
    let manifest_path = dir.join("manifest.csv");
    fs::write(&manifest_path, manifest).map_err(|e| DafdError::io(&manifest_path, e))?;
    Ok(manifest_path)
}

/// Loads every trial referenced by a canonical manifest. Paths in the `path`
/// column resolve relative to the manifest's directory.
pub fn load_canonical(manifest_path: &Path) -> Result<Vec<TrialRecord>> {
    let text =
        fs::read_to_string(manifest_path).map_err(|e| DafdError::io(manifest_path, e))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == MANIFEST_HEADER => {}
        Some((_, header)) => {
            return Err(DafdError::parse(
                manifest_path,
                1,
                format!("bad manifest header {header:?}"),
            ))
        }
        None => return Err(DafdError::parse(manifest_path, 1, "empty manifest")),
    }
    let mut trials = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(DafdError::parse(
                manifest_path,
                line_no,
                format!("expected 8 columns, got {}", fields.len()),
            ));
        }
        let position = Position::from_str(fields[3])
            .map_err(|e| DafdError::parse(manifest_path, line_no, e))?;
        let label =
            Class::from_str(fields[5]).map_err(|e| DafdError::parse(manifest_path, line_no, e))?;
        let rate: f64 = fields[6]
            .parse()
            .map_err(|_| DafdError::parse(manifest_path, line_no, "bad sample_rate_hz"))?;
        if !(rate > 0.0) {
            return Err(DafdError::parse(
                manifest_path,
                line_no,
                format!("sample_rate_hz must be positive, got {rate}"),
            ));
        }
        let trial_path = base.join(fields[7]);
        let samples = read_trial_file(&trial_path)?;
        let trial = TrialRecord {
            trial_id: fields[0].to_string(),
            subject_id: fields[1].to_string(),
            dataset_id: fields[2].to_string(),
            position,
            activity_code: fields[4].to_string(),
            label,
            sample_rate_hz: rate,
            samples,
        };
        trial.validate("F")?;
        trials.push(trial);
    }
    Ok(trials)
}

fn read_trial_file(path: &Path) -> Result<Vec<[f64; 3]>> {
    let text = fs::read_to_string(path).map_err(|e| DafdError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == TRIAL_HEADER => {}
        _ => return Err(DafdError::parse(path, 1, "expected header ax,ay,az")),
    }
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(DafdError::parse(
                path,
                line_no,
                format!("expected 3 columns, got {}", fields.len()),
            ));
        }
        let mut sample = [0.0f64; 3];
        for (i, f) in fields.iter().enumerate() {
            let v: f64 = f.trim().parse().map_err(|_| {
                DafdError::parse(path, line_no, format!("bad value {:?}", f.trim()))
            })?;
            if !v.is_finite() {
                return Err(DafdError::parse(
                    path,
                    line_no,
                    format!("non-finite sample {:?}", f.trim()),
                ));
            }
            sample[i] = v;
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(DafdError::parse(path, 1, "trial file has no samples"));
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(id: &str, n: usize) -> TrialRecord {
        TrialRecord {
            trial_id: id.to_string(),
            subject_id: "S01".into(),
            dataset_id: "synth".into(),
            position: Position::WA,
            activity_code: "A1".into(),
            label: Class::Adl,
            sample_rate_hz: 18.4,
            samples: (0..n)
                .map(|i| [i as f64 * 0.001, 1.0 - i as f64 * 1e-5, -0.5])
                .collect(),
        }
    }

    #[test]
    fn empty_manifest_loads_as_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        fs::write(&path, format!("{MANIFEST_HEADER}\n")).unwrap();
        assert!(load_canonical(&path).unwrap().is_empty());
    }

    #[test]
    fn round_trip_preserves_records() {
        let dir = tempfile::tempdir().unwrap();
        let trials = vec![trial("T1", 100), trial("T2", 100)];
        let manifest = write_canonical(&trials, dir.path()).unwrap();
        let loaded = load_canonical(&manifest).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0].samples.len(), 100);
        assert_eq!(loaded[0].trial_id, "T1");
        for (a, b) in trials[1].samples.iter().zip(&loaded[1].samples) {
            for i in 0..3 {
                let rel = (a[i] - b[i]).abs() / a[i].abs().max(1.0);
                assert!(rel < 1e-11, "{} vs {}", a[i], b[i]);
            }
        }
    }

    #[test]
    fn nan_sample_reports_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let trial_path = dir.path().join("bad.csv");
        fs::write(&trial_path, "ax,ay,az\n0.1,0.2,0.3\nNaN,0.2,0.3\n").unwrap();
        let manifest = dir.path().join("manifest.csv");
        fs::write(
            &manifest,
            format!("{MANIFEST_HEADER}\nT1,S01,synth,WA,A1,ADL,18.4,bad.csv\n"),
        )
        .unwrap();
        let err = load_canonical(&manifest).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.csv"), "{msg}");
        assert!(msg.contains(":3:"), "{msg}");
    }

    #[test]
    fn missing_trial_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("manifest.csv");
        fs::write(
            &manifest,
            format!("{MANIFEST_HEADER}\nT1,S01,synth,WA,A1,ADL,18.4,absent.csv\n"),
        )
        .unwrap();
        assert!(load_canonical(&manifest).is_err());
    }

    #[test]
    fn wrong_column_count_is_reported_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("manifest.csv");
        fs::write(&manifest, format!("{MANIFEST_HEADER}\nT1,S01,synth\n")).unwrap();
        let err = load_canonical(&manifest).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }

    #[test]
    fn non_positive_rate_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let trial_path = dir.path().join("t.csv");
        fs::write(&trial_path, "ax,ay,az\n0,0,1\n").unwrap();
        let manifest = dir.path().join("manifest.csv");
        fs::write(
            &manifest,
            format!("{MANIFEST_HEADER}\nT1,S01,synth,WA,A1,ADL,0,t.csv\n"),
        )
        .unwrap();
        assert!(load_canonical(&manifest).is_err());
    }

    #[test]
    fn label_code_mismatch_is_rejected() {
        let mut t = trial("T1", 5);
        t.activity_code = "F1".into(); // label stays ADL
        assert!(t.validate("F").is_err());
    }
}
