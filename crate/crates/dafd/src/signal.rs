//! Preprocessing: rational-factor resampling, the tri-axial norm, the
//! impact-defined window, and per-axis min-max normalization. The pipeline
//! turns a trial of any rate into one 66x3 segment with values in [0, 1].

use std::fmt;
use std::path::Path;

use crate::error::{DafdError, Result};
use crate::ingest::{Class, TrialRecord};

/// Which pool a segment belongs to in a cross-domain experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainTag {
    Source,
    Target,
}

impl DomainTag {
    /// Domain-classifier target index (source = 0, target = 1).
    pub fn index(self) -> usize {
        match self {
            DomainTag::Source => 0,
            DomainTag::Target => 1,
        }
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainTag::Source => "source",
            DomainTag::Target => "target",
        })
    }
}

/// Rational resampling factor p/q in lowest terms: interpolate by `p`,
/// decimate by `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResampleFactor {
    p: u64,
    q: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl ResampleFactor {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(DafdError::InvalidArgument(format!(
                "resample factor must have positive terms, got {p}/{q}"
            )));
        }
        let g = gcd(p, q);
        Ok(ResampleFactor { p: p / g, q: q / g })
    }

    /// Factor taking `source_hz` to `target_hz`: both rates are scaled by a
    /// power of ten (up to 10^6) until integral, then reduced.
    pub fn from_rates(source_hz: f64, target_hz: f64) -> Result<Self> {
        if !(source_hz > 0.0) || !(target_hz > 0.0) {
            return Err(DafdError::InvalidArgument(format!(
                "rates must be positive, got {source_hz} -> {target_hz}"
            )));
        }
        for digits in 0..=6u32 {
            let scale = 10f64.powi(digits as i32);
            let p = target_hz * scale;
            let q = source_hz * scale;
            let near = |v: f64| (v - v.round()).abs() <= 1e-6 * v.abs().max(1.0);
            if near(p) && near(q) && p.round() >= 1.0 && q.round() >= 1.0 {
                return ResampleFactor::new(p.round() as u64, q.round() as u64);
            }
        }
        Err(DafdError::InvalidArgument(format!(
            "rates {source_hz} -> {target_hz} have no rational factor within 6 decimal digits"
        )))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_identity(&self) -> bool {
        self.p == self.q
    }
}

impl fmt::Display for ResampleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Impact-window geometry: `ws_b` samples before the impact, the impact
/// sample itself, and `ws_f` samples after it, at `rate_hz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    pub ws_b: usize,
    pub ws_f: usize,
    pub rate_hz: f64,
}

impl WindowConfig {
    pub fn window_len(&self) -> usize {
        self.ws_b + 1 + self.ws_f
    }
}

impl Default for WindowConfig {
    /// 2 s backward and 1.5 s forward at 18.4 Hz: 37 + 1 + 28 = 66 samples.
    fn default() -> Self {
        WindowConfig {
            ws_b: 37,
            ws_f: 28,
            rate_hz: 18.4,
        }
    }
}

/// One preprocessed window: `window_len` tri-axial rows, normalized to [0, 1]
/// after [`minmax_normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub values: Vec<[f64; 3]>,
    pub label: Option<Class>,
    pub domain: DomainTag,
    pub subject_id: String,
    pub trial_id: String,
    /// Position of the impact sample within the window (= `ws_b`).
    pub impact_index: usize,
}

/// Euclidean norm of one tri-axial sample.
pub fn norm_xyz(sample: [f64; 3]) -> f64 {
    (sample[0] * sample[0] + sample[1] * sample[1] + sample[2] * sample[2]).sqrt()
}

/// Linear-interpolation resampling by a rational factor: output sample `k`
/// reads the input at fractional index `k*q/p`; the output has
/// `floor((n-1)*p/q) + 1` samples and rate `input_rate * p/q`.
pub fn resample(trial: &TrialRecord, factor: ResampleFactor) -> Result<TrialRecord> {
    let n = trial.samples.len();
    if n < 2 {
        return Err(DafdError::InvalidArgument(format!(
            "trial {}: resampling needs at least 2 samples, got {n}",
            trial.trial_id
        )));
    }
    let (p, q) = (factor.p(), factor.q());
    let m = ((n as u64 - 1) * p / q) as usize + 1;
    let mut samples = Vec::with_capacity(m);
    for k in 0..m as u64 {
        let num = k * q;
        let idx = (num / p) as usize;
        let rem = num % p;
        if rem == 0 {
            samples.push(trial.samples[idx]);
        } else {
            let t = rem as f64 / p as f64;
            let a = trial.samples[idx];
            let b = trial.samples[idx + 1];
            samples.push([
                a[0] + (b[0] - a[0]) * t,
                a[1] + (b[1] - a[1]) * t,
                a[2] + (b[2] - a[2]) * t,
            ]);
        }
    }
    Ok(TrialRecord {
        sample_rate_hz: trial.sample_rate_hz * p as f64 / q as f64,
        samples,
        ..trial.clone()
    })
}

/// Cuts the fixed-length window centered on the impact point (the first
/// maximum of the sample norms). Windows overrunning either end of the trial
/// replicate the edge sample so the output is always `window_len` rows.
pub fn impact_window(
    trial: &TrialRecord,
    cfg: &WindowConfig,
    domain: DomainTag,
) -> Result<Segment> {
    if trial.samples.is_empty() {
        return Err(DafdError::InvalidArgument(format!(
            "trial {}: cannot window an empty trial",
            trial.trial_id
        )));
    }
    let mut peak = 0usize;
    let mut peak_norm = f64::NEG_INFINITY;
    for (i, s) in trial.samples.iter().enumerate() {
        let n = norm_xyz(*s);
        if n > peak_norm {
            peak_norm = n;
            peak = i;
        }
    }
    let last = trial.samples.len() - 1;
    let values = (-(cfg.ws_b as isize)..=cfg.ws_f as isize)
        .map(|offset| {
            let j = (peak as isize + offset).clamp(0, last as isize) as usize;
            trial.samples[j]
        })
        .collect();
    Ok(Segment {
        values,
        label: Some(trial.label),
        domain,
        subject_id: trial.subject_id.clone(),
        trial_id: trial.trial_id.clone(),
        impact_index: cfg.ws_b,
    })
}

/// Per-axis min-max normalization to [0, 1]; a constant axis maps to zeros.
pub fn minmax_normalize(segment: &Segment) -> Segment {
    let mut out = segment.clone();
    for axis in 0..3 {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for row in &segment.values {
            min = min.min(row[axis]);
            max = max.max(row[axis]);
        }
        let span = max - min;
        for row in &mut out.values {
            row[axis] = if span > 0.0 {
                (row[axis] - min) / span
            } else {
                0.0
            };
        }
    }
    out
}

/// Full preprocessing for one trial: resample to `target_rate_hz` (reduced
/// rational factor), cut the impact window, min-max normalize.
pub fn preprocess(
    trial: &TrialRecord,
    target_rate_hz: f64,
    cfg: &WindowConfig,
    domain: DomainTag,
) -> Result<Segment> {
    let factor = ResampleFactor::from_rates(trial.sample_rate_hz, target_rate_hz)?;
    let resampled = resample(trial, factor)?;
    let windowed = impact_window(&resampled, cfg, domain)?;
    Ok(minmax_normalize(&windowed))
}

/// A trial dropped by [`preprocess_all`], with the reason.
#[derive(Debug, Clone)]
pub struct Exclusion {
    pub trial_id: String,
    pub reason: String,
}

/// Preprocesses a whole pool, excluding (rather than failing on) trials that
/// are shorter than the window after resampling, carry non-finite samples, or
/// cannot be resampled. Returns the segments and the exclusion log.
pub fn preprocess_all(
    trials: &[TrialRecord],
    target_rate_hz: f64,
    cfg: &WindowConfig,
    domain: DomainTag,
) -> (Vec<Segment>, Vec<Exclusion>) {
    let mut segments = Vec::with_capacity(trials.len());
    let mut excluded = Vec::new();
    for trial in trials {
        let mut exclude = |reason: String| {
            excluded.push(Exclusion {
                trial_id: trial.trial_id.clone(),
                reason,
            });
        };
        if trial
            .samples
            .iter()
            .any(|s| s.iter().any(|v| !v.is_finite()))
        {
            exclude("non-finite samples".into());
            continue;
        }
        let factor = match ResampleFactor::from_rates(trial.sample_rate_hz, target_rate_hz) {
            Ok(f) => f,
            Err(e) => {
                exclude(e.to_string());
                continue;
            }
        };
        let resampled = match resample(trial, factor) {
            Ok(r) => r,
            Err(e) => {
                exclude(e.to_string());
                continue;
            }
        };
        if resampled.samples.len() < cfg.window_len() {
            exclude(format!(
                "only {} samples after resampling (window needs {})",
                resampled.samples.len(),
                cfg.window_len()
            ));
            continue;
        }
        match impact_window(&resampled, cfg, domain) {
            Ok(w) => segments.push(minmax_normalize(&w)),
            Err(e) => exclude(e.to_string()),
        }
    }
    (segments, excluded)
}

/// Writes the debug segment dump: one row per segment with the 198 normalized
/// values (66 x, then 66 y, then 66 z) followed by label and domain.
pub fn write_segment_dump(segments: &[Segment], path: &Path) -> Result<()> {
    let mut out = String::new();
    let window_len = segments.first().map_or(66, |s| s.values.len());
    for axis in ["x", "y", "z"] {
        for i in 0..window_len {
            out.push_str(&format!("{axis}{i},"));
        }
    }
    out.push_str("label,domain\n");
    for seg in segments {
        for axis in 0..3 {
            for row in &seg.values {
                out.push_str(&format!("{},", row[axis]));
            }
        }
        if let Some(label) = seg.label {
            out.push_str(&label.to_string());
        }
        out.push(',');
        out.push_str(&seg.domain.to_string());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| DafdError::io(path, e))
}
