//! Extractor-feature export for downstream visualization (e.g. t-SNE):
//! one CSV row per segment with the 40 feature values, label, and domain.

use std::path::Path;

use crate::dann::segments_to_tensor;
use crate::error::{DafdError, Result};
use crate::nn::{forward_pass, Mode, ModelParams, FEATURE_DIM};
use crate::signal::Segment;

/// Writes eval-mode extractor features; returns the data-row count.
pub fn export_features(params: &ModelParams, segments: &[Segment], path: &Path) -> Result<usize> {
    let mut out = String::new();
    for i in 0..FEATURE_DIM {
        out.push_str(&format!("f{i:02},"));
    }
    out.push_str("label,domain\n");
    let mut rows = 0usize;
    let refs: Vec<&Segment> = segments.iter().collect();
    for chunk in refs.chunks(64) {
        let input = segments_to_tensor(chunk)?;
        let fwd = forward_pass(params, &input, 0.0, 0.0, Mode::Eval, None)?;
        for (bi, seg) in chunk.iter().enumerate() {
            for j in 0..FEATURE_DIM {
                out.push_str(&format!("{},", fwd.features.at2(bi, j)));
            }
            if let Some(label) = seg.label {
                out.push_str(&label.to_string());
            }
            out.push(',');
            out.push_str(&seg.domain.to_string());
            out.push('\n');
            rows += 1;
        }
    }
    std::fs::write(path, out).map_err(|e| DafdError::io(path, e))?;
    Ok(rows)
}
