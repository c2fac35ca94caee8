//! The preprocessing pipeline step by step on one trial: rational resampling
//! to 18.4 Hz, the impact-defined 66-sample window, and per-axis min-max
//! normalization.
//!
//! ```bash
//! cargo run -p dafd --example preprocess_window
//! ```

use dafd::ingest::{synth_trials, SynthSpec};
use dafd::signal::{
    impact_window, minmax_normalize, norm_xyz, preprocess, resample, DomainTag, ResampleFactor,
    WindowConfig,
};

fn main() -> dafd::Result<()> {
    // a 20 Hz trial, like the UMAFall IMU nodes
    let spec = SynthSpec {
        n_subjects: 1,
        trials_per_class_per_subject: 1,
        rate_hz: 20.0,
        seed: 7,
        ..SynthSpec::default()
    };
    let trial = synth_trials(&spec)?
        .into_iter()
        .find(|t| t.label == dafd::ingest::Class::Fall)
        .expect("one fall trial");
    println!(
        "input: {} samples at {} Hz",
        trial.samples.len(),
        trial.sample_rate_hz
    );

    let factor = ResampleFactor::from_rates(trial.sample_rate_hz, 18.4)?;
    println!("resampling factor {} (20 Hz -> 18.4 Hz)", factor);
    let resampled = resample(&trial, factor)?;
    println!(
        "resampled: {} samples at {} Hz",
        resampled.samples.len(),
        resampled.sample_rate_hz
    );

    let cfg = WindowConfig::default();
    let windowed = impact_window(&resampled, &cfg, DomainTag::Source)?;
    let peak = windowed.values[windowed.impact_index];
    println!(
        "impact window: {} samples ({} + 1 + {}), impact norm {:.2} g at index {}",
        windowed.values.len(),
        cfg.ws_b,
        cfg.ws_f,
        norm_xyz(peak),
        windowed.impact_index
    );

    let normalized = minmax_normalize(&windowed);
    let x_min = normalized.values.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
    let x_max = normalized.values.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
    println!("normalized x-axis range: [{x_min}, {x_max}]");

    // the one-call version
    let segment = preprocess(&trial, 18.4, &cfg, DomainTag::Source)?;
    assert_eq!(segment.values, normalized.values);
    println!("preprocess() reproduces the three steps exactly");
    Ok(())
}
