//! Generate a paired two-domain synthetic corpus and write it in the
//! canonical manifest layout.
//!
//! ```bash
//! cargo run -p dafd --example synthesize_corpus
//! ```

use dafd::ingest::{synth_domain_pair, write_canonical, Class, DomainShift, SynthSpec};
use dafd::signal::norm_xyz;

fn main() -> dafd::Result<()> {
    let spec = SynthSpec {
        n_subjects: 4,
        trials_per_class_per_subject: 3,
        rate_hz: 18.4,
        domain_shift: DomainShift {
            rotation_rad: 25f64.to_radians(),
            gain: [0.9, 1.1, 1.0],
            offset_g: [0.0, 0.02, 0.0],
            rate_override_hz: None,
        },
        noise_sigma: 0.03,
        seed: 42,
        confuser_fraction: 0.5,
    };
    let pair = synth_domain_pair(&spec)?;
    println!(
        "source trials: {} ({} falls)",
        pair.source.len(),
        pair.source.iter().filter(|t| t.label == Class::Fall).count()
    );
    println!("target trials: {}", pair.target.len());

    // every synthetic fall carries the free-fall dip / impact spike / rest
    // plateau signature
    let fall = pair
        .source
        .iter()
        .find(|t| t.label == Class::Fall)
        .expect("at least one fall");
    let norms: Vec<f64> = fall.samples.iter().map(|s| norm_xyz(*s)).collect();
    let peak = norms.iter().cloned().fold(0.0, f64::max);
    let dip = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    println!(
        "example fall {}: {} samples, norm dip {:.2} g, impact peak {:.2} g",
        fall.trial_id,
        fall.samples.len(),
        dip,
        peak
    );

    let dir = std::env::temp_dir().join("dafd_example_corpus");
    let mut trials = pair.source;
    trials.extend(pair.target);
    let manifest = write_canonical(&trials, &dir)?;
    println!("canonical manifest written to {}", manifest.display());
    Ok(())
}
