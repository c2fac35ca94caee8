//! Evaluate all four training modes on one synthetic source->target pair
//! over the 5-fold leave-subjects-out plan, then render the report table.
//!
//! ```bash
//! cargo run -p dafd --example pair_evaluation
//! ```

use dafd::dann::{Hyperparams, TrainConfig, TrainMode};
use dafd::eval::{build_report, run_pair, PairData, PairSpec};
use dafd::ingest::{synth_domain_pair, DomainShift, SynthSpec};
use dafd::signal::{preprocess_all, DomainTag, WindowConfig};

fn main() -> dafd::Result<()> {
    let spec = SynthSpec {
        n_subjects: 10,
        trials_per_class_per_subject: 4,
        rate_hz: 18.4,
        domain_shift: DomainShift {
            rotation_rad: 25f64.to_radians(),
            gain: [0.9, 1.1, 1.0],
            offset_g: [0.0, 0.0, 0.0],
            rate_override_hz: None,
        },
        noise_sigma: 0.03,
        seed: 21,
        confuser_fraction: 0.5,
    };
    let pair_trials = synth_domain_pair(&spec)?;
    let wc = WindowConfig::default();
    let (source, _) = preprocess_all(&pair_trials.source, wc.rate_hz, &wc, DomainTag::Source);
    let (target, _) = preprocess_all(&pair_trials.target, wc.rate_hz, &wc, DomainTag::Target);
    let data = PairData { source, target };

    let pair: PairSpec = "synth/WA:synth/RP".parse().expect("static pair");
    let cfg = TrainConfig {
        max_epochs: 40,
        patience: 12,
        seed: 2,
        ..TrainConfig::default()
    };
    let hp = Hyperparams::default();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let results = run_pair(&pair, &data, &TrainMode::ALL, &cfg, &hp, jobs)?;
    for r in &results {
        println!(
            "{:<12} mean F1 {:.3} (folds: {})",
            r.mode.display(),
            r.mean.f1.value,
            r.folds
                .iter()
                .map(|f| format!("{:.2}", f.metrics.f1.value))
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    println!();
    print!("{}", build_report(&results)?.text);
    Ok(())
}
