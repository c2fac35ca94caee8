//! Export eval-mode extractor features for visualization: train briefly,
//! write the 40-dim features with label and domain columns, and summarize.
//!
//! ```bash
//! cargo run -p dafd --example feature_export
//! ```

use dafd::dann::{fit, Hyperparams, SegmentPool, TrainConfig, TrainMode};
use dafd::eval::export_features;
use dafd::ingest::{synth_domain_pair, SynthSpec};
use dafd::signal::{preprocess_all, DomainTag, WindowConfig};

fn main() -> dafd::Result<()> {
    let spec = SynthSpec {
        n_subjects: 6,
        trials_per_class_per_subject: 3,
        seed: 9,
        confuser_fraction: 0.5,
        ..SynthSpec::default()
    };
    let pair = synth_domain_pair(&spec)?;
    let wc = WindowConfig::default();
    let (src, _) = preprocess_all(&pair.source, wc.rate_hz, &wc, DomainTag::Source);
    let (tgt, _) = preprocess_all(&pair.target, wc.rate_hz, &wc, DomainTag::Target);

    let source = SegmentPool::labeled(src.clone(), DomainTag::Source)?;
    let target = SegmentPool::unlabeled(tgt.clone(), DomainTag::Target)?;
    let cfg = TrainConfig {
        mode: TrainMode::Dafd,
        max_epochs: 20,
        patience: 20,
        seed: 4,
        ..TrainConfig::default()
    };
    let result = fit(Some(&source), Some(&target), &Hyperparams::default(), &cfg)?;

    let mut segments = src;
    segments.extend(tgt);
    let path = std::env::temp_dir().join("dafd_features.csv");
    let rows = export_features(&result.params, &segments, &path)?;
    println!("wrote {rows} rows to {}", path.display());
    let text = std::fs::read_to_string(&path).expect("read back");
    for line in text.lines().take(3) {
        let cells: Vec<&str> = line.split(',').collect();
        println!("{}, ..., {}, {}, {}", cells[0], cells[39], cells[40], cells[41]);
    }
    Ok(())
}
