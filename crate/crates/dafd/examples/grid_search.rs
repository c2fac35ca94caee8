//! Run the 27-tuple hyperparameter grid (dropout x learning rate x lambda)
//! on a small synthetic pair and print the ranking.
//!
//! ```bash
//! cargo run -p dafd --example grid_search
//! ```

use dafd::dann::{grid_search, SegmentPool, TrainConfig, TrainMode};
use dafd::ingest::{synth_domain_pair, SynthSpec};
use dafd::signal::{preprocess_all, DomainTag, WindowConfig};

fn main() -> dafd::Result<()> {
    let spec = SynthSpec {
        n_subjects: 6,
        trials_per_class_per_subject: 3,
        seed: 17,
        confuser_fraction: 0.5,
        ..SynthSpec::default()
    };
    let pair = synth_domain_pair(&spec)?;
    let wc = WindowConfig::default();
    let (src, _) = preprocess_all(&pair.source, wc.rate_hz, &wc, DomainTag::Source);
    let (tgt, _) = preprocess_all(&pair.target, wc.rate_hz, &wc, DomainTag::Target);
    let source = SegmentPool::labeled(src, DomainTag::Source)?;
    let target = SegmentPool::unlabeled(tgt, DomainTag::Target)?;

    let cfg = TrainConfig {
        mode: TrainMode::Dafd,
        max_epochs: 6,
        patience: 6,
        seed: 1,
        ..TrainConfig::default()
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let (best, mut entries) = grid_search(Some(&source), Some(&target), &cfg, jobs)?;
    entries.sort_by(|a, b| a.best_val_loss.partial_cmp(&b.best_val_loss).unwrap());
    println!("rank  dropout  lr      lambda  best_val_loss  best_epoch");
    for (i, e) in entries.iter().enumerate().take(5) {
        println!(
            "{:<5} {:<8} {:<7} {:<7} {:<14.4} {}",
            i + 1,
            e.hp.dropout,
            e.hp.lr,
            e.hp.lambda,
            e.best_val_loss,
            e.best_epoch
        );
    }
    println!("... {} tuples total", entries.len());
    println!(
        "selected: dropout {} / lr {} / lambda {}",
        best.dropout, best.lr, best.lambda
    );
    Ok(())
}
