//! Train one adversarial (DAFD) model on a shifted synthetic pair and watch
//! the loss terms: the fall loss drops while the domain loss hovers near
//! ln 2 once the extractor keeps the domain classifier confused.
//!
//! ```bash
//! cargo run -p dafd --example train_adversarial
//! ```

use dafd::dann::{fit, predict, Hyperparams, SegmentPool, TrainConfig, TrainMode};
use dafd::ingest::{synth_domain_pair, DomainShift, SynthSpec};
use dafd::signal::{preprocess_all, DomainTag, WindowConfig};
use std::collections::BTreeSet;

fn main() -> dafd::Result<()> {
    let spec = SynthSpec {
        n_subjects: 10,
        trials_per_class_per_subject: 5,
        rate_hz: 18.4,
        domain_shift: DomainShift {
            rotation_rad: 25f64.to_radians(),
            gain: [0.9, 1.1, 1.0],
            offset_g: [0.0, 0.0, 0.0],
            rate_override_hz: None,
        },
        noise_sigma: 0.03,
        seed: 5,
        confuser_fraction: 0.5,
    };
    let pair = synth_domain_pair(&spec)?;
    let wc = WindowConfig::default();
    let (src_segments, _) = preprocess_all(&pair.source, wc.rate_hz, &wc, DomainTag::Source);
    let (tgt_segments, _) = preprocess_all(&pair.target, wc.rate_hz, &wc, DomainTag::Target);

    // hold two subjects out of training entirely
    let held: BTreeSet<String> = ["S09".to_string(), "S10".to_string()].into();
    let train_src: Vec<_> = src_segments
        .iter()
        .filter(|s| !held.contains(&s.subject_id))
        .cloned()
        .collect();
    let train_tgt: Vec<_> = tgt_segments
        .iter()
        .filter(|s| !held.contains(&s.subject_id))
        .cloned()
        .collect();
    let test_tgt: Vec<_> = tgt_segments
        .iter()
        .filter(|s| held.contains(&s.subject_id))
        .collect();

    let source = SegmentPool::labeled(train_src, DomainTag::Source)?;
    // the adaptation target is unlabeled by construction
    let target = SegmentPool::unlabeled(train_tgt, DomainTag::Target)?;

    let hp = Hyperparams {
        dropout: 0.1,
        lr: 0.001,
        lambda: 1.0,
    };
    let cfg = TrainConfig {
        mode: TrainMode::Dafd,
        max_epochs: 60,
        patience: 20,
        seed: 3,
        ..TrainConfig::default()
    };
    let result = fit(Some(&source), Some(&target), &hp, &cfg)?;
    for record in result.history.epochs.iter().step_by(10) {
        println!(
            "epoch {:3}: train fall {:.3} / domain {:.3}   val fall {:.3} / domain {:.3}",
            record.epoch,
            record.train.loss_fall,
            record.train.loss_domain,
            record.val.loss_fall,
            record.val.loss_domain
        );
    }
    println!(
        "best epoch {} of {}",
        result.history.best_epoch, result.history.stopped_epoch
    );

    let predictions = predict(&result.params, &test_tgt)?;
    let correct = predictions
        .iter()
        .zip(&test_tgt)
        .filter(|(p, s)| Some(**p) == s.label)
        .count();
    println!(
        "held-out target accuracy: {:.1}% ({correct}/{})",
        100.0 * correct as f64 / test_tgt.len() as f64,
        test_tgt.len()
    );
    Ok(())
}
