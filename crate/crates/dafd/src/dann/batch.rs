//! Epoch batch construction with fall oversampling.
//!
//! Labeled pools are sampled with replacement, class weights proportional to
//! the inverse class frequency, so each epoch sees falls and ADLs in roughly
//! equal numbers. Unlabeled pools are sampled uniformly with replacement.
//! One epoch holds `ceil(majority_class_count / batch_per_domain)` batches.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::pool::SegmentPool;
use super::{TrainConfig, TrainMode};
use crate::error::{DafdError, Result};
use crate::nn::{Tensor, INPUT_CHANNELS, INPUT_LEN};
use crate::signal::DomainTag;

/// One row of a batch: where the segment lives and what it trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchItem {
    pub domain: DomainTag,
    /// Index into the pool with that domain tag.
    pub index: usize,
    /// Fall-head class index; `None` keeps the row out of the fall loss.
    pub fall_target: Option<usize>,
    /// Domain-head class index; `None` keeps the row out of the domain loss.
    pub domain_target: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainBatch {
    /// Position of the batch within its epoch, for diagnostics.
    pub index: usize,
    pub items: Vec<BatchItem>,
}

impl TrainBatch {
    /// Materializes the `[B, 3, 66]` input tensor plus target vectors.
    pub fn materialize(
        &self,
        source: Option<&SegmentPool>,
        target: Option<&SegmentPool>,
    ) -> Result<(Tensor, Vec<Option<usize>>, Vec<Option<usize>>)> {
        let b = self.items.len();
        let mut input = Tensor::zeros(&[b, INPUT_CHANNELS, INPUT_LEN]);
        let mut fall_targets = Vec::with_capacity(b);
        let mut domain_targets = Vec::with_capacity(b);
        for (bi, item) in self.items.iter().enumerate() {
            let pool = match item.domain {
                DomainTag::Source => source,
                DomainTag::Target => target,
            }
            .ok_or_else(|| {
                DafdError::Train(format!("batch references a missing {} pool", item.domain))
            })?;
            let segment = pool.get(item.index);
            if segment.values.len() != INPUT_LEN {
                return Err(DafdError::shape(
                    "TrainBatch::materialize",
                    format!(
                        "segment {} has {} rows, expected {INPUT_LEN}",
                        segment.trial_id,
                        segment.values.len()
                    ),
                ));
            }
            for (t, row) in segment.values.iter().enumerate() {
                for c in 0..INPUT_CHANNELS {
                    let idx = input.ix3(bi, c, t);
                    input.data_mut()[idx] = row[c];
                }
            }
            fall_targets.push(item.fall_target);
            domain_targets.push(item.domain_target);
        }
        Ok((input, fall_targets, domain_targets))
    }
}

/// Draws one index from a labeled pool: a fair coin between the present
/// classes (realizing inverse-frequency weighting), then uniform within the
/// class. Single-class pools draw from that class alone.
fn draw_labeled(pool: &SegmentPool, rng: &mut ChaCha8Rng) -> usize {
    let adl = pool.adl_indices();
    let fall = pool.fall_indices();
    let list = match (adl.is_empty(), fall.is_empty()) {
        (false, false) => {
            if rng.gen::<f64>() < 0.5 {
                fall
            } else {
                adl
            }
        }
        (false, true) => adl,
        (true, false) => fall,
        (true, true) => unreachable!("labeled pool checked non-empty"),
    };
    list[rng.gen_range(0..list.len())]
}

fn draw_uniform(pool: &SegmentPool, rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(0..pool.len())
}

fn need<'a>(
    pool: Option<&'a SegmentPool>,
    mode: TrainMode,
    what: &str,
) -> Result<&'a SegmentPool> {
    match pool {
        Some(p) if !p.is_empty() => Ok(p),
        _ => Err(DafdError::Train(format!(
            "{mode} requires a non-empty {what} pool"
        ))),
    }
}

/// Builds the ordered batch list for one epoch under the configured mode.
pub fn make_epoch_batches(
    source: Option<&SegmentPool>,
    target: Option<&SegmentPool>,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TrainBatch>> {
    cfg.validate()?;
    let bpd = cfg.batch_per_domain;
    let labeled_row = |pool: &SegmentPool, index: usize, with_domain: Option<usize>| {
        let label = pool.get(index).label.expect("labeled pool");
        BatchItem {
            domain: pool.domain(),
            index,
            fall_target: Some(label.index()),
            domain_target: with_domain,
        }
    };

    match cfg.mode {
        TrainMode::SourceOnly | TrainMode::TargetOnly => {
            let pool = if cfg.mode == TrainMode::SourceOnly {
                need(source, cfg.mode, "source")?
            } else {
                need(target, cfg.mode, "target")?
            };
            if pool.majority_class_count() == 0 {
                return Err(DafdError::Train(format!(
                    "{} requires labeled segments",
                    cfg.mode
                )));
            }
            let n_batches = pool.majority_class_count().div_ceil(bpd);
            Ok((0..n_batches)
                .map(|index| TrainBatch {
                    index,
                    items: (0..bpd)
                        .map(|_| labeled_row(pool, draw_labeled(pool, rng), None))
                        .collect(),
                })
                .collect())
        }
        TrainMode::Dafd | TrainMode::DafdAdl => {
            let src = need(source, cfg.mode, "source")?;
            let tgt = need(target, cfg.mode, "target")?;
            if cfg.mode == TrainMode::DafdAdl && tgt.fall_indices().len() + tgt.adl_indices().len() > 0
            {
                return Err(DafdError::Train(
                    "dafd_adl target pool must be label-masked (use SegmentPool::adl_only)".into(),
                ));
            }
            if src.majority_class_count() == 0 {
                return Err(DafdError::Train("dafd requires labeled source segments".into()));
            }
            let n_batches = src.majority_class_count().div_ceil(bpd);
            Ok((0..n_batches)
                .map(|index| {
                    let mut items: Vec<BatchItem> = (0..bpd)
                        .map(|_| {
                            labeled_row(
                                src,
                                draw_labeled(src, rng),
                                Some(DomainTag::Source.index()),
                            )
                        })
                        .collect();
                    items.extend((0..bpd).map(|_| BatchItem {
                        domain: DomainTag::Target,
                        index: draw_uniform(tgt, rng),
                        fall_target: None,
                        domain_target: Some(DomainTag::Target.index()),
                    }));
                    TrainBatch { index, items }
                })
                .collect())
        }
    }
}
