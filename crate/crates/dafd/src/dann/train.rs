//! The adversarial training step, validation-driven early stopping, and the
//! full `fit` loop returning the best-epoch checkpoint.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::batch::{make_epoch_batches, TrainBatch};
use super::pool::SegmentPool;
use super::{Hyperparams, TrainConfig, TrainMode};
use crate::error::{DafdError, Result};
use crate::ingest::Class;
use crate::nn::{
    adam_step, backward_pass, forward_pass, layers::softmax_ce_masked, LossWeights, Mode,
    ModelParams, OptimizerState, ParamGroup, Tensor, INPUT_CHANNELS, INPUT_LEN,
};
use crate::rng::{derive_seed, stream};
use crate::signal::Segment;

/// L2 weight decay applied through Adam on every step.
pub const WEIGHT_DECAY: f64 = 0.01;

// rng-stream salts within one training run
const SALT_INIT: u64 = 1;
const SALT_DROPOUT: u64 = 2;
const SALT_SPLIT: u64 = 3;
const SALT_BATCHES: u64 = 4;

/// Loss terms of one step or one evaluation pass.
/// `loss_total = loss_fall + loss_domain` always.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossBreakdown {
    pub loss_fall: f64,
    pub loss_domain: f64,
    pub loss_total: f64,
}

impl LossBreakdown {
    pub fn new(loss_fall: f64, loss_domain: f64) -> Self {
        LossBreakdown {
            loss_fall,
            loss_domain,
            loss_total: loss_fall + loss_domain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train: LossBreakdown,
    pub val: LossBreakdown,
}

#[derive(Debug, Clone, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch with the lowest validation total loss.
    pub best_epoch: usize,
    pub stopped_epoch: usize,
}

/// A model under training: parameters, per-group Adam state, and the dropout
/// random stream. Cloning yields an independent but identical trainer.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub params: ModelParams,
    pub opt: OptimizerState,
    pub rng: ChaCha8Rng,
}

impl TrainState {
    pub fn new(init_seed: u64, dropout_seed: u64) -> Self {
        let params = ModelParams::init(init_seed);
        let opt = OptimizerState::for_model(&params);
        TrainState {
            params,
            opt,
            rng: stream(dropout_seed, SALT_DROPOUT),
        }
    }
}

/// One training step: forward in train mode, backward through the reversal
/// layer, batch-norm running-stat update, then one Adam step per parameter
/// group that received gradient. Returns the pre-update losses.
pub fn train_step(
    state: &mut TrainState,
    source: Option<&SegmentPool>,
    target: Option<&SegmentPool>,
    batch: &TrainBatch,
    hp: &Hyperparams,
) -> Result<LossBreakdown> {
    let (input, fall_targets, domain_targets) = batch.materialize(source, target)?;
    let out = forward_pass(
        &state.params,
        &input,
        hp.lambda,
        hp.dropout,
        Mode::Train,
        Some(&mut state.rng),
    )?;
    let (grads, losses) = backward_pass(
        &state.params,
        &out.cache,
        &fall_targets,
        &domain_targets,
        LossWeights::default(),
    )?;
    let breakdown = LossBreakdown::new(losses.fall, losses.domain);
    if !breakdown.loss_total.is_finite() {
        return Err(DafdError::Train(format!(
            "non-finite loss at batch {}: fall={} domain={}",
            batch.index, losses.fall, losses.domain
        )));
    }
    state.params.apply_bn_updates(&out.cache)?;

    let has_domain = domain_targets.iter().any(Option::is_some);
    let groups: &[ParamGroup] = if has_domain {
        &[ParamGroup::Extractor, ParamGroup::FallHead, ParamGroup::DomainHead]
    } else {
        &[ParamGroup::Extractor, ParamGroup::FallHead]
    };
    for &group in groups {
        let opt = match group {
            ParamGroup::Extractor => &mut state.opt.extractor,
            ParamGroup::FallHead => &mut state.opt.fall_head,
            ParamGroup::DomainHead => &mut state.opt.domain_head,
        };
        let grad_refs = grads.group(group);
        let mut param_refs = state.params.group_mut(group);
        adam_step(&mut param_refs, &grad_refs, opt, hp.lr, WEIGHT_DECAY)?;
    }
    Ok(breakdown)
}

/// Early-stopping state machine: stop after `patience` consecutive epochs
/// without a strictly lower validation loss.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best_loss: f64,
    best_epoch: usize,
    since_improvement: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best_loss: f64::INFINITY,
            best_epoch: 0,
            since_improvement: 0,
        }
    }

    /// Feeds one validation loss (1-based epoch). Returns `true` when the
    /// epoch improved on the best seen so far.
    pub fn observe(&mut self, epoch: usize, val_loss: f64) -> bool {
        if val_loss < self.best_loss {
            self.best_loss = val_loss;
            self.best_epoch = epoch;
            self.since_improvement = 0;
            true
        } else {
            self.since_improvement += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.since_improvement >= self.patience
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best_loss
    }
}

pub struct FitResult {
    /// Parameters at the best validation epoch.
    pub params: ModelParams,
    /// Optimizer state snapshotted at the same epoch.
    pub opt: OptimizerState,
    pub history: TrainHistory,
    pub hp: Hyperparams,
}

/// Builds the `[N, 3, 66]` tensor for a list of segments.
pub fn segments_to_tensor(segments: &[&Segment]) -> Result<Tensor> {
    let mut input = Tensor::zeros(&[segments.len(), INPUT_CHANNELS, INPUT_LEN]);
    for (bi, seg) in segments.iter().enumerate() {
        if seg.values.len() != INPUT_LEN {
            return Err(DafdError::shape(
                "segments_to_tensor",
                format!("segment {} has {} rows", seg.trial_id, seg.values.len()),
            ));
        }
        for (t, row) in seg.values.iter().enumerate() {
            for c in 0..INPUT_CHANNELS {
                let idx = input.ix3(bi, c, t);
                input.data_mut()[idx] = row[c];
            }
        }
    }
    Ok(input)
}

/// Eval-mode fall-head predictions for a list of segments.
pub fn predict(params: &ModelParams, segments: &[&Segment]) -> Result<Vec<Class>> {
    let mut out = Vec::with_capacity(segments.len());
    for chunk in segments.chunks(64) {
        let input = segments_to_tensor(chunk)?;
        let fwd = forward_pass(params, &input, 0.0, 0.0, Mode::Eval, None)?;
        for bi in 0..chunk.len() {
            let fall = fwd.fall_logits.at2(bi, 1) > fwd.fall_logits.at2(bi, 0);
            out.push(if fall { Class::Fall } else { Class::Adl });
        }
    }
    Ok(out)
}

/// Mean losses over a validation set, eval-mode forward only. The fall loss
/// runs over labeled rows, the domain loss over all rows of both pools when
/// the mode trains the domain head.
fn validation_losses(
    params: &ModelParams,
    val_source: &SegmentPool,
    val_target: Option<&SegmentPool>,
    mode: TrainMode,
) -> Result<LossBreakdown> {
    struct Sums {
        fall_loss: f64,
        fall_n: usize,
        domain_loss: f64,
        domain_n: usize,
    }
    let mut sums = Sums {
        fall_loss: 0.0,
        fall_n: 0,
        domain_loss: 0.0,
        domain_n: 0,
    };
    let mut run = |pool: &SegmentPool, with_domain: bool| -> Result<()> {
        let segments: Vec<&Segment> = pool.segments().iter().collect();
        for chunk in segments.chunks(64) {
            let input = segments_to_tensor(chunk)?;
            let fwd = forward_pass(params, &input, 0.0, 0.0, Mode::Eval, None)?;
            let fall_targets: Vec<Option<usize>> = chunk
                .iter()
                .map(|s| s.label.map(|l| l.index()))
                .collect();
            let (loss, _, n) = softmax_ce_masked(&fwd.fall_logits, &fall_targets)?;
            sums.fall_loss += loss * n as f64;
            sums.fall_n += n;
            if with_domain {
                let domain_targets: Vec<Option<usize>> =
                    chunk.iter().map(|s| Some(s.domain.index())).collect();
                let (loss, _, n) = softmax_ce_masked(&fwd.domain_logits, &domain_targets)?;
                sums.domain_loss += loss * n as f64;
                sums.domain_n += n;
            }
        }
        Ok(())
    };
    let with_domain = mode.uses_domain_loss();
    run(val_source, with_domain)?;
    if let Some(tgt) = val_target {
        if with_domain {
            run(tgt, true)?;
        }
    }
    let fall = if sums.fall_n > 0 {
        sums.fall_loss / sums.fall_n as f64
    } else {
        0.0
    };
    let domain = if sums.domain_n > 0 {
        sums.domain_loss / sums.domain_n as f64
    } else {
        0.0
    };
    Ok(LossBreakdown::new(fall, domain))
}

/// Splits off a validation slice: `val_fraction` of the labeled pool's
/// subjects, plus an equal count of target segments for the domain term.
fn split_validation(
    labeled: &SegmentPool,
    other: Option<&SegmentPool>,
    cfg: &TrainConfig,
) -> Result<(SegmentPool, SegmentPool, Option<(SegmentPool, SegmentPool)>)> {
    let subjects = labeled.subject_ids();
    if subjects.len() < 2 {
        return Err(DafdError::Train(format!(
            "need at least 2 subjects in the labeled pool to split validation, got {}",
            subjects.len()
        )));
    }
    let mut rng = stream(cfg.seed, SALT_SPLIT);
    let mut shuffled = subjects.clone();
    shuffled.shuffle(&mut rng);
    let n_val = ((subjects.len() as f64 * cfg.val_fraction).round() as usize)
        .clamp(1, subjects.len() - 1);
    let held: BTreeSet<String> = shuffled.into_iter().take(n_val).collect();
    let (train_pool, val_pool) = labeled.split_by_subjects(&held);

    let other_split = match other {
        Some(pool) if cfg.mode.uses_domain_loss() => {
            let n_hold = val_pool.len().min(pool.len().saturating_sub(1)).max(1);
            let mut indices: Vec<usize> = (0..pool.len()).collect();
            indices.shuffle(&mut rng);
            let held: BTreeSet<usize> = indices.into_iter().take(n_hold).collect();
            Some(pool.split_by_indices(&held))
        }
        _ => None,
    };
    Ok((train_pool, val_pool, other_split))
}

/// Trains under the configured mode with early stopping and returns the
/// best-epoch checkpoint plus the full loss history.
///
/// Selection score: plain validation `loss_total` for the single-domain
/// modes. For the adversarial modes, the score is the objective the model
/// actually descends, `loss_fall - lambda * loss_domain` (the extractor
/// maximizes domain confusion, so a low plain total marks an epoch where the
/// domain classifier is winning, i.e. the features are still
/// domain-revealing; selecting on it reliably returns pre-adaptation
/// checkpoints). The reported history keeps `loss_total = fall + domain`.
pub fn fit(
    source: Option<&SegmentPool>,
    target: Option<&SegmentPool>,
    hp: &Hyperparams,
    cfg: &TrainConfig,
) -> Result<FitResult> {
    cfg.validate()?;
    // the labeled pool drives the subject split; in target_only mode that is
    // the target pool
    let labeled = match cfg.mode {
        TrainMode::TargetOnly => target
            .ok_or_else(|| DafdError::Train("target_only requires a target pool".into()))?,
        _ => source
            .ok_or_else(|| DafdError::Train(format!("{} requires a source pool", cfg.mode)))?,
    };
    let adapt_target = if cfg.mode.uses_domain_loss() { target } else { None };
    let (train_labeled, val_labeled, target_split) =
        split_validation(labeled, adapt_target, cfg)?;

    let (batch_source, batch_target): (Option<&SegmentPool>, Option<&SegmentPool>) =
        match cfg.mode {
            TrainMode::TargetOnly => (None, Some(&train_labeled)),
            TrainMode::SourceOnly => (Some(&train_labeled), None),
            TrainMode::Dafd | TrainMode::DafdAdl => (
                Some(&train_labeled),
                target_split.as_ref().map(|(train, _)| train),
            ),
        };
    let val_target: Option<&SegmentPool> = target_split.as_ref().map(|(_, val)| val);

    let mut state = TrainState::new(derive_seed(cfg.seed, SALT_INIT), cfg.seed);
    let mut batch_rng = stream(cfg.seed, SALT_BATCHES);
    let mut stopper = EarlyStopping::new(cfg.patience);
    let mut best_params = state.params.clone();
    let mut best_opt = state.opt.clone();
    let mut history = TrainHistory::default();

    for epoch in 1..=cfg.max_epochs {
        let batches = make_epoch_batches(batch_source, batch_target, cfg, &mut batch_rng)?;
        let mut fall_sum = 0.0;
        let mut domain_sum = 0.0;
        for batch in &batches {
            let losses = train_step(&mut state, batch_source, batch_target, batch, hp)?;
            fall_sum += losses.loss_fall;
            domain_sum += losses.loss_domain;
        }
        let n = batches.len().max(1) as f64;
        let train_losses = LossBreakdown::new(fall_sum / n, domain_sum / n);
        let val_losses = validation_losses(&state.params, &val_labeled, val_target, cfg.mode)?;
        history.epochs.push(EpochRecord {
            epoch,
            train: train_losses,
            val: val_losses,
        });
        let score = if cfg.mode.uses_domain_loss() {
            val_losses.loss_fall - hp.lambda * val_losses.loss_domain
        } else {
            val_losses.loss_total
        };
        if stopper.observe(epoch, score) {
            best_params = state.params.clone();
            best_opt = state.opt.clone();
        }
        history.stopped_epoch = epoch;
        if stopper.should_stop() {
            break;
        }
    }
    history.best_epoch = stopper.best_epoch();
    Ok(FitResult {
        params: best_params,
        opt: best_opt,
        history,
        hp: *hp,
    })
}
