//! The fall-detection network: a three-stage conv/BN/ReLU/pool feature
//! extractor feeding two parallel two-layer classifier heads, the domain head
//! behind a gradient reversal layer.
//!
//! Temporal shape trace for the 66-sample input:
//! conv 66->68, pool 68->34, conv 34->36, pool 36->18, conv 18->20,
//! pool 20->10; four channels flatten to a 40-dim feature vector.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::layers::{self, BnBatchStats, BN_MOMENTUM};
use super::tensor::Tensor;
use crate::error::{DafdError, Result};

pub const INPUT_CHANNELS: usize = 3;
pub const INPUT_LEN: usize = 66;
pub const CONV_CHANNELS: usize = 4;
pub const KERNEL: usize = 3;
pub const FEATURE_DIM: usize = 40;
pub const HIDDEN_DIM: usize = 50;
pub const NUM_CLASSES: usize = 2;

/// Expected time-axis length after each conv and pool stage.
pub const CONV_LENGTHS: [usize; 3] = [68, 36, 20];
pub const POOL_LENGTHS: [usize; 3] = [34, 18, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// One mixed layer: convolution, batch norm (with running state), ReLU and
/// pooling have no parameters of their own.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvBlockParams {
    pub conv_w: Tensor,
    pub conv_b: Tensor,
    pub gamma: Tensor,
    pub beta: Tensor,
    pub running_mean: Tensor,
    pub running_var: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadParams {
    pub w1: Tensor,
    pub b1: Tensor,
    pub w2: Tensor,
    pub b2: Tensor,
}

/// All learnable parameters plus batch-norm running state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub extractor: [ConvBlockParams; 3],
    pub fall_head: HeadParams,
    pub domain_head: HeadParams,
}

/// Parameter subsets that are optimized independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamGroup {
    Extractor,
    FallHead,
    DomainHead,
}

fn uniform_init(shape: &[usize], fan_in: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let bound = (1.0 / fan_in as f64).sqrt();
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        *v = rng.gen_range(-bound..bound);
    }
    t
}

impl HeadParams {
    fn init(rng: &mut ChaCha8Rng) -> Self {
        HeadParams {
            w1: uniform_init(&[FEATURE_DIM, HIDDEN_DIM], FEATURE_DIM, rng),
            b1: Tensor::zeros(&[HIDDEN_DIM]),
            w2: uniform_init(&[HIDDEN_DIM, NUM_CLASSES], HIDDEN_DIM, rng),
            b2: Tensor::zeros(&[NUM_CLASSES]),
        }
    }
}

impl ModelParams {
    /// Seeded initialization: weights uniform in +-sqrt(1/fan_in), biases 0,
    /// batch-norm gain 1 / shift 0, running stats (0, 1).
    pub fn init(seed: u64) -> Self {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extractor = [INPUT_CHANNELS, CONV_CHANNELS, CONV_CHANNELS].map(|c_in| {
            ConvBlockParams {
                conv_w: uniform_init(&[CONV_CHANNELS, c_in, KERNEL], c_in * KERNEL, &mut rng),
                conv_b: Tensor::zeros(&[CONV_CHANNELS]),
                gamma: Tensor::filled(&[CONV_CHANNELS], 1.0),
                beta: Tensor::zeros(&[CONV_CHANNELS]),
                running_mean: Tensor::zeros(&[CONV_CHANNELS]),
                running_var: Tensor::filled(&[CONV_CHANNELS], 1.0),
            }
        });
        ModelParams {
            extractor,
            fall_head: HeadParams::init(&mut rng),
            domain_head: HeadParams::init(&mut rng),
        }
    }

    /// Learnable tensors of one group, in the fixed checkpoint order.
    pub fn group(&self, group: ParamGroup) -> Vec<&Tensor> {
        match group {
            ParamGroup::Extractor => self
                .extractor
                .iter()
                .flat_map(|l| [&l.conv_w, &l.conv_b, &l.gamma, &l.beta])
                .collect(),
            ParamGroup::FallHead => head_refs(&self.fall_head),
            ParamGroup::DomainHead => head_refs(&self.domain_head),
        }
    }

    pub fn group_mut(&mut self, group: ParamGroup) -> Vec<&mut Tensor> {
        match group {
            ParamGroup::Extractor => self
                .extractor
                .iter_mut()
                .flat_map(|l| [&mut l.conv_w, &mut l.conv_b, &mut l.gamma, &mut l.beta])
                .collect(),
            ParamGroup::FallHead => head_refs_mut(&mut self.fall_head),
            ParamGroup::DomainHead => head_refs_mut(&mut self.domain_head),
        }
    }

    /// `(name, group, tensor)` for every learnable array, in a stable order.
    pub fn named_learnables(&self) -> Vec<(String, ParamGroup, &Tensor)> {
        let mut out = Vec::new();
        for (i, l) in self.extractor.iter().enumerate() {
            out.push((format!("extractor.{i}.conv_w"), ParamGroup::Extractor, &l.conv_w));
            out.push((format!("extractor.{i}.conv_b"), ParamGroup::Extractor, &l.conv_b));
            out.push((format!("extractor.{i}.gamma"), ParamGroup::Extractor, &l.gamma));
            out.push((format!("extractor.{i}.beta"), ParamGroup::Extractor, &l.beta));
        }
        for (prefix, group, head) in [
            ("fall_head", ParamGroup::FallHead, &self.fall_head),
            ("domain_head", ParamGroup::DomainHead, &self.domain_head),
        ] {
            out.push((format!("{prefix}.w1"), group, &head.w1));
            out.push((format!("{prefix}.b1"), group, &head.b1));
            out.push((format!("{prefix}.w2"), group, &head.w2));
            out.push((format!("{prefix}.b2"), group, &head.b2));
        }
        out
    }

    /// Folds the cached batch statistics into the running estimates
    /// (momentum 0.1, unbiased variance).
    pub fn apply_bn_updates(&mut self, cache: &ForwardCache) -> Result<()> {
        if cache.mode != Mode::Train {
            return Err(DafdError::Train(
                "batch-norm update requires a train-mode cache".into(),
            ));
        }
        for (layer, lc) in self.extractor.iter_mut().zip(&cache.layers) {
            let stats = lc.bn.as_ref().expect("train cache carries bn stats");
            let n = (lc.conv_out.shape()[0] * lc.conv_out.shape()[2]) as f64;
            let unbias = if n > 1.0 { n / (n - 1.0) } else { 1.0 };
            for c in 0..CONV_CHANNELS {
                let rm = &mut layer.running_mean.data_mut()[c];
                *rm = (1.0 - BN_MOMENTUM) * *rm + BN_MOMENTUM * stats.mean[c];
                let rv = &mut layer.running_var.data_mut()[c];
                *rv = (1.0 - BN_MOMENTUM) * *rv + BN_MOMENTUM * stats.var[c] * unbias;
            }
        }
        Ok(())
    }
}

fn head_refs(h: &HeadParams) -> Vec<&Tensor> {
    vec![&h.w1, &h.b1, &h.w2, &h.b2]
}

fn head_refs_mut(h: &mut HeadParams) -> Vec<&mut Tensor> {
    vec![&mut h.w1, &mut h.b1, &mut h.w2, &mut h.b2]
}

/// Gradient arrays mirroring one conv block's learnables.
#[derive(Debug, Clone)]
pub struct ConvBlockGrads {
    pub conv_w: Tensor,
    pub conv_b: Tensor,
    pub gamma: Tensor,
    pub beta: Tensor,
}

#[derive(Debug, Clone)]
pub struct HeadGrads {
    pub w1: Tensor,
    pub b1: Tensor,
    pub w2: Tensor,
    pub b2: Tensor,
}

/// Gradients shaped exactly like the learnable part of [`ModelParams`].
#[derive(Debug, Clone)]
pub struct ModelGrads {
    pub extractor: [ConvBlockGrads; 3],
    pub fall_head: HeadGrads,
    pub domain_head: HeadGrads,
}

impl ModelGrads {
    pub fn group(&self, group: ParamGroup) -> Vec<&Tensor> {
        match group {
            ParamGroup::Extractor => self
                .extractor
                .iter()
                .flat_map(|l| [&l.conv_w, &l.conv_b, &l.gamma, &l.beta])
                .collect(),
            ParamGroup::FallHead => {
                vec![&self.fall_head.w1, &self.fall_head.b1, &self.fall_head.w2, &self.fall_head.b2]
            }
            ParamGroup::DomainHead => vec![
                &self.domain_head.w1,
                &self.domain_head.b1,
                &self.domain_head.w2,
                &self.domain_head.b2,
            ],
        }
    }

    /// Same ordering as [`ModelParams::named_learnables`].
    pub fn flat(&self) -> Vec<&Tensor> {
        let mut out = self.group(ParamGroup::Extractor);
        out.extend(self.group(ParamGroup::FallHead));
        out.extend(self.group(ParamGroup::DomainHead));
        out
    }
}

#[derive(Debug, Clone)]
pub struct ConvBlockCache {
    /// Input to this block's convolution.
    pub input: Tensor,
    pub conv_out: Tensor,
    /// Batch statistics (train mode only).
    pub bn: Option<BnBatchStats>,
    /// Post-BN, pre-ReLU activations.
    pub bn_out: Tensor,
    pub relu_out: Tensor,
    pub pool_out: Tensor,
    pub pool_argmax: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct HeadCache {
    pub hidden_pre: Tensor,
    /// Hidden activations after ReLU and dropout: the input to the output layer.
    pub hidden_act: Tensor,
    pub dropout_mask: Option<Tensor>,
    pub logits: Tensor,
}

/// Everything the backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub mode: Mode,
    pub lambda: f64,
    pub batch: usize,
    pub layers: Vec<ConvBlockCache>,
    pub features: Tensor,
    pub fall: HeadCache,
    pub domain: HeadCache,
}

impl ForwardCache {
    /// Signature of every discrete routing decision (ReLU activation signs and
    /// pool argmax picks). Finite-difference checks compare signatures of the
    /// two perturbed forwards to detect kink crossings.
    pub fn routing_signature(&self) -> Vec<u64> {
        let mut sig = Vec::new();
        for lc in &self.layers {
            for &v in lc.bn_out.data() {
                sig.push((v > 0.0) as u64);
            }
            sig.extend(lc.pool_argmax.iter().map(|&i| i as u64));
        }
        for head in [&self.fall, &self.domain] {
            for &v in head.hidden_pre.data() {
                sig.push((v > 0.0) as u64);
            }
        }
        sig
    }
}

pub struct ForwardOutput {
    pub features: Tensor,
    pub fall_logits: Tensor,
    pub domain_logits: Tensor,
    pub cache: ForwardCache,
}

/// Runs the full network on a `[B, 3, 66]` batch.
///
/// `lambda` only parameterizes the gradient reversal in the backward pass; the
/// forward outputs are identical for every `lambda`. `rng` is consumed only by
/// train-mode dropout with a positive rate. The parameters are not mutated;
/// running-stat updates are applied separately via
/// [`ModelParams::apply_bn_updates`].
pub fn forward_pass(
    params: &ModelParams,
    batch: &Tensor,
    lambda: f64,
    dropout: f64,
    mode: Mode,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<ForwardOutput> {
    if batch.shape().len() != 3
        || batch.shape()[1] != INPUT_CHANNELS
        || batch.shape()[2] != INPUT_LEN
    {
        return Err(DafdError::shape(
            "forward_pass",
            format!(
                "expected [B, {INPUT_CHANNELS}, {INPUT_LEN}] input, got {:?}",
                batch.shape()
            ),
        ));
    }
    if lambda < 0.0 {
        return Err(DafdError::InvalidArgument(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let b = batch.shape()[0];

    let mut layers_cache = Vec::with_capacity(3);
    let mut x = batch.clone();
    for (i, layer) in params.extractor.iter().enumerate() {
        let conv_out = layers::conv1d_full(&x, &layer.conv_w, &layer.conv_b)?;
        let (bn_out, bn_stats) = match mode {
            Mode::Train => {
                let (out, stats) = layers::batchnorm_train(&conv_out, &layer.gamma, &layer.beta);
                (out, Some(stats))
            }
            Mode::Eval => (
                layers::batchnorm_eval(
                    &conv_out,
                    &layer.gamma,
                    &layer.beta,
                    &layer.running_mean,
                    &layer.running_var,
                ),
                None,
            ),
        };
        let relu_out = layers::relu(&bn_out);
        let (pool_out, pool_argmax) = layers::maxpool2(&relu_out)?;
        pool_out.ensure_finite(&format!("extractor block {i}"))?;
        layers_cache.push(ConvBlockCache {
            input: x,
            conv_out,
            bn: bn_stats,
            bn_out,
            relu_out,
            pool_out: pool_out.clone(),
            pool_argmax,
        });
        x = pool_out;
    }

    // flatten [B, 4, 10] -> [B, 40], channel-major per sample
    let mut features = Tensor::zeros(&[b, FEATURE_DIM]);
    let last = &layers_cache[2].pool_out;
    for bi in 0..b {
        for c in 0..CONV_CHANNELS {
            for t in 0..POOL_LENGTHS[2] {
                let idx = features.ix2(bi, c * POOL_LENGTHS[2] + t);
                features.data_mut()[idx] = last.at3(bi, c, t);
            }
        }
    }

    let fall = head_forward(&features, &params.fall_head, dropout, mode, &mut rng)?;
    // the reversal layer is the identity here; lambda acts in the backward pass
    let domain_in = layers::grl_forward(&features);
    let domain = head_forward(&domain_in, &params.domain_head, dropout, mode, &mut rng)?;

    fall.logits.ensure_finite("fall head logits")?;
    domain.logits.ensure_finite("domain head logits")?;

    Ok(ForwardOutput {
        features: features.clone(),
        fall_logits: fall.logits.clone(),
        domain_logits: domain.logits.clone(),
        cache: ForwardCache {
            mode,
            lambda,
            batch: b,
            layers: layers_cache,
            features,
            fall,
            domain,
        },
    })
}

fn head_forward(
    features: &Tensor,
    head: &HeadParams,
    dropout: f64,
    mode: Mode,
    rng: &mut Option<&mut ChaCha8Rng>,
) -> Result<HeadCache> {
    let hidden_pre = layers::linear(features, &head.w1, &head.b1)?;
    let hidden_relu = layers::relu(&hidden_pre);
    let (hidden_act, dropout_mask) = match mode {
        Mode::Train if dropout > 0.0 => {
            let r = rng.as_deref_mut().ok_or_else(|| {
                DafdError::InvalidArgument("train-mode dropout requires an rng".into())
            })?;
            let (out, mask) = layers::dropout_train(&hidden_relu, dropout, r)?;
            (out, Some(mask))
        }
        _ => (hidden_relu, None),
    };
    let logits = layers::linear(&hidden_act, &head.w2, &head.b2)?;
    Ok(HeadCache {
        hidden_pre,
        hidden_act,
        dropout_mask,
        logits,
    })
}

/// Relative weights applied to the two loss terms during backpropagation.
/// The default `(1, 1)` realizes the summed training objective.
#[derive(Debug, Clone, Copy)]
pub struct LossWeights {
    pub fall: f64,
    pub domain: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            fall: 1.0,
            domain: 1.0,
        }
    }
}

/// Mean cross-entropy losses computed by [`backward_pass`] before any update.
#[derive(Debug, Clone, Copy, Default)]
pub struct Losses {
    pub fall: f64,
    pub domain: f64,
}

/// Backpropagates the fall loss (over rows with a fall target) and the domain
/// loss (over rows with a domain target) through the cached forward pass.
///
/// The domain gradient reaching the extractor is scaled by `-lambda` (the
/// reversal layer); the domain head's own gradients are left unreversed.
pub fn backward_pass(
    params: &ModelParams,
    cache: &ForwardCache,
    fall_targets: &[Option<usize>],
    domain_targets: &[Option<usize>],
    weights: LossWeights,
) -> Result<(ModelGrads, Losses)> {
    if cache.mode != Mode::Train {
        return Err(DafdError::Train(
            "backward_pass requires a train-mode cache".into(),
        ));
    }
    if fall_targets.len() != cache.batch || domain_targets.len() != cache.batch {
        return Err(DafdError::shape(
            "backward_pass",
            format!(
                "batch {} vs {} fall / {} domain targets",
                cache.batch,
                fall_targets.len(),
                domain_targets.len()
            ),
        ));
    }

    let (loss_fall, mut g_fall_logits, _) =
        layers::softmax_ce_masked(&cache.fall.logits, fall_targets)?;
    let (loss_domain, mut g_domain_logits, _) =
        layers::softmax_ce_masked(&cache.domain.logits, domain_targets)?;
    for g in g_fall_logits.data_mut() {
        *g *= weights.fall;
    }
    for g in g_domain_logits.data_mut() {
        *g *= weights.domain;
    }

    let (g_feat_fall, fall_grads) =
        head_backward(&cache.features, &cache.fall, &params.fall_head, &g_fall_logits);
    let (g_feat_domain, domain_grads) = head_backward(
        &cache.features,
        &cache.domain,
        &params.domain_head,
        &g_domain_logits,
    );

    // gradient reversal: the domain loss reaches the extractor scaled by -lambda
    let g_feat_domain = layers::grl_backward(&g_feat_domain, cache.lambda);
    let mut g_features = g_feat_fall;
    for (a, b) in g_features.data_mut().iter_mut().zip(g_feat_domain.data()) {
        *a += b;
    }

    // un-flatten [B, 40] -> [B, 4, 10]
    let b = cache.batch;
    let mut g_pool = Tensor::zeros(&[b, CONV_CHANNELS, POOL_LENGTHS[2]]);
    for bi in 0..b {
        for c in 0..CONV_CHANNELS {
            for t in 0..POOL_LENGTHS[2] {
                let idx = g_pool.ix3(bi, c, t);
                g_pool.data_mut()[idx] = g_features.at2(bi, c * POOL_LENGTHS[2] + t);
            }
        }
    }

    let mut g_out = g_pool;
    let mut block_grads: Vec<ConvBlockGrads> = Vec::with_capacity(3);
    for (layer, lc) in params.extractor.iter().zip(&cache.layers).rev() {
        let g_relu = layers::maxpool2_backward(lc.relu_out.shape(), &lc.pool_argmax, &g_out);
        let g_bn_out = layers::relu_backward(&lc.bn_out, &g_relu);
        let stats = lc
            .bn
            .as_ref()
            .ok_or_else(|| DafdError::Train("cache missing batch statistics".into()))?;
        let (g_conv_out, g_gamma, g_beta) = layers::batchnorm_backward(stats, &layer.gamma, &g_bn_out);
        let (g_input, g_w, g_b) = layers::conv1d_full_backward(&lc.input, &layer.conv_w, &g_conv_out);
        block_grads.push(ConvBlockGrads {
            conv_w: g_w,
            conv_b: g_b,
            gamma: g_gamma,
            beta: g_beta,
        });
        g_out = g_input;
    }
    block_grads.reverse();
    let extractor: [ConvBlockGrads; 3] = block_grads
        .try_into()
        .expect("exactly three extractor blocks");

    Ok((
        ModelGrads {
            extractor,
            fall_head: fall_grads,
            domain_head: domain_grads,
        },
        Losses {
            fall: loss_fall,
            domain: loss_domain,
        },
    ))
}

fn head_backward(
    features: &Tensor,
    cache: &HeadCache,
    head: &HeadParams,
    g_logits: &Tensor,
) -> (Tensor, HeadGrads) {
    let (g_hidden_act, g_w2, g_b2) = layers::linear_backward(&cache.hidden_act, &head.w2, g_logits);
    let g_hidden_relu = match &cache.dropout_mask {
        Some(mask) => {
            let mut g = g_hidden_act;
            for (v, m) in g.data_mut().iter_mut().zip(mask.data()) {
                *v *= m;
            }
            g
        }
        None => g_hidden_act,
    };
    let g_hidden_pre = layers::relu_backward(&cache.hidden_pre, &g_hidden_relu);
    let (g_features, g_w1, g_b1) = layers::linear_backward(features, &head.w1, &g_hidden_pre);
    (
        g_features,
        HeadGrads {
            w1: g_w1,
            b1: g_b1,
            w2: g_w2,
            b2: g_b2,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn random_batch(b: usize, seed: u64) -> Tensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tensor::zeros(&[b, INPUT_CHANNELS, INPUT_LEN]);
        for v in t.data_mut() {
            *v = rng.gen_range(0.0..1.0);
        }
        t
    }

    #[test]
    fn forward_shapes_match_architecture() {
        let params = ModelParams::init(0);
        let batch = random_batch(8, 1);
        let out = forward_pass(&params, &batch, 1.0, 0.0, Mode::Eval, None).unwrap();
        assert_eq!(out.features.shape(), &[8, FEATURE_DIM]);
        assert_eq!(out.fall_logits.shape(), &[8, NUM_CLASSES]);
        assert_eq!(out.domain_logits.shape(), &[8, NUM_CLASSES]);
        for (i, lc) in out.cache.layers.iter().enumerate() {
            assert_eq!(lc.conv_out.shape()[2], CONV_LENGTHS[i]);
            assert_eq!(lc.pool_out.shape()[2], POOL_LENGTHS[i]);
        }
    }

    #[test]
    fn eval_forward_is_deterministic() {
        let params = ModelParams::init(3);
        let batch = random_batch(4, 2);
        let a = forward_pass(&params, &batch, 1.0, 0.5, Mode::Eval, None).unwrap();
        let b = forward_pass(&params, &batch, 1.0, 0.5, Mode::Eval, None).unwrap();
        assert_eq!(a.fall_logits.data(), b.fall_logits.data());
        assert_eq!(a.domain_logits.data(), b.domain_logits.data());
    }

    #[test]
    fn lambda_does_not_affect_forward() {
        let params = ModelParams::init(5);
        let batch = random_batch(4, 9);
        let mut rng_a = ChaCha8Rng::seed_from_u64(11);
        let mut rng_b = rng_a.clone();
        let a = forward_pass(&params, &batch, 0.0, 0.2, Mode::Train, Some(&mut rng_a)).unwrap();
        let b = forward_pass(&params, &batch, 1.0, 0.2, Mode::Train, Some(&mut rng_b)).unwrap();
        assert_eq!(a.fall_logits.data(), b.fall_logits.data());
        assert_eq!(a.domain_logits.data(), b.domain_logits.data());
        assert_eq!(a.features.data(), b.features.data());
    }

    #[test]
    fn backward_gradients_match_parameter_shapes() {
        let params = ModelParams::init(7);
        let batch = random_batch(4, 4);
        let out = forward_pass(&params, &batch, 1.0, 0.0, Mode::Train, None).unwrap();
        let fall_t = vec![Some(0), Some(1), Some(0), Some(1)];
        let domain_t = vec![Some(0), Some(0), Some(1), Some(1)];
        let (grads, losses) =
            backward_pass(&params, &out.cache, &fall_t, &domain_t, LossWeights::default())
                .unwrap();
        assert!(losses.fall > 0.0 && losses.domain > 0.0);
        for group in [ParamGroup::Extractor, ParamGroup::FallHead, ParamGroup::DomainHead] {
            for (p, g) in params.group(group).iter().zip(grads.group(group)) {
                assert_eq!(p.shape(), g.shape());
            }
        }
    }

    #[test]
    fn lambda_zero_blocks_domain_gradient_into_extractor() {
        let params = ModelParams::init(2);
        let batch = random_batch(4, 8);
        let out = forward_pass(&params, &batch, 0.0, 0.0, Mode::Train, None).unwrap();
        let fall_t = vec![None; 4];
        let domain_t = vec![Some(0), Some(0), Some(1), Some(1)];
        let (grads, _) =
            backward_pass(&params, &out.cache, &fall_t, &domain_t, LossWeights::default())
                .unwrap();
        for g in grads.group(ParamGroup::Extractor) {
            assert!(g.data().iter().all(|&v| v == 0.0));
        }
        // the domain head itself still learns
        let dh: f64 = grads
            .group(ParamGroup::DomainHead)
            .iter()
            .map(|t| t.data().iter().map(|v| v.abs()).sum::<f64>())
            .sum();
        assert!(dh > 0.0);
    }

    #[test]
    fn reversal_scales_extractor_gradient_by_minus_lambda() {
        // domain-only backward at lambda vs the unreversed run: the extractor
        // gradients must differ by exactly the factor -lambda
        let params = ModelParams::init(6);
        let batch = random_batch(4, 14);
        let domain_t = vec![Some(0), Some(1), Some(0), Some(1)];
        let fall_t = vec![None; 4];
        let weights = LossWeights {
            fall: 0.0,
            domain: 1.0,
        };
        let lambda = 1.3;
        let fwd = |lam: f64| forward_pass(&params, &batch, lam, 0.0, Mode::Train, None).unwrap();
        let (g_rev, _) =
            backward_pass(&params, &fwd(lambda).cache, &fall_t, &domain_t, weights).unwrap();
        // lambda = 1 with an extra manual sign flip reproduces the identity
        // (unreversed) configuration
        let (g_unit, _) =
            backward_pass(&params, &fwd(1.0).cache, &fall_t, &domain_t, weights).unwrap();
        for (r, u) in g_rev
            .group(ParamGroup::Extractor)
            .iter()
            .zip(g_unit.group(ParamGroup::Extractor))
        {
            for (a, b) in r.data().iter().zip(u.data()) {
                let identity = -b; // undo the -1 scaling of the lambda=1 run
                assert!(
                    (*a - (-lambda) * identity).abs() <= 1e-15 * identity.abs().max(1.0),
                    "reversed {a} vs identity {identity}"
                );
            }
        }
        // domain-head gradients are identical regardless of lambda
        for (r, u) in g_rev
            .group(ParamGroup::DomainHead)
            .iter()
            .zip(g_unit.group(ParamGroup::DomainHead))
        {
            assert_eq!(r.data(), u.data());
        }
    }

    #[test]
    fn train_forward_with_dropout_is_reproducible_with_same_rng() {
        let params = ModelParams::init(1);
        let batch = random_batch(4, 3);
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        let oa = forward_pass(&params, &batch, 1.0, 0.5, Mode::Train, Some(&mut a)).unwrap();
        let ob = forward_pass(&params, &batch, 1.0, 0.5, Mode::Train, Some(&mut b)).unwrap();
        assert_eq!(oa.fall_logits.data(), ob.fall_logits.data());
    }

    #[test]
    fn bn_running_stats_move_toward_batch_stats() {
        let mut params = ModelParams::init(4);
        let batch = random_batch(6, 5);
        let out = forward_pass(&params, &batch, 1.0, 0.0, Mode::Train, None).unwrap();
        let before = params.extractor[0].running_mean.clone();
        params.apply_bn_updates(&out.cache).unwrap();
        let after = &params.extractor[0].running_mean;
        assert_ne!(before.data(), after.data());
        for v in params.extractor.iter().flat_map(|l| l.running_var.data()) {
            assert!(*v >= 0.0);
        }
    }
}
