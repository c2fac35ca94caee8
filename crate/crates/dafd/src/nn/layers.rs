//! Layer primitives with hand-written forward and backward passes.
//!
//! Layout conventions: activations are `[B, C, L]` (batch, channel, time) in
//! the extractor and `[B, N]` in the heads. Conv weights are `[C_out, C_in, K]`,
//! linear weights `[N_in, N_out]`. All backward functions take the upstream
//! gradient with the same shape as the forward output.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::tensor::Tensor;
use crate::error::{DafdError, Result};

pub const BN_EPS: f64 = 1e-5;
pub const BN_MOMENTUM: f64 = 0.1;

/// 1-D convolution with full zero padding (pad = kernel - 1 = 2 per side),
/// stride 1: output length is `L + kernel - 1`.
pub fn conv1d_full(x: &Tensor, w: &Tensor, b: &Tensor) -> Result<Tensor> {
    let (batch, c_in, len) = dims3(x, "conv1d_full input")?;
    let (c_out, wc_in, kernel) = dims3(w, "conv1d_full weights")?;
    if wc_in != c_in || b.shape() != [c_out] {
        return Err(DafdError::shape(
            "conv1d_full",
            format!(
                "input {:?} incompatible with weights {:?} / bias {:?}",
                x.shape(),
                w.shape(),
                b.shape()
            ),
        ));
    }
    let pad = kernel - 1;
    let out_len = len + kernel - 1;
    let mut out = Tensor::zeros(&[batch, c_out, out_len]);
    for bi in 0..batch {
        for co in 0..c_out {
            for t in 0..out_len {
                let mut acc = b.data()[co];
                for ci in 0..c_in {
                    for k in 0..kernel {
                        // position in the padded input is t + k; the padded
                        // input maps to the raw input at t + k - pad
                        let src = (t + k) as isize - pad as isize;
                        if src >= 0 && (src as usize) < len {
                            acc += w.at3(co, ci, k) * x.at3(bi, ci, src as usize);
                        }
                    }
                }
                let idx = out.ix3(bi, co, t);
                out.data_mut()[idx] = acc;
            }
        }
    }
    Ok(out)
}

/// Gradients of [`conv1d_full`]: returns `(d_input, d_weights, d_bias)`.
pub fn conv1d_full_backward(x: &Tensor, w: &Tensor, g_out: &Tensor) -> (Tensor, Tensor, Tensor) {
    let [batch, c_in, len] = [x.shape()[0], x.shape()[1], x.shape()[2]];
    let [c_out, _, kernel] = [w.shape()[0], w.shape()[1], w.shape()[2]];
    let pad = kernel - 1;
    let out_len = g_out.shape()[2];
    let mut gx = Tensor::zeros(x.shape());
    let mut gw = Tensor::zeros(w.shape());
    let mut gb = Tensor::zeros(&[c_out]);
    for bi in 0..batch {
        for co in 0..c_out {
            for t in 0..out_len {
                let g = g_out.at3(bi, co, t);
                gb.data_mut()[co] += g;
                for ci in 0..c_in {
                    for k in 0..kernel {
                        let src = (t + k) as isize - pad as isize;
                        if src >= 0 && (src as usize) < len {
                            let src = src as usize;
                            let wi = gw.ix3(co, ci, k);
                            gw.data_mut()[wi] += g * x.at3(bi, ci, src);
                            let xi = gx.ix3(bi, ci, src);
                            gx.data_mut()[xi] += g * w.at3(co, ci, k);
                        }
                    }
                }
            }
        }
    }
    (gx, gw, gb)
}

/// Per-channel batch statistics captured during a train-mode forward.
#[derive(Debug, Clone)]
pub struct BnBatchStats {
    pub mean: Vec<f64>,
    /// Biased variance (divides by the element count).
    pub var: Vec<f64>,
    pub inv_std: Vec<f64>,
    pub x_hat: Tensor,
}

/// Train-mode batch normalization over batch x length per channel.
pub fn batchnorm_train(x: &Tensor, gamma: &Tensor, beta: &Tensor) -> (Tensor, BnBatchStats) {
    let [batch, channels, len] = [x.shape()[0], x.shape()[1], x.shape()[2]];
    let n = (batch * len) as f64;
    let mut mean = vec![0.0; channels];
    let mut var = vec![0.0; channels];
    for c in 0..channels {
        let mut s = 0.0;
        for bi in 0..batch {
            for t in 0..len {
                s += x.at3(bi, c, t);
            }
        }
        mean[c] = s / n;
        let mut sq = 0.0;
        for bi in 0..batch {
            for t in 0..len {
                let d = x.at3(bi, c, t) - mean[c];
                sq += d * d;
            }
        }
        var[c] = sq / n;
    }
    let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + BN_EPS).sqrt()).collect();
    let mut x_hat = Tensor::zeros(x.shape());
    let mut out = Tensor::zeros(x.shape());
    for bi in 0..batch {
        for c in 0..channels {
            for t in 0..len {
                let idx = x.ix3(bi, c, t);
                let xh = (x.data()[idx] - mean[c]) * inv_std[c];
                x_hat.data_mut()[idx] = xh;
                out.data_mut()[idx] = gamma.data()[c] * xh + beta.data()[c];
            }
        }
    }
    let stats = BnBatchStats {
        mean,
        var,
        inv_std,
        x_hat,
    };
    (out, stats)
}

/// Eval-mode batch normalization: a fixed affine map from the running stats.
pub fn batchnorm_eval(
    x: &Tensor,
    gamma: &Tensor,
    beta: &Tensor,
    running_mean: &Tensor,
    running_var: &Tensor,
) -> Tensor {
    let [batch, channels, len] = [x.shape()[0], x.shape()[1], x.shape()[2]];
    let mut out = Tensor::zeros(x.shape());
    for c in 0..channels {
        let inv_std = 1.0 / (running_var.data()[c] + BN_EPS).sqrt();
        let scale = gamma.data()[c] * inv_std;
        let shift = beta.data()[c] - scale * running_mean.data()[c];
        for bi in 0..batch {
            for t in 0..len {
                let idx = x.ix3(bi, c, t);
                out.data_mut()[idx] = scale * x.data()[idx] + shift;
            }
        }
    }
    out
}

/// Backward of train-mode batch norm; returns `(d_input, d_gamma, d_beta)`.
pub fn batchnorm_backward(
    stats: &BnBatchStats,
    gamma: &Tensor,
    g_out: &Tensor,
) -> (Tensor, Tensor, Tensor) {
    let [batch, channels, len] = [g_out.shape()[0], g_out.shape()[1], g_out.shape()[2]];
    let n = (batch * len) as f64;
    let mut g_gamma = Tensor::zeros(&[channels]);
    let mut g_beta = Tensor::zeros(&[channels]);
    let mut gx = Tensor::zeros(g_out.shape());
    for c in 0..channels {
        let mut sum_g = 0.0;
        let mut sum_g_xhat = 0.0;
        for bi in 0..batch {
            for t in 0..len {
                let idx = g_out.ix3(bi, c, t);
                let g = g_out.data()[idx];
                sum_g += g;
                sum_g_xhat += g * stats.x_hat.data()[idx];
            }
        }
        g_beta.data_mut()[c] = sum_g;
        g_gamma.data_mut()[c] = sum_g_xhat;
        let mean_g = sum_g / n;
        let mean_g_xhat = sum_g_xhat / n;
        let scale = gamma.data()[c] * stats.inv_std[c];
        for bi in 0..batch {
            for t in 0..len {
                let idx = g_out.ix3(bi, c, t);
                let g = g_out.data()[idx];
                gx.data_mut()[idx] =
                    scale * (g - mean_g - stats.x_hat.data()[idx] * mean_g_xhat);
            }
        }
    }
    (gx, g_gamma, g_beta)
}

/// Elementwise `max(0, v)`.
pub fn relu(x: &Tensor) -> Tensor {
    let mut out = x.clone();
    for v in out.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    out
}

/// ReLU gradient: passes where the pre-activation is strictly positive.
/// The subgradient at exactly 0 is taken as 0.
pub fn relu_backward(pre: &Tensor, g_out: &Tensor) -> Tensor {
    let mut gx = g_out.clone();
    for (g, p) in gx.data_mut().iter_mut().zip(pre.data()) {
        if *p <= 0.0 {
            *g = 0.0;
        }
    }
    gx
}

/// Max pooling with kernel 2 and stride 2 over the time axis; a trailing odd
/// element is dropped. Returns the output and the flat argmax index (into the
/// input buffer) per output element, first element winning ties.
pub fn maxpool2(x: &Tensor) -> Result<(Tensor, Vec<usize>)> {
    let [batch, channels, len] = [x.shape()[0], x.shape()[1], x.shape()[2]];
    if len < 2 {
        return Err(DafdError::shape(
            "maxpool2",
            format!("time axis must have at least 2 samples, got {len}"),
        ));
    }
    let out_len = len / 2;
    let mut out = Tensor::zeros(&[batch, channels, out_len]);
    let mut argmax = vec![0usize; batch * channels * out_len];
    for bi in 0..batch {
        for c in 0..channels {
            for t in 0..out_len {
                let i0 = x.ix3(bi, c, 2 * t);
                let i1 = i0 + 1;
                let (best, idx) = if x.data()[i1] > x.data()[i0] {
                    (x.data()[i1], i1)
                } else {
                    (x.data()[i0], i0)
                };
                let oi = out.ix3(bi, c, t);
                out.data_mut()[oi] = best;
                argmax[oi] = idx;
            }
        }
    }
    Ok((out, argmax))
}

/// Routes each output gradient to its recorded argmax input position.
pub fn maxpool2_backward(in_shape: &[usize], argmax: &[usize], g_out: &Tensor) -> Tensor {
    let mut gx = Tensor::zeros(in_shape);
    for (oi, &src) in argmax.iter().enumerate() {
        gx.data_mut()[src] += g_out.data()[oi];
    }
    gx
}

/// Fully connected layer `x W + b` with `x: [B, n]`, `w: [n, m]`, `b: [m]`.
pub fn linear(x: &Tensor, w: &Tensor, b: &Tensor) -> Result<Tensor> {
    let (batch, n) = dims2(x, "linear input")?;
    let (wn, m) = dims2(w, "linear weights")?;
    if wn != n || b.shape() != [m] {
        return Err(DafdError::shape(
            "linear",
            format!(
                "input {:?} incompatible with weights {:?} / bias {:?}",
                x.shape(),
                w.shape(),
                b.shape()
            ),
        ));
    }
    let mut out = Tensor::zeros(&[batch, m]);
    for bi in 0..batch {
        for j in 0..m {
            let mut acc = b.data()[j];
            for i in 0..n {
                acc += x.at2(bi, i) * w.at2(i, j);
            }
            let idx = out.ix2(bi, j);
            out.data_mut()[idx] = acc;
        }
    }
    Ok(out)
}

/// Gradients of [`linear`]: returns `(d_input, d_weights, d_bias)`.
pub fn linear_backward(x: &Tensor, w: &Tensor, g_out: &Tensor) -> (Tensor, Tensor, Tensor) {
    let (batch, n) = (x.shape()[0], x.shape()[1]);
    let m = w.shape()[1];
    let mut gx = Tensor::zeros(x.shape());
    let mut gw = Tensor::zeros(w.shape());
    let mut gb = Tensor::zeros(&[m]);
    for bi in 0..batch {
        for j in 0..m {
            let g = g_out.at2(bi, j);
            gb.data_mut()[j] += g;
            for i in 0..n {
                let wi = gw.ix2(i, j);
                gw.data_mut()[wi] += g * x.at2(bi, i);
                let xi = gx.ix2(bi, i);
                gx.data_mut()[xi] += g * w.at2(i, j);
            }
        }
    }
    (gx, gw, gb)
}

/// Inverted dropout: zeroes each element with probability `rate` and scales
/// survivors by `1/(1-rate)`. Returns the output and the applied scale mask.
pub fn dropout_train(x: &Tensor, rate: f64, rng: &mut ChaCha8Rng) -> Result<(Tensor, Tensor)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(DafdError::InvalidArgument(format!(
            "dropout rate must be in [0, 1), got {rate}"
        )));
    }
    let mut mask = Tensor::zeros(x.shape());
    let keep_scale = 1.0 / (1.0 - rate);
    for m in mask.data_mut() {
        *m = if rng.gen::<f64>() < rate { 0.0 } else { keep_scale };
    }
    let mut out = x.clone();
    for (v, m) in out.data_mut().iter_mut().zip(mask.data()) {
        *v *= m;
    }
    Ok((out, mask))
}

/// Gradient reversal, forward half: the exact identity.
pub fn grl_forward(x: &Tensor) -> Tensor {
    x.clone()
}

/// Gradient reversal, backward half: scales the incoming gradient by `-lambda`.
pub fn grl_backward(g: &Tensor, lambda: f64) -> Tensor {
    let mut out = g.clone();
    for v in out.data_mut() {
        *v *= -lambda;
    }
    out
}

/// Row-wise softmax with max subtraction.
pub fn softmax(logits: &Tensor) -> Tensor {
    let (batch, classes) = (logits.shape()[0], logits.shape()[1]);
    let mut out = Tensor::zeros(logits.shape());
    for bi in 0..batch {
        let row = &logits.data()[bi * classes..(bi + 1) * classes];
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for &v in row {
            denom += (v - max).exp();
        }
        for j in 0..classes {
            out.data_mut()[bi * classes + j] = (row[j] - max).exp() / denom;
        }
    }
    out
}

/// Mean cross-entropy over the batch plus the logit gradient
/// `(softmax - onehot) / B`.
pub fn softmax_ce(logits: &Tensor, targets: &[usize]) -> Result<(f64, Tensor)> {
    let wrapped: Vec<Option<usize>> = targets.iter().map(|&t| Some(t)).collect();
    let (loss, grad, _) = softmax_ce_masked(logits, &wrapped)?;
    Ok((loss, grad))
}

/// Cross-entropy restricted to rows with a target. The loss is the mean over
/// labeled rows; unlabeled rows receive zero gradient. Returns
/// `(loss, grad_logits, labeled_count)`; with no labeled rows the loss is 0.
pub fn softmax_ce_masked(
    logits: &Tensor,
    targets: &[Option<usize>],
) -> Result<(f64, Tensor, usize)> {
    let (batch, classes) = dims2(logits, "softmax_ce logits")?;
    if targets.len() != batch {
        return Err(DafdError::shape(
            "softmax_ce",
            format!("{} logit rows but {} targets", batch, targets.len()),
        ));
    }
    let labeled = targets.iter().flatten().count();
    let mut grad = Tensor::zeros(logits.shape());
    if labeled == 0 {
        return Ok((0.0, grad, 0));
    }
    let probs = softmax(logits);
    let mut loss = 0.0;
    for (bi, target) in targets.iter().enumerate() {
        let Some(t) = target else { continue };
        if *t >= classes {
            return Err(DafdError::InvalidArgument(format!(
                "class index {t} out of range for {classes} classes"
            )));
        }
        // clamp avoids -inf on fully saturated wrong predictions
        loss += -(probs.at2(bi, *t).max(1e-300)).ln();
        for j in 0..classes {
            let idx = grad.ix2(bi, j);
            let indicator = if j == *t { 1.0 } else { 0.0 };
            grad.data_mut()[idx] = (probs.at2(bi, j) - indicator) / labeled as f64;
        }
    }
    Ok((loss / labeled as f64, grad, labeled))
}

fn dims2(t: &Tensor, what: &str) -> Result<(usize, usize)> {
    match t.shape() {
        [a, b] => Ok((*a, *b)),
        other => Err(DafdError::shape(
            what,
            format!("expected 2-d tensor, got {other:?}"),
        )),
    }
}

fn dims3(t: &Tensor, what: &str) -> Result<(usize, usize, usize)> {
    match t.shape() {
        [a, b, c] => Ok((*a, *b, *c)),
        other => Err(DafdError::shape(
            what,
            format!("expected 3-d tensor, got {other:?}"),
        )),
    }
}
