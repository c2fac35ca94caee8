//! Central finite-difference verification of the analytic gradients.
//!
//! For head parameters the checked objective is `loss_fall + loss_domain`.
//! For extractor parameters it is `loss_fall - lambda * loss_domain`, which is
//! the objective whose true gradient the extractor receives through the
//! reversal layer; comparing against it validates the `-lambda` coupling
//! itself. Runs use train mode with dropout disabled so batch-norm statistics
//! are part of the differentiated function.

use super::layers::softmax_ce_masked;
use super::model::{backward_pass, forward_pass, LossWeights, Mode, ModelParams, ParamGroup};
use super::tensor::Tensor;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub worst_param: String,
    /// Parameters compared against finite differences.
    pub checked: usize,
    /// Parameters skipped because a perturbation crossed a ReLU or pooling
    /// kink (the discrete routing changed between the two perturbed forwards).
    pub skipped: usize,
}

/// Deterministic targets for a check batch: alternating fall classes, the
/// first half of the batch as source and the second as target.
pub fn check_targets(batch: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let fall = (0..batch).map(|i| Some(i % 2)).collect();
    let domain = (0..batch).map(|i| Some(usize::from(i >= batch / 2))).collect();
    (fall, domain)
}

fn objective(
    params: &ModelParams,
    batch: &Tensor,
    fall_t: &[Option<usize>],
    domain_t: &[Option<usize>],
) -> Result<(f64, f64, Vec<u64>)> {
    let out = forward_pass(params, batch, 1.0, 0.0, Mode::Train, None)?;
    let (loss_fall, _, _) = softmax_ce_masked(&out.fall_logits, fall_t)?;
    let (loss_domain, _, _) = softmax_ce_masked(&out.domain_logits, domain_t)?;
    Ok((loss_fall, loss_domain, out.cache.routing_signature()))
}

/// Compares every learnable parameter's analytic gradient against central
/// finite differences with step `eps`.
pub fn grad_check(
    params: &ModelParams,
    batch: &Tensor,
    lambda: f64,
    eps: f64,
) -> Result<GradCheckReport> {
    let (fall_t, domain_t) = check_targets(batch.shape()[0]);
    let out = forward_pass(params, batch, lambda, 0.0, Mode::Train, None)?;
    let (grads, _) = backward_pass(params, &out.cache, &fall_t, &domain_t, LossWeights::default())?;
    let analytic: Vec<Vec<f64>> = grads.flat().iter().map(|t| t.data().to_vec()).collect();
    grad_check_against(params, batch, lambda, eps, &analytic, &fall_t, &domain_t)
}

fn grad_check_against(
    params: &ModelParams,
    batch: &Tensor,
    lambda: f64,
    eps: f64,
    analytic: &[Vec<f64>],
    fall_t: &[Option<usize>],
    domain_t: &[Option<usize>],
) -> Result<GradCheckReport> {
    let (_, _, base_signature) = objective(params, batch, fall_t, domain_t)?;
    let names: Vec<(String, ParamGroup)> = params
        .named_learnables()
        .into_iter()
        .map(|(name, group, _)| (name, group))
        .collect();

    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        worst_param: String::new(),
        checked: 0,
        skipped: 0,
    };
    let mut work = params.clone();
    for (array_idx, (name, group)) in names.iter().enumerate() {
        let len = analytic[array_idx].len();
        for j in 0..len {
            let original = {
                let t = work_array_mut(&mut work, array_idx);
                let v = t.data()[j];
                t.data_mut()[j] = v + eps;
                v
            };
            let (fall_hi, domain_hi, sig_hi) = objective(&work, batch, fall_t, domain_t)?;
            work_array_mut(&mut work, array_idx).data_mut()[j] = original - eps;
            let (fall_lo, domain_lo, sig_lo) = objective(&work, batch, fall_t, domain_t)?;
            work_array_mut(&mut work, array_idx).data_mut()[j] = original;

            if sig_hi != sig_lo || sig_hi != base_signature {
                report.skipped += 1;
                continue;
            }
            // the extractor descends fall - lambda * domain; the heads descend
            // their own plain losses, whose sum separates per head
            let (hi, lo) = match group {
                ParamGroup::Extractor => {
                    (fall_hi - lambda * domain_hi, fall_lo - lambda * domain_lo)
                }
                _ => (fall_hi + domain_hi, fall_lo + domain_lo),
            };
            let numeric = (hi - lo) / (2.0 * eps);
            let a = analytic[array_idx][j];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-2);
            report.checked += 1;
            if rel > report.max_rel_err {
                report.max_rel_err = rel;
                report.worst_param = format!("{name}[{j}]");
            }
        }
    }
    Ok(report)
}

/// Learnable array `array_idx` in the [`ModelParams::named_learnables`] order.
fn work_array_mut(params: &mut ModelParams, array_idx: usize) -> &mut Tensor {
    const EXTRACTOR_ARRAYS: usize = 12;
    const HEAD_ARRAYS: usize = 4;
    let (group, offset) = if array_idx < EXTRACTOR_ARRAYS {
        (ParamGroup::Extractor, array_idx)
    } else if array_idx < EXTRACTOR_ARRAYS + HEAD_ARRAYS {
        (ParamGroup::FallHead, array_idx - EXTRACTOR_ARRAYS)
    } else {
        (ParamGroup::DomainHead, array_idx - EXTRACTOR_ARRAYS - HEAD_ARRAYS)
    };
    params
        .group_mut(group)
        .into_iter()
        .nth(offset)
        .expect("learnable array index in range")
}
