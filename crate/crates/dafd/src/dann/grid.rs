//! The 3x3x3 hyperparameter grid: dropout x learning rate x lambda,
//! 27 independent runs, the tuple with the lowest validation total loss wins.

use super::pool::SegmentPool;
use super::train::fit;
use super::{Hyperparams, TrainConfig};
use crate::error::Result;
use crate::rng::derive_seed;

pub const GRID_DROPOUT: [f64; 3] = [0.1, 0.2, 0.5];
pub const GRID_LR: [f64; 3] = [0.001, 0.0005, 0.0001];
pub const GRID_LAMBDA: [f64; 3] = [0.31, 1.0, 1.3];

const SALT_GRID: u64 = 0x6170;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEntry {
    pub hp: Hyperparams,
    pub best_val_loss: f64,
    pub best_epoch: usize,
    pub stopped_epoch: usize,
}

/// The 27 grid tuples in search order (dropout-major, lambda-minor).
pub fn grid_tuples() -> Vec<Hyperparams> {
    let mut out = Vec::with_capacity(27);
    for &dropout in &GRID_DROPOUT {
        for &lr in &GRID_LR {
            for &lambda in &GRID_LAMBDA {
                out.push(Hyperparams { dropout, lr, lambda });
            }
        }
    }
    out
}

/// Trains one model per grid tuple, each with a seed derived from the master
/// seed and the tuple index, and selects the tuple with the smallest best
/// validation loss (first on ties). `jobs` caps the worker threads; results
/// are independent of the level of parallelism.
pub fn grid_search(
    source: Option<&SegmentPool>,
    target: Option<&SegmentPool>,
    cfg: &TrainConfig,
    jobs: usize,
) -> Result<(Hyperparams, Vec<GridEntry>)> {
    let tuples = grid_tuples();
    let run_one = |idx: usize| -> Result<GridEntry> {
        let hp = tuples[idx];
        let tuple_cfg = TrainConfig {
            seed: derive_seed(cfg.seed, SALT_GRID + idx as u64),
            ..cfg.clone()
        };
        let result = fit(source, target, &hp, &tuple_cfg)?;
        let best = result
            .history
            .epochs
            .iter()
            .map(|e| e.val.loss_total)
            .fold(f64::INFINITY, f64::min);
        Ok(GridEntry {
            hp,
            best_val_loss: best,
            best_epoch: result.history.best_epoch,
            stopped_epoch: result.history.stopped_epoch,
        })
    };

    let entries = crate::jobs::run_indexed_jobs(tuples.len(), jobs, run_one)?;
    let best_idx = entries
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.best_val_loss.partial_cmp(&b.best_val_loss).unwrap())
        .map(|(i, _)| i)
        .expect("grid has 27 entries");
    Ok((entries[best_idx].hp, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_enumerates_exactly_the_search_table() {
        let tuples = grid_tuples();
        assert_eq!(tuples.len(), 27);
        for hp in &tuples {
            assert!(GRID_DROPOUT.contains(&hp.dropout));
            assert!(GRID_LR.contains(&hp.lr));
            assert!(GRID_LAMBDA.contains(&hp.lambda));
        }
        // all tuples distinct
        for (i, a) in tuples.iter().enumerate() {
            for b in &tuples[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }
}
