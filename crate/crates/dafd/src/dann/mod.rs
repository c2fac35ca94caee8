//! Adversarial training: segment pools, class-balanced batch construction,
//! the four training modes, early stopping, and the hyperparameter grid.

mod batch;
mod grid;
mod pool;
mod train;

pub use batch::{make_epoch_batches, BatchItem, TrainBatch};
pub use grid::{grid_search, grid_tuples, GridEntry, GRID_DROPOUT, GRID_LAMBDA, GRID_LR};
pub use pool::SegmentPool;
pub use train::{
    fit, predict, segments_to_tensor, train_step, EarlyStopping, EpochRecord, FitResult,
    LossBreakdown, TrainHistory, TrainState, WEIGHT_DECAY,
};

use crate::error::{DafdError, Result};

/// The training modes compared in the experiments. `SourceOnly` and
/// `TargetOnly` are the lower and upper reference bounds; `Dafd` adapts with
/// unlabeled target data; `DafdAdl` adapts with target ADL segments only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrainMode {
    SourceOnly,
    Dafd,
    DafdAdl,
    TargetOnly,
}

impl TrainMode {
    pub const ALL: [TrainMode; 4] = [
        TrainMode::SourceOnly,
        TrainMode::DafdAdl,
        TrainMode::Dafd,
        TrainMode::TargetOnly,
    ];

    /// True for the adversarial modes that consume unlabeled target data.
    pub fn uses_domain_loss(self) -> bool {
        matches!(self, TrainMode::Dafd | TrainMode::DafdAdl)
    }

    pub fn name(self) -> &'static str {
        match self {
            TrainMode::SourceOnly => "source_only",
            TrainMode::Dafd => "dafd",
            TrainMode::DafdAdl => "dafd_adl",
            TrainMode::TargetOnly => "target_only",
        }
    }

    /// Row label used by the report tables.
    pub fn display(self) -> &'static str {
        match self {
            TrainMode::SourceOnly => "Source-only",
            TrainMode::Dafd => "DAFD",
            TrainMode::DafdAdl => "DAFD_adl",
            TrainMode::TargetOnly => "Target-only",
        }
    }
}

impl std::str::FromStr for TrainMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "source_only" => Ok(TrainMode::SourceOnly),
            "dafd" => Ok(TrainMode::Dafd),
            "dafd_adl" => Ok(TrainMode::DafdAdl),
            "target_only" => Ok(TrainMode::TargetOnly),
            other => Err(format!(
                "unknown mode {other:?} (expected source_only|dafd|dafd_adl|target_only)"
            )),
        }
    }
}

impl std::fmt::Display for TrainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Tunable hyperparameters searched by the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub dropout: f64,
    pub lr: f64,
    pub lambda: f64,
}

impl Hyperparams {
    pub fn new(dropout: f64, lr: f64, lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&dropout) {
            return Err(DafdError::InvalidSpec(format!(
                "dropout must be in [0, 1), got {dropout}"
            )));
        }
        if !(lr > 0.0) {
            return Err(DafdError::InvalidSpec(format!(
                "learning rate must be positive, got {lr}"
            )));
        }
        if lambda < 0.0 {
            return Err(DafdError::InvalidSpec(format!(
                "lambda must be non-negative, got {lambda}"
            )));
        }
        Ok(Hyperparams { dropout, lr, lambda })
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            dropout: 0.1,
            lr: 0.001,
            lambda: 1.0,
        }
    }
}

/// Training-run configuration shared by `fit`, the grid, and the evaluation
/// harness.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub mode: TrainMode,
    /// Segments drawn per domain per batch.
    pub batch_per_domain: usize,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    /// Fraction of the labeled pool's subjects held out for validation.
    pub val_fraction: f64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_per_domain < 1 {
            return Err(DafdError::InvalidSpec(
                "batch_per_domain must be at least 1".into(),
            ));
        }
        if !(0.0 < self.val_fraction && self.val_fraction < 1.0) {
            return Err(DafdError::InvalidSpec(format!(
                "val_fraction must be in (0, 1), got {}",
                self.val_fraction
            )));
        }
        if self.max_epochs == 0 {
            return Err(DafdError::InvalidSpec("max_epochs must be positive".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            mode: TrainMode::Dafd,
            batch_per_domain: 4,
            max_epochs: 200,
            patience: 10,
            seed: 0,
            val_fraction: 0.2,
        }
    }
}
