//! The experimental protocol: leave-subjects-out folds, the source->target
//! pair matrix, detection metrics, significance testing, report tables,
//! feature export, and the built-in synthetic benchmark.

pub mod benchmark;
mod features;
mod folds;
mod metrics;
mod pairs;
mod report;
mod runner;
mod stats;

pub use features::export_features;
pub use folds::{lsocv_folds, FoldPlan, FOLD_COUNT};
pub use metrics::{confusion, metrics, ConfusionCounts, Metric, MetricName, MetricSet};
pub use pairs::{
    enumerate_pairs, PairSide, PairSpec, Scenario, UMAFALL, UMAFALL_POSITIONS, UPFALL,
    UPFALL_POSITIONS,
};
pub use report::{build_report, Report};
pub use runner::{
    read_results_csv, run_pair, write_results_csv, FoldOutcome, PairData, PairResult,
};
pub use stats::{betai, ttest, TTestResult, ALPHA};
