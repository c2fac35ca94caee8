//! Domain-adaptive fall detection (DAFD) on wearable accelerometer data.
//!
//! The crate covers the full pipeline:
//!
//! - [`ingest`]: canonical trial storage, raw-export adapters, and a seeded
//!   synthetic two-domain trial generator for desk-scale experiments.
//! - [`signal`]: rational-factor resampling, impact-defined windowing, and
//!   per-axis min-max normalization producing fixed 66x3 segments.
//! - [`nn`]: a from-scratch double-precision network (three conv/BN/ReLU/pool
//!   stages, two classifier heads, a gradient reversal layer) with manual
//!   backpropagation, Adam, and a finite-difference gradient checker.
//! - [`dann`]: adversarial training with class-balanced oversampling, four
//!   training modes, early stopping, and the 27-tuple hyperparameter grid.
//! - [`eval`]: leave-subjects-out folds, the cross-position/cross-configuration
//!   pair matrix, SEN/SPE/PRE/F1 metrics, t-tests, report tables, and feature
//!   export.
//! - [`cli`]: the `dafd` command-line surface tying everything together.
//!
//! Every entry point is seeded and deterministic: identical configuration
//! reproduces identical outputs byte for byte. See the `examples/` directory
//! for one runnable program per major capability.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with
// out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod jobs;
pub mod dann;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod nn;
pub mod rng;
pub mod signal;

pub use error::{DafdError, Result};
