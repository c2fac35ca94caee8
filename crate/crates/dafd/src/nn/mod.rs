//! From-scratch double-precision network engine for the fixed fall-detection
//! architecture, with manual backpropagation, a gradient reversal layer, Adam
//! with L2 weight decay, checkpointing, and a finite-difference gradient
//! checker.

pub mod adam;
pub mod checkpoint;
pub mod gradcheck;
pub mod layers;
pub mod model;
pub mod tensor;

pub use adam::{adam_step, AdamState};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, OptimizerState};
pub use gradcheck::{grad_check, GradCheckReport};
pub use layers::{grl_backward, grl_forward, softmax, softmax_ce};
pub use model::{
    backward_pass, forward_pass, ForwardCache, ForwardOutput, LossWeights, Mode, ModelGrads,
    ModelParams, ParamGroup, FEATURE_DIM, INPUT_CHANNELS, INPUT_LEN, NUM_CLASSES,
};
pub use tensor::Tensor;
