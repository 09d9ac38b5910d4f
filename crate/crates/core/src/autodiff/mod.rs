//! Minimal differentiable compute kernel.
//!
//! Dense layers, an LSTM cell, embedding tables and Adam, backed by a
//! tape-based reverse-mode engine with exact analytic gradients. 64-bit
//! floats throughout. Frozen parameter sets are immutable and safe to read
//! from many threads; training (backward + optimizer step) is
//! single-writer.

mod adam;
mod layers;
mod tape;
mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use layers::{DenseLayer, Embedding, LstmCell, Mlp};
pub use tape::{matvec_into, Activation, NodeId, Tape};
pub use tensor::{ParamId, ParamSet, ParamTensor};
