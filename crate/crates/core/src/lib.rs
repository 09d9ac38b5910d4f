//! Core library for model-schedule optimization of iterative denoising
//! samplers.
//!
//! Given a zoo of denoising models with known per-call latencies and a
//! dataset of (schedule, generation quality) observations, this crate can
//! train a sequence predictor of schedule quality and search, with a
//! budget-constrained evolutionary algorithm, for the schedule that
//! optimizes quality under a generation-time budget. A built-in toy
//! diffusion laboratory supplies an exact quality oracle so the whole
//! pipeline can be verified at desk scale.
//!
//! Modules:
//! - [`autodiff`]: a minimal differentiable compute kernel (dense layers,
//!   LSTM cell, embeddings, Adam) with exact reverse-mode gradients.
//! - [`space`]: model zoo, schedule representation, latency cost model,
//!   noise-schedule math and schedule decoding.
//! - [`predictor`]: the schedule-quality predictor and its ranking-loss
//!   training loop.
//! - [`search`]: budgeted evolutionary search plus a brute-force oracle.
//! - [`lab`]: Gaussian-mixture diffusion laboratory with an exact score,
//!   a DDIM sampler and an energy-distance quality metric.

pub mod autodiff;
pub mod error;
pub mod lab;
pub mod predictor;
pub mod search;
pub mod space;

pub use error::{Error, Result};

/// Derives a decorrelated child seed from a base seed and an index.
///
/// Used wherever independent deterministic streams are needed (one per
/// sampling trajectory, one per search seed, ...). SplitMix64 finalizer.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
