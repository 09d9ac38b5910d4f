//! Desk-scale diffusion laboratory: Gaussian-mixture data with a
//! closed-form score, a zoo of imperfect denoisers with controllably
//! crossing per-timestep losses, a deterministic DDIM sampler, an
//! energy-distance quality metric and schedule-quality data generation.
//!
//! All randomness flows from explicit seeds; repeated runs are bitwise
//! identical. Trajectories are independent given per-trajectory seeds.

mod curves;
mod data;
mod denoiser;
mod metric;
mod mixture;
mod sampler;
mod world;

pub use curves::{curves_cross, per_step_loss};
pub use data::{
    generate_training_data, GeneratedRecord, Oracle, SamplingFamily, SyntheticOracle,
};
pub use denoiser::{
    train_neural_denoiser, Denoiser, DenoiserKind, NeuralDenoiser, NeuralTrainConfig, Profile,
};
pub use metric::energy_distance;
pub use mixture::{GaussianMixture, MixtureComponent};
pub use sampler::{ddim_step, noise_samples, run_schedule};
pub use world::{LabOracle, ToyDiffusionWorld};
