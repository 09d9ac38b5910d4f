//! Schedule-quality predictor: embedders, LSTM sequence core and MLP
//! head, trained with a pairwise hinge ranking loss and validated with
//! Kendall's tau. Trained predictors are immutable and safe for
//! concurrent scoring; training is single-writer.

mod checkpoint;
mod config;
mod embed;
mod loss;
mod model;
mod tau;
mod train;

pub use checkpoint::{load_predictor, save_predictor};
pub use config::{PredictorConfig, TrainConfig};
pub use embed::sinusoidal_embedding;
pub use loss::{ranking_loss_on_tape, sample_pairs, ScheduleRecord};
pub use model::{PositionInput, SchedulePredictor, TIMESTEP_SCALE};
pub use tau::kendall_tau;
pub use train::{split_records, train, TrainReport};
