//! Ranking-loss training loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::TrainConfig;
use super::loss::{ranking_loss_on_tape, sample_pairs, ScheduleRecord};
use super::model::SchedulePredictor;
use crate::autodiff::{AdamConfig, AdamState, Tape};
use crate::space::ScheduleSpace;
use crate::{derive_seed, Error, Result};

/// Per-epoch mean ranking loss (mean over batches, including batches that
/// produced no qualifying pairs, which contribute 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_mean_loss: Vec<f64>,
}

/// Trains the predictor in place: shuffled mini-batches, pair sampling,
/// hinge ranking loss, Adam. Deterministic given `cfg.seed`; zero epochs
/// leave the parameters untouched.
pub fn train(
    predictor: &mut SchedulePredictor,
    space: &ScheduleSpace,
    records: &[ScheduleRecord],
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(Error::Config("training dataset is empty".into()));
    }
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1));
    let mut pair_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2));
    let mut adam = AdamState::new(
        predictor.params(),
        AdamConfig::with_learning_rate(cfg.learning_rate),
    );
    let mut indices: Vec<usize> = (0..records.len()).collect();
    let mut epoch_mean_loss = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        indices.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in indices.chunks(cfg.batch_size) {
            batches += 1;
            if chunk.len() < 2 {
                continue;
            }
            let batch: Vec<ScheduleRecord> =
                chunk.iter().map(|&i| records[i].clone()).collect();
            let qualities: Vec<f64> = batch.iter().map(|r| r.quality).collect();
            let pairs = sample_pairs(&qualities, cfg.compare_ratio, cfg.threshold, &mut pair_rng);
            if pairs.is_empty() {
                continue;
            }
            let mut tape = Tape::new();
            let (loss_node, _) =
                ranking_loss_on_tape(&mut tape, predictor, space, &batch, &pairs, cfg.margin)?;
            let loss = tape.scalar(loss_node)?;
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            loss_sum += loss;
            predictor.params_mut().zero_grads();
            tape.backward(loss_node, predictor.params_mut())?;
            adam.step(predictor.params_mut());
        }
        epoch_mean_loss.push(if batches > 0 {
            loss_sum / batches as f64
        } else {
            0.0
        });
    }
    Ok(TrainReport { epoch_mean_loss })
}

/// Deterministic train/validation split: shuffles indices with the seed
/// and holds out the requested fraction.
pub fn split_records(
    records: &[ScheduleRecord],
    validation_fraction: f64,
    seed: u64,
) -> Result<(Vec<ScheduleRecord>, Vec<ScheduleRecord>)> {
    if !(0.0..1.0).contains(&validation_fraction) {
        return Err(Error::Config(format!(
            "validation fraction must be in [0, 1), got {validation_fraction}"
        )));
    }
    let mut indices: Vec<usize> = (0..records.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3));
    indices.shuffle(&mut rng);
    let n_valid = ((records.len() as f64) * validation_fraction).round() as usize;
    let (valid_idx, train_idx) = indices.split_at(n_valid.min(records.len()));
    let train = train_idx.iter().map(|&i| records[i].clone()).collect();
    let valid = valid_idx.iter().map(|&i| records[i].clone()).collect();
    Ok((train, valid))
}
