//! Pairwise hinge ranking loss and training-pair sampling.
//!
//! For pairs (i, j) with measured quality F_j > F_i (lower is better, so
//! q_i is the better schedule), the loss is
//!
//!   sum over pairs of max(0, m - (P(q_j) - P(q_i)))
//!
//! which drives the predicted scores to preserve the measured ordering
//! with margin m.

use rand::seq::SliceRandom;
use rand::Rng;

use super::model::{PositionInput, SchedulePredictor};
use crate::autodiff::{Activation, NodeId, Tape};
use crate::space::{ModelSchedule, ScheduleSpace};
use crate::{Error, Result};

/// One (schedule, measured quality) training pair. Lower quality is
/// better (FID-like).
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRecord {
    pub schedule: ModelSchedule,
    pub quality: f64,
}

impl ScheduleRecord {
    pub fn new(schedule: ModelSchedule, quality: f64) -> Result<Self> {
        if !quality.is_finite() {
            return Err(Error::Domain(format!(
                "schedule quality must be finite, got {quality}"
            )));
        }
        Ok(Self { schedule, quality })
    }
}

/// Draws at most `compare_ratio * b` index pairs `(i, j)` from a batch of
/// qualities, uniformly without replacement among the pairs whose quality
/// difference exceeds `threshold`, oriented so `quality[j] > quality[i]`.
/// May return fewer or zero pairs.
pub fn sample_pairs(
    qualities: &[f64],
    compare_ratio: usize,
    threshold: f64,
    rng: &mut impl Rng,
) -> Vec<(usize, usize)> {
    let b = qualities.len();
    let mut qualifying = Vec::new();
    for i in 0..b {
        for j in (i + 1)..b {
            let diff = qualities[j] - qualities[i];
            if diff.abs() > threshold {
                if diff > 0.0 {
                    qualifying.push((i, j));
                } else {
                    qualifying.push((j, i));
                }
            }
        }
    }
    let cap = compare_ratio * b;
    if qualifying.len() > cap {
        qualifying.partial_shuffle(rng, cap);
        qualifying.truncate(cap);
    }
    qualifying
}

/// Records the forward passes for every schedule in `batch` and builds the
/// hinge ranking loss over `pairs` ((better, worse) index pairs, validated
/// against the recorded qualities). Returns the scalar loss node together
/// with the per-schedule score nodes.
pub fn ranking_loss_on_tape(
    tape: &mut Tape,
    predictor: &SchedulePredictor,
    space: &ScheduleSpace,
    batch: &[ScheduleRecord],
    pairs: &[(usize, usize)],
    margin: f64,
) -> Result<(NodeId, Vec<NodeId>)> {
    let encoded: Vec<Vec<PositionInput>> = batch
        .iter()
        .map(|r| SchedulePredictor::encode(space, &r.schedule))
        .collect::<Result<_>>()?;
    let scores: Vec<NodeId> = encoded
        .iter()
        .map(|positions| predictor.forward_on_tape(tape, positions))
        .collect::<Result<_>>()?;
    let mut terms = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i >= batch.len() || j >= batch.len() {
            return Err(Error::PairSelection(format!(
                "pair ({i}, {j}) out of range for batch of {}",
                batch.len()
            )));
        }
        if !(batch[j].quality > batch[i].quality) {
            return Err(Error::PairSelection(format!(
                "pair ({i}, {j}) violates F_j > F_i: {} <= {}",
                batch[j].quality, batch[i].quality
            )));
        }
        // max(0, m - (P_j - P_i))
        let diff = tape.sub(scores[j], scores[i])?;
        let neg = tape.affine(diff, -1.0, margin);
        terms.push(tape.activate(neg, Activation::Relu));
    }
    let loss = tape.sum_scalars(&terms)?;
    Ok((loss, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::PredictorConfig;
    use crate::space::{NoiseSchedule, SamplerKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_qualities_yield_no_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pairs = sample_pairs(&[2.0, 2.0, 2.0, 2.0], 2, 0.15, &mut rng);
        assert!(pairs.is_empty());
    }

    #[test]
    fn single_qualifying_pair_is_oriented() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pairs = sample_pairs(&[5.0, 3.0], 2, 0.15, &mut rng);
        // oriented so F_j > F_i: i is the 3.0 record, j the 5.0 record
        assert_eq!(pairs, vec![(1, 0)]);
    }

    #[test]
    fn pair_count_is_capped_by_compare_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let qualities: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let pairs = sample_pairs(&qualities, 2, 0.15, &mut rng);
        assert!(pairs.len() <= 64);
        assert_eq!(pairs.len(), 64); // 496 qualify, cap binds
        for &(i, j) in &pairs {
            assert!(qualities[j] > qualities[i] + 0.15);
        }
    }

    #[test]
    fn threshold_excludes_close_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pairs = sample_pairs(&[1.0, 1.1, 3.0], 2, 0.15, &mut rng);
        // (0,1) differ by 0.1 <= 0.15: excluded; the other two qualify
        assert_eq!(pairs.len(), 2);
        assert!(pairs.contains(&(0, 2)));
        assert!(pairs.contains(&(1, 2)));
    }

    fn tiny_setup() -> (ScheduleSpace, SchedulePredictor, Vec<ScheduleRecord>) {
        let space = ScheduleSpace::new(
            SamplerKind::Ddim,
            4,
            2,
            NoiseSchedule::default_linear(),
            1e-3,
        )
        .unwrap();
        let cfg = PredictorConfig {
            sampler: SamplerKind::Ddim,
            n_models: 2,
            model_embed_dim: 4,
            timestep_embed_dim: 6,
            solver_embed_dim: 4,
            hidden_size: 5,
            recurrent_layers: 1,
            head_layers: 2,
            head_width: 7,
        };
        let p = SchedulePredictor::new(cfg, 3).unwrap();
        let records = vec![
            ScheduleRecord::new(
                ModelSchedule::new(SamplerKind::Ddim, vec![1, 0, 2, 1]).unwrap(),
                1.0,
            )
            .unwrap(),
            ScheduleRecord::new(
                ModelSchedule::new(SamplerKind::Ddim, vec![0, 2, 2, 0]).unwrap(),
                3.0,
            )
            .unwrap(),
        ];
        (space, p, records)
    }

    #[test]
    fn hand_evaluated_hinge_values() {
        let (space, p, records) = tiny_setup();
        let mut tape = Tape::new();
        let (loss, scores) =
            ranking_loss_on_tape(&mut tape, &p, &space, &records, &[(0, 1)], 1.0).unwrap();
        let p0 = tape.scalar(scores[0]).unwrap();
        let p1 = tape.scalar(scores[1]).unwrap();
        let expected = (1.0 - (p1 - p0)).max(0.0);
        assert!((tape.scalar(loss).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn saturated_pair_contributes_zero_and_empty_set_is_zero() {
        let (space, p, records) = tiny_setup();
        // Empty pair set
        let mut tape = Tape::new();
        let (loss, _) = ranking_loss_on_tape(&mut tape, &p, &space, &records, &[], 1.0).unwrap();
        assert_eq!(tape.scalar(loss).unwrap(), 0.0);
        // A pair whose score gap already exceeds the margin saturates: use
        // margin tiny and flip orientation as needed to find the saturated
        // direction deterministically via the scores themselves.
        let mut tape = Tape::new();
        let (_, scores) =
            ranking_loss_on_tape(&mut tape, &p, &space, &records, &[], 1.0).unwrap();
        let p0 = tape.scalar(scores[0]).unwrap();
        let p1 = tape.scalar(scores[1]).unwrap();
        // margin smaller than the actual gap if ordered correctly
        if p1 - p0 > 0.0 {
            let m = (p1 - p0) / 2.0;
            let mut tape = Tape::new();
            let (loss, _) =
                ranking_loss_on_tape(&mut tape, &p, &space, &records, &[(0, 1)], m).unwrap();
            assert_eq!(tape.scalar(loss).unwrap(), 0.0);
        } else {
            // gap is negative; hinge is active and equals m - gap
            let m = 0.5;
            let mut tape = Tape::new();
            let (loss, _) =
                ranking_loss_on_tape(&mut tape, &p, &space, &records, &[(0, 1)], m).unwrap();
            assert!((tape.scalar(loss).unwrap() - (m - (p1 - p0))).abs() < 1e-12);
        }
    }

    #[test]
    fn misordered_pair_is_rejected() {
        let (space, p, records) = tiny_setup();
        let mut tape = Tape::new();
        let err =
            ranking_loss_on_tape(&mut tape, &p, &space, &records, &[(1, 0)], 1.0).unwrap_err();
        assert!(matches!(err, Error::PairSelection(_)));
    }

    #[test]
    fn changed_entry_embedding_row_receives_gradient() {
        let (space, mut p, _) = tiny_setup();
        // two schedules differing in a single entry (model 1 vs model 2)
        let a = ModelSchedule::new(SamplerKind::Ddim, vec![1, 0, 0, 0]).unwrap();
        let b = ModelSchedule::new(SamplerKind::Ddim, vec![2, 0, 0, 0]).unwrap();
        let records = vec![
            ScheduleRecord::new(a, 1.0).unwrap(),
            ScheduleRecord::new(b, 3.0).unwrap(),
        ];
        let table = p.embedding_table().param_id();
        let cols = p.embedding_table().cols();
        p.params_mut().zero_grads();
        let mut tape = Tape::new();
        let (loss, _) = {
            let pref = &p;
            ranking_loss_on_tape(&mut tape, pref, &space, &records, &[(0, 1)], 10.0).unwrap()
        };
        assert!(tape.scalar(loss).unwrap() > 0.0, "hinge must be active");
        tape.backward(loss, p.params_mut()).unwrap();
        let grad = p.params().get(table).grad();
        let row1: f64 = grad[cols..2 * cols].iter().map(|g| g.abs()).sum();
        let row2: f64 = grad[2 * cols..3 * cols].iter().map(|g| g.abs()).sum();
        assert!(row1 > 0.0, "embedding row of the changed id gets gradient");
        assert!(row2 > 0.0);
    }
}
