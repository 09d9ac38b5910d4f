//! Frozen predictors and the laboratory are safe to share across threads;
//! concurrent evaluation must agree bitwise with sequential evaluation.

use std::sync::Arc;

use modelsched_core::lab::{LabOracle, Oracle, ToyDiffusionWorld};
use modelsched_core::predictor::{PredictorConfig, SchedulePredictor};
use modelsched_core::space::{NoiseSchedule, SamplerKind, ScheduleSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn concurrent_scoring_matches_sequential() {
    let space = Arc::new(
        ScheduleSpace::new(
            SamplerKind::Ddim,
            8,
            2,
            NoiseSchedule::default_linear(),
            1e-3,
        )
        .unwrap(),
    );
    let predictor = Arc::new(
        SchedulePredictor::new(PredictorConfig::defaults(SamplerKind::Ddim, 2), 17).unwrap(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let schedules: Vec<_> = (0..24).map(|_| space.random_schedule(&mut rng)).collect();

    let sequential: Vec<u64> = schedules
        .iter()
        .map(|q| predictor.score(&space, q).unwrap().to_bits())
        .collect();

    let mut handles = Vec::new();
    for chunk in schedules.chunks(6) {
        let chunk = chunk.to_vec();
        let predictor = Arc::clone(&predictor);
        let space = Arc::clone(&space);
        handles.push(std::thread::spawn(move || {
            chunk
                .iter()
                .map(|q| predictor.score(&space, q).unwrap().to_bits())
                .collect::<Vec<u64>>()
        }));
    }
    let concurrent: Vec<u64> = handles
        .into_iter()
        .flat_map(|h| h.join().unwrap())
        .collect();
    assert_eq!(sequential, concurrent);
}

#[test]
fn concurrent_lab_grading_matches_sequential() {
    let world = Arc::new(ToyDiffusionWorld::constructed(0.5));
    let space = Arc::new(
        ScheduleSpace::new(
            SamplerKind::Ddim,
            6,
            2,
            *world.noise(),
            ScheduleSpace::DEFAULT_T_END,
        )
        .unwrap(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let schedules: Vec<_> = (0..8).map(|_| space.random_schedule(&mut rng)).collect();

    let oracle = LabOracle::new(&world, &space, 64, 128, 11).unwrap();
    let sequential: Vec<u64> = schedules
        .iter()
        .map(|q| oracle.quality(q).unwrap().to_bits())
        .collect();

    let mut handles = Vec::new();
    for chunk in schedules.chunks(2) {
        let chunk = chunk.to_vec();
        let world = Arc::clone(&world);
        let space = Arc::clone(&space);
        handles.push(std::thread::spawn(move || {
            let oracle = LabOracle::new(&world, &space, 64, 128, 11).unwrap();
            chunk
                .iter()
                .map(|q| oracle.quality(q).unwrap().to_bits())
                .collect::<Vec<u64>>()
        }));
    }
    let concurrent: Vec<u64> = handles
        .into_iter()
        .flat_map(|h| h.join().unwrap())
        .collect();
    assert_eq!(sequential, concurrent);
}
