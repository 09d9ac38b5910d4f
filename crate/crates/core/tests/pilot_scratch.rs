//! Scratch pilot runs (deleted before release).

use modelsched_core::lab::*;
use modelsched_core::space::*;

#[test]
#[ignore]
fn landscape_probe() {
    for bias in [0.5, 1.0, 2.0] {
        let world = ToyDiffusionWorld::constructed(bias);
        for l in [6usize, 12] {
            let space = ScheduleSpace::new(
                SamplerKind::Ddim,
                l,
                2,
                *world.noise(),
                ScheduleSpace::DEFAULT_T_END,
            )
            .unwrap();
            let oracle = LabOracle::new(&world, &space, 256, 512, 7).unwrap();
            println!("=== bias {bias} L {l}");
            println!("noise quality: {:.4}", oracle.noise_quality().unwrap());
            let mk = |entries: Vec<usize>| ModelSchedule::new(SamplerKind::Ddim, entries).unwrap();
            let all1 = mk(vec![1; l]);
            let all2 = mk(vec![2; l]);
            // mixed: model 2 near noise (high idx), model 1 near data (low idx)
            let mut mixed = vec![1; l];
            for e in mixed.iter_mut().skip(l / 2) {
                *e = 2;
            }
            let mixed = mk(mixed);
            // wrong mix
            let mut anti = vec![2; l];
            for e in anti.iter_mut().skip(l / 2) {
                *e = 1;
            }
            let anti = mk(anti);
            for (name, q) in [
                ("all-1 (cheap early-bad)", &all1),
                ("all-2 (pricey late-bad)", &all2),
                ("mixed good", &mixed),
                ("mixed anti", &anti),
            ] {
                println!(
                    "{name}: cost {:.1} quality {:.4}",
                    get_cost(q, &world.zoo().unwrap()).unwrap(),
                    Oracle::quality(&oracle, q).unwrap()
                );
            }
            // sparse schedules
            let mut sparse = vec![0; l];
            sparse[l - 1] = 2;
            sparse[l / 2] = 2;
            sparse[0] = 1;
            let sparse = mk(sparse);
            println!(
                "sparse 3-step: cost {:.1} quality {:.4}",
                get_cost(&sparse, &world.zoo().unwrap()).unwrap(),
                Oracle::quality(&oracle, &sparse).unwrap()
            );
        }
    }
}

#[test]
#[ignore]
fn exact_step_count_probe() {
    // how quality scales with step count for the exact denoiser
    let world = ToyDiffusionWorld::new(
        GaussianMixture::ring(8, 4.0, 0.3).unwrap(),
        NoiseSchedule::default_linear(),
        vec![Denoiser::exact("exact", 1.0)],
    )
    .unwrap();
    let reference = world.reference_samples(512, 100);
    for steps in [1usize, 2, 3, 5, 8, 12, 20, 50] {
        let ts = discretize_linear(steps, 1e-3, 1.0).unwrap();
        let plan = StepPlan::Ddim {
            steps: ts.into_iter().map(|t| DdimStep { t, model: 1 }).collect(),
        };
        let samples = world.run_plan(&plan, 256, 5).unwrap();
        println!(
            "steps {steps}: energy {:.4}",
            energy_distance(&samples, &reference).unwrap()
        );
    }
}
