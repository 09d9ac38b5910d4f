//! The toy diffusion world: mixture, noise schedule and denoiser zoo in
//! one place, plus the laboratory quality oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::data::Oracle;
use super::denoiser::{Denoiser, Profile};
use super::metric::energy_distance;
use super::mixture::GaussianMixture;
use super::sampler::{noise_samples, run_schedule};
use crate::space::{ModelSchedule, ModelZoo, NoiseSchedule, ScheduleSpace, StepPlan};
use crate::{Error, Result};

/// Ground-truth generator: Gaussian-mixture data, analytic score and a
/// denoiser zoo. Immutable once built; sampling is seeded externally.
#[derive(Debug, Clone)]
pub struct ToyDiffusionWorld {
    mixture: GaussianMixture,
    noise: NoiseSchedule,
    denoisers: Vec<Denoiser>,
}

impl ToyDiffusionWorld {
    pub fn new(
        mixture: GaussianMixture,
        noise: NoiseSchedule,
        denoisers: Vec<Denoiser>,
    ) -> Result<Self> {
        if denoisers.is_empty() {
            return Err(Error::Config("world needs at least one denoiser".into()));
        }
        for d in &denoisers {
            if !(d.latency_ms > 0.0 && d.latency_ms.is_finite()) {
                return Err(Error::Config(format!(
                    "denoiser '{}' has non-positive latency {}",
                    d.name, d.latency_ms
                )));
            }
        }
        Ok(Self {
            mixture,
            noise,
            denoisers,
        })
    }

    /// The standard constructed zoo: a cheap model that is worst near the
    /// noise end and an expensive model that is worst near the data end,
    /// biased along opposite fixed directions. Their per-step loss curves
    /// cross by construction, and mixed schedules beat single-model ones.
    pub fn constructed(bias_scale: f64) -> Self {
        let mixture = GaussianMixture::ring(8, 4.0, 0.3).expect("valid ring mixture");
        let noise = NoiseSchedule::default_linear();
        let denoisers = vec![
            Denoiser::perturbed(
                "cheap-early-biased",
                1.0,
                Profile::Rise { scale: bias_scale },
                Profile::zero(),
                vec![1.0, 0.0],
            )
            .expect("valid perturbation"),
            Denoiser::perturbed(
                "pricey-late-biased",
                2.5,
                Profile::Fall { scale: bias_scale },
                Profile::zero(),
                vec![0.0, 1.0],
            )
            .expect("valid perturbation"),
        ];
        Self {
            mixture,
            noise,
            denoisers,
        }
    }

    pub fn mixture(&self) -> &GaussianMixture {
        &self.mixture
    }

    pub fn noise(&self) -> &NoiseSchedule {
        &self.noise
    }

    pub fn denoisers(&self) -> &[Denoiser] {
        &self.denoisers
    }

    /// The latency view of the denoiser zoo.
    pub fn zoo(&self) -> Result<ModelZoo> {
        ModelZoo::new(
            self.denoisers
                .iter()
                .enumerate()
                .map(|(i, d)| crate::space::ModelInfo {
                    id: i + 1,
                    name: d.name.clone(),
                    latency_ms: d.latency_ms,
                })
                .collect(),
        )
    }

    /// Samples from the clean data distribution.
    pub fn reference_samples(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.mixture.sample(&mut rng)).collect()
    }

    /// Executes a decoded plan.
    pub fn run_plan(&self, plan: &StepPlan, n_samples: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        run_schedule(
            plan,
            &self.denoisers,
            &self.mixture,
            &self.noise,
            n_samples,
            seed,
        )
    }
}

/// The laboratory quality oracle: runs a schedule and measures the energy
/// distance of its samples to a fixed reference set. All-null schedules
/// are graded honestly as "doing nothing": the distance between pure noise
/// and the reference.
pub struct LabOracle<'w> {
    world: &'w ToyDiffusionWorld,
    space: &'w ScheduleSpace,
    reference: Vec<Vec<f64>>,
    n_samples: usize,
    eval_seed: u64,
}

impl<'w> LabOracle<'w> {
    pub fn new(
        world: &'w ToyDiffusionWorld,
        space: &'w ScheduleSpace,
        n_samples: usize,
        reference_size: usize,
        eval_seed: u64,
    ) -> Result<Self> {
        if n_samples == 0 || reference_size == 0 {
            return Err(Error::Config(
                "oracle sample counts must be positive".into(),
            ));
        }
        space.check_zoo(&world.zoo()?)?;
        let reference = world.reference_samples(reference_size, crate::derive_seed(eval_seed, 0));
        Ok(Self {
            world,
            space,
            reference,
            n_samples,
            eval_seed,
        })
    }

    pub fn reference(&self) -> &[Vec<f64>] {
        &self.reference
    }

    pub fn eval_seed(&self) -> u64 {
        self.eval_seed
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Quality of an arbitrary decoded plan (used for baselines whose step
    /// counts differ from the space length).
    pub fn quality_of_plan(&self, plan: &StepPlan) -> Result<f64> {
        if plan.is_empty() {
            return self.noise_quality();
        }
        let samples = self
            .world
            .run_plan(plan, self.n_samples, crate::derive_seed(self.eval_seed, 1))?;
        energy_distance(&samples, &self.reference)
    }

    /// The honest value of doing nothing.
    pub fn noise_quality(&self) -> Result<f64> {
        let noise = noise_samples(
            self.world.mixture().dim(),
            self.n_samples,
            crate::derive_seed(self.eval_seed, 2),
        );
        energy_distance(&noise, &self.reference)
    }
}

impl Oracle for LabOracle<'_> {
    fn quality(&self, schedule: &ModelSchedule) -> Result<f64> {
        let plan = self.space.decode(schedule)?;
        self.quality_of_plan(&plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{discretize_linear, DdimStep, SamplerKind};

    fn world_and_space() -> (ToyDiffusionWorld, ScheduleSpace) {
        let world = ToyDiffusionWorld::constructed(0.5);
        let space = ScheduleSpace::new(
            SamplerKind::Ddim,
            6,
            2,
            *world.noise(),
            ScheduleSpace::DEFAULT_T_END,
        )
        .unwrap();
        (world, space)
    }

    #[test]
    fn all_null_schedule_gets_noise_quality() {
        let (world, space) = world_and_space();
        let oracle = LabOracle::new(&world, &space, 128, 256, 7).unwrap();
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![0; 6]).unwrap();
        let graded = oracle.quality(&q).unwrap();
        assert_eq!(graded, oracle.noise_quality().unwrap());
        // a well-mixed schedule (each model where its bias is small)
        // clearly beats doing nothing
        let some = ModelSchedule::new(SamplerKind::Ddim, vec![1, 1, 1, 1, 2, 2]).unwrap();
        assert!(oracle.quality(&some).unwrap() < graded);
    }

    #[test]
    fn mixed_schedule_beats_pricier_single_model() {
        // cheap-early-biased at the data side plus pricey-late-biased at
        // the noise side is both cheaper and better than the all-pricey
        // schedule.
        let (world, space) = world_and_space();
        let zoo = world.zoo().unwrap();
        let oracle = LabOracle::new(&world, &space, 256, 512, 7).unwrap();
        let mixed = ModelSchedule::new(SamplerKind::Ddim, vec![1, 1, 1, 2, 2, 2]).unwrap();
        let single = ModelSchedule::new(SamplerKind::Ddim, vec![2; 6]).unwrap();
        assert!(
            crate::space::get_cost(&mixed, &zoo).unwrap()
                < crate::space::get_cost(&single, &zoo).unwrap()
        );
        assert!(oracle.quality(&mixed).unwrap() < oracle.quality(&single).unwrap());
    }

    #[test]
    fn oracle_is_deterministic() {
        let (world, space) = world_and_space();
        let oracle = LabOracle::new(&world, &space, 64, 128, 3).unwrap();
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![1, 0, 2, 0, 1, 2]).unwrap();
        let a = oracle.quality(&q).unwrap();
        let b = oracle.quality(&q).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn more_exact_steps_reduce_energy_distance() {
        // With the exact denoiser, 50 steps beat 5 steps.
        let world = ToyDiffusionWorld::new(
            GaussianMixture::ring(8, 4.0, 0.3).unwrap(),
            NoiseSchedule::default_linear(),
            vec![Denoiser::exact("exact", 1.0)],
        )
        .unwrap();
        let reference = world.reference_samples(512, 100);
        let mut quality_at = |steps: usize, seed: u64| -> f64 {
            let ts = discretize_linear(steps, 1e-3, 1.0).unwrap();
            let plan = StepPlan::Ddim {
                steps: ts.into_iter().map(|t| DdimStep { t, model: 1 }).collect(),
            };
            let samples = world.run_plan(&plan, 256, seed).unwrap();
            energy_distance(&samples, &reference).unwrap()
        };
        let mut violations = 0;
        for seed in 0..5 {
            let q50 = quality_at(50, seed);
            let q10 = quality_at(10, seed);
            let q5 = quality_at(5, seed);
            if !(q50 <= q10 && q10 <= q5) {
                violations += 1;
            }
        }
        assert!(
            violations <= 1,
            "step-count monotonicity violated in {violations}/5 seeds"
        );
    }

    #[test]
    fn zoo_view_matches_denoisers() {
        let world = ToyDiffusionWorld::constructed(1.0);
        let zoo = world.zoo().unwrap();
        assert_eq!(zoo.n_models(), 2);
        assert_eq!(zoo.latency(1).unwrap(), 1.0);
        assert_eq!(zoo.latency(2).unwrap(), 2.5);
    }
}
