//! Decoding a raw model schedule into an executable step plan.
//!
//! DDIM: the schedule lives on a linear lattice of L timesteps; positions
//! with a nonzero entry are the active steps, each tagged with its model.
//!
//! DPM-Solver: consecutive entry triples form solver groups. All-zero
//! groups are dropped; a group's solver order is the count of its nonzero
//! entries. The remaining groups are assigned uniform-logSNR intervals
//! (one per active group) from noise to data, and within a solver step the
//! models are applied in decreasing-timestep order, i.e. the higher-index
//! entries of the triple first.

use super::noise::{discretize_linear, NoiseSchedule};
use super::schedule::{ModelSchedule, SamplerKind};
use super::zoo::ModelZoo;
use crate::{Error, Result};
use rand::Rng;

/// One active DDIM step: the model is evaluated at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DdimStep {
    pub t: f64,
    pub model: usize,
}

/// One DPM-Solver step over the lambda interval `[t_from, t_to]`
/// (`t_from` on the noise side). `models` lists the solver's model calls
/// in application order; `order == models.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverStep {
    pub order: usize,
    pub models: Vec<usize>,
    pub t_from: f64,
    pub t_to: f64,
}

/// The decoded sampling plan.
#[derive(Debug, Clone, PartialEq)]
pub enum StepPlan {
    /// Active timesteps in strictly increasing `t` order (data to noise).
    Ddim { steps: Vec<DdimStep> },
    /// Solver steps in execution order (noise to data).
    DpmSolver { steps: Vec<SolverStep> },
}

impl StepPlan {
    pub fn is_empty(&self) -> bool {
        match self {
            StepPlan::Ddim { steps } => steps.is_empty(),
            StepPlan::DpmSolver { steps } => steps.is_empty(),
        }
    }

    /// Total number of denoiser calls the plan will make.
    pub fn total_model_calls(&self) -> usize {
        match self {
            StepPlan::Ddim { steps } => steps.len(),
            StepPlan::DpmSolver { steps } => steps.iter().map(|s| s.models.len()).sum(),
        }
    }
}

/// A fully specified schedule space: sampler kind, length, zoo size and
/// the time axis. Owns the lattice conventions so that decoding, scoring
/// and sampling all agree.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSpace {
    sampler: SamplerKind,
    length: usize,
    n_models: usize,
    noise: NoiseSchedule,
    /// Data-side sampling endpoint (keeps the log-SNR bounded).
    t_end: f64,
}

impl ScheduleSpace {
    pub const DEFAULT_T_END: f64 = 1e-3;

    pub fn new(
        sampler: SamplerKind,
        length: usize,
        n_models: usize,
        noise: NoiseSchedule,
        t_end: f64,
    ) -> Result<Self> {
        if length == 0 {
            return Err(Error::Config("schedule length must be >= 1".into()));
        }
        if sampler == SamplerKind::DpmSolver && length % 3 != 0 {
            return Err(Error::Config(format!(
                "dpm-solver schedule length must be divisible by 3, got {length}"
            )));
        }
        if n_models == 0 {
            return Err(Error::Config("need at least one model".into()));
        }
        if !(t_end > 0.0 && t_end < noise.t_max()) {
            return Err(Error::Config(format!(
                "t_end must lie in (0, {}), got {t_end}",
                noise.t_max()
            )));
        }
        Ok(Self {
            sampler,
            length,
            n_models,
            noise,
            t_end,
        })
    }

    pub fn sampler(&self) -> SamplerKind {
        self.sampler
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn n_models(&self) -> usize {
        self.n_models
    }

    pub fn noise(&self) -> &NoiseSchedule {
        &self.noise
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Number of sequence positions the predictor sees (L for DDIM,
    /// L/3 groups for DPM-Solver).
    pub fn positions(&self) -> usize {
        match self.sampler {
            SamplerKind::Ddim => self.length,
            SamplerKind::DpmSolver => self.length / 3,
        }
    }

    /// The linear DDIM lattice `t_1 < .. < t_L` over `[t_end, t_max]`.
    pub fn ddim_lattice(&self) -> Vec<f64> {
        discretize_linear(self.length, self.t_end, self.noise.t_max())
            .expect("valid lattice by construction")
    }

    pub fn validate(&self, schedule: &ModelSchedule) -> Result<()> {
        if schedule.sampler() != self.sampler {
            return Err(Error::InvalidSchedule(format!(
                "schedule sampler {:?} does not match space {:?}",
                schedule.sampler(),
                self.sampler
            )));
        }
        if schedule.len() != self.length {
            return Err(Error::InvalidSchedule(format!(
                "schedule length {} does not match space length {}",
                schedule.len(),
                self.length
            )));
        }
        if let Some(&e) = schedule.entries().iter().find(|&&e| e > self.n_models) {
            return Err(Error::InvalidSchedule(format!(
                "entry {e} exceeds zoo size {}",
                self.n_models
            )));
        }
        Ok(())
    }

    /// Decodes a schedule into its executable plan.
    pub fn decode(&self, schedule: &ModelSchedule) -> Result<StepPlan> {
        self.validate(schedule)?;
        match self.sampler {
            SamplerKind::Ddim => {
                let lattice = self.ddim_lattice();
                let steps = schedule
                    .entries()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(i, &e)| DdimStep {
                        t: lattice[i],
                        model: e,
                    })
                    .collect();
                Ok(StepPlan::Ddim { steps })
            }
            SamplerKind::DpmSolver => {
                let groups: Vec<&[usize]> = schedule.entries().chunks(3).collect();
                // Execution order is noise to data: descending group index.
                let active: Vec<&[usize]> = groups
                    .iter()
                    .rev()
                    .filter(|g| g.iter().any(|&e| e != 0))
                    .copied()
                    .collect();
                if active.is_empty() {
                    return Ok(StepPlan::DpmSolver { steps: Vec::new() });
                }
                let boundaries = self.noise.discretize_uniform_logsnr(
                    active.len(),
                    self.noise.t_max(),
                    self.t_end,
                )?;
                let steps = active
                    .iter()
                    .enumerate()
                    .map(|(k, group)| {
                        let models: Vec<usize> = group
                            .iter()
                            .rev() // higher-index entries applied first
                            .copied()
                            .filter(|&e| e != 0)
                            .collect();
                        SolverStep {
                            order: models.len(),
                            models,
                            t_from: boundaries[k],
                            t_to: boundaries[k + 1],
                        }
                    })
                    .collect();
                Ok(StepPlan::DpmSolver { steps })
            }
        }
    }

    /// Uniformly random entries over `{0..=N}`.
    pub fn random_schedule(&self, rng: &mut impl Rng) -> ModelSchedule {
        let entries = (0..self.length)
            .map(|_| rng.gen_range(0..=self.n_models))
            .collect();
        ModelSchedule::new(self.sampler, entries).expect("valid by construction")
    }

    /// Convenience check that the space and a zoo agree on N.
    pub fn check_zoo(&self, zoo: &ModelZoo) -> Result<()> {
        if zoo.n_models() != self.n_models {
            return Err(Error::Config(format!(
                "space expects {} models, zoo has {}",
                self.n_models,
                zoo.n_models()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ddim_space(l: usize) -> ScheduleSpace {
        ScheduleSpace::new(
            SamplerKind::Ddim,
            l,
            6,
            NoiseSchedule::default_linear(),
            ScheduleSpace::DEFAULT_T_END,
        )
        .unwrap()
    }

    fn dpm_space(l: usize) -> ScheduleSpace {
        ScheduleSpace::new(
            SamplerKind::DpmSolver,
            l,
            6,
            NoiseSchedule::default_linear(),
            ScheduleSpace::DEFAULT_T_END,
        )
        .unwrap()
    }

    #[test]
    fn dpm_solver_worked_example_decodes_exactly() {
        // Schedule [1,2,3,3,0,0,0,0,0,1,2,0]: three solver steps.
        // From noise to data: order-2 with models (2, 1), order-1 with
        // model 3, order-3 with models (3, 2, 1).
        let space = dpm_space(12);
        let q =
            ModelSchedule::new(SamplerKind::DpmSolver, vec![1, 2, 3, 3, 0, 0, 0, 0, 0, 1, 2, 0])
                .unwrap();
        let plan = space.decode(&q).unwrap();
        let StepPlan::DpmSolver { steps } = &plan else {
            panic!("expected dpm plan");
        };
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[0].order, 2);
        assert_eq!(steps[0].models, vec![2, 1]);
        assert_eq!(steps[1].order, 1);
        assert_eq!(steps[1].models, vec![3]);
        assert_eq!(steps[2].order, 3);
        assert_eq!(steps[2].models, vec![3, 2, 1]);
        // Three active groups -> four boundary timesteps descending from
        // noise to data, shared interval endpoints.
        assert_eq!(steps[0].t_from, 1.0);
        assert_eq!(steps[0].t_to, steps[1].t_from);
        assert_eq!(steps[1].t_to, steps[2].t_from);
        assert_eq!(steps[2].t_to, ScheduleSpace::DEFAULT_T_END);
        assert_eq!(plan.total_model_calls(), 6);
    }

    #[test]
    fn all_zero_schedules_decode_to_empty_plans() {
        let space = dpm_space(12);
        let q = ModelSchedule::new(SamplerKind::DpmSolver, vec![0; 12]).unwrap();
        let plan = space.decode(&q).unwrap();
        assert!(plan.is_empty());
        assert_eq!(plan.total_model_calls(), 0);

        let space = ddim_space(4);
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![0; 4]).unwrap();
        assert!(space.decode(&q).unwrap().is_empty());
    }

    #[test]
    fn ddim_positional_filter() {
        // [0,5,0,5] on lattice (t1..t4): active steps {t2, t4}, model 5.
        let space = ScheduleSpace::new(
            SamplerKind::Ddim,
            4,
            6,
            NoiseSchedule::default_linear(),
            1e-3,
        )
        .unwrap();
        let lattice = space.ddim_lattice();
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![0, 5, 0, 5]).unwrap();
        let StepPlan::Ddim { steps } = space.decode(&q).unwrap() else {
            panic!()
        };
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].t, lattice[1]);
        assert_eq!(steps[0].model, 5);
        assert_eq!(steps[1].t, lattice[3]);
        assert_eq!(steps[1].model, 5);
        // strictly increasing timesteps
        assert!(steps[0].t < steps[1].t);
    }

    #[test]
    fn model_calls_equal_nonzero_entries_for_both_samplers() {
        let mut rng = rand::SeedableRng::seed_from_u64(11);
        let rng: &mut rand_chacha::ChaCha8Rng = &mut rng;
        let ddim = ddim_space(10);
        let dpm = dpm_space(12);
        for _ in 0..50 {
            let q = ddim.random_schedule(rng);
            assert_eq!(
                ddim.decode(&q).unwrap().total_model_calls(),
                q.nonzero_count()
            );
            let q = dpm.random_schedule(rng);
            assert_eq!(
                dpm.decode(&q).unwrap().total_model_calls(),
                q.nonzero_count()
            );
        }
    }

    #[test]
    fn group_order_ignores_position_within_triple() {
        // Nonzero entries anywhere in the triple count toward the order.
        let space = dpm_space(6);
        let q = ModelSchedule::new(SamplerKind::DpmSolver, vec![0, 4, 0, 0, 0, 2]).unwrap();
        let StepPlan::DpmSolver { steps } = space.decode(&q).unwrap() else {
            panic!()
        };
        // group [0,0,2] is noise-side, group [0,4,0] data-side
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].models, vec![2]);
        assert_eq!(steps[1].models, vec![4]);
    }

    #[test]
    fn decode_rejects_out_of_range_entries() {
        let space = ddim_space(3);
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![0, 7, 0]).unwrap();
        assert!(matches!(
            space.decode(&q),
            Err(Error::InvalidSchedule(_))
        ));
    }

    #[test]
    fn space_rejects_dpm_length_not_divisible_by_three() {
        assert!(ScheduleSpace::new(
            SamplerKind::DpmSolver,
            10,
            3,
            NoiseSchedule::default_linear(),
            1e-3
        )
        .is_err());
    }
}
