//! Run configuration: one TOML file describing the space, the zoo file,
//! the predictor and training hyperparameters, the search settings and
//! the laboratory world.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use modelsched_core::lab::{
    Denoiser, GaussianMixture, MixtureComponent, NeuralTrainConfig, Profile, SamplingFamily,
    SyntheticOracle, ToyDiffusionWorld,
};
use modelsched_core::predictor::{PredictorConfig, TrainConfig};
use modelsched_core::search::SearchConfig;
use modelsched_core::space::{Budget, ModelZoo, NoiseSchedule, SamplerKind, ScheduleSpace};
use modelsched_core::Error as CoreError;

fn default_t_end() -> f64 {
    ScheduleSpace::DEFAULT_T_END
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSection {
    pub beta_min: f64,
    pub beta_max: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            beta_min: 0.1,
            beta_max: 20.0,
            t_end: default_t_end(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictorSection {
    pub model_embed_dim: usize,
    pub timestep_embed_dim: usize,
    pub solver_embed_dim: usize,
    pub hidden_size: usize,
    pub recurrent_layers: usize,
    pub head_layers: usize,
    pub head_width: usize,
}

impl Default for PredictorSection {
    fn default() -> Self {
        Self {
            model_embed_dim: 32,
            timestep_embed_dim: 64,
            solver_embed_dim: 64,
            hidden_size: 128,
            recurrent_layers: 1,
            head_layers: 4,
            head_width: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSection {
    pub margin: f64,
    pub compare_ratio: usize,
    pub threshold: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            margin: 1.0,
            compare_ratio: 2,
            threshold: 0.15,
            batch_size: 32,
            learning_rate: 1e-3,
            epochs: 100,
            validation_fraction: 0.3,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSection {
    pub epochs: usize,
    pub candidate_parents: usize,
    pub mutation_attempts: usize,
    pub next_gen_cap: usize,
    pub population_cap: usize,
    pub mutation_rate: f64,
    pub init_cost_floor_fraction: f64,
    pub patience: Option<usize>,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            epochs: 600,
            candidate_parents: 10,
            mutation_attempts: 200,
            next_gen_cap: 40,
            population_cap: 40,
            mutation_rate: 0.1,
            init_cost_floor_fraction: 0.9,
            patience: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DataSection {
    pub count: usize,
    /// Empty means: build the standard family set for the zoo size.
    pub families: Vec<SamplingFamily>,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            count: 2000,
            families: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MixtureSection {
    Ring {
        components: usize,
        radius: f64,
        std: f64,
    },
    Explicit {
        dim: usize,
        components: Vec<MixtureComponent>,
    },
}

impl Default for MixtureSection {
    fn default() -> Self {
        MixtureSection::Ring {
            components: 8,
            radius: 4.0,
            std: 0.3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DenoiserSection {
    Exact,
    Perturbed {
        bias: Profile,
        noise: Profile,
        direction: Vec<f64>,
    },
    Neural {
        hidden_widths: Vec<usize>,
        train_steps: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LabSection {
    pub mixture: MixtureSection,
    /// Index-aligned with the zoo file (denoiser i serves model id i+1).
    pub denoisers: Vec<DenoiserSection>,
    pub eval_samples: usize,
    pub reference_samples: usize,
    pub eval_seed: u64,
    /// Baseline step counts are capped here to bound runtime.
    pub max_baseline_steps: usize,
}

impl Default for LabSection {
    fn default() -> Self {
        Self {
            mixture: MixtureSection::default(),
            denoisers: Vec::new(),
            eval_samples: 256,
            reference_samples: 512,
            eval_seed: 1234,
            max_baseline_steps: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub sampler: SamplerKind,
    pub schedule_length: usize,
    pub zoo_file: PathBuf,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Budgets used when a command is not given `--budget-ms`.
    #[serde(default)]
    pub budgets_ms: Vec<f64>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub predictor: PredictorSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub lab: LabSection,
    /// Synthetic-oracle coefficients (defaults derived from the zoo size).
    #[serde(default)]
    pub synthetic_coeffs: Vec<f64>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Reads and structurally validates a config; paths inside the file
    /// are resolved relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, CoreError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoreError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CoreError::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            if cfg.zoo_file.is_relative() {
                cfg.zoo_file = dir.join(&cfg.zoo_file);
            }
            if cfg.output_dir.is_relative() {
                cfg.output_dir = dir.join(&cfg.output_dir);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.schedule_length == 0 {
            return Err(CoreError::Config("schedule_length must be >= 1".into()));
        }
        if self.sampler == SamplerKind::DpmSolver && self.schedule_length % 3 != 0 {
            return Err(CoreError::Config(format!(
                "dpm-solver schedule_length must be divisible by 3, got {}",
                self.schedule_length
            )));
        }
        if !self.zoo_file.exists() {
            return Err(CoreError::Config(format!(
                "zoo file {} does not exist",
                self.zoo_file.display()
            )));
        }
        for &b in &self.budgets_ms {
            Budget::new(b)?;
        }
        Ok(())
    }

    pub fn noise_schedule(&self) -> Result<NoiseSchedule, CoreError> {
        NoiseSchedule::linear(self.noise.beta_min, self.noise.beta_max)
    }

    pub fn space(&self, zoo: &ModelZoo) -> Result<ScheduleSpace, CoreError> {
        ScheduleSpace::new(
            self.sampler,
            self.schedule_length,
            zoo.n_models(),
            self.noise_schedule()?,
            self.noise.t_end,
        )
    }

    pub fn predictor_config(&self, zoo: &ModelZoo) -> PredictorConfig {
        let p = &self.predictor;
        PredictorConfig {
            sampler: self.sampler,
            n_models: zoo.n_models(),
            model_embed_dim: p.model_embed_dim,
            timestep_embed_dim: p.timestep_embed_dim,
            solver_embed_dim: p.solver_embed_dim,
            hidden_size: p.hidden_size,
            recurrent_layers: p.recurrent_layers,
            head_layers: p.head_layers,
            head_width: p.head_width,
        }
    }

    pub fn train_config(&self, seed_override: Option<u64>) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            margin: t.margin,
            compare_ratio: t.compare_ratio,
            threshold: t.threshold,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            seed: seed_override.unwrap_or(t.seed),
        }
    }

    pub fn search_config(&self, budget: Budget, seed: u64) -> SearchConfig {
        let s = &self.search;
        SearchConfig {
            epochs: s.epochs,
            candidate_parents: s.candidate_parents,
            mutation_attempts: s.mutation_attempts,
            next_gen_cap: s.next_gen_cap,
            population_cap: s.population_cap,
            mutation_rate: s.mutation_rate,
            init_cost_floor_fraction: s.init_cost_floor_fraction,
            patience: s.patience,
            budget,
            seed,
        }
    }

    /// The sampling families, or a standard spread (uniform, sparse, and
    /// one family favoring each model) when none are configured.
    pub fn families(&self, n_models: usize) -> Vec<SamplingFamily> {
        if !self.data.families.is_empty() {
            return self.data.families.clone();
        }
        let mut families = vec![SamplingFamily::uniform("uniform", n_models)];
        let mut sparse = vec![0.3 / n_models as f64; n_models + 1];
        sparse[0] = 0.7;
        families.push(SamplingFamily {
            name: "sparse".into(),
            probs: sparse,
        });
        for id in 1..=n_models {
            let mut probs = if n_models > 1 {
                vec![0.2 / (n_models - 1) as f64; n_models + 1]
            } else {
                vec![0.0; n_models + 1]
            };
            probs[0] = 0.25;
            probs[id] = if n_models > 1 { 0.55 } else { 0.75 };
            families.push(SamplingFamily {
                name: format!("favor-{id}"),
                probs,
            });
        }
        families
    }

    pub fn synthetic_oracle(&self, n_models: usize) -> Result<SyntheticOracle, CoreError> {
        if self.synthetic_coeffs.is_empty() {
            return Ok(SyntheticOracle::default_for(n_models));
        }
        if self.synthetic_coeffs.len() != n_models + 1 {
            return Err(CoreError::Config(format!(
                "synthetic_coeffs needs {} entries (one per id 0..={}), got {}",
                n_models + 1,
                n_models,
                self.synthetic_coeffs.len()
            )));
        }
        Ok(SyntheticOracle {
            coeffs: self.synthetic_coeffs.clone(),
        })
    }

    fn mixture(&self) -> Result<GaussianMixture, CoreError> {
        match &self.lab.mixture {
            MixtureSection::Ring {
                components,
                radius,
                std,
            } => GaussianMixture::ring(*components, *radius, *std),
            MixtureSection::Explicit { dim, components } => {
                GaussianMixture::new(*dim, components.clone())
            }
        }
    }

    /// Builds the laboratory world; denoiser latencies and names come from
    /// the zoo file, profiles from the `[lab]` section.
    pub fn world(&self, zoo: &ModelZoo) -> Result<ToyDiffusionWorld, CoreError> {
        if self.lab.denoisers.is_empty() {
            return Err(CoreError::Config(
                "the lab oracle needs [[lab.denoisers]] entries (one per zoo model)".into(),
            ));
        }
        if self.lab.denoisers.len() != zoo.n_models() {
            return Err(CoreError::Config(format!(
                "{} lab denoisers configured but the zoo has {} models",
                self.lab.denoisers.len(),
                zoo.n_models()
            )));
        }
        let mixture = self.mixture()?;
        let noise = self.noise_schedule()?;
        let mut denoisers = Vec::with_capacity(zoo.n_models());
        for (section, info) in self.lab.denoisers.iter().zip(zoo.models()) {
            let denoiser = match section {
                DenoiserSection::Exact => Denoiser::exact(info.name.clone(), info.latency_ms),
                DenoiserSection::Perturbed {
                    bias,
                    noise: noise_gain,
                    direction,
                } => Denoiser::perturbed(
                    info.name.clone(),
                    info.latency_ms,
                    *bias,
                    *noise_gain,
                    direction.clone(),
                )?,
                DenoiserSection::Neural {
                    hidden_widths,
                    train_steps,
                    seed,
                } => {
                    let net = modelsched_core::lab::train_neural_denoiser(
                        &mixture,
                        &noise,
                        &NeuralTrainConfig {
                            hidden_widths: hidden_widths.clone(),
                            steps: *train_steps,
                            t_end: self.noise.t_end,
                            seed: *seed,
                            ..NeuralTrainConfig::default()
                        },
                    )?;
                    Denoiser {
                        name: info.name.clone(),
                        kind: modelsched_core::lab::DenoiserKind::Neural(net),
                        latency_ms: info.latency_ms,
                    }
                }
            };
            denoisers.push(denoiser);
        }
        ToyDiffusionWorld::new(mixture, noise, denoisers)
    }
}
