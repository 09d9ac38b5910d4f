//! Shared command context: config + zoo + space, oracle selection and
//! report output.

use std::path::{Path, PathBuf};

use modelsched_core::lab::{LabOracle, Oracle, SyntheticOracle, ToyDiffusionWorld};
use modelsched_core::space::{Budget, ModelSchedule, ModelZoo, ScheduleSpace};
use modelsched_core::Error as CoreError;

use crate::config::RunConfig;
use crate::formats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleChoice {
    /// Toy diffusion laboratory (energy distance to reference samples).
    Lab,
    /// Deterministic synthetic function of the schedule.
    Synthetic,
}

pub struct Ctx {
    pub config: RunConfig,
    pub zoo: ModelZoo,
    pub space: ScheduleSpace,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub oracle_choice: OracleChoice,
}

impl Ctx {
    pub fn new(
        config_path: &Path,
        seed: Option<u64>,
        out: Option<PathBuf>,
        oracle_choice: OracleChoice,
    ) -> Result<Self, CoreError> {
        let config = RunConfig::load(config_path)?;
        let zoo = formats::read_zoo(&config.zoo_file)?;
        let space = config.space(&zoo)?;
        let out_dir = out.unwrap_or_else(|| config.output_dir.clone());
        let seed = seed.unwrap_or(config.seed);
        Ok(Self {
            config,
            zoo,
            space,
            out_dir,
            seed,
            oracle_choice,
        })
    }

    /// Budgets for this invocation: the flag wins, otherwise the config
    /// list.
    pub fn budgets(&self, flag: Option<f64>) -> Result<Vec<Budget>, CoreError> {
        match flag {
            Some(b) => Ok(vec![Budget::new(b)?]),
            None if !self.config.budgets_ms.is_empty() => self
                .config
                .budgets_ms
                .iter()
                .map(|&b| Budget::new(b))
                .collect(),
            None => Err(CoreError::Config(
                "no budget: pass --budget-ms or set budgets_ms in the config".into(),
            )),
        }
    }

    pub fn write_output(&self, name: &str, content: &str) -> Result<PathBuf, CoreError> {
        std::fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, content)?;
        Ok(path)
    }
}

/// An owned oracle bundle; the lab variant carries its world.
pub enum QualityOracle<'a> {
    Lab(LabOracle<'a>),
    Synthetic(SyntheticOracle),
}

impl Oracle for QualityOracle<'_> {
    fn quality(&self, schedule: &ModelSchedule) -> Result<f64, CoreError> {
        match self {
            QualityOracle::Lab(o) => o.quality(schedule),
            QualityOracle::Synthetic(o) => o.quality(schedule),
        }
    }
}

/// Builds the lab world when the lab oracle is requested (the world owns
/// trained neural denoisers, so it is built once per command).
pub fn build_world(ctx: &Ctx) -> Result<Option<ToyDiffusionWorld>, CoreError> {
    match ctx.oracle_choice {
        OracleChoice::Lab => Ok(Some(ctx.config.world(&ctx.zoo)?)),
        OracleChoice::Synthetic => Ok(None),
    }
}

/// Builds the oracle over a given space (which may differ in length from
/// the config space, e.g. for baselines and eval).
pub fn build_oracle<'a>(
    ctx: &Ctx,
    world: &'a Option<ToyDiffusionWorld>,
    space: &'a ScheduleSpace,
) -> Result<QualityOracle<'a>, CoreError> {
    match ctx.oracle_choice {
        OracleChoice::Lab => {
            let world = world
                .as_ref()
                .expect("world is built whenever the lab oracle is chosen");
            Ok(QualityOracle::Lab(LabOracle::new(
                world,
                space,
                ctx.config.lab.eval_samples,
                ctx.config.lab.reference_samples,
                ctx.config.lab.eval_seed,
            )?))
        }
        OracleChoice::Synthetic => Ok(QualityOracle::Synthetic(
            ctx.config.synthetic_oracle(ctx.zoo.n_models())?,
        )),
    }
}
