//! Predictor architecture and training hyperparameters.

use crate::space::SamplerKind;
use crate::{Error, Result};

/// Architecture of the schedule-quality predictor.
///
/// Defaults: model embedding 32, timestep embedding 64, solver embedding
/// 64 (DPM-Solver mode only), LSTM hidden size 128 with 1 layer, and a
/// 4-layer head of width 200.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PredictorConfig {
    pub sampler: SamplerKind,
    /// Zoo size N; the embedding table has N+1 rows (row 0 = null model).
    pub n_models: usize,
    pub model_embed_dim: usize,
    pub timestep_embed_dim: usize,
    pub solver_embed_dim: usize,
    pub hidden_size: usize,
    pub recurrent_layers: usize,
    pub head_layers: usize,
    pub head_width: usize,
}

impl PredictorConfig {
    pub fn defaults(sampler: SamplerKind, n_models: usize) -> Self {
        Self {
            sampler,
            n_models,
            model_embed_dim: 32,
            timestep_embed_dim: 64,
            solver_embed_dim: 64,
            hidden_size: 128,
            recurrent_layers: 1,
            head_layers: 4,
            head_width: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("n_models", self.n_models),
            ("model_embed_dim", self.model_embed_dim),
            ("timestep_embed_dim", self.timestep_embed_dim),
            ("solver_embed_dim", self.solver_embed_dim),
            ("hidden_size", self.hidden_size),
            ("recurrent_layers", self.recurrent_layers),
            ("head_layers", self.head_layers),
            ("head_width", self.head_width),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.timestep_embed_dim % 2 != 0 {
            return Err(Error::Config(format!(
                "timestep_embed_dim must be even for the sinusoidal encoding, got {}",
                self.timestep_embed_dim
            )));
        }
        Ok(())
    }

    /// LSTM input width: model (or solver) embedding plus timestep
    /// embedding.
    pub fn feature_dim(&self) -> usize {
        match self.sampler {
            SamplerKind::Ddim => self.model_embed_dim + self.timestep_embed_dim,
            SamplerKind::DpmSolver => self.solver_embed_dim + self.timestep_embed_dim,
        }
    }
}

/// Ranking-loss training hyperparameters. Defaults follow the compare
/// ratio 2, threshold 0.15 and margin 1.0 convention.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub margin: f64,
    pub compare_ratio: usize,
    pub threshold: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            margin: 1.0,
            compare_ratio: 2,
            threshold: 0.15,
            batch_size: 32,
            learning_rate: 1e-3,
            epochs: 100,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.margin > 0.0) {
            return Err(Error::Config(format!("margin must be > 0, got {}", self.margin)));
        }
        if self.threshold < 0.0 {
            return Err(Error::Config(format!(
                "threshold must be >= 0, got {}",
                self.threshold
            )));
        }
        if self.compare_ratio < 1 {
            return Err(Error::Config("compare_ratio must be >= 1".into()));
        }
        if self.batch_size < 2 {
            return Err(Error::Config("batch_size must be >= 2".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        PredictorConfig::defaults(SamplerKind::Ddim, 6).validate().unwrap();
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn odd_timestep_dim_is_rejected() {
        let mut cfg = PredictorConfig::defaults(SamplerKind::Ddim, 3);
        cfg.timestep_embed_dim = 63;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn feature_dim_depends_on_sampler() {
        let ddim = PredictorConfig::defaults(SamplerKind::Ddim, 3);
        assert_eq!(ddim.feature_dim(), 32 + 64);
        let dpm = PredictorConfig::defaults(SamplerKind::DpmSolver, 3);
        assert_eq!(dpm.feature_dim(), 64 + 64);
    }
}
