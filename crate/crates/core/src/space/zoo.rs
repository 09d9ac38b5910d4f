//! Model zoo and generation-time budget.

use crate::{Error, Result};

/// One candidate denoiser: contiguous id starting at 1, a display name and
/// a per-call latency. The null model (id 0, latency 0) is implicit and
/// never stored.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelInfo {
    pub id: usize,
    pub name: String,
    pub latency_ms: f64,
}

/// The set of candidate denoisers with per-call latencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelZoo {
    models: Vec<ModelInfo>,
}

impl ModelZoo {
    /// Validates that ids are unique and contiguous `1..=N` and latencies
    /// strictly positive.
    pub fn new(models: Vec<ModelInfo>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::Config("model zoo is empty".into()));
        }
        for (i, m) in models.iter().enumerate() {
            if m.id != i + 1 {
                return Err(Error::Config(format!(
                    "model ids must be contiguous from 1; position {} has id {}",
                    i + 1,
                    m.id
                )));
            }
            if !(m.latency_ms > 0.0 && m.latency_ms.is_finite()) {
                return Err(Error::Config(format!(
                    "model {} has non-positive latency {}",
                    m.id, m.latency_ms
                )));
            }
        }
        Ok(Self { models })
    }

    /// Convenience constructor: models named `model1..modelN`.
    pub fn from_latencies(latencies: &[f64]) -> Result<Self> {
        Self::new(
            latencies
                .iter()
                .enumerate()
                .map(|(i, &l)| ModelInfo {
                    id: i + 1,
                    name: format!("model{}", i + 1),
                    latency_ms: l,
                })
                .collect(),
        )
    }

    /// Number of real models N (the null model is not counted).
    pub fn n_models(&self) -> usize {
        self.models.len()
    }

    pub fn models(&self) -> &[ModelInfo] {
        &self.models
    }

    /// Latency of a schedule entry. Entry 0 (the null model) costs nothing.
    pub fn latency(&self, entry: usize) -> Result<f64> {
        if entry == 0 {
            return Ok(0.0);
        }
        self.models
            .get(entry - 1)
            .map(|m| m.latency_ms)
            .ok_or_else(|| {
                Error::InvalidSchedule(format!(
                    "entry {entry} exceeds zoo size {}",
                    self.models.len()
                ))
            })
    }

    pub fn min_latency(&self) -> f64 {
        self.models
            .iter()
            .map(|m| m.latency_ms)
            .fold(f64::INFINITY, f64::min)
    }

    /// Stable fingerprint of (N, latency list); used to bind predictor
    /// checkpoints to the zoo they were trained against. FNV-1a over the
    /// exact latency bit patterns.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01B3);
            }
        };
        mix(&(self.models.len() as u64).to_le_bytes());
        for m in &self.models {
            mix(&m.latency_ms.to_bits().to_le_bytes());
        }
        h
    }
}

/// A strictly positive, finite generation-time budget in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    limit_ms: f64,
}

impl Budget {
    pub fn new(limit_ms: f64) -> Result<Self> {
        if !(limit_ms > 0.0 && limit_ms.is_finite()) {
            return Err(Error::Config(format!(
                "budget must be positive and finite, got {limit_ms}"
            )));
        }
        Ok(Self { limit_ms })
    }

    pub fn limit_ms(&self) -> f64 {
        self.limit_ms
    }
}
