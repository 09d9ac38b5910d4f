//! Schedule-quality dataset generation via multinomial sampling families.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::predictor::ScheduleRecord;
use crate::space::{ModelSchedule, ScheduleSpace};
use crate::{Error, Result};

/// Anything that can grade a schedule (lower is better).
pub trait Oracle {
    fn quality(&self, schedule: &ModelSchedule) -> Result<f64>;
}

impl<F> Oracle for F
where
    F: Fn(&ModelSchedule) -> Result<f64>,
{
    fn quality(&self, schedule: &ModelSchedule) -> Result<f64> {
        self(schedule)
    }
}

/// Deterministic stand-in oracle: quality is linear in per-model counts,
/// `sum over positions of coeffs[entry]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SyntheticOracle {
    /// One coefficient per entry value `0..=N`.
    pub coeffs: Vec<f64>,
}

impl SyntheticOracle {
    /// A default profile: skipping costs the most, larger model ids help
    /// more per call.
    pub fn default_for(n_models: usize) -> Self {
        let coeffs = (0..=n_models)
            .map(|id| {
                if id == 0 {
                    0.5
                } else {
                    -(id as f64) / n_models as f64
                }
            })
            .collect();
        Self { coeffs }
    }
}

impl Oracle for SyntheticOracle {
    fn quality(&self, schedule: &ModelSchedule) -> Result<f64> {
        let mut total = 0.0;
        for &e in schedule.entries() {
            total += self.coeffs.get(e).copied().ok_or_else(|| {
                Error::InvalidSchedule(format!(
                    "entry {e} has no synthetic coefficient (zoo size {})",
                    self.coeffs.len() - 1
                ))
            })?;
        }
        Ok(total)
    }
}

/// A multinomial distribution over entry values `{0..=N}` used to sample
/// training schedules.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SamplingFamily {
    pub name: String,
    pub probs: Vec<f64>,
}

impl SamplingFamily {
    pub fn uniform(name: impl Into<String>, n_models: usize) -> Self {
        Self {
            name: name.into(),
            probs: vec![1.0 / (n_models + 1) as f64; n_models + 1],
        }
    }

    pub fn validate(&self, n_models: usize) -> Result<()> {
        if self.probs.len() != n_models + 1 {
            return Err(Error::Config(format!(
                "family '{}' has {} probabilities, expected {}",
                self.name,
                self.probs.len(),
                n_models + 1
            )));
        }
        if self.probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Config(format!(
                "family '{}' has a negative or non-finite probability",
                self.name
            )));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "family '{}' probabilities sum to {total}, expected 1",
                self.name
            )));
        }
        Ok(())
    }
}

/// A generated record together with the family that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedRecord {
    pub record: ScheduleRecord,
    pub family: String,
}

/// Draws `count` schedules (families assigned round-robin, entries i.i.d.
/// per position) and grades each with the oracle.
pub fn generate_training_data(
    space: &ScheduleSpace,
    oracle: &dyn Oracle,
    families: &[SamplingFamily],
    count: usize,
    seed: u64,
) -> Result<Vec<GeneratedRecord>> {
    if families.is_empty() {
        return Err(Error::Config("need at least one sampling family".into()));
    }
    for f in families {
        f.validate(space.n_models())?;
    }
    let distributions: Vec<WeightedIndex<f64>> = families
        .iter()
        .map(|f| {
            WeightedIndex::new(f.probs.iter().copied())
                .map_err(|e| Error::Config(format!("family '{}': {e}", f.name)))
        })
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let fi = i % families.len();
        let entries: Vec<usize> = (0..space.length())
            .map(|_| distributions[fi].sample(&mut rng))
            .collect();
        let schedule = ModelSchedule::new(space.sampler(), entries)?;
        let quality = oracle.quality(&schedule)?;
        out.push(GeneratedRecord {
            record: ScheduleRecord::new(schedule, quality)?,
            family: families[fi].name.clone(),
        });
    }
    Ok(out)
}
