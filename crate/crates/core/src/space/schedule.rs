//! Model schedules, the latency cost model and the search-space size.

use num_bigint::BigUint;

use super::zoo::{Budget, ModelZoo};
use crate::{Error, Result};

/// The sampler family a schedule is decoded for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Ddim,
    DpmSolver,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::Ddim => "ddim",
            SamplerKind::DpmSolver => "dpm-solver",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ddim" => Ok(SamplerKind::Ddim),
            "dpm-solver" => Ok(SamplerKind::DpmSolver),
            other => Err(Error::Config(format!("unknown sampler kind '{other}'"))),
        }
    }
}

/// A length-L vector of model indices over pre-discretized timesteps; the
/// search variable. Entry `l` sits on timestep `t_l` with `t_1 < .. < t_L`
/// (index 0 nearest the data end); entry 0 selects the null model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelSchedule {
    sampler: SamplerKind,
    entries: Vec<usize>,
}

impl ModelSchedule {
    pub fn new(sampler: SamplerKind, entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSchedule("schedule length must be >= 1".into()));
        }
        if sampler == SamplerKind::DpmSolver && entries.len() % 3 != 0 {
            return Err(Error::InvalidSchedule(format!(
                "dpm-solver schedules need length divisible by 3, got {}",
                entries.len()
            )));
        }
        Ok(Self { sampler, entries })
    }

    pub fn sampler(&self) -> SamplerKind {
        self.sampler
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    pub fn is_all_null(&self) -> bool {
        self.nonzero_count() == 0
    }

    /// True when the nonzero entries all select the same model (or there
    /// are none); the "single model" baselines of schedule search.
    pub fn is_single_model(&self) -> bool {
        let mut seen = None;
        for &e in &self.entries {
            if e != 0 {
                match seen {
                    None => seen = Some(e),
                    Some(s) if s != e => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Every entry must name a model in the zoo.
    pub fn validate_against(&self, zoo: &ModelZoo) -> Result<()> {
        for &e in &self.entries {
            zoo.latency(e)?;
        }
        Ok(())
    }
}

/// Sum of latencies of all nonzero entries, in milliseconds. Null entries
/// contribute 0.
pub fn get_cost(schedule: &ModelSchedule, zoo: &ModelZoo) -> Result<f64> {
    let mut total = 0.0;
    for &e in schedule.entries() {
        total += zoo.latency(e)?;
    }
    Ok(total)
}

/// Strict budget test: `cost < limit`.
pub fn feasible(schedule: &ModelSchedule, zoo: &ModelZoo, budget: Budget) -> Result<bool> {
    Ok(get_cost(schedule, zoo)? < budget.limit_ms())
}

/// Exact size of the schedule space, `(N+1)^L`.
pub fn search_space_size(n_models: usize, length: usize) -> BigUint {
    BigUint::from(n_models + 1).pow(length as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cifar_zoo() -> ModelZoo {
        // Per-call latencies of a six-model zoo (ms).
        ModelZoo::from_latencies(&[35.99, 69.47, 55.06, 121.12, 140.01, 147.74]).unwrap()
    }

    #[test]
    fn all_zero_schedule_costs_nothing() {
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![0, 0, 0, 0]).unwrap();
        assert_eq!(get_cost(&q, &cifar_zoo()).unwrap(), 0.0);
    }

    #[test]
    fn cost_sums_latency_table_entries() {
        let zoo = cifar_zoo();
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![1, 2, 0]).unwrap();
        assert!((get_cost(&q, &zoo).unwrap() - 105.46).abs() < 1e-9);
        let q6 = ModelSchedule::new(SamplerKind::Ddim, vec![6, 6, 6]).unwrap();
        assert!((get_cost(&q6, &zoo).unwrap() - 443.22).abs() < 1e-9);
    }

    #[test]
    fn cost_is_additive_over_concatenation() {
        let zoo = cifar_zoo();
        let a = vec![1, 0, 3];
        let b = vec![6, 2, 0, 5];
        let qa = ModelSchedule::new(SamplerKind::Ddim, a.clone()).unwrap();
        let qb = ModelSchedule::new(SamplerKind::Ddim, b.clone()).unwrap();
        let mut ab = a;
        ab.extend(b);
        let qab = ModelSchedule::new(SamplerKind::Ddim, ab).unwrap();
        let sum = get_cost(&qa, &zoo).unwrap() + get_cost(&qb, &zoo).unwrap();
        assert!((get_cost(&qab, &zoo).unwrap() - sum).abs() < 1e-12);
    }

    #[test]
    fn zeroing_an_entry_never_increases_cost() {
        let zoo = cifar_zoo();
        let entries = vec![3, 1, 6, 0, 2, 4];
        let base = get_cost(
            &ModelSchedule::new(SamplerKind::Ddim, entries.clone()).unwrap(),
            &zoo,
        )
        .unwrap();
        for i in 0..entries.len() {
            let mut e = entries.clone();
            e[i] = 0;
            let c = get_cost(&ModelSchedule::new(SamplerKind::Ddim, e).unwrap(), &zoo).unwrap();
            assert!(c <= base + 1e-12);
        }
    }

    #[test]
    fn feasibility_is_strict() {
        let zoo = cifar_zoo();
        let zero = ModelSchedule::new(SamplerKind::Ddim, vec![0]).unwrap();
        assert!(feasible(&zero, &zoo, Budget::new(0.001).unwrap()).unwrap());
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![1, 2, 0]).unwrap();
        // cost exactly equal to the budget is infeasible
        assert!(!feasible(&q, &zoo, Budget::new(105.46).unwrap()).unwrap());
        assert!(!feasible(&q, &zoo, Budget::new(100.0).unwrap()).unwrap());
        assert!(feasible(&q, &zoo, Budget::new(105.47).unwrap()).unwrap());
    }

    #[test]
    fn invalid_entry_is_rejected() {
        let zoo = ModelZoo::from_latencies(&[1.0]).unwrap();
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![2]).unwrap();
        assert!(matches!(
            get_cost(&q, &zoo),
            Err(Error::InvalidSchedule(_))
        ));
    }

    #[test]
    fn dpm_solver_length_must_be_divisible_by_three() {
        assert!(ModelSchedule::new(SamplerKind::DpmSolver, vec![1, 2, 0, 1]).is_err());
        assert!(ModelSchedule::new(SamplerKind::DpmSolver, vec![1, 2, 0]).is_ok());
    }

    #[test]
    fn space_size_matches_closed_form() {
        assert_eq!(search_space_size(1, 1), BigUint::from(2u32));
        assert_eq!(search_space_size(2, 6), BigUint::from(729u32));
        // 7^100 has 85 digits and leading digits 3.2344765e84.
        let s = search_space_size(6, 100).to_string();
        assert_eq!(s.len(), 85);
        assert_eq!(
            s,
            "3234476509624757991344647769100216810857203198904625400933895331391691459636928060001"
        );
    }

    #[test]
    fn single_model_detection() {
        let q = ModelSchedule::new(SamplerKind::Ddim, vec![0, 5, 0, 5]).unwrap();
        assert!(q.is_single_model());
        let q2 = ModelSchedule::new(SamplerKind::Ddim, vec![0, 5, 1, 5]).unwrap();
        assert!(!q2.is_single_model());
        let zero = ModelSchedule::new(SamplerKind::Ddim, vec![0, 0]).unwrap();
        assert!(zero.is_single_model());
    }
}
