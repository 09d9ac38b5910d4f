//! Budget-constrained evolutionary search over model schedules, plus a
//! brute-force enumerator used as a correctness oracle on small spaces.
//!
//! One loop of the search: sample a candidate-parent set from the
//! population, pick the best-scoring parent, mutate it up to `iter` times
//! collecting at most `M_NG` feasible children, merge them into the
//! population and evict the worst members beyond `M_P`. The best member
//! after all epochs is the result. The scorer must be pure (lower is
//! better); identical seeds give identical traces and results.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{feasible, get_cost, search_space_size, Budget, ModelSchedule, ModelZoo, SamplerKind};
use crate::{Error, Result};

/// Evolutionary search hyperparameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchConfig {
    /// Number of search loops.
    pub epochs: usize,
    /// Maximum size of the candidate-parent set sampled per loop.
    pub candidate_parents: usize,
    /// Maximum mutation attempts per loop.
    pub mutation_attempts: usize,
    /// Maximum size of the next-generation set per loop.
    pub next_gen_cap: usize,
    /// Maximum population size.
    pub population_cap: usize,
    /// Per-position mutation probability.
    pub mutation_rate: f64,
    /// The initial schedule is rejection-sampled until its cost lands in
    /// `[floor_fraction * C, C)`.
    pub init_cost_floor_fraction: f64,
    /// Stop early when the best score has not improved for this many
    /// epochs. Disabled by default.
    pub patience: Option<usize>,
    pub budget: Budget,
    pub seed: u64,
}

impl SearchConfig {
    pub fn defaults(budget: Budget, seed: u64) -> Self {
        Self {
            epochs: 600,
            candidate_parents: 10,
            mutation_attempts: 200,
            next_gen_cap: 40,
            population_cap: 40,
            mutation_rate: 0.1,
            init_cost_floor_fraction: 0.9,
            patience: None,
            budget,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0
            || self.candidate_parents == 0
            || self.mutation_attempts == 0
            || self.next_gen_cap == 0
            || self.population_cap == 0
        {
            return Err(Error::Config("search caps must all be positive".into()));
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate <= 1.0) {
            return Err(Error::Config(format!(
                "mutation_rate must be in (0, 1], got {}",
                self.mutation_rate
            )));
        }
        if !(self.init_cost_floor_fraction > 0.0 && self.init_cost_floor_fraction < 1.0) {
            return Err(Error::Config(format!(
                "init_cost_floor_fraction must be in (0, 1), got {}",
                self.init_cost_floor_fraction
            )));
        }
        Ok(())
    }
}

/// Search result: the best schedule found, its score, the per-epoch
/// best-score trace and the number of scorer evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: ModelSchedule,
    pub best_score: f64,
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

const INIT_REJECTION_ATTEMPTS: usize = 10_000;

/// Draws an initial schedule whose cost lands in
/// `[floor_fraction * C, C)`: uniform random entries, rejection-sampled a
/// bounded number of times, then a greedy fill fallback (random positions
/// get random models while the cost stays under budget).
pub fn init_schedule(
    zoo: &ModelZoo,
    length: usize,
    sampler: SamplerKind,
    budget: Budget,
    floor_fraction: f64,
    rng: &mut impl Rng,
) -> Result<ModelSchedule> {
    if zoo.min_latency() >= budget.limit_ms() {
        return Err(Error::InfeasibleBudget(format!(
            "cheapest model costs {} ms, budget is {} ms",
            zoo.min_latency(),
            budget.limit_ms()
        )));
    }
    let n = zoo.n_models();
    let floor = floor_fraction * budget.limit_ms();
    for _ in 0..INIT_REJECTION_ATTEMPTS {
        let entries: Vec<usize> = (0..length).map(|_| rng.gen_range(0..=n)).collect();
        let q = ModelSchedule::new(sampler, entries)?;
        let cost = get_cost(&q, zoo)?;
        if cost >= floor && cost < budget.limit_ms() {
            return Ok(q);
        }
    }
    // Greedy fill: visit positions in random order, assign a random model
    // wherever it keeps the schedule under budget, stop once past the
    // cost floor. When the budget dwarfs the whole space this returns a
    // full (still feasible) schedule below the floor.
    let mut entries = vec![0usize; length];
    let mut cost = 0.0;
    let mut order: Vec<usize> = (0..length).collect();
    order.shuffle(rng);
    for pos in order {
        if cost >= floor {
            break;
        }
        let candidate = rng.gen_range(1..=n);
        let latency = zoo.latency(candidate)?;
        if cost + latency < budget.limit_ms() {
            entries[pos] = candidate;
            cost += latency;
        }
    }
    ModelSchedule::new(sampler, entries)
}

/// Independently resamples every position uniformly over `{0..=N}` with
/// probability `mutation_rate`; if the result equals the input, one random
/// position is forced to a different value.
pub fn mutate(
    schedule: &ModelSchedule,
    n_models: usize,
    mutation_rate: f64,
    rng: &mut impl Rng,
) -> ModelSchedule {
    let mut entries = schedule.entries().to_vec();
    for e in entries.iter_mut() {
        if rng.gen_range(0.0..1.0) < mutation_rate {
            *e = rng.gen_range(0..=n_models);
        }
    }
    if entries == schedule.entries() {
        let pos = rng.gen_range(0..entries.len());
        let current = entries[pos];
        // uniform over the N remaining values
        let mut replacement = rng.gen_range(0..n_models);
        if replacement >= current {
            replacement += 1;
        }
        entries[pos] = replacement;
    }
    ModelSchedule::new(schedule.sampler(), entries).expect("mutation preserves validity")
}

fn better(a: &(ModelSchedule, f64), b: &(ModelSchedule, f64)) -> bool {
    // lower score wins; lexicographically smaller schedule breaks ties
    a.1 < b.1 || (a.1 == b.1 && a.0.entries() < b.0.entries())
}

/// Runs the evolutionary search. `scorer` must be total on feasible
/// schedules, pure, and lower-is-better.
pub fn evolve<F>(
    scorer: F,
    zoo: &ModelZoo,
    length: usize,
    sampler: SamplerKind,
    cfg: &SearchConfig,
) -> Result<SearchOutcome>
where
    F: Fn(&ModelSchedule) -> Result<f64>,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evaluations = 0usize;
    let score = |q: &ModelSchedule, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        scorer(q)
    };

    let q0 = init_schedule(
        zoo,
        length,
        sampler,
        cfg.budget,
        cfg.init_cost_floor_fraction,
        &mut rng,
    )?;
    let s0 = score(&q0, &mut evaluations)?;
    let mut population: Vec<(ModelSchedule, f64)> = vec![(q0.clone(), s0)];
    let mut member_set: HashSet<Vec<usize>> = HashSet::new();
    member_set.insert(q0.entries().to_vec());

    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut stale_epochs = 0usize;

    for _epoch in 0..cfg.epochs {
        // candidate parents: uniform without replacement
        let k = cfg.candidate_parents.min(population.len());
        let cp = rand::seq::index::sample(&mut rng, population.len(), k);
        let parent_idx = cp
            .iter()
            .reduce(|a, b| if better(&population[b], &population[a]) { b } else { a })
            .expect("k >= 1");
        let parent = population[parent_idx].0.clone();

        let mut next_gen: Vec<(ModelSchedule, f64)> = Vec::new();
        let mut ng_set: HashSet<Vec<usize>> = HashSet::new();
        let mut attempts = 0usize;
        while attempts < cfg.mutation_attempts && next_gen.len() < cfg.next_gen_cap {
            let child = mutate(&parent, zoo.n_models(), cfg.mutation_rate, &mut rng);
            attempts += 1;
            if !feasible(&child, zoo, cfg.budget)? {
                continue;
            }
            let key = child.entries().to_vec();
            if member_set.contains(&key) || ng_set.contains(&key) {
                continue;
            }
            let s = score(&child, &mut evaluations)?;
            ng_set.insert(key);
            next_gen.push((child, s));
        }

        for (child, s) in next_gen {
            member_set.insert(child.entries().to_vec());
            population.push((child, s));
        }
        if population.len() > cfg.population_cap {
            // evict the max-score members; keep ordering deterministic
            population.sort_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .expect("finite scores")
                    .then_with(|| a.0.entries().cmp(b.0.entries()))
            });
            for (q, _) in &population[cfg.population_cap..] {
                member_set.remove(&q.entries().to_vec());
            }
            population.truncate(cfg.population_cap);
        }

        let best_now = population
            .iter()
            .cloned()
            .reduce(|a, b| if better(&b, &a) { b } else { a })
            .expect("population nonempty");
        if let Some(prev) = trace.last() {
            if best_now.1 < *prev {
                stale_epochs = 0;
            } else {
                stale_epochs += 1;
            }
        }
        trace.push(best_now.1);
        if let Some(patience) = cfg.patience {
            if stale_epochs >= patience {
                break;
            }
        }
    }

    let (best, best_score) = population
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("population nonempty");
    Ok(SearchOutcome {
        best,
        best_score,
        trace,
        evaluations,
    })
}

/// Brute-force search result.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOutcome {
    pub best: ModelSchedule,
    pub best_score: f64,
    /// Number of schedules enumerated (feasible or not).
    pub examined: usize,
}

/// Enumeration cap for [`brute_force`].
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Enumerates every schedule in the space, filters by the strict budget
/// test, and returns the feasible minimum-score schedule (ties broken
/// lexicographically). Refuses spaces larger than [`BRUTE_FORCE_LIMIT`].
pub fn brute_force<F>(
    scorer: F,
    zoo: &ModelZoo,
    length: usize,
    sampler: SamplerKind,
    budget: Budget,
) -> Result<BruteForceOutcome>
where
    F: Fn(&ModelSchedule) -> Result<f64>,
{
    let size = search_space_size(zoo.n_models(), length);
    if size > BRUTE_FORCE_LIMIT.into() {
        return Err(Error::SpaceTooLarge {
            size: size.to_string(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let n = zoo.n_models();
    let mut entries = vec![0usize; length];
    let mut best: Option<(ModelSchedule, f64)> = None;
    let mut examined = 0usize;
    loop {
        examined += 1;
        let q = ModelSchedule::new(sampler, entries.clone())?;
        if feasible(&q, zoo, budget)? {
            let s = scorer(&q)?;
            let candidate = (q, s);
            best = Some(match best.take() {
                None => candidate,
                Some(cur) => {
                    if better(&candidate, &cur) {
                        candidate
                    } else {
                        cur
                    }
                }
            });
        }
        // odometer increment, last position fastest
        let mut pos = length;
        loop {
            if pos == 0 {
                return best
                    .map(|(best, best_score)| BruteForceOutcome {
                        best,
                        best_score,
                        examined,
                    })
                    .ok_or_else(|| {
                        Error::InfeasibleBudget(
                            "no schedule satisfies the budget (not even the empty one)".into(),
                        )
                    });
            }
            pos -= 1;
            if entries[pos] < n {
                entries[pos] += 1;
                break;
            }
            entries[pos] = 0;
        }
    }
}
