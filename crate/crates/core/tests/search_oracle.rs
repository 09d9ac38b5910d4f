//! Evolutionary search validated against exhaustive enumeration on a
//! small space, plus determinism and budget-invariant checks.

use modelsched_core::search::{brute_force, evolve, SearchConfig};
use modelsched_core::space::{feasible, get_cost, Budget, ModelSchedule, ModelZoo, SamplerKind};
use modelsched_core::Result;

/// Synthetic scorer over N=2, L=6 schedules: per-position weights plus a
/// repetition penalty, so the optimum is a genuinely mixed schedule.
fn synthetic_score(q: &ModelSchedule) -> Result<f64> {
    const WEIGHTS: [[f64; 3]; 6] = [
        [0.8, 0.3, 0.6],
        [0.2, 0.9, 0.4],
        [0.6, 0.1, 0.8],
        [0.4, 0.7, 0.2],
        [0.9, 0.5, 0.1],
        [0.3, 0.2, 0.7],
    ];
    let mut s = 0.0;
    for (l, &e) in q.entries().iter().enumerate() {
        s += WEIGHTS[l][e];
    }
    for w in q.entries().windows(2) {
        if w[0] == w[1] {
            s += 0.1;
        }
    }
    Ok(s)
}

fn zoo() -> ModelZoo {
    ModelZoo::from_latencies(&[1.0, 2.0]).unwrap()
}

#[test]
fn evolve_finds_brute_force_optimum_in_95_of_100_seeds() {
    let zoo = zoo();
    let budget = Budget::new(7.0).unwrap();
    let exact = brute_force(synthetic_score, &zoo, 6, SamplerKind::DpmSolver, budget).unwrap();
    assert_eq!(exact.examined, 729);
    // the budget must actually bite
    assert!(get_cost(&exact.best, &zoo).unwrap() < 7.0);

    let mut hits = 0;
    for seed in 0..100 {
        let cfg = SearchConfig {
            epochs: 200,
            ..SearchConfig::defaults(budget, seed)
        };
        let out = evolve(synthetic_score, &zoo, 6, SamplerKind::DpmSolver, &cfg).unwrap();
        // within 1% of the optimum counts as a hit (exact match expected)
        if out.best_score <= exact.best_score * 1.01 {
            hits += 1;
        }
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0], "seed {seed}: trace not monotone");
        }
        assert!(feasible(&out.best, &zoo, budget).unwrap());
    }
    assert!(hits >= 95, "only {hits}/100 seeds reached the optimum");
}

#[test]
fn search_is_deterministic_per_seed() {
    let budget = Budget::new(6.5).unwrap();
    let cfg = SearchConfig {
        epochs: 120,
        ..SearchConfig::defaults(budget, 31)
    };
    let a = evolve(synthetic_score, &zoo(), 6, SamplerKind::DpmSolver, &cfg).unwrap();
    let b = evolve(synthetic_score, &zoo(), 6, SamplerKind::DpmSolver, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn patience_terminates_early_without_changing_the_result_kind() {
    let budget = Budget::new(7.0).unwrap();
    let cfg = SearchConfig {
        epochs: 600,
        patience: Some(50),
        ..SearchConfig::defaults(budget, 3)
    };
    let out = evolve(synthetic_score, &zoo(), 6, SamplerKind::DpmSolver, &cfg).unwrap();
    assert!(out.trace.len() < 600, "patience did not trigger");
    assert!(feasible(&out.best, &zoo(), budget).unwrap());
}
