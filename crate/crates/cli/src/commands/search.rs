//! `search`: predictor-guided evolutionary search under a budget, run
//! with 3 seeds; reports mean and standard deviation of the true quality
//! of the found schedules.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use modelsched_core::lab::Oracle;
use modelsched_core::predictor::load_predictor;
use modelsched_core::search::evolve;
use modelsched_core::space::get_cost;
use modelsched_core::Error as CoreError;

use crate::context::{build_oracle, build_world, Ctx};
use crate::formats;

const SEARCH_SEEDS: u64 = 3;

pub fn run(ctx: &Ctx, checkpoint: Option<PathBuf>, budget_flag: Option<f64>) -> Result<(), CoreError> {
    let ckpt_path = checkpoint.unwrap_or_else(|| ctx.out_dir.join("predictor.ckpt"));
    let predictor = load_predictor(BufReader::new(File::open(&ckpt_path)?), &ctx.zoo)?;
    let budgets = ctx.budgets(budget_flag)?;
    let world = build_world(ctx)?;
    let oracle = build_oracle(ctx, &world, &ctx.space)?;

    let mut rpt = String::new();
    let _ = writeln!(rpt, "checkpoint: {}", ckpt_path.display());
    let _ = writeln!(
        rpt,
        "search: epochs {} candidate_parents {} mutation_attempts {} next_gen_cap {} population_cap {} mutation_rate {}",
        ctx.config.search.epochs,
        ctx.config.search.candidate_parents,
        ctx.config.search.mutation_attempts,
        ctx.config.search.next_gen_cap,
        ctx.config.search.population_cap,
        ctx.config.search.mutation_rate
    );

    for (bi, &budget) in budgets.iter().enumerate() {
        let _ = writeln!(rpt, "\nbudget: {} ms", budget.limit_ms());
        let mut best_schedules = Vec::new();
        let mut true_qualities = Vec::new();
        for k in 0..SEARCH_SEEDS {
            let cfg = ctx.config.search_config(budget, ctx.seed + k);
            let outcome = evolve(
                |q| predictor.score(&ctx.space, q),
                &ctx.zoo,
                ctx.space.length(),
                ctx.space.sampler(),
                &cfg,
            )?;
            let cost = get_cost(&outcome.best, &ctx.zoo)?;
            let truth = oracle.quality(&outcome.best)?;
            let _ = writeln!(
                rpt,
                "seed {}: entries {} cost {:.4} ms predicted {:.6} true {:.6} (evaluations {})",
                cfg.seed,
                outcome
                    .best
                    .entries()
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                cost,
                outcome.best_score,
                truth,
                outcome.evaluations
            );
            true_qualities.push(truth);
            best_schedules.push(outcome.best);
        }
        let mean = true_qualities.iter().sum::<f64>() / true_qualities.len() as f64;
        let var = true_qualities
            .iter()
            .map(|q| (q - mean) * (q - mean))
            .sum::<f64>()
            / (true_qualities.len() - 1) as f64;
        let _ = writeln!(rpt, "true quality: {mean:.6} +- {:.6}", var.sqrt());
        ctx.write_output(
            &format!("search_best_budget{bi}.txt"),
            &formats::write_schedules(&best_schedules),
        )?;
    }

    ctx.write_output("search_report.txt", &rpt)?;
    print!("{rpt}");
    Ok(())
}
