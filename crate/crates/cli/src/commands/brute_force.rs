//! `brute-force`: exhaustive search of small schedule spaces with the
//! true quality oracle; the ground truth the evolutionary search is
//! judged against.

use std::fmt::Write as _;

use modelsched_core::lab::Oracle;
use modelsched_core::search::brute_force;
use modelsched_core::space::get_cost;
use modelsched_core::Error as CoreError;

use crate::context::{build_oracle, build_world, Ctx};

pub fn run(ctx: &Ctx, budget_flag: Option<f64>) -> Result<(), CoreError> {
    let budgets = ctx.budgets(budget_flag)?;
    let world = build_world(ctx)?;
    let oracle = build_oracle(ctx, &world, &ctx.space)?;

    let mut rpt = String::new();
    for &budget in &budgets {
        let outcome = brute_force(
            |q| oracle.quality(q),
            &ctx.zoo,
            ctx.space.length(),
            ctx.space.sampler(),
            budget,
        )?;
        let cost = get_cost(&outcome.best, &ctx.zoo)?;
        let _ = writeln!(rpt, "budget: {} ms", budget.limit_ms());
        let _ = writeln!(rpt, "examined: {} schedules", outcome.examined);
        let _ = writeln!(
            rpt,
            "optimum: entries {} cost {:.4} ms quality {:.6}",
            outcome
                .best
                .entries()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(","),
            cost,
            outcome.best_score
        );
    }
    ctx.write_output("brute_force_report.txt", &rpt)?;
    print!("{rpt}");
    Ok(())
}
