//! `baseline`: for each zoo model, the best single-model schedule that
//! fits the budget (largest step count S with S * latency <= C), with its
//! quality.

use std::fmt::Write as _;

use modelsched_core::lab::{LabOracle, Oracle, SyntheticOracle};
use modelsched_core::space::{
    discretize_linear, Budget, DdimStep, ModelSchedule, SamplerKind, StepPlan,
};
use modelsched_core::Error as CoreError;

use crate::context::{build_world, Ctx, OracleChoice};

/// Feasible single-model step count: the number of steps is rounded DOWN
/// so the baseline actually fits the budget (upper rounding would exceed
/// it); capped to bound runtime.
pub fn baseline_steps(budget: Budget, latency_ms: f64, cap: usize) -> usize {
    ((budget.limit_ms() / latency_ms).floor() as usize).min(cap)
}

pub struct BaselineRow {
    pub model_id: usize,
    pub name: String,
    pub steps: usize,
    pub cost_ms: f64,
    pub quality: Option<f64>,
}

/// Evaluates all single-model baselines at one budget.
pub fn baseline_rows(ctx: &Ctx, budget: Budget) -> Result<Vec<BaselineRow>, CoreError> {
    let world = build_world(ctx)?;
    let cap = ctx.config.lab.max_baseline_steps;
    let mut rows = Vec::new();
    for m in ctx.zoo.models() {
        let steps = baseline_steps(budget, m.latency_ms, cap);
        let quality = if steps == 0 {
            None
        } else {
            Some(match ctx.oracle_choice {
                OracleChoice::Lab => {
                    let world = world.as_ref().expect("lab oracle has a world");
                    // lab baselines get their own linear lattice with
                    // exactly `steps` active positions
                    let lattice =
                        discretize_linear(steps, ctx.space.t_end(), ctx.space.noise().t_max())?;
                    let plan = StepPlan::Ddim {
                        steps: lattice
                            .into_iter()
                            .map(|t| DdimStep { t, model: m.id })
                            .collect(),
                    };
                    let oracle = LabOracle::new(
                        world,
                        &ctx.space,
                        ctx.config.lab.eval_samples,
                        ctx.config.lab.reference_samples,
                        ctx.config.lab.eval_seed,
                    )?;
                    oracle.quality_of_plan(&plan)?
                }
                OracleChoice::Synthetic => {
                    let oracle: SyntheticOracle =
                        ctx.config.synthetic_oracle(ctx.zoo.n_models())?;
                    let q = ModelSchedule::new(SamplerKind::Ddim, vec![m.id; steps])?;
                    oracle.quality(&q)?
                }
            })
        };
        rows.push(BaselineRow {
            model_id: m.id,
            name: m.name.clone(),
            steps,
            cost_ms: steps as f64 * m.latency_ms,
            quality,
        });
    }
    Ok(rows)
}

pub fn run(ctx: &Ctx, budget_flag: Option<f64>) -> Result<(), CoreError> {
    let budgets = ctx.budgets(budget_flag)?;
    let mut rpt = String::new();
    let _ = writeln!(
        rpt,
        "single-model baselines (step count floor(C / latency), so cost <= C; \
         the upper-rounding convention could exceed the budget)"
    );
    for &budget in &budgets {
        let rows = baseline_rows(ctx, budget)?;
        let best = rows
            .iter()
            .filter_map(|r| r.quality.map(|q| (r.model_id, q)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite qualities"));
        let _ = writeln!(rpt, "\nbudget: {} ms", budget.limit_ms());
        let _ = writeln!(rpt, "{:>3} {:<24} {:>6} {:>12} {:>12}", "id", "name", "steps", "cost_ms", "quality");
        for r in &rows {
            let marker = match (best, r.quality) {
                (Some((id, _)), Some(_)) if id == r.model_id => " *best*",
                _ => "",
            };
            match r.quality {
                Some(q) => {
                    let _ = writeln!(
                        rpt,
                        "{:>3} {:<24} {:>6} {:>12.4} {:>12.6}{marker}",
                        r.model_id, r.name, r.steps, r.cost_ms, q
                    );
                }
                None => {
                    let _ = writeln!(
                        rpt,
                        "{:>3} {:<24} {:>6} {:>12} {:>12}",
                        r.model_id, r.name, "-", "-", "infeasible"
                    );
                }
            }
        }
    }
    ctx.write_output("baseline_report.txt", &rpt)?;
    print!("{rpt}");
    Ok(())
}
