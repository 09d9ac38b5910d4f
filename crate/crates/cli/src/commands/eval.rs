//! `eval`: decode schedules from a file, print their step plans, costs
//! and (where executable) oracle qualities.

use std::fmt::Write as _;
use std::path::PathBuf;

use modelsched_core::lab::{LabOracle, Oracle, SyntheticOracle};
use modelsched_core::space::{get_cost, ScheduleSpace, StepPlan};
use modelsched_core::Error as CoreError;

use crate::context::{build_world, Ctx, OracleChoice};
use crate::formats;

pub fn run(ctx: &Ctx, schedule_file: PathBuf) -> Result<(), CoreError> {
    let schedules = formats::read_schedules(&schedule_file)?;
    if schedules.is_empty() {
        return Err(CoreError::Config(format!(
            "no schedules in {}",
            schedule_file.display()
        )));
    }
    let world = build_world(ctx)?;
    let mut out = String::new();
    for (i, schedule) in schedules.iter().enumerate() {
        // each schedule decodes on a space of its own length
        let space = ScheduleSpace::new(
            schedule.sampler(),
            schedule.len(),
            ctx.zoo.n_models(),
            ctx.space.noise().clone(),
            ctx.space.t_end(),
        )?;
        let plan = space.decode(schedule)?;
        let cost = get_cost(schedule, &ctx.zoo)?;
        let _ = writeln!(
            out,
            "schedule {}: {} {} {}",
            i + 1,
            schedule.sampler().as_str(),
            schedule.len(),
            schedule
                .entries()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(out, "  cost: {cost:.4} ms ({} model calls)", plan.total_model_calls());
        describe_plan(&mut out, &plan);
        match (&plan, ctx.oracle_choice) {
            (StepPlan::Ddim { .. }, OracleChoice::Lab) => {
                let world = world.as_ref().expect("lab oracle has a world");
                let oracle = LabOracle::new(
                    world,
                    &space,
                    ctx.config.lab.eval_samples,
                    ctx.config.lab.reference_samples,
                    ctx.config.lab.eval_seed,
                )?;
                let q = oracle.quality(schedule)?;
                let _ = writeln!(
                    out,
                    "  lab quality: {q:.6} (eval seed {})",
                    ctx.config.lab.eval_seed
                );
            }
            (StepPlan::DpmSolver { .. }, OracleChoice::Lab) => {
                let _ = writeln!(
                    out,
                    "  lab quality: n/a (solver steps are decoded, not numerically executed; use --oracle synthetic)"
                );
            }
            (_, OracleChoice::Synthetic) => {
                let oracle: SyntheticOracle = ctx.config.synthetic_oracle(ctx.zoo.n_models())?;
                let q = oracle.quality(schedule)?;
                let _ = writeln!(out, "  synthetic quality: {q:.6}");
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn describe_plan(out: &mut String, plan: &StepPlan) {
    match plan {
        StepPlan::Ddim { steps } => {
            if steps.is_empty() {
                let _ = writeln!(out, "  plan: empty (all-null schedule)");
                return;
            }
            let _ = writeln!(out, "  plan (noise to data):");
            for s in steps.iter().rev() {
                let _ = writeln!(out, "    t = {:.6}: model {}", s.t, s.model);
            }
        }
        StepPlan::DpmSolver { steps } => {
            if steps.is_empty() {
                let _ = writeln!(out, "  plan: empty (all-null schedule)");
                return;
            }
            let _ = writeln!(out, "  plan (noise to data):");
            for s in steps {
                let _ = writeln!(
                    out,
                    "    [{:.6} -> {:.6}]: order-{} solver, models {}",
                    s.t_from,
                    s.t_to,
                    s.order,
                    s.models
                        .iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>()
                        .join(" then ")
                );
            }
        }
    }
}
