//! `gen-data`: sample schedules from the multinomial families, grade them
//! with the chosen oracle and write the dataset file.

use std::fmt::Write as _;

use modelsched_core::lab::generate_training_data;
use modelsched_core::Error as CoreError;

use crate::context::{build_oracle, build_world, Ctx};
use crate::formats;

pub fn run(ctx: &Ctx, count: Option<usize>) -> Result<(), CoreError> {
    let count = count.unwrap_or(ctx.config.data.count);
    let families = ctx.config.families(ctx.zoo.n_models());
    let world = build_world(ctx)?;
    let oracle = build_oracle(ctx, &world, &ctx.space)?;

    let records = generate_training_data(&ctx.space, &oracle, &families, count, ctx.seed)?;
    let path = ctx.write_output("dataset.txt", &formats::write_dataset(&records))?;

    println!("wrote {} records to {}", records.len(), path.display());
    println!("{}", quality_histogram(&records));
    Ok(())
}

fn quality_histogram(records: &[modelsched_core::lab::GeneratedRecord]) -> String {
    let mut out = String::new();
    if records.is_empty() {
        out.push_str("(empty dataset)");
        return out;
    }
    let qualities: Vec<f64> = records.iter().map(|r| r.record.quality).collect();
    let min = qualities.iter().copied().fold(f64::INFINITY, f64::min);
    let max = qualities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(
        out,
        "quality range [{min:.4}, {max:.4}] over {} records",
        records.len()
    );
    let bins = 10usize;
    let width = ((max - min) / bins as f64).max(f64::MIN_POSITIVE);
    let mut counts = vec![0usize; bins];
    for &q in &qualities {
        let b = (((q - min) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let peak = counts.iter().copied().max().unwrap_or(1).max(1);
    for (b, &c) in counts.iter().enumerate() {
        let lo = min + b as f64 * width;
        let hi = lo + width;
        let bar = "#".repeat((c * 40).div_ceil(peak).min(40));
        let _ = writeln!(out, "[{lo:8.4}, {hi:8.4}) {c:6} {bar}");
    }
    out
}
