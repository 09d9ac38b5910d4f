//! `validate`: score a dataset with a trained checkpoint and report
//! Kendall's tau against the recorded qualities.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use modelsched_core::predictor::{kendall_tau, load_predictor};
use modelsched_core::Error as CoreError;

use crate::context::Ctx;
use crate::formats;

pub fn run(ctx: &Ctx, checkpoint: Option<PathBuf>, data: Option<PathBuf>) -> Result<(), CoreError> {
    let ckpt_path = checkpoint.unwrap_or_else(|| ctx.out_dir.join("predictor.ckpt"));
    let data_path = data.unwrap_or_else(|| ctx.out_dir.join("dataset.txt"));
    let predictor = load_predictor(BufReader::new(File::open(&ckpt_path)?), &ctx.zoo)?;
    let records = formats::read_dataset(&data_path)?;
    if records.len() < 2 {
        return Err(CoreError::Config(format!(
            "validation needs at least 2 records, got {}",
            records.len()
        )));
    }
    let scores: Vec<f64> = records
        .iter()
        .map(|r| predictor.score(&ctx.space, &r.record.schedule))
        .collect::<Result<_, _>>()?;
    let truths: Vec<f64> = records.iter().map(|r| r.record.quality).collect();
    let tau = kendall_tau(&scores, &truths)?;
    println!(
        "kendall tau over {} records from {}: {tau:.4}",
        records.len(),
        data_path.display()
    );
    Ok(())
}
