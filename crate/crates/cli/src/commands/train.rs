//! `train`: fit the predictor on a dataset, report Kendall's tau on both
//! splits and write a checkpoint.

use std::fmt::Write as _;
use std::path::PathBuf;

use modelsched_core::predictor::{
    kendall_tau, save_predictor, split_records, train, SchedulePredictor, ScheduleRecord,
};
use modelsched_core::Error as CoreError;

use crate::context::Ctx;
use crate::formats;

pub fn run(ctx: &Ctx, data: Option<PathBuf>, seed_flag: Option<u64>) -> Result<(), CoreError> {
    let data_path = data.unwrap_or_else(|| ctx.out_dir.join("dataset.txt"));
    let generated = formats::read_dataset(&data_path)?;
    if generated.len() < 4 {
        return Err(CoreError::Config(format!(
            "dataset too small: {} records, need at least 4",
            generated.len()
        )));
    }
    let records: Vec<ScheduleRecord> = generated.into_iter().map(|g| g.record).collect();
    for r in &records {
        ctx.space.validate(&r.schedule)?;
    }

    let train_cfg = ctx.config.train_config(seed_flag);
    let (train_set, valid_set) =
        split_records(&records, ctx.config.train.validation_fraction, train_cfg.seed)?;

    let mut predictor =
        SchedulePredictor::new(ctx.config.predictor_config(&ctx.zoo), train_cfg.seed)?;
    let report = train(&mut predictor, &ctx.space, &train_set, &train_cfg)?;

    let tau_of = |set: &[ScheduleRecord]| -> Result<Option<f64>, CoreError> {
        if set.len() < 2 {
            return Ok(None);
        }
        let scores: Vec<f64> = set
            .iter()
            .map(|r| predictor.score(&ctx.space, &r.schedule))
            .collect::<Result<_, _>>()?;
        let truths: Vec<f64> = set.iter().map(|r| r.quality).collect();
        Ok(Some(kendall_tau(&scores, &truths)?))
    };
    let train_tau = tau_of(&train_set)?;
    let valid_tau = tau_of(&valid_set)?;

    let mut ckpt = Vec::new();
    save_predictor(&predictor, &ctx.zoo, &mut ckpt)?;
    std::fs::create_dir_all(&ctx.out_dir)?;
    let ckpt_path = ctx.out_dir.join("predictor.ckpt");
    std::fs::write(&ckpt_path, &ckpt)?;

    let fmt_tau = |t: Option<f64>| match t {
        Some(t) => format!("{t:.4}"),
        None => "n/a".to_string(),
    };
    let mut rpt = String::new();
    let _ = writeln!(rpt, "dataset: {}", data_path.display());
    let _ = writeln!(
        rpt,
        "records: {} train / {} validation",
        train_set.len(),
        valid_set.len()
    );
    let _ = writeln!(
        rpt,
        "epochs: {} batch_size: {} lr: {} margin: {} compare_ratio: {} threshold: {} seed: {}",
        train_cfg.epochs,
        train_cfg.batch_size,
        train_cfg.learning_rate,
        train_cfg.margin,
        train_cfg.compare_ratio,
        train_cfg.threshold,
        train_cfg.seed
    );
    if let (Some(first), Some(last)) =
        (report.epoch_mean_loss.first(), report.epoch_mean_loss.last())
    {
        let _ = writeln!(rpt, "mean ranking loss: {first:.6} (epoch 1) -> {last:.6} (final)");
    }
    let _ = writeln!(rpt, "kendall tau (train): {}", fmt_tau(train_tau));
    let _ = writeln!(rpt, "kendall tau (validation): {}", fmt_tau(valid_tau));
    let _ = writeln!(rpt, "checkpoint: {}", ckpt_path.display());
    ctx.write_output("train_report.txt", &rpt)?;

    print!("{rpt}");
    Ok(())
}
