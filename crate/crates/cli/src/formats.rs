//! File formats: the zoo table, schedule-quality datasets and schedule
//! files. All parsers reject malformed input with line diagnostics and
//! never return partial reads.

use std::fmt::Write as _;
use std::path::Path;

use modelsched_core::lab::GeneratedRecord;
use modelsched_core::predictor::ScheduleRecord;
use modelsched_core::space::{ModelInfo, ModelSchedule, ModelZoo, SamplerKind};
use modelsched_core::Error as CoreError;

const ZOO_HEADER: &str = "id name latency_ms";
const DATASET_HEADER: &str = "sampler length entries quality family";
const SCHEDULE_HEADER: &str = "sampler length entries";

fn parse_err(line: usize, message: impl Into<String>) -> CoreError {
    CoreError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a zoo file: a header line followed by one `id name latency_ms`
/// row per model.
pub fn read_zoo(path: &Path) -> Result<ModelZoo, CoreError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut models = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == ZOO_HEADER => {}
        Some((i, other)) => {
            return Err(parse_err(
                i + 1,
                format!("bad zoo header '{other}', expected '{ZOO_HEADER}'"),
            ))
        }
        None => return Err(parse_err(1, "empty zoo file")),
    }
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected 'id name latency_ms', got {} fields", parts.len()),
            ));
        }
        let id: usize = parts[0]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad id '{}': {e}", parts[0])))?;
        let latency_ms: f64 = parts[2]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad latency '{}': {e}", parts[2])))?;
        models.push(ModelInfo {
            id,
            name: parts[1].to_string(),
            latency_ms,
        });
    }
    ModelZoo::new(models)
}

pub fn write_zoo(zoo: &ModelZoo) -> String {
    let mut out = String::new();
    out.push_str(ZOO_HEADER);
    out.push('\n');
    for m in zoo.models() {
        let _ = writeln!(out, "{} {} {}", m.id, m.name, m.latency_ms);
    }
    out
}

fn format_entries(schedule: &ModelSchedule) -> String {
    schedule
        .entries()
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_schedule_fields(
    line_no: usize,
    sampler: &str,
    length: &str,
    entries: &str,
) -> Result<ModelSchedule, CoreError> {
    let sampler = SamplerKind::parse(sampler).map_err(|e| parse_err(line_no, e.to_string()))?;
    let length: usize = length
        .parse()
        .map_err(|e| parse_err(line_no, format!("bad length '{length}': {e}")))?;
    let values: Vec<usize> = entries
        .split(',')
        .map(|s| {
            s.parse::<usize>()
                .map_err(|e| parse_err(line_no, format!("bad entry '{s}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != length {
        return Err(parse_err(
            line_no,
            format!("{} entries but declared length {length}", values.len()),
        ));
    }
    ModelSchedule::new(sampler, values).map_err(|e| parse_err(line_no, e.to_string()))
}

/// Serializes generated records as a diff-friendly dataset: one
/// `sampler length entries quality family` row per record. Qualities are
/// printed with the shortest round-tripping representation, so reading the
/// file back reproduces them bit-exactly.
pub fn write_dataset(records: &[GeneratedRecord]) -> String {
    let mut out = String::new();
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            r.record.schedule.sampler().as_str(),
            r.record.schedule.len(),
            format_entries(&r.record.schedule),
            r.record.quality,
            r.family
        );
    }
    out
}

pub fn read_dataset(path: &Path) -> Result<Vec<GeneratedRecord>, CoreError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == DATASET_HEADER => {}
        Some((i, other)) => {
            return Err(parse_err(
                i + 1,
                format!("bad dataset header '{other}', expected '{DATASET_HEADER}'"),
            ))
        }
        None => return Err(parse_err(1, "empty dataset file")),
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(parse_err(
                line_no,
                format!("expected 5 fields, got {}", parts.len()),
            ));
        }
        let schedule = parse_schedule_fields(line_no, parts[0], parts[1], parts[2])?;
        let quality: f64 = parts[3]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad quality '{}': {e}", parts[3])))?;
        records.push(GeneratedRecord {
            record: ScheduleRecord::new(schedule, quality)
                .map_err(|e| parse_err(line_no, e.to_string()))?,
            family: parts[4].to_string(),
        });
    }
    Ok(records)
}

/// Schedule files: a header then one `sampler length entries` row per
/// schedule.
pub fn write_schedules(schedules: &[ModelSchedule]) -> String {
    let mut out = String::new();
    out.push_str(SCHEDULE_HEADER);
    out.push('\n');
    for s in schedules {
        let _ = writeln!(
            out,
            "{} {} {}",
            s.sampler().as_str(),
            s.len(),
            format_entries(s)
        );
    }
    out
}

pub fn read_schedules(path: &Path) -> Result<Vec<ModelSchedule>, CoreError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SCHEDULE_HEADER => {}
        Some((i, other)) => {
            return Err(parse_err(
                i + 1,
                format!("bad schedule header '{other}', expected '{SCHEDULE_HEADER}'"),
            ))
        }
        None => return Err(parse_err(1, "empty schedule file")),
    }
    let mut schedules = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected 'sampler length entries', got {} fields", parts.len()),
            ));
        }
        schedules.push(parse_schedule_fields(line_no, parts[0], parts[1], parts[2])?);
    }
    Ok(schedules)
}
