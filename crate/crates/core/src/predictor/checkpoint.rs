//! Predictor checkpoints: a versioned text container of (name, shape,
//! values) parameter triples behind a header carrying the architecture
//! and a zoo fingerprint, so a checkpoint cannot score schedules against
//! the wrong zoo.

use std::io::{BufRead, Write};

use super::config::PredictorConfig;
use super::model::SchedulePredictor;
use crate::autodiff::{ParamSet, ParamTensor};
use crate::space::ModelZoo;
use crate::{Error, Result};

const MAGIC: &str = "modelsched-predictor v1";

#[derive(Debug, serde::Serialize, serde::Deserialize)]
struct Header {
    config: PredictorConfig,
    zoo_fingerprint: u64,
}

/// Serializes the predictor. The format is line-oriented text: a magic
/// line, a JSON header, then one `param <name> <ndim> <dims..>` line plus
/// one line of space-separated values per tensor, and a trailing `end`.
pub fn save_predictor(
    predictor: &SchedulePredictor,
    zoo: &ModelZoo,
    mut out: impl Write,
) -> Result<()> {
    let header = Header {
        config: predictor.config().clone(),
        zoo_fingerprint: zoo.fingerprint(),
    };
    writeln!(out, "{MAGIC}")?;
    writeln!(
        out,
        "{}",
        serde_json::to_string(&header).map_err(|e| Error::Io(e.to_string()))?
    )?;
    for (name, tensor) in predictor.params().iter() {
        write!(out, "param {name} {}", tensor.shape().len())?;
        for d in tensor.shape() {
            write!(out, " {d}")?;
        }
        writeln!(out)?;
        let mut first = true;
        for v in tensor.values() {
            if first {
                write!(out, "{v}")?;
                first = false;
            } else {
                write!(out, " {v}")?;
            }
        }
        writeln!(out)?;
    }
    writeln!(out, "end")?;
    Ok(())
}

/// Deserializes a predictor and verifies it against the given zoo.
pub fn load_predictor(reader: impl BufRead, zoo: &ModelZoo) -> Result<SchedulePredictor> {
    let mut lines = reader.lines().enumerate();
    let mut next_line = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i + 1, l)),
            Some((i, Err(e))) => Err(Error::Parse {
                line: i + 1,
                message: e.to_string(),
            }),
            None => Err(Error::Parse {
                line: 0,
                message: format!("unexpected end of checkpoint, expected {expect}"),
            }),
        }
    };

    let (line_no, magic) = next_line("magic")?;
    if magic.trim() != MAGIC {
        return Err(Error::Parse {
            line: line_no,
            message: format!("bad magic '{magic}', expected '{MAGIC}'"),
        });
    }
    let (line_no, header_line) = next_line("header")?;
    let header: Header = serde_json::from_str(&header_line).map_err(|e| Error::Parse {
        line: line_no,
        message: format!("bad header: {e}"),
    })?;

    if header.zoo_fingerprint != zoo.fingerprint() {
        return Err(Error::IncompatibleCheckpoint(format!(
            "zoo fingerprint {:#018x} does not match checkpoint {:#018x}",
            zoo.fingerprint(),
            header.zoo_fingerprint
        )));
    }
    if header.config.n_models != zoo.n_models() {
        return Err(Error::IncompatibleCheckpoint(format!(
            "checkpoint was trained with {} models, zoo has {}",
            header.config.n_models,
            zoo.n_models()
        )));
    }

    let mut loaded = ParamSet::new();
    loop {
        let (line_no, line) = next_line("'param' or 'end'")?;
        let line = line.trim();
        if line == "end" {
            break;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("param") {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 'param' or 'end', got '{line}'"),
            });
        }
        let name = parts
            .next()
            .ok_or(Error::Parse {
                line: line_no,
                message: "missing parameter name".into(),
            })?
            .to_string();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
            s.and_then(|v| v.parse().ok()).ok_or(Error::Parse {
                line: line_no,
                message: format!("bad {what}"),
            })
        };
        let ndim = parse_usize(parts.next(), "dimension count")?;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(parse_usize(parts.next(), "dimension")?);
        }
        let (vline_no, values_line) = next_line("values")?;
        let values: Vec<f64> = values_line
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: vline_no,
                    message: format!("bad value '{s}': {e}"),
                })
            })
            .collect::<Result<_>>()?;
        let tensor = ParamTensor::new(shape, values).map_err(|e| Error::Parse {
            line: vline_no,
            message: format!("mismatched tensor for '{name}': {e}"),
        })?;
        loaded.register(name, tensor);
    }

    let mut predictor = SchedulePredictor::new(header.config, 0)?;
    predictor.params_mut().load_values_from(&loaded)?;
    Ok(predictor)
}
