//! File formats: logged datasets (JSON lines or CSV), policy matrices, and
//! reward models.
//!
//! A dataset file holds one record per line. JSON lines carry objects with
//! keys `context_id`, `covariates`, `action`, `reward`, `propensity`, and
//! optionally `arm`. The CSV form uses the same column names with
//! `covariates` as a semicolon-joined float list. Framing is inferred on
//! read: records with arm labels are AB-framed, records without are
//! OPE-framed.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::data::{Dataset, Framing, LoggedRecord, validate_dataset};
use crate::error::{Error, Result};
use crate::model::RewardModel;
use crate::policy::PolicyTable;
use crate::synth::SyntheticConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    JsonLines,
    Csv,
}

impl FileFormat {
    /// `.csv` files are CSV; everything else is JSON lines.
    pub fn from_path(path: &Path) -> FileFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => FileFormat::Csv,
            _ => FileFormat::JsonLines,
        }
    }
}

const CSV_HEADER: &str = "context_id,covariates,action,reward,propensity,arm";

/// Reads raw records from a dataset file, dispatching on the extension.
pub fn read_records(path: &Path) -> Result<Vec<LoggedRecord>> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let format = FileFormat::from_path(path);
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match format {
            FileFormat::JsonLines => {
                let rec: LoggedRecord = serde_json::from_str(&line).map_err(|e| {
                    Error::Parse(format!("{}:{}: {e}", path.display(), line_no + 1))
                })?;
                records.push(rec);
            }
            FileFormat::Csv => {
                if line_no == 0 {
                    let header: Vec<&str> = line.split(',').map(str::trim).collect();
                    if header.first() != Some(&"context_id") {
                        return Err(Error::Parse(format!(
                            "{}:1: expected CSV header starting with `context_id`",
                            path.display()
                        )));
                    }
                    continue;
                }
                records.push(parse_csv_record(&line).map_err(|msg| {
                    Error::Parse(format!("{}:{}: {msg}", path.display(), line_no + 1))
                })?);
            }
        }
    }
    Ok(records)
}

fn parse_csv_record(line: &str) -> std::result::Result<LoggedRecord, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() < 5 {
        return Err(format!("expected at least 5 fields, got {}", fields.len()));
    }
    let covariates = if fields[1].is_empty() {
        Vec::new()
    } else {
        fields[1]
            .split(';')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("covariate `{v}`: {e}")))
            .collect::<std::result::Result<Vec<f64>, String>>()?
    };
    let parse = |name: &str, raw: &str| -> std::result::Result<f64, String> {
        raw.trim().parse::<f64>().map_err(|e| format!("{name} `{raw}`: {e}"))
    };
    Ok(LoggedRecord {
        context_id: fields[0]
            .trim()
            .parse()
            .map_err(|e| format!("context_id `{}`: {e}", fields[0]))?,
        covariates,
        action: fields[2]
            .trim()
            .parse()
            .map_err(|e| format!("action `{}`: {e}", fields[2]))?,
        reward: parse("reward", fields[3])?,
        propensity: parse("propensity", fields[4])?,
        arm: match fields.get(5).map(|s| s.trim()) {
            None | Some("") => None,
            Some(arm) => Some(arm.to_string()),
        },
    })
}

/// Reads and validates a dataset, inferring the framing from the presence of
/// arm labels.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let records = read_records(path)?;
    let with_arm = records.iter().filter(|r| r.arm.is_some()).count();
    if with_arm > 0 && with_arm < records.len() {
        return Err(Error::Parse(format!(
            "{}: {with_arm} of {} records carry an arm label; expected all or none",
            path.display(),
            records.len()
        )));
    }
    let framing = if with_arm > 0 { Framing::Ab } else { Framing::Ope };
    validate_dataset(records, framing)
}

/// Writes a dataset in the format implied by the path's extension.
pub fn write_dataset(d: &Dataset, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path)?;
    write_dataset_to(d, FileFormat::from_path(path), &mut file)
}

pub fn write_dataset_to(d: &Dataset, format: FileFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        FileFormat::JsonLines => {
            for rec in d.records() {
                let line = serde_json::to_string(rec)
                    .map_err(|e| Error::Parse(format!("serializing record: {e}")))?;
                writeln!(out, "{line}")?;
            }
        }
        FileFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for rec in d.records() {
                let covariates = rec
                    .covariates
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    rec.context_id,
                    covariates,
                    rec.action,
                    rec.reward,
                    rec.propensity,
                    rec.arm.as_deref().unwrap_or("")
                )?;
            }
        }
    }
    Ok(())
}

/// Loads a policy matrix: either a bare JSON 2D array of probabilities or an
/// object `{"probabilities": [[...], ...]}`.
pub fn load_policy(path: &Path) -> Result<PolicyTable> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum PolicyFile {
        Rows(Vec<Vec<f64>>),
        Object { probabilities: Vec<Vec<f64>> },
    }
    let raw = fs::read_to_string(path)?;
    let parsed: PolicyFile = serde_json::from_str(&raw)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let rows = match parsed {
        PolicyFile::Rows(rows) => rows,
        PolicyFile::Object { probabilities } => probabilities,
    };
    PolicyTable::from_rows(rows)
}

/// Loads a reward model from its tagged JSON form.
pub fn load_reward_model(path: &Path) -> Result<RewardModel> {
    let raw = fs::read_to_string(path)?;
    serde_json::from_str(&raw).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Loads a generator config.
pub fn load_synthetic_config(path: &Path) -> Result<SyntheticConfig> {
    let raw = fs::read_to_string(path)?;
    serde_json::from_str(&raw).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
