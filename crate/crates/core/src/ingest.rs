//! Parsing of user behavior records and derivation of behavioral features.

use std::collections::HashSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Ground-truth account class, when the corpus carries one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthLabel {
    Human,
    Bot,
}

/// Raw per-account counts as they appear in the input corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub id: String,
    pub n_original: u64,
    pub n_retweet: u64,
    pub n_comment: u64,
    pub avg_comments_recv: f64,
    pub avg_likes_recv: f64,
    pub avg_retweets_recv: f64,
    pub n_following: u64,
    pub n_followers: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_label: Option<TruthLabel>,
}

/// Derived triple each user contributes to the graph: posting-type
/// distribution, posting influence, follow-to-follower ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorFeatures {
    pub pt: [f64; 3],
    pub inf: f64,
    pub ff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format: {other}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("row {row}: {detail}")]
    MalformedRow { row: usize, detail: String },
    #[error("row {row}: duplicate id {id:?}")]
    DuplicateId { row: usize, id: String },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

fn validate(record: &UserRecord, row: usize) -> Result<(), IngestError> {
    for (name, value) in [
        ("avg_comments_recv", record.avg_comments_recv),
        ("avg_likes_recv", record.avg_likes_recv),
        ("avg_retweets_recv", record.avg_retweets_recv),
    ] {
        if !value.is_finite() || value < 0.0 {
            return Err(IngestError::MalformedRow {
                row,
                detail: format!("field {name} must be a non-negative finite number, got {value}"),
            });
        }
    }
    Ok(())
}

/// Parses one record per row, preserving input order. Rows missing mandatory
/// fields are rejected with the row number and offending field; duplicate ids
/// are rejected by name.
pub fn parse_user_records(
    source: impl BufRead,
    format: Format,
) -> Result<Vec<UserRecord>, IngestError> {
    let mut records = match format {
        Format::Jsonl => parse_jsonl(source)?,
        Format::Csv => parse_csv(source)?,
    };
    let mut seen = HashSet::new();
    for (idx, record) in records.iter_mut().enumerate() {
        let row = idx + 1;
        validate(record, row)?;
        if !seen.insert(record.id.clone()) {
            return Err(IngestError::DuplicateId {
                row,
                id: record.id.clone(),
            });
        }
    }
    Ok(records)
}

fn parse_jsonl(source: impl BufRead) -> Result<Vec<UserRecord>, IngestError> {
    let mut records = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: UserRecord =
            serde_json::from_str(&line).map_err(|e| IngestError::MalformedRow {
                row: idx + 1,
                detail: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

fn parse_csv(source: impl BufRead) -> Result<Vec<UserRecord>, IngestError> {
    let mut reader = csv::Reader::from_reader(source);
    let mut records = Vec::new();
    for (idx, result) in reader.deserialize::<UserRecord>().enumerate() {
        let record = result.map_err(|e| IngestError::MalformedRow {
            row: idx + 1,
            detail: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Serializes records in the same shape `parse_user_records` accepts.
pub fn write_user_records(
    records: &[UserRecord],
    format: Format,
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            for record in records {
                serde_json::to_writer(&mut *out, record)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for record in records {
                writer.serialize(record)?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}

/// Derives the behavioral features of one account. Returns `None` for users
/// with no authored posts at all; such users carry no posting-type signal
/// and are excluded from the graph (the caller logs and drops them).
///
/// Received-engagement averages are taken over original tweets, per their
/// definition in the input schema.
pub fn extract_features(record: &UserRecord) -> Option<BehaviorFeatures> {
    let total = record.n_original + record.n_retweet + record.n_comment;
    if total == 0 {
        return None;
    }
    let total = total as f64;
    Some(BehaviorFeatures {
        pt: [
            record.n_original as f64 / total,
            record.n_retweet as f64 / total,
            record.n_comment as f64 / total,
        ],
        inf: record.avg_comments_recv + record.avg_likes_recv + record.avg_retweets_recv,
        ff: (record.n_following as f64 + 1.0) / (record.n_followers as f64 + 1.0),
    })
}
