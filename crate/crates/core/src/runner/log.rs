//! Trajectory log file format.
//!
//! ```text
//! magic      8 bytes   "CRGRDLOG"
//! hdr_len    u32 LE
//! header     hdr_len bytes of JSON (LogHeader)
//! records    repeated: tag u8, len u32 LE, len bytes of bincode
//!              tag 1 = StepRecord, tag 2 = LogFooter (last record)
//! checksum   u64 LE, xxh3-64 of every preceding byte
//! ```
//!
//! Version "1.1" added `initial_digest` to the header. "1.0" files are
//! still read; the missing digest is noted in `migration_notes`.

use crate::config::GameConfig;
use crate::digest::StateDigest;
use crate::engine::{ActionKind, StepEvent};
use crate::types::AchievementSet;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use xxhash_rust::xxh3::xxh3_64;

pub const LOG_MAGIC: &[u8; 8] = b"CRGRDLOG";
pub const LOG_FORMAT_VERSION: &str = "1.1";
const TAG_STEP: u8 = 1;
const TAG_FOOTER: u8 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format_version: String,
    pub config: GameConfig,
    pub config_digest: u64,
    pub seed: u64,
    pub n_agents: usize,
    pub manifest_version: String,
    /// Policy name per agent slot.
    pub policies: Vec<String>,
    /// Free-form scenario label, e.g. `half_expert(50)`.
    pub scenario: String,
    /// Agent slots that held experts; empty when the scenario has none.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expert_slots: Vec<usize>,
    /// Hex digest of the generated world before the first step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_digest: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Actions as applied, after invalid ones were mapped to `NOOP`.
    pub actions: Vec<ActionKind>,
    pub rewards: Vec<f32>,
    pub events: Vec<StepEvent>,
    /// Digest of the state after this step.
    pub digest: StateDigest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFooter {
    pub final_achievements: Vec<AchievementSet>,
    pub invalid_actions: u64,
    pub terminated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryLog {
    pub header: LogHeader,
    pub steps: Vec<StepRecord>,
    pub footer: LogFooter,
    /// Set by [`read_log`] when an older format was upgraded on load.
    pub migration_notes: Vec<String>,
}

impl TrajectoryLog {
    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn events(&self) -> impl Iterator<Item = &StepEvent> {
        self.steps.iter().flat_map(|s| s.events.iter())
    }

    /// Achievements per agent at episode end.
    pub fn scores(&self) -> Vec<usize> {
        self.footer.final_achievements.iter().map(|a| a.len()).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a trajectory log (bad magic)")]
    BadMagic,
    #[error("file too short ({0} bytes)")]
    Truncated(usize),
    #[error("checksum mismatch: stored {stored:016x}, computed {computed:016x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("unsupported log format version {found:?} (reader supports 1.0 and {LOG_FORMAT_VERSION})")]
    Version { found: String },
    #[error("bad header: {0}")]
    Header(String),
    #[error("bad record {index}: {message}")]
    Record { index: usize, message: String },
    #[error("log has no footer record")]
    MissingFooter,
}

pub fn encode_log(log: &TrajectoryLog) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(LOG_MAGIC);
    let header = serde_json::to_vec(&log.header).expect("header serializes");
    buf.extend_from_slice(&(header.len() as u32).to_le_bytes());
    buf.extend_from_slice(&header);
    for step in &log.steps {
        push_record(&mut buf, TAG_STEP, &bincode::serialize(step).expect("step serializes"));
    }
    push_record(
        &mut buf,
        TAG_FOOTER,
        &bincode::serialize(&log.footer).expect("footer serializes"),
    );
    let sum = xxh3_64(&buf);
    buf.extend_from_slice(&sum.to_le_bytes());
    buf
}

fn push_record(buf: &mut Vec<u8>, tag: u8, body: &[u8]) {
    buf.push(tag);
    buf.extend_from_slice(&(body.len() as u32).to_le_bytes());
    buf.extend_from_slice(body);
}

pub fn decode_log(bytes: &[u8]) -> Result<TrajectoryLog, LogError> {
    if bytes.len() < LOG_MAGIC.len() + 4 + 8 {
        return Err(LogError::Truncated(bytes.len()));
    }
    if &bytes[..8] != LOG_MAGIC {
        return Err(LogError::BadMagic);
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
    let computed = xxh3_64(body);
    if stored != computed {
        return Err(LogError::Checksum { stored, computed });
    }

    let hdr_len = u32::from_le_bytes(body[8..12].try_into().expect("4 bytes")) as usize;
    let hdr_end = 12usize
        .checked_add(hdr_len)
        .filter(|&e| e <= body.len())
        .ok_or(LogError::Truncated(bytes.len()))?;
    let raw: serde_json::Value =
        serde_json::from_slice(&body[12..hdr_end]).map_err(|e| LogError::Header(e.to_string()))?;
    let version = raw
        .get("format_version")
        .and_then(|v| v.as_str())
        .unwrap_or("")
        .to_string();
    let mut migration_notes = Vec::new();
    match version.as_str() {
        LOG_FORMAT_VERSION => {}
        "1.0" => migration_notes.push(format!(
            "upgraded log format 1.0 to {LOG_FORMAT_VERSION}: initial_digest unavailable, initial state not verified"
        )),
        _ => return Err(LogError::Version { found: version }),
    }
    let mut header: LogHeader = serde_json::from_value(raw).map_err(|e| LogError::Header(e.to_string()))?;
    header.format_version = LOG_FORMAT_VERSION.to_string();

    let mut steps = Vec::new();
    let mut footer = None;
    let mut pos = hdr_end;
    let mut index = 0;
    while pos < body.len() {
        let bad = |message: String| LogError::Record { index, message };
        if footer.is_some() {
            return Err(bad("data after footer".into()));
        }
        if pos + 5 > body.len() {
            return Err(bad("truncated record header".into()));
        }
        let tag = body[pos];
        let len = u32::from_le_bytes(body[pos + 1..pos + 5].try_into().expect("4 bytes")) as usize;
        let start = pos + 5;
        let end = start
            .checked_add(len)
            .filter(|&e| e <= body.len())
            .ok_or_else(|| bad("record overruns file".into()))?;
        let rec = &body[start..end];
        match tag {
            TAG_STEP => steps.push(bincode::deserialize(rec).map_err(|e| bad(e.to_string()))?),
            TAG_FOOTER => footer = Some(bincode::deserialize(rec).map_err(|e| bad(e.to_string()))?),
            t => return Err(bad(format!("unknown record tag {t}"))),
        }
        pos = end;
        index += 1;
    }
    Ok(TrajectoryLog {
        header,
        steps,
        footer: footer.ok_or(LogError::MissingFooter)?,
        migration_notes,
    })
}

pub fn write_log(log: &TrajectoryLog, path: impl AsRef<Path>) -> Result<(), LogError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_log(log))?;
    f.sync_all()?;
    Ok(())
}

pub fn read_log(path: impl AsRef<Path>) -> Result<TrajectoryLog, LogError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_log(&bytes)
}
