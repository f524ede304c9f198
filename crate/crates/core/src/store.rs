//! Durable persistence: an append-only JSON-lines event log plus periodic
//! checksummed snapshots.
//!
//! Layout of the data directory:
//!
//! - `events.jsonl`: one `{"seq": n, "event": {...}}` object per line
//! - `snapshot-<seq>.json`: full state after event `seq`
//! - `manifest.json`: names the current snapshot and its SHA-256

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{EngineState, Event};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
const LOG_FILE: &str = "events.jsonl";
const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub schema_version: u32,
    /// Sequence number of the last event folded into the snapshot.
    pub seq: u64,
    pub file: String,
    pub counts: BTreeMap<String, usize>,
    /// Hex SHA-256 of the snapshot file.
    pub checksum: String,
    pub created: DateTime<Utc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LogLine {
    seq: u64,
    event: Event,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecoveryReport {
    pub snapshot_seq: u64,
    pub replayed: usize,
    /// An incomplete final line was found and discarded.
    pub torn_tail: bool,
}

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    log: File,
    next_seq: u64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Reads and verifies the manifest and its snapshot, if any.
pub fn load_snapshot(dir: &Path) -> Result<Option<(SnapshotManifest, EngineState)>> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.exists() {
        return Ok(None);
    }
    let text = fs::read(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: SnapshotManifest = serde_json::from_slice(&text)
        .map_err(|e| Error::Snapshot(format!("unreadable manifest: {e}")))?;
    if manifest.schema_version > SCHEMA_VERSION {
        return Err(Error::Snapshot(format!(
            "snapshot schema version {} is newer than supported version {SCHEMA_VERSION}",
            manifest.schema_version
        )));
    }
    let snapshot_path = dir.join(&manifest.file);
    let bytes = fs::read(&snapshot_path).map_err(|e| Error::io(&snapshot_path, e))?;
    let actual = sha256_hex(&bytes);
    if actual != manifest.checksum {
        return Err(Error::Snapshot(format!(
            "checksum mismatch for {}: manifest {}, file {actual}",
            manifest.file, manifest.checksum
        )));
    }
    let state: EngineState = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Snapshot(format!("unreadable snapshot {}: {e}", manifest.file)))?;
    Ok(Some((manifest, state)))
}

/// Parses the log. A final line that is unterminated or unparsable is treated
/// as a torn write; returns the byte length of the valid prefix.
fn read_log(path: &Path) -> Result<(Vec<LogLine>, usize, bool)> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((Vec::new(), 0, false)),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut lines = Vec::new();
    let mut offset = 0;
    let mut line_no = 0;
    while offset < bytes.len() {
        line_no += 1;
        let end = bytes[offset..].iter().position(|&b| b == b'\n');
        let (chunk, next) = match end {
            Some(i) => (&bytes[offset..offset + i], offset + i + 1),
            None => (&bytes[offset..], bytes.len()),
        };
        let parsed = serde_json::from_slice::<LogLine>(chunk);
        match (parsed, end) {
            (Ok(line), Some(_)) => lines.push(line),
            (_, None) => return Ok((lines, offset, true)),
            (Err(e), Some(_)) if next == bytes.len() => {
                tracing::warn!(line = line_no, error = %e, "discarding unreadable final log line");
                return Ok((lines, offset, true));
            }
            (Err(e), Some(_)) => {
                return Err(Error::Snapshot(format!(
                    "corrupt event log {} at line {line_no}: {e}",
                    path.display()
                )))
            }
        }
        offset = next;
    }
    Ok((lines, offset, false))
}

impl Store {
    /// Opens (creating if needed) the data directory and rebuilds state from
    /// the latest snapshot plus the events logged after it.
    pub fn open(dir: &Path) -> Result<(Store, EngineState, RecoveryReport)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let (mut state, snapshot_seq) = match load_snapshot(dir)? {
            Some((m, s)) => (s, m.seq),
            None => (EngineState::default(), 0),
        };
        let log_path = dir.join(LOG_FILE);
        let (lines, valid_len, torn_tail) = read_log(&log_path)?;
        let mut report = RecoveryReport {
            snapshot_seq,
            replayed: 0,
            torn_tail,
        };
        let mut last_seq = snapshot_seq;
        for line in lines {
            if line.seq <= snapshot_seq {
                continue;
            }
            if line.seq != last_seq + 1 {
                return Err(Error::Snapshot(format!(
                    "event log gap: expected seq {}, found {}",
                    last_seq + 1,
                    line.seq
                )));
            }
            state.apply(&line.event)?;
            last_seq = line.seq;
            report.replayed += 1;
        }
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(|e| Error::io(&log_path, e))?;
        if torn_tail {
            log.set_len(valid_len as u64).map_err(|e| Error::io(&log_path, e))?;
            log.sync_all().map_err(|e| Error::io(&log_path, e))?;
        }
        Ok((
            Store {
                dir: dir.to_path_buf(),
                log,
                next_seq: last_seq + 1,
            },
            state,
            report,
        ))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Sequence number of the last appended event.
    pub fn last_seq(&self) -> u64 {
        self.next_seq - 1
    }

    /// Appends and flushes events to stable storage before returning.
    pub fn append(&mut self, events: &[Event]) -> Result<()> {
        let mut buf = Vec::new();
        for (i, event) in events.iter().enumerate() {
            let line = LogLine {
                seq: self.next_seq + i as u64,
                event: event.clone(),
            };
            serde_json::to_writer(&mut buf, &line)?;
            buf.push(b'\n');
        }
        let path = self.dir.join(LOG_FILE);
        self.log.write_all(&buf).map_err(|e| Error::io(&path, e))?;
        self.log.sync_data().map_err(|e| Error::io(&path, e))?;
        self.next_seq += events.len() as u64;
        Ok(())
    }

    /// Writes a snapshot of `state` (which must reflect every appended event)
    /// and points the manifest at it.
    pub fn write_snapshot(&mut self, state: &EngineState, now: DateTime<Utc>) -> Result<SnapshotManifest> {
        let seq = self.last_seq();
        let file = format!("snapshot-{seq:012}.json");
        let bytes = serde_json::to_vec(state)?;
        write_atomically(&self.dir.join(&file), &bytes)?;
        let manifest = SnapshotManifest {
            schema_version: SCHEMA_VERSION,
            seq,
            file: file.clone(),
            counts: state.counts(),
            checksum: sha256_hex(&bytes),
            created: now,
        };
        write_atomically(&self.dir.join(MANIFEST_FILE), &serde_json::to_vec_pretty(&manifest)?)?;
        if let Ok(entries) = fs::read_dir(&self.dir) {
            for entry in entries.flatten() {
                let name = entry.file_name().to_string_lossy().into_owned();
                if name.starts_with("snapshot-") && name.ends_with(".json") && name != file {
                    let _ = fs::remove_file(entry.path());
                }
            }
        }
        Ok(manifest)
    }
}
