use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::guard::QuestionSpec;

use super::state::{Record, RegistryState};
use super::RegistryError;

pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const LOG_FILE: &str = "log.ndjson";
pub const QUESTIONS_FILE: &str = "questions.ndjson";

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    last_seq: u64,
    state: RegistryState,
}

/// One log line: every record produced by a single operation, so a torn
/// write loses the whole operation and never half of it.
#[derive(Debug, Serialize, Deserialize)]
struct LogLine {
    seq: u64,
    records: Vec<Record>,
}

/// File-backed persistence: `snapshot.json` plus an append-only
/// `log.ndjson` tail. The question bank lives in `questions.ndjson`.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    log: File,
    last_seq: u64,
    since_snapshot: u64,
    snapshot_every: u64,
    sync: bool,
}

fn corrupt(file: &str, line: usize, message: impl ToString) -> RegistryError {
    RegistryError::CorruptLog {
        file: file.to_string(),
        line,
        message: message.to_string(),
    }
}

/// Writes `bytes` to `path` through a temporary file and a rename.
fn write_atomic(path: &Path, bytes: &[u8], sync: bool) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        if sync {
            f.sync_all()?;
        }
    }
    fs::rename(&tmp, path)
}

impl Store {
    /// Loads the snapshot, replays the log tail and returns the state. A
    /// final line cut short by a crash is dropped and cut from the file; any
    /// other unreadable line is a [`RegistryError::CorruptLog`].
    pub fn open(
        dir: &Path,
        snapshot_every: u64,
        sync: bool,
    ) -> Result<(Self, RegistryState), RegistryError> {
        fs::create_dir_all(dir)?;
        let snap_path = dir.join(SNAPSHOT_FILE);
        let (mut last_seq, mut state) = if snap_path.exists() {
            let text = fs::read_to_string(&snap_path)?;
            let snap: Snapshot =
                serde_json::from_str(&text).map_err(|e| corrupt(SNAPSHOT_FILE, 1, e))?;
            (snap.last_seq, snap.state)
        } else {
            (0, RegistryState::default())
        };

        let log_path = dir.join(LOG_FILE);
        let bytes = if log_path.exists() {
            fs::read(&log_path)?
        } else {
            Vec::new()
        };
        let mut replayed = 0;
        let mut offset = 0usize;
        let mut keep = bytes.len();
        let mut needs_newline = false;
        let mut lineno = 0;
        while offset < bytes.len() {
            lineno += 1;
            let (end, complete) = match bytes[offset..].iter().position(|&b| b == b'\n') {
                Some(i) => (offset + i, true),
                None => (bytes.len(), false),
            };
            let raw = &bytes[offset..end];
            let next = if complete { end + 1 } else { end };
            if raw.iter().all(u8::is_ascii_whitespace) {
                offset = next;
                continue;
            }
            let parsed = std::str::from_utf8(raw)
                .map_err(|e| e.to_string())
                .and_then(|s| serde_json::from_str::<LogLine>(s).map_err(|e| e.to_string()));
            let line = match parsed {
                Ok(line) => {
                    needs_newline = !complete;
                    line
                }
                Err(e) if !complete => {
                    tracing::warn!(line = lineno, error = %e, "dropping torn final log line");
                    keep = offset;
                    break;
                }
                Err(e) => return Err(corrupt(LOG_FILE, lineno, e)),
            };
            if line.seq > last_seq {
                for record in &line.records {
                    state.apply(record);
                }
                last_seq = line.seq;
                replayed += 1;
            }
            offset = next;
        }

        let mut log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)?;
        if keep < bytes.len() {
            log.set_len(keep as u64)?;
        }
        if needs_newline {
            log.write_all(b"\n")?;
        }
        tracing::debug!(last_seq, replayed, "registry restored");
        Ok((
            Self {
                dir: dir.to_path_buf(),
                log,
                last_seq,
                since_snapshot: replayed,
                snapshot_every,
                sync,
            },
            state,
        ))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn append(&mut self, records: &[Record]) -> Result<(), RegistryError> {
        let line = LogLine {
            seq: self.last_seq + 1,
            records: records.to_vec(),
        };
        let mut text = serde_json::to_string(&line).expect("records serialise");
        text.push('\n');
        self.log.write_all(text.as_bytes())?;
        if self.sync {
            self.log.sync_data()?;
        }
        self.last_seq = line.seq;
        self.since_snapshot += 1;
        Ok(())
    }

    pub fn snapshot_due(&self) -> bool {
        self.snapshot_every > 0 && self.since_snapshot >= self.snapshot_every
    }

    /// Writes a snapshot of `state` and empties the log.
    pub fn snapshot(&mut self, state: &RegistryState) -> Result<(), RegistryError> {
        let snap = serde_json::to_vec(&SnapshotRef {
            last_seq: self.last_seq,
            state,
        })
        .expect("state serialises");
        write_atomic(&self.dir.join(SNAPSHOT_FILE), &snap, self.sync)?;
        self.log.set_len(0)?;
        self.since_snapshot = 0;
        tracing::debug!(last_seq = self.last_seq, "snapshot written");
        Ok(())
    }

    pub fn write_questions(&self, specs: &[QuestionSpec]) -> Result<(), RegistryError> {
        write_questions(&self.dir.join(QUESTIONS_FILE), specs, self.sync)
    }

    pub fn read_questions(&self) -> Result<Vec<QuestionSpec>, RegistryError> {
        let path = self.dir.join(QUESTIONS_FILE);
        if !path.exists() {
            return Ok(Vec::new());
        }
        read_questions(&path)
    }
}

#[derive(Serialize)]
struct SnapshotRef<'a> {
    last_seq: u64,
    state: &'a RegistryState,
}

pub fn write_questions(
    path: &Path,
    specs: &[QuestionSpec],
    sync: bool,
) -> Result<(), RegistryError> {
    let mut text = String::new();
    for spec in specs {
        text.push_str(&serde_json::to_string(spec).expect("question serialises"));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes(), sync)?;
    Ok(())
}

/// Reads a `questions.ndjson` file. Blank lines are skipped.
pub fn read_questions(path: &Path) -> Result<Vec<QuestionSpec>, RegistryError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| corrupt(QUESTIONS_FILE, i + 1, e)))
        .collect()
}
