//! Append-only JSON-lines record store.
//!
//! One [`TrialRecord`] per line, appended as soon as an attempt finishes.
//! A line cut short by an interrupted run is dropped when the store is
//! reopened, so resuming never appends after a torn write.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::TrialRecord;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: corrupt record: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_owned(), source }
}

pub struct RecordStore {
    path: PathBuf,
    file: Mutex<File>,
}

impl RecordStore {
    /// Opens (creating if needed) the store at `path` for appending.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_owned();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        drop_torn_tail(&path)?;
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
        Ok(RecordStore { path, file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends one record and flushes it. Safe to call from many threads.
    pub fn append(&self, record: &TrialRecord) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(record).expect("records serialize");
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes()).and_then(|_| file.flush()).map_err(io_err(&self.path))
    }

    pub fn load(&self) -> Result<Vec<TrialRecord>, StoreError> {
        load_records(&self.path)
    }
}

/// Reads every record in the store. A missing file is an empty store.
pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>, StoreError> {
    let path = path.as_ref();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let mut records = Vec::new();
    let mut lines = BufReader::new(file).lines().enumerate().peekable();
    while let Some((i, line)) = lines.next() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(r) => records.push(r),
            // a torn final line from an interrupted run is not an error
            Err(_) if lines.peek().is_none() && !ends_with_newline(path)? => break,
            Err(e) => return Err(StoreError::Corrupt { path: path.to_owned(), line: i + 1, message: e.to_string() }),
        }
    }
    Ok(records)
}

fn ends_with_newline(path: &Path) -> Result<bool, StoreError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(bytes.last().is_none_or(|&b| b == b'\n'))
}

fn drop_torn_tail(path: &Path) -> Result<(), StoreError> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(io_err(path)(e)),
    };
    if bytes.last().is_none_or(|&b| b == b'\n') {
        return Ok(());
    }
    let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    let file = OpenOptions::new().write(true).open(path).map_err(io_err(path))?;
    file.set_len(keep as u64).map_err(io_err(path))
}
