//! Observer ratings, aggregate reports and the anonymized case-study export.
//!
//! Ratings are validated on the way in, so nothing out of range ever reaches
//! `feedback.jsonl`. Every aggregate can be recomputed from the record and
//! feedback stores with a single pass.

mod case_study;
mod rate;
mod report;

pub use case_study::{export_case_study, CaseSample, CaseStudy, SealedKeyEntry};
pub use rate::{rate_session, unrated_cells, RateSummary};
pub use report::{
    emit_report, error_rate, performance_summary, usage_summary, AggregateReport, ConfigAggregate, RatingMeans,
    ReportArtifacts, ReportError, UsageSummary,
};

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{CellKey, TrialRecord};
use crate::orchestrator::ConfigId;

pub const EXPECTATION_DIFF_RANGE: (i64, i64) = (-5, 5);
pub const RATING_RANGE: (i64, i64) = (1, 5);

/// One observer's rating of one cell's final run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObserverFeedback {
    pub config: ConfigId,
    pub trial: u8,
    pub repetition: u8,
    pub expectation_comment: String,
    pub actual_comment: String,
    /// Actions compared with expectations, −5 (much worse) to +5 (much better).
    pub expectation_diff: i8,
    pub success: u8,
    pub safety: u8,
    pub sociability: u8,
    pub observer_id: String,
}

impl ObserverFeedback {
    pub fn cell(&self) -> CellKey {
        CellKey { config: self.config, trial: self.trial, repetition: self.repetition }
    }
}

/// Unvalidated feedback as typed or imported. Ratings are wide integers so
/// any out-of-range entry can be represented and rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFeedback {
    pub config: ConfigId,
    pub trial: u8,
    pub repetition: u8,
    pub expectation_comment: String,
    pub actual_comment: String,
    pub expectation_diff: i64,
    pub success: i64,
    pub safety: i64,
    pub sociability: i64,
    pub observer_id: String,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum FeedbackError {
    #[error("{field} = {value} is outside {min}..={max}")]
    OutOfRange { field: &'static str, value: i64, min: i64, max: i64 },
    #[error("{field} must not be empty")]
    EmptyComment { field: &'static str },
    #[error("no record for {0}")]
    UnknownRecord(CellKey),
    #[error("{0} has no successful run; errored runs are not rated")]
    FeedbackOnFailedRun(CellKey),
    #[error("{0} is already rated")]
    AlreadyRated(CellKey),
}

/// Checks a value against an inclusive range.
pub fn check_range(field: &'static str, value: i64, (min, max): (i64, i64)) -> Result<i64, FeedbackError> {
    if (min..=max).contains(&value) {
        Ok(value)
    } else {
        Err(FeedbackError::OutOfRange { field, value, min, max })
    }
}

/// Validates `raw` against the record store: ratings in range, comments
/// present, and the cell's final attempt succeeded.
pub fn ingest_feedback(records: &[TrialRecord], raw: RawFeedback) -> Result<ObserverFeedback, FeedbackError> {
    let cell = CellKey { config: raw.config, trial: raw.trial, repetition: raw.repetition };
    let expectation_diff = check_range("expectation_diff", raw.expectation_diff, EXPECTATION_DIFF_RANGE)?;
    let success = check_range("success", raw.success, RATING_RANGE)?;
    let safety = check_range("safety", raw.safety, RATING_RANGE)?;
    let sociability = check_range("sociability", raw.sociability, RATING_RANGE)?;
    for (field, text) in [("expectation_comment", &raw.expectation_comment), ("actual_comment", &raw.actual_comment)] {
        if text.trim().is_empty() {
            return Err(FeedbackError::EmptyComment { field });
        }
    }
    if raw.observer_id.trim().is_empty() {
        return Err(FeedbackError::EmptyComment { field: "observer_id" });
    }
    let cell_records: Vec<&TrialRecord> = records.iter().filter(|r| r.cell() == cell).collect();
    if cell_records.is_empty() {
        return Err(FeedbackError::UnknownRecord(cell));
    }
    if !cell_records.iter().any(|r| r.is_final && r.succeeded()) {
        return Err(FeedbackError::FeedbackOnFailedRun(cell));
    }
    Ok(ObserverFeedback {
        config: raw.config,
        trial: raw.trial,
        repetition: raw.repetition,
        expectation_comment: raw.expectation_comment,
        actual_comment: raw.actual_comment,
        expectation_diff: expectation_diff as i8,
        success: success as u8,
        safety: safety as u8,
        sociability: sociability as u8,
        observer_id: raw.observer_id,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum FeedbackStoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

/// Append-only JSON-lines store of validated feedback.
pub struct FeedbackStore {
    path: PathBuf,
    rated: BTreeSet<CellKey>,
}

impl FeedbackStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, FeedbackStoreError> {
        let path = path.as_ref().to_owned();
        let rated = load_feedback(&path)?.iter().map(ObserverFeedback::cell).collect();
        Ok(FeedbackStore { path, rated })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn is_rated(&self, cell: &CellKey) -> bool {
        self.rated.contains(cell)
    }

    pub fn load(&self) -> Result<Vec<ObserverFeedback>, FeedbackStoreError> {
        load_feedback(&self.path)
    }

    /// Validates and appends. Each cell can be rated once.
    pub fn ingest(&mut self, records: &[TrialRecord], raw: RawFeedback) -> Result<ObserverFeedback, IngestError> {
        let feedback = ingest_feedback(records, raw)?;
        self.append(&feedback)?;
        Ok(feedback)
    }

    /// Appends already-validated feedback.
    pub fn append(&mut self, feedback: &ObserverFeedback) -> Result<(), IngestError> {
        if self.rated.contains(&feedback.cell()) {
            return Err(FeedbackError::AlreadyRated(feedback.cell()).into());
        }
        let io_err = |source| FeedbackStoreError::Io { path: self.path.clone(), source };
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        let mut line = serde_json::to_string(feedback).expect("feedback serializes");
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path).map_err(io_err)?;
        file.write_all(line.as_bytes()).map_err(io_err)?;
        self.rated.insert(feedback.cell());
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error(transparent)]
    Invalid(#[from] FeedbackError),
    #[error(transparent)]
    Store(#[from] FeedbackStoreError),
}

pub fn load_feedback(path: impl AsRef<Path>) -> Result<Vec<ObserverFeedback>, FeedbackStoreError> {
    let path = path.as_ref();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(FeedbackStoreError::Io { path: path.to_owned(), source }),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| FeedbackStoreError::Io { path: path.to_owned(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| FeedbackStoreError::Corrupt {
            path: path.to_owned(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Outcome of importing a feedback file.
#[derive(Debug, Default)]
pub struct ImportSummary {
    pub accepted: usize,
    /// `(line number, reason)` for every rejected line.
    pub rejected: Vec<(usize, String)>,
}

/// Imports one [`RawFeedback`] JSON object per line. Invalid lines are
/// reported and skipped; valid ones are appended to `store`.
pub fn import_feedback(
    path: impl AsRef<Path>,
    records: &[TrialRecord],
    store: &mut FeedbackStore,
) -> Result<ImportSummary, FeedbackStoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FeedbackStoreError::Io { path: path.to_owned(), source })?;
    let mut summary = ImportSummary::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawFeedback = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                summary.rejected.push((i + 1, e.to_string()));
                continue;
            }
        };
        match store.ingest(records, raw) {
            Ok(_) => summary.accepted += 1,
            Err(IngestError::Invalid(e)) => summary.rejected.push((i + 1, e.to_string())),
            Err(IngestError::Store(e)) => return Err(e),
        }
    }
    Ok(summary)
}
