//! The experiment protocol: trials, pre-generation, execution, regeneration
//! on failure, and the resumable config × trial × repetition matrix.
//!
//! Every attempt becomes one [`TrialRecord`] appended to a [`RecordStore`].
//! Attempt 0 of each cell runs pre-generated code; when it fails, code is
//! regenerated and re-run (attempt 1, 2, …) until it succeeds or
//! `max_retries` is spent. Only attempt-0 execution results count toward
//! the error rate.

mod config;
mod store;
mod trials;

pub use config::{BackendKind, ConfigError, LiveSettings, Mode, RunConfig};
pub use store::{load_records, RecordStore, StoreError};
pub use trials::{load_trials, trial, Challenge, TrialSpec};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::agent::{CallContext, ChatBackend, TokenCounting, Transcript};
use crate::lang::{run_source, ExecutionOutcome, Limits};
use crate::orchestrator::{run_with_policy, ConfigId, OrchestratorError, SpeakerPolicy, TerminatedBy};
use crate::world::{layout_for_trial, SimParams, WaitMode, WorldError, WorldState};

/// One matrix cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub config: ConfigId,
    pub trial: u8,
    pub repetition: u8,
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config {} / trial {} / rep {}", self.config, self.trial, self.repetition)
    }
}

/// One attempt within a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttemptKey {
    pub cell: CellKey,
    pub attempt: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    #[serde(default = "all_configs")]
    pub configs: Vec<ConfigId>,
    #[serde(default = "all_trials")]
    pub trials: Vec<u8>,
    #[serde(default = "three")]
    pub repetitions: u8,
}

fn all_configs() -> Vec<ConfigId> {
    ConfigId::ALL.to_vec()
}
fn all_trials() -> Vec<u8> {
    (1..=7).collect()
}
fn three() -> u8 {
    3
}

impl Default for Matrix {
    /// 3 configs × 7 trials × 3 repetitions.
    fn default() -> Self {
        Matrix { configs: all_configs(), trials: all_trials(), repetitions: three() }
    }
}

impl Matrix {
    pub fn single(config: ConfigId, trial: u8, repetition: u8) -> Self {
        Matrix { configs: vec![config], trials: vec![trial], repetitions: repetition }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.configs.is_empty() || self.trials.is_empty() || self.repetitions == 0 {
            return Err("matrix must have at least one config, trial and repetition".into());
        }
        if self.configs.iter().collect::<BTreeSet<_>>().len() != self.configs.len() {
            return Err("matrix lists a config twice".into());
        }
        if self.trials.iter().collect::<BTreeSet<_>>().len() != self.trials.len() {
            return Err("matrix lists a trial twice".into());
        }
        if let Some(t) = self.trials.iter().find(|t| !(1..=7).contains(*t)) {
            return Err(format!("unknown trial {t} (trials are 1-7)"));
        }
        Ok(())
    }

    /// Every cell, sorted.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &config in &self.configs {
            for &trial in &self.trials {
                for repetition in 1..=self.repetitions {
                    cells.push(CellKey { config, trial, repetition });
                }
            }
        }
        cells.sort();
        cells
    }

    pub fn contains(&self, cell: &CellKey) -> bool {
        self.configs.contains(&cell.config)
            && self.trials.contains(&cell.trial)
            && (1..=self.repetitions).contains(&cell.repetition)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerationFailureKind {
    RoundCap,
    NoCodeBlock,
    Backend,
    InvalidPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationFailureInfo {
    pub kind: GenerationFailureKind,
    pub message: String,
}

impl From<&OrchestratorError> for GenerationFailureInfo {
    fn from(e: &OrchestratorError) -> Self {
        let kind = match e {
            OrchestratorError::RoundCapExceeded { .. } => GenerationFailureKind::RoundCap,
            OrchestratorError::NoCodeBlock => GenerationFailureKind::NoCodeBlock,
            OrchestratorError::Backend(_) => GenerationFailureKind::Backend,
            OrchestratorError::InvalidPolicy(_) => GenerationFailureKind::InvalidPolicy,
        };
        GenerationFailureInfo { kind, message: e.to_string() }
    }
}

/// What the agent team did to produce (or fail to produce) one program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub rounds: usize,
    pub inference_duration: f64,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub terminated_by: Option<TerminatedBy>,
    pub token_counting: TokenCounting,
    pub failure: Option<GenerationFailureInfo>,
    pub transcript: Transcript,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleEntry {
    /// `None` when generation failed.
    pub program_source: Option<String>,
    pub generation: GenerationSummary,
}

/// Pre-generated programs keyed by attempt.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CodeBundle {
    entries: BTreeMap<AttemptKey, BundleEntry>,
}

impl CodeBundle {
    pub fn get(&self, key: &AttemptKey) -> Option<&BundleEntry> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: AttemptKey, entry: BundleEntry) {
        self.entries.insert(key, entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AttemptKey, &BundleEntry)> {
        self.entries.iter()
    }

    /// JSON lines with wall-clock durations zeroed: identical scripts give
    /// identical canonical bundles.
    pub fn canonical_json(&self) -> String {
        let mut out = String::new();
        for (key, entry) in &self.entries {
            let mut entry = entry.clone();
            entry.generation.inference_duration = 0.0;
            let line = serde_json::json!({ "key": key, "entry": entry });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// One attempt at one cell: a line in the record store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config: ConfigId,
    pub trial: u8,
    pub repetition: u8,
    pub attempt_index: u32,
    pub generation: GenerationSummary,
    pub program_source: Option<String>,
    /// `None` when generation produced no program.
    pub outcome: Option<ExecutionOutcome>,
    /// The program ran and did not succeed.
    pub execution_failure: bool,
    pub inference_duration: f64,
    pub execution_sim_time: f64,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub was_regenerated: bool,
    /// Last attempt for this cell: it succeeded or retries are exhausted.
    pub is_final: bool,
    pub all_retries_failed: bool,
}

impl TrialRecord {
    pub fn cell(&self) -> CellKey {
        CellKey { config: self.config, trial: self.trial, repetition: self.repetition }
    }

    pub fn key(&self) -> AttemptKey {
        AttemptKey { cell: self.cell(), attempt: self.attempt_index }
    }

    pub fn succeeded(&self) -> bool {
        self.outcome.as_ref().is_some_and(ExecutionOutcome::is_success)
    }

    pub fn generation_failed(&self) -> bool {
        self.generation.failure.is_some()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("{cell}: all {attempts} attempts failed")]
    AllRetriesFailed { cell: CellKey, attempts: u32, last: Box<TrialRecord> },
    #[error("{0}")]
    World(#[from] WorldError),
    #[error("attempt {attempt} of {cell} is not failed; nothing to regenerate")]
    NotFailed { cell: CellKey, attempt: u32 },
}

/// Result of [`Bench::run_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOutcome {
    /// Every record for the matrix cells, old and new, in key order.
    pub records: Vec<TrialRecord>,
    /// Cells that were (re)started in this run.
    pub executed_cells: Vec<CellKey>,
    /// Cells whose final attempt still failed.
    pub failed_cells: Vec<CellKey>,
}

impl MatrixOutcome {
    pub fn final_records(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| r.is_final)
    }
}

/// Runs cells against one backend.
pub struct Bench<'a, B: ChatBackend + ?Sized> {
    backend: &'a B,
    pub limits: Limits,
    pub sim_params: SimParams,
    pub max_retries: u32,
    pub max_rounds: usize,
    pub workers: usize,
    pub mode: WaitMode,
}

impl<'a, B: ChatBackend + ?Sized> Bench<'a, B> {
    pub fn new(backend: &'a B) -> Self {
        Bench {
            backend,
            limits: Limits::default(),
            sim_params: SimParams::default(),
            max_retries: 3,
            max_rounds: SpeakerPolicy::DEFAULT_MAX_ROUNDS,
            workers: 4,
            mode: WaitMode::Headless,
        }
    }

    pub fn from_config(backend: &'a B, config: &RunConfig) -> Self {
        Bench {
            limits: config.limits,
            sim_params: config.world,
            max_retries: config.max_retries,
            max_rounds: config.max_rounds,
            workers: config.workers,
            ..Bench::new(backend)
        }
    }

    pub fn with_mode(mut self, mode: WaitMode) -> Self {
        self.mode = mode;
        self
    }

    fn effective_workers(&self) -> usize {
        match self.mode {
            WaitMode::Headless => self.workers.max(1),
            // an observer can only watch one robot
            WaitMode::Interactive { .. } => 1,
        }
    }

    /// A fresh world for the trial's room.
    pub fn spawn(&self, trial: u8) -> Result<WorldState, WorldError> {
        let context = trials::trial(trial).map_or(trial, |t| t.context_id);
        Ok(layout_for_trial(context)?.into_world(self.sim_params)?.with_wait_mode(self.mode.clone()))
    }

    /// Asks the agent team for a program for one attempt.
    pub fn generate(&self, key: AttemptKey) -> BundleEntry {
        let cell = key.cell;
        let spec = trials::trial(cell.trial);
        let prompt = spec.as_ref().map_or("", |t| t.prompt.as_str());
        let digest = self.spawn(cell.trial).map(|w| w.digest()).unwrap_or_default();
        let ctx =
            CallContext { config: cell.config, trial: cell.trial, repetition: cell.repetition, attempt: key.attempt };
        let policy = SpeakerPolicy { config: cell.config, max_rounds: self.max_rounds };
        match run_with_policy(&policy, prompt, &digest, self.backend, &ctx) {
            Ok(g) => BundleEntry {
                program_source: Some(g.program_source),
                generation: GenerationSummary {
                    rounds: g.rounds,
                    inference_duration: g.inference_duration,
                    input_tokens: g.input_tokens_total,
                    output_tokens: g.output_tokens_total,
                    terminated_by: Some(g.terminated_by),
                    token_counting: g.token_counting,
                    failure: None,
                    transcript: g.transcript,
                },
            },
            Err(f) => BundleEntry {
                program_source: None,
                generation: GenerationSummary {
                    rounds: f.transcript.messages().len() - 1,
                    inference_duration: f.inference_duration,
                    input_tokens: f.transcript.input_tokens(),
                    output_tokens: f.transcript.output_tokens(),
                    terminated_by: f.terminated_by(),
                    token_counting: self.backend.token_counting(),
                    failure: Some(GenerationFailureInfo::from(&f.error)),
                    transcript: f.transcript,
                },
            },
        }
    }

    /// Generates attempt 0 for every cell. Failed generations stay in the
    /// bundle with no program.
    pub fn pregenerate(&self, matrix: &Matrix) -> Result<CodeBundle, BenchError> {
        matrix.validate().map_err(BenchError::InvalidMatrix)?;
        Ok(self.pregenerate_cells(&matrix.cells()))
    }

    fn pregenerate_cells(&self, cells: &[CellKey]) -> CodeBundle {
        let keys: Vec<AttemptKey> = cells.iter().map(|&cell| AttemptKey { cell, attempt: 0 }).collect();
        let entries = parallel_map(&keys, self.effective_workers(), |&k| self.generate(k));
        CodeBundle { entries: keys.into_iter().zip(entries).collect() }
    }

    /// Runs one bundle entry in a fresh world.
    pub fn run_attempt(&self, key: AttemptKey, entry: &BundleEntry) -> Result<TrialRecord, BenchError> {
        let outcome = match &entry.program_source {
            Some(source) => {
                let mut world = self.spawn(key.cell.trial)?;
                Some(run_source(source, &mut world, self.limits))
            }
            None => None,
        };
        let succeeded = outcome.as_ref().is_some_and(ExecutionOutcome::is_success);
        let exhausted = !succeeded && key.attempt >= self.max_retries;
        Ok(TrialRecord {
            config: key.cell.config,
            trial: key.cell.trial,
            repetition: key.cell.repetition,
            attempt_index: key.attempt,
            program_source: entry.program_source.clone(),
            execution_failure: outcome.as_ref().is_some_and(|o| !o.is_success()),
            execution_sim_time: outcome.as_ref().map_or(0.0, |o| o.sim_time_elapsed),
            outcome,
            inference_duration: entry.generation.inference_duration,
            input_tokens: entry.generation.input_tokens,
            output_tokens: entry.generation.output_tokens,
            generation: entry.generation.clone(),
            was_regenerated: key.attempt > 0,
            is_final: succeeded || exhausted,
            all_retries_failed: exhausted,
        })
    }

    /// Regenerates and re-runs after `failed` until an attempt succeeds or
    /// `max_retries` regenerations are spent. `sink` sees every new record.
    pub fn regenerate_on_failure(
        &self,
        failed: &TrialRecord,
        sink: &mut dyn FnMut(&TrialRecord) -> Result<(), BenchError>,
    ) -> Result<TrialRecord, BenchError> {
        if failed.succeeded() {
            return Err(BenchError::NotFailed { cell: failed.cell(), attempt: failed.attempt_index });
        }
        let cell = failed.cell();
        let mut last = failed.clone();
        for attempt in failed.attempt_index + 1..=self.max_retries {
            let key = AttemptKey { cell, attempt };
            let entry = self.generate(key);
            last = self.run_attempt(key, &entry)?;
            sink(&last)?;
            if last.succeeded() {
                return Ok(last);
            }
        }
        Err(BenchError::AllRetriesFailed { cell, attempts: last.attempt_index + 1, last: Box::new(last) })
    }

    /// Pre-generates, executes and regenerates every cell not already
    /// finished in `store`. Failing cells never stop the others.
    pub fn run_matrix(
        &self,
        matrix: &Matrix,
        store: &RecordStore,
        progress: &(dyn Fn(&TrialRecord) + Sync),
    ) -> Result<MatrixOutcome, BenchError> {
        matrix.validate().map_err(BenchError::InvalidMatrix)?;
        let existing = store.load()?;
        let mut last_attempt: BTreeMap<CellKey, &TrialRecord> = BTreeMap::new();
        for r in existing.iter().filter(|r| matrix.contains(&r.cell())) {
            let slot = last_attempt.entry(r.cell()).or_insert(r);
            if r.attempt_index >= slot.attempt_index {
                *slot = r;
            }
        }
        let mut fresh = Vec::new();
        let mut partial = Vec::new();
        for cell in matrix.cells() {
            match last_attempt.get(&cell) {
                None => fresh.push(cell),
                Some(r) if !r.is_final => partial.push((*r).clone()),
                Some(_) => {}
            }
        }

        let bundle = self.pregenerate_cells(&fresh);
        let new_records = Mutex::new(Vec::new());
        let store_error = Mutex::new(None);
        let record = |r: &TrialRecord| -> Result<(), BenchError> {
            store.append(r)?;
            new_records.lock().unwrap_or_else(|e| e.into_inner()).push(r.clone());
            progress(r);
            Ok(())
        };

        enum Job<'j> {
            Fresh(AttemptKey, &'j BundleEntry),
            Resume(&'j TrialRecord),
        }
        let mut jobs: Vec<Job> = bundle.iter().map(|(k, e)| Job::Fresh(*k, e)).collect();
        jobs.extend(partial.iter().map(Job::Resume));

        parallel_map(&jobs, self.effective_workers(), |job| {
            let result = (|| -> Result<(), BenchError> {
                let first = match job {
                    Job::Fresh(key, entry) => {
                        let r = self.run_attempt(*key, entry)?;
                        record(&r)?;
                        r
                    }
                    Job::Resume(r) => (*r).clone(),
                };
                if !first.is_final {
                    match self.regenerate_on_failure(&first, &mut |r| record(r)) {
                        Ok(_) | Err(BenchError::AllRetriesFailed { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok(())
            })();
            if let Err(e) = result {
                store_error.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert(e);
            }
        });
        if let Some(e) = store_error.into_inner().unwrap_or_else(|e| e.into_inner()) {
            return Err(e);
        }

        let mut records: Vec<TrialRecord> = existing.into_iter().filter(|r| matrix.contains(&r.cell())).collect();
        records.extend(new_records.into_inner().unwrap_or_else(|e| e.into_inner()));
        records.sort_by_key(TrialRecord::key);
        let failed_cells = records.iter().filter(|r| r.all_retries_failed).map(TrialRecord::cell).collect();
        let mut executed_cells: Vec<CellKey> = fresh;
        executed_cells.extend(partial.iter().map(TrialRecord::cell));
        executed_cells.sort();
        Ok(MatrixOutcome { records, executed_cells, failed_cells })
    }
}

/// Maps `f` over `items` on up to `workers` threads, preserving order.
fn parallel_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..workers.min(items.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                results.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(r);
            });
        }
    });
    results.into_inner().unwrap_or_else(|e| e.into_inner()).into_iter().map(|r| r.expect("every slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{BackendScript, FailureInjection, Role, ScriptedBackend};

    const CODE: &str = "```robo\nsay(\"hello\")\n```";

    fn backend(injections: &[FailureInjection]) -> ScriptedBackend {
        let mut script = BackendScript::new()
            .with_response(Role::Coder, None, 0, CODE)
            .with_response(Role::Planner, None, 0, "1. greet")
            .with_response(Role::Reviewer, None, 0, "Fine. APPROVE");
        for &i in injections {
            script = script.with_injection(i);
        }
        ScriptedBackend::new(script)
    }

    fn inject(config: ConfigId, trial: u8, repetition: u8, attempt: u32) -> FailureInjection {
        FailureInjection { config: Some(config), trial: Some(trial), repetition: Some(repetition), attempt }
    }

    #[test]
    fn matrix_cells() {
        assert_eq!(Matrix::default().cells().len(), 63);
        assert_eq!(Matrix::single(ConfigId::A, 1, 1).cells().len(), 1);
        assert!(Matrix { trials: vec![0], ..Matrix::default() }.validate().is_err());
        assert!(Matrix { configs: vec![ConfigId::A, ConfigId::A], ..Matrix::default() }.validate().is_err());
    }

    #[test]
    fn pregeneration_is_deterministic() {
        let b = backend(&[]);
        let bench = Bench::new(&b);
        let one = bench.pregenerate(&Matrix::default()).unwrap();
        let two = bench.pregenerate(&Matrix::default()).unwrap();
        assert_eq!(one.len(), 63);
        assert_eq!(one.canonical_json(), two.canonical_json());
    }

    #[test]
    fn failed_extraction_keeps_the_cell() {
        let b = ScriptedBackend::new(BackendScript::new().with_response(Role::Coder, None, 0, "no code"));
        let bundle = Bench::new(&b).pregenerate(&Matrix::single(ConfigId::A, 2, 1)).unwrap();
        let entry = bundle.iter().next().unwrap().1;
        assert!(entry.program_source.is_none());
        assert_eq!(entry.generation.failure.as_ref().unwrap().kind, GenerationFailureKind::NoCodeBlock);
    }

    #[test]
    fn regeneration_after_injected_failure() {
        let b = backend(&[inject(ConfigId::A, 1, 1, 0)]);
        let bench = Bench::new(&b);
        let key = AttemptKey { cell: CellKey { config: ConfigId::A, trial: 1, repetition: 1 }, attempt: 0 };
        let first = bench.run_attempt(key, &bench.generate(key)).unwrap();
        assert!(first.execution_failure);
        assert_eq!(first.outcome.as_ref().unwrap().status, crate::lang::ExecStatus::ParseError);
        assert!(!first.is_final);
        let mut seen = Vec::new();
        let last = bench
            .regenerate_on_failure(&first, &mut |r| {
                let _: () = seen.push(r.clone());
                Ok(())
            })
            .unwrap();
        assert_eq!((last.attempt_index, last.was_regenerated, last.is_final), (1, true, true));
        assert_eq!(seen.len(), 1);
    }

    #[test]
    fn permanent_failure_exhausts_retries() {
        let always = FailureInjection { config: None, trial: None, repetition: None, attempt: 0 };
        let injections: Vec<_> = (0..=3).map(|attempt| FailureInjection { attempt, ..always }).collect();
        let b = backend(&injections);
        let bench = Bench::new(&b);
        let key = AttemptKey { cell: CellKey { config: ConfigId::B, trial: 2, repetition: 1 }, attempt: 0 };
        let first = bench.run_attempt(key, &bench.generate(key)).unwrap();
        let err = bench.regenerate_on_failure(&first, &mut |_| Ok(())).unwrap_err();
        match err {
            BenchError::AllRetriesFailed { attempts, last, .. } => {
                assert_eq!(attempts, 4);
                assert!(last.is_final && last.all_retries_failed);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn matrix_resumes_from_a_partial_store() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let b = backend(&[inject(ConfigId::C, 3, 2, 0)]);
        let bench = Bench::new(&b);
        let store = RecordStore::open(&path).unwrap();
        let full = bench.run_matrix(&Matrix::default(), &store, &|_| {}).unwrap();
        assert_eq!(full.final_records().count(), 63);
        assert_eq!(full.records.len(), 64);
        drop(store);

        // keep the first 20 lines, plus a torn line from an interrupted write
        let text = std::fs::read_to_string(&path).unwrap();
        let mut kept: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
        kept.push_str("{\"config\":\"A\",\"tri");
        std::fs::write(&path, kept).unwrap();

        let store = RecordStore::open(&path).unwrap();
        let resumed = bench.run_matrix(&Matrix::default(), &store, &|_| {}).unwrap();
        assert_eq!(resumed.final_records().count(), 63);
        let finished: BTreeSet<CellKey> = text
            .lines()
            .take(20)
            .map(|l| serde_json::from_str::<TrialRecord>(l).unwrap())
            .filter(|r| r.is_final)
            .map(|r| r.cell())
            .collect();
        assert_eq!(resumed.executed_cells.len(), 63 - finished.len());
        let again = bench.run_matrix(&Matrix::default(), &store, &|_| {}).unwrap();
        assert!(again.executed_cells.is_empty());
        let mut keys: Vec<_> = load_records(&path).unwrap().iter().map(TrialRecord::key).collect();
        keys.sort();
        let n = keys.len();
        keys.dedup();
        assert_eq!(keys.len(), n, "no duplicate attempts");
    }
}
