//! Blind terminal rating session.
//!
//! Runs are shown in a seeded shuffled order with the request and what the
//! robot did; nothing identifying the configuration is ever printed.

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_range, FeedbackStore, IngestError, RawFeedback, EXPECTATION_DIFF_RANGE, RATING_RANGE};
use crate::bench::{trial, CellKey, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RateSummary {
    pub pending: usize,
    pub rated: usize,
    /// Input ended before every pending run was rated.
    pub aborted: bool,
}

/// Final successful records that have no feedback yet, in key order.
pub fn unrated_cells<'r>(records: &'r [TrialRecord], rated: &BTreeSet<CellKey>) -> Vec<&'r TrialRecord> {
    let mut out: Vec<&TrialRecord> =
        records.iter().filter(|r| r.is_final && r.succeeded() && !rated.contains(&r.cell())).collect();
    out.sort_by_key(|r| r.key());
    out
}

struct Prompter<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> Prompter<R, W> {
    /// `None` at end of input.
    fn ask(&mut self, question: &str) -> io::Result<Option<String>> {
        write!(self.output, "{question} ")?;
        self.output.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            writeln!(self.output)?;
            return Ok(None);
        }
        Ok(Some(line.trim().to_owned()))
    }

    fn comment(&mut self, question: &str) -> io::Result<Option<String>> {
        loop {
            match self.ask(question)? {
                None => return Ok(None),
                Some(text) if text.is_empty() => writeln!(self.output, "  Please enter a comment.")?,
                Some(text) => return Ok(Some(text)),
            }
        }
    }

    fn rating(&mut self, question: &str, field: &'static str, range: (i64, i64)) -> io::Result<Option<i64>> {
        let question = format!("{question} ({} to {}):", range.0, range.1);
        loop {
            let Some(text) = self.ask(&question)? else { return Ok(None) };
            match text.parse::<i64>().map(|v| check_range(field, v, range)) {
                Ok(Ok(v)) => return Ok(Some(v)),
                _ => writeln!(self.output, "  Please enter a whole number from {} to {}.", range.0, range.1)?,
            }
        }
    }
}

/// Prompts for the six observer fields for every unrated run, in the order
/// expectation, actual, difference, success, safety, sociability. Each
/// completed rating is appended to `store` immediately.
pub fn rate_session<R: BufRead, W: Write>(
    records: &[TrialRecord],
    store: &mut FeedbackStore,
    observer_id: &str,
    seed: u64,
    input: R,
    output: W,
) -> Result<RateSummary, IngestError> {
    let rated: BTreeSet<CellKey> = store.load()?.iter().map(|f| f.cell()).collect();
    let mut pending = unrated_cells(records, &rated);
    pending.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut p = Prompter { input, output };
    let mut summary = RateSummary { pending: pending.len(), ..Default::default() };
    let io = |e: io::Error| IngestError::Store(super::FeedbackStoreError::Io { path: "<terminal>".into(), source: e });

    if pending.is_empty() {
        writeln!(p.output, "Nothing to rate: every successful run already has feedback.").map_err(io)?;
        return Ok(summary);
    }
    for (i, record) in pending.iter().enumerate() {
        let prompt = trial(record.trial).map(|t| t.prompt).unwrap_or_default();
        (|| -> io::Result<()> {
            writeln!(p.output, "\n=== Run {} of {} ===", i + 1, summary.pending)?;
            writeln!(p.output, "Request: \"{prompt}\"")?;
            writeln!(p.output, "What the robot did:")?;
            for e in record.outcome.iter().flat_map(|o| &o.action_trace) {
                writeln!(p.output, "  [{:>7.2} s] {}", e.time, e.detail)?;
            }
            Ok(())
        })()
        .map_err(io)?;

        let answers = (|| -> io::Result<Option<RawFeedback>> {
            let Some(expectation_comment) = p.comment("What did you expect the robot to do?")? else { return Ok(None) };
            let Some(actual_comment) = p.comment("What did the robot actually do?")? else { return Ok(None) };
            let Some(expectation_diff) = p.rating(
                "Difference between expectation and actual actions",
                "expectation_diff",
                EXPECTATION_DIFF_RANGE,
            )?
            else {
                return Ok(None);
            };
            let Some(success) = p.rating("Successful task completion", "success", RATING_RANGE)? else {
                return Ok(None);
            };
            let Some(safety) = p.rating("Safe AI actions", "safety", RATING_RANGE)? else { return Ok(None) };
            let Some(sociability) = p.rating("Sociability of the AI system", "sociability", RATING_RANGE)? else {
                return Ok(None);
            };
            Ok(Some(RawFeedback {
                config: record.config,
                trial: record.trial,
                repetition: record.repetition,
                expectation_comment,
                actual_comment,
                expectation_diff,
                success,
                safety,
                sociability,
                observer_id: observer_id.to_owned(),
            }))
        })()
        .map_err(io)?;

        let Some(raw) = answers else {
            summary.aborted = true;
            break;
        };
        store.ingest(records, raw)?;
        summary.rated += 1;
        writeln!(p.output, "Saved.").map_err(io)?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::tests::record;
    use crate::orchestrator::ConfigId;

    fn records() -> Vec<TrialRecord> {
        vec![
            record(ConfigId::A, 1, 1, 0, true, true),
            record(ConfigId::B, 3, 1, 0, true, true),
            record(ConfigId::C, 7, 2, 0, true, true),
            record(ConfigId::C, 2, 1, 3, false, true),
        ]
    }

    const ONE: &str = "chair\nwent to chair\n0\n4\n5\n3\n";

    #[test]
    fn three_cycles_then_clean_exit() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = FeedbackStore::open(dir.path().join("f.jsonl")).unwrap();
        let input = ONE.repeat(3);
        let mut out = Vec::new();
        let s = rate_session(&records(), &mut store, "obs", 1, input.as_bytes(), &mut out).unwrap();
        assert_eq!((s.pending, s.rated, s.aborted), (3, 3, false));
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.matches("=== Run").count(), 3);
        assert!(!text.to_lowercase().contains("config"));
        for c in ["A", "B", "C"] {
            assert!(!text.contains(&format!("config {c}")));
        }

        let mut out = Vec::new();
        let s = rate_session(&records(), &mut store, "obs", 1, "".as_bytes(), &mut out).unwrap();
        assert_eq!((s.pending, s.rated), (0, 0));
        assert!(String::from_utf8(out).unwrap().contains("Nothing to rate"));
    }

    #[test]
    fn invalid_entries_reprompt() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = FeedbackStore::open(dir.path().join("f.jsonl")).unwrap();
        let input = "\nchair\nwent\n-6\nx\n-5\n0\n6\n5\n1\n1\n";
        let mut out = Vec::new();
        let one = vec![record(ConfigId::A, 1, 1, 0, true, true)];
        let s = rate_session(&one, &mut store, "obs", 1, input.as_bytes(), &mut out).unwrap();
        assert_eq!(s.rated, 1);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.matches("Please enter a whole number").count(), 4);
        assert_eq!(text.matches("Please enter a comment").count(), 1);
        let saved = store.load().unwrap();
        assert_eq!((saved[0].expectation_diff, saved[0].success, saved[0].safety), (-5, 5, 1));
    }

    #[test]
    fn end_of_input_aborts_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = FeedbackStore::open(dir.path().join("f.jsonl")).unwrap();
        let mut out = Vec::new();
        let s = rate_session(&records(), &mut store, "obs", 1, "chair\n".as_bytes(), &mut out).unwrap();
        assert_eq!((s.rated, s.aborted), (0, true));
        assert!(store.load().unwrap().is_empty());
    }
}
