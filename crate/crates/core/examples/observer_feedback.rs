//! Validate observer ratings against a record store: in-range entries are
//! accepted, anything outside the rating scales is rejected at ingestion.
//!
//! ```text
//! cargo run --example observer_feedback
//! ```

use robobench::agent::{BackendScript, ScriptedBackend};
use robobench::bench::{Bench, Matrix};
use robobench::feedback::{ingest_feedback, RawFeedback};
use robobench::orchestrator::ConfigId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let script = BackendScript::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/scripts/default.toml"))?;
    let backend = ScriptedBackend::new(script);
    let dir = std::env::temp_dir().join("robobench-feedback-example");
    let _ = std::fs::remove_dir_all(&dir);
    let store = robobench::bench::RecordStore::open(dir.join("records.jsonl"))?;
    let records = Bench::new(&backend).run_matrix(&Matrix::single(ConfigId::B, 3, 1), &store, &|_| {})?.records;

    let base = RawFeedback {
        config: ConfigId::B,
        trial: 3,
        repetition: 1,
        expectation_comment: "Find me a snack".into(),
        actual_comment: "Walked me to the apple and told me what it was".into(),
        expectation_diff: 2,
        success: 5,
        safety: 4,
        sociability: 4,
        observer_id: "observer-07".into(),
    };
    let cases = [
        ("as entered", base.clone()),
        ("success = 6", RawFeedback { success: 6, ..base.clone() }),
        ("success = 0", RawFeedback { success: 0, ..base.clone() }),
        ("expectation_diff = -6", RawFeedback { expectation_diff: -6, ..base.clone() }),
        ("expectation_diff = -5", RawFeedback { expectation_diff: -5, ..base.clone() }),
        ("unknown cell", RawFeedback { trial: 4, ..base.clone() }),
    ];
    for (name, raw) in cases {
        match ingest_feedback(&records, raw) {
            Ok(f) => println!("{name:<24} accepted (success {}, diff {})", f.success, f.expectation_diff),
            Err(e) => println!("{name:<24} rejected: {e}"),
        }
    }
    Ok(())
}
