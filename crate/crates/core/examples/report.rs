//! Run the matrix, import the sample ratings and write the report tables.
//!
//! ```text
//! cargo run --example report -- /tmp/robobench-report
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use robobench::agent::{BackendScript, ScriptedBackend};
use robobench::bench::{Bench, Matrix, RecordStore};
use robobench::feedback::{emit_report, import_feedback, AggregateReport, FeedbackStore};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("robobench-report"), PathBuf::from);
    let _ = std::fs::remove_dir_all(&out);
    let manifest = env!("CARGO_MANIFEST_DIR");
    let backend = ScriptedBackend::new(BackendScript::load(format!("{manifest}/fixtures/scripts/default.toml"))?);
    let store = RecordStore::open(out.join("records.jsonl"))?;
    let records = Bench::new(&backend).run_matrix(&Matrix::default(), &store, &|_| {})?.records;

    let mut feedback = FeedbackStore::open(out.join("feedback.jsonl"))?;
    let imported = import_feedback(format!("{manifest}/fixtures/feedback_sample.jsonl"), &records, &mut feedback)?;
    println!("imported {} ratings", imported.accepted);
    let ratings = feedback.load()?;

    let filter: BTreeSet<u8> = [3, 5].into();
    let artifacts = emit_report(&records, &ratings, Some(&filter), &out.join("report"))?;
    for t in &artifacts.tables {
        println!("\n{}\n{}", t.display(), std::fs::read_to_string(t)?);
    }

    let report = AggregateReport::build(&records, &ratings, None)?;
    for c in &report.configs {
        let u = c.usage.as_ref().expect("every config ran");
        println!(
            "config {}: error {:.2}%, mean input tokens {:.1}, mean execution {:.3} s",
            c.config,
            c.error_rate.unwrap_or(f64::NAN),
            u.input_tokens_mean,
            u.execution_mean
        );
    }
    Ok(())
}
