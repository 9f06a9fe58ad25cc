//! Run the full 3 × 7 × 3 matrix against the shipped scripted backend,
//! interrupt-safe: re-running the example resumes from the record store.
//!
//! ```text
//! cargo run --example run_matrix -- /tmp/robobench-run
//! ```

use std::path::PathBuf;
use std::time::Instant;

use robobench::agent::{BackendScript, ScriptedBackend};
use robobench::bench::{Bench, Matrix, RecordStore};
use robobench::feedback::error_rate;
use robobench::orchestrator::ConfigId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("robobench-run"), PathBuf::from);
    let script = BackendScript::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/scripts/default.toml"))?;
    let backend = ScriptedBackend::new(script);
    let bench = Bench::new(&backend);
    let store = RecordStore::open(out.join("records.jsonl"))?;

    let started = Instant::now();
    let outcome = bench.run_matrix(&Matrix::default(), &store, &|r| {
        if r.attempt_index > 0 {
            println!(
                "regenerated {} attempt {}: {}",
                r.cell(),
                r.attempt_index,
                if r.succeeded() { "ok" } else { "failed" }
            );
        }
    })?;
    println!(
        "{} cells executed now, {} final records, {} attempts in total, {:.2} s wall",
        outcome.executed_cells.len(),
        outcome.final_records().count(),
        outcome.records.len(),
        started.elapsed().as_secs_f64()
    );
    for config in ConfigId::ALL {
        println!("config {config}: attempt-0 error rate {:.2}%", error_rate(&outcome.records, config)?);
    }
    println!("records: {}", store.path().display());
    Ok(())
}
