//! Export twelve anonymized programs (prompts 3 and 5, two per config) with
//! a sealed key, then reveal the key.
//!
//! ```text
//! cargo run --example case_study -- /tmp/robobench-case-study
//! ```

use std::path::PathBuf;

use robobench::agent::{BackendScript, ScriptedBackend};
use robobench::bench::{Bench, Matrix, RecordStore};
use robobench::feedback::export_case_study;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("robobench-case-study"), PathBuf::from);
    let _ = std::fs::remove_dir_all(&out);
    let script = BackendScript::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/scripts/default.toml"))?;
    let backend = ScriptedBackend::new(script);
    let store = RecordStore::open(out.join("records.jsonl"))?;
    let records = Bench::new(&backend).run_matrix(&Matrix::default(), &store, &|_| {})?.records;

    let study = export_case_study(&records, &[3, 5], 2, 42, &out.join("bundle"))?;
    for s in &study.samples {
        println!("{} (prompt {}): {} lines", s.path.display(), s.trial, s.text.lines().count());
    }
    println!("\n{}", study.samples[0].text);
    println!("sealed key ({}):", study.key_path.display());
    for k in &study.key {
        println!("  {} <- config {} trial {} rep {}", k.sample, k.config, k.trial, k.repetition);
    }
    Ok(())
}
