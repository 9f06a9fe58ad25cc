//! Run a program in one of the seven trial rooms and show the outcome.
//!
//! ```text
//! cargo run --example run_program -- 7                      # shipped trial-7 program
//! cargo run --example run_program -- 1 my_program.robo      # your own program
//! ```

use std::path::PathBuf;

use robobench::lang::{run_source, Limits};
use robobench::world::spawn_world;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let trial: u8 = args.next().as_deref().unwrap_or("7").parse()?;
    let path = match args.next() {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("fixtures/programs/trial{trial}.robo")),
    };
    let source = std::fs::read_to_string(&path)?;

    let mut world = spawn_world(trial)?;
    let outcome = run_source(&source, &mut world, Limits::default());
    println!("status: {}", outcome.status);
    if let Some(detail) = &outcome.error_detail {
        println!("error: {detail}");
    }
    println!("steps: {}, simulated time: {:.3} s", outcome.steps_used, outcome.sim_time_elapsed);
    for e in &outcome.action_trace {
        println!("  [{:>7.3}] {:<16} {}", e.time, e.kind.to_string(), e.detail);
    }
    println!("robot ends at {}", world.robot().position);
    Ok(())
}
