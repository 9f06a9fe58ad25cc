//! Parse, check and pretty-print a robot program. Pass a path, or run with
//! no arguments to see diagnostics for a deliberately broken program.
//!
//! ```text
//! cargo run --example validate_program -- crates/core/fixtures/programs/trial7.robo
//! ```

use robobench::lang::{parse, pretty_print, static_check, validate_source};

const BROKEN: &str = "let chair = nearest(\"chair\")\nwalk_to(position(chiar))\nspeak(\"done\")\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => BROKEN.to_owned(),
    };

    let diagnostics = validate_source(&source);
    if diagnostics.is_empty() {
        println!("clean program");
    }
    for d in &diagnostics {
        println!("{}:{}: {} {}", d.line, d.column, d.code.as_str(), d.message);
    }
    // diagnostics serialize as {line, column, code, message}
    println!("{}", serde_json::to_string_pretty(&diagnostics)?);

    if let Ok(program) = parse(&source) {
        assert_eq!(static_check(&program), diagnostics);
        let printed = pretty_print(&program);
        assert_eq!(parse(&printed)?, program, "printing round-trips");
        println!("--- canonical form ---\n{printed}");
    }
    Ok(())
}
