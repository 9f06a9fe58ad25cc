//! Run the three team configurations on one trial against the shipped
//! scripted backend and compare their conversations.
//!
//! ```text
//! cargo run --example scripted_conversation -- 5
//! ```

use robobench::agent::{BackendScript, CallContext, ScriptedBackend};
use robobench::bench::trial;
use robobench::orchestrator::{accepts_sequence, approved, run_config, ConfigId};
use robobench::world::spawn_world;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id: u8 = std::env::args().nth(1).as_deref().unwrap_or("5").parse()?;
    let spec = trial(id).ok_or("trials are 1-7")?;
    let script = BackendScript::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/scripts/default.toml"))?;
    let backend = ScriptedBackend::new(script);
    let digest = spawn_world(spec.context_id)?.digest();

    println!("trial {id} ({}): \"{}\"\n", spec.challenge, spec.prompt);
    for config in ConfigId::ALL {
        // attempt 1 is never failure-injected in the shipped script
        let ctx = CallContext { config, trial: id, repetition: 1, attempt: 1 };
        let result = run_config(config, &spec.prompt, &digest, &backend, &ctx)?;
        let senders = result.transcript.sender_sequence();
        let approvals: Vec<bool> =
            result.transcript.messages()[1..].iter().map(|m| m.sender == "reviewer" && approved(m)).collect();
        println!(
            "config {config}: {} rounds, {:?}, {} in / {} out tokens ({}), speakers {:?} (valid: {})",
            result.rounds,
            result.terminated_by,
            result.input_tokens_total,
            result.output_tokens_total,
            result.token_counting,
            senders,
            accepts_sequence(config, &senders, &approvals),
        );
    }

    let ctx = CallContext { config: ConfigId::C, trial: id, repetition: 1, attempt: 1 };
    let c = run_config(ConfigId::C, &spec.prompt, &digest, &backend, &ctx)?;
    println!("\n--- config C transcript ---");
    for m in c.transcript.messages() {
        println!("[{}] {}\n", m.sender, m.content);
    }
    println!("--- extracted program ---\n{}", c.program_source);
    Ok(())
}
