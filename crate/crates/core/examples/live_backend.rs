//! Ask a real chat-completions endpoint for a trial-1 program with the solo
//! coder configuration.
//!
//! Configure through the environment:
//!
//! ```text
//! ROBOBENCH_ENDPOINT=https://api.example.com/v1/chat/completions \
//! ROBOBENCH_MODEL=some-model ROBOBENCH_API_KEY=... \
//! cargo run --example live_backend
//! ```
//!
//! Without `ROBOBENCH_ENDPOINT` the example explains itself and exits.

use robobench::agent::{CallContext, HttpBackend};
use robobench::bench::{trial, LiveSettings};
use robobench::lang::{run_source, Limits};
use robobench::orchestrator::{run_config, ConfigId};
use robobench::world::spawn_world;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let settings = LiveSettings::default();
    let config = match settings.resolve() {
        Ok(c) => c,
        Err(e) => {
            println!(
                "{e}\nset {} and {} (and {} if the endpoint needs a key)",
                settings.endpoint_env, settings.model_env, settings.api_key_env
            );
            return Ok(());
        }
    };
    let backend = HttpBackend::new(config, settings.retry_policy());
    let spec = trial(1).expect("trial 1 exists");
    let mut world = spawn_world(spec.context_id)?;
    let ctx = CallContext { config: ConfigId::A, trial: 1, repetition: 1, attempt: 0 };

    let result = run_config(ConfigId::A, &spec.prompt, &world.digest(), &backend, &ctx)?;
    println!(
        "inference {:.2} s, {} in / {} out tokens (reported by the endpoint)\n{}",
        result.inference_duration, result.input_tokens_total, result.output_tokens_total, result.program_source
    );
    let outcome = run_source(&result.program_source, &mut world, Limits::default());
    println!("execution: {} after {:.2} simulated s", outcome.status, outcome.sim_time_elapsed);
    Ok(())
}
