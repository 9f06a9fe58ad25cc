//! Conversation routing over random review loops.

use proptest::prelude::*;
use robobench::agent::{BackendScript, CallContext, Role, ScriptedBackend};
use robobench::orchestrator::{
    accepts_sequence, run_with_policy, ConfigId, OrchestratorError, SpeakerPolicy, TerminatedBy,
};

fn program(round: usize) -> String {
    format!("say(\"draft {round}\")\n")
}

/// Coder drafts every round; the reviewer rejects `revisions` times, then
/// approves.
fn review_loop(revisions: usize, filler: usize) -> ScriptedBackend {
    let pad = "lorem ".repeat(filler);
    let mut script = BackendScript::new().with_response(Role::Planner, None, 0, format!("{pad}Plan: say something."));
    for round in 0..=revisions + 1 {
        script = script.with_response(Role::Coder, None, round, format!("{pad}\n```robo\n{}```", program(round)));
        let verdict = if round == revisions { "Looks right. APPROVE" } else { "Please revise the greeting." };
        script = script.with_response(Role::Reviewer, None, round, format!("{pad}{verdict}"));
    }
    ScriptedBackend::new(script)
}

fn ctx(config: ConfigId) -> CallContext {
    CallContext { config, trial: 1, repetition: 1, attempt: 0 }
}

proptest! {
    #[test]
    fn conversations_follow_the_routing_grammar(
        config in prop::sample::select(ConfigId::ALL.to_vec()),
        revisions in 0usize..5,
        max_rounds in 1usize..14,
        filler in 0usize..20,
    ) {
        let backend = review_loop(revisions, filler);
        let policy = SpeakerPolicy::new(config, max_rounds);
        if max_rounds < config.min_rounds() {
            prop_assert!(matches!(policy, Err(OrchestratorError::InvalidPolicy(_))));
            return Ok(());
        }
        let policy = policy.unwrap();
        let needed = match config {
            ConfigId::A => 1,
            ConfigId::B => 2 * (revisions + 1),
            ConfigId::C => 1 + 2 * (revisions + 1),
        };
        let drafts = if config == ConfigId::A { 0 } else { revisions };
        match run_with_policy(&policy, "Say hello.", "", &backend, &ctx(config)) {
            Ok(result) => {
                prop_assert!(needed <= max_rounds);
                prop_assert_eq!(result.rounds, needed);
                let senders: Vec<&str> = result.transcript.sender_sequence();
                let approvals: Vec<bool> = result.transcript.messages()[1..]
                    .iter()
                    .map(|m| m.sender == "reviewer" && m.content.ends_with("APPROVE"))
                    .collect();
                prop_assert!(accepts_sequence(config, &senders, &approvals), "{:?}", senders);
                prop_assert_eq!(result.program_source, program(drafts));
                let expected_end = if config == ConfigId::A { TerminatedBy::SoloEmit } else { TerminatedBy::Approval };
                prop_assert_eq!(result.terminated_by, expected_end);
                prop_assert_eq!(
                    result.input_tokens_total,
                    result.transcript.messages().iter().map(|m| m.input_tokens).sum::<u64>()
                );
                // each agent sees a strictly longer conversation every turn
                for role in config.roles() {
                    let mine: Vec<u64> = result.transcript.messages().iter()
                        .filter(|m| m.sender == role.as_str())
                        .map(|m| m.input_tokens)
                        .collect();
                    prop_assert!(mine.windows(2).all(|w| w[0] < w[1]), "{:?}", mine);
                }
            }
            Err(failure) => {
                prop_assert!(needed > max_rounds, "unexpected {}", failure);
                prop_assert_eq!(&failure.error, &OrchestratorError::RoundCapExceeded { max_rounds });
                prop_assert_eq!(failure.terminated_by(), Some(TerminatedBy::RoundCap));
                prop_assert_eq!(failure.transcript.messages().len() - 1, max_rounds);
            }
        }
    }

    #[test]
    fn longer_requests_cost_more_input(extra in 1usize..200) {
        let backend = review_loop(1, 0);
        for config in ConfigId::ALL {
            let policy = SpeakerPolicy::with_default_cap(config);
            let short = run_with_policy(&policy, "Go.", "", &backend, &ctx(config)).unwrap();
            let long = run_with_policy(&policy, &format!("Go.{}", " now".repeat(extra)), "", &backend, &ctx(config)).unwrap();
            prop_assert!(long.input_tokens_total > short.input_tokens_total);
            prop_assert_eq!(long.output_tokens_total, short.output_tokens_total);
        }
    }
}

#[test]
fn missing_code_block_is_a_generation_failure() {
    let backend = ScriptedBackend::new(BackendScript::new().with_response(Role::Coder, None, 0, "I cannot help."));
    let err = run_with_policy(&SpeakerPolicy::with_default_cap(ConfigId::A), "Go.", "", &backend, &ctx(ConfigId::A))
        .unwrap_err();
    assert_eq!(err.error, OrchestratorError::NoCodeBlock);
    assert_eq!(err.terminated_by(), None);
    assert_eq!(err.transcript.sender_sequence(), ["coder"]);
}
