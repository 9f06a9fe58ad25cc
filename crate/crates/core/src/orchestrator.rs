//! The three team configurations as deterministic conversation state machines.
//!
//! * **A** — a lone coder answers the request.
//! * **B** — coder and reviewer alternate until the reviewer approves.
//! * **C** — a planner speaks once, then coder and reviewer alternate as in B.
//!
//! The chat manager is the routing rule in [`select_next_speaker`]; it is not
//! a model call.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::agent::{
    build_agent, AgentSpec, BackendError, CallContext, ChatBackend, Message, Role, TokenCounting, Transcript, USER,
};

/// Word a reviewer ends its message with to accept the program.
pub const APPROVAL_TOKEN: &str = "APPROVE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConfigId {
    A,
    B,
    C,
}

impl ConfigId {
    pub const ALL: [ConfigId; 3] = [ConfigId::A, ConfigId::B, ConfigId::C];

    /// Roles that speak in this configuration, in first-speaking order.
    pub fn roles(self) -> Vec<Role> {
        match self {
            ConfigId::A => vec![Role::Coder],
            ConfigId::B => vec![Role::Coder, Role::Reviewer],
            ConfigId::C => vec![Role::Planner, Role::Coder, Role::Reviewer],
        }
    }

    /// Smallest round cap that lets an approving first pass finish.
    pub fn min_rounds(self) -> usize {
        self.roles().len()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConfigId::A => "A",
            ConfigId::B => "B",
            ConfigId::C => "C",
        }
    }
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfigId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(ConfigId::A),
            "B" | "b" => Ok(ConfigId::B),
            "C" | "c" => Ok(ConfigId::C),
            other => Err(format!("unknown configuration `{other}` (expected A, B or C)")),
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OrchestratorError {
    #[error("conversation reached {max_rounds} agent messages without approval")]
    RoundCapExceeded { max_rounds: usize },
    #[error("coder message contains no ```robo code block")]
    NoCodeBlock,
    #[error("invalid speaker policy: {0}")]
    InvalidPolicy(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakerPolicy {
    pub config: ConfigId,
    pub max_rounds: usize,
}

impl SpeakerPolicy {
    pub const DEFAULT_MAX_ROUNDS: usize = 10;

    pub fn new(config: ConfigId, max_rounds: usize) -> Result<Self, OrchestratorError> {
        if max_rounds < config.min_rounds() {
            return Err(OrchestratorError::InvalidPolicy(format!(
                "config {config} needs max_rounds >= {}, got {max_rounds}",
                config.min_rounds()
            )));
        }
        Ok(SpeakerPolicy { config, max_rounds })
    }

    pub fn with_default_cap(config: ConfigId) -> Self {
        SpeakerPolicy { config, max_rounds: Self::DEFAULT_MAX_ROUNDS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextSpeaker {
    Agent(Role),
    Terminate,
}

/// True iff the last whitespace-separated word is exactly `APPROVE`.
pub fn approved(message: &Message) -> bool {
    message.content.split_whitespace().next_back() == Some(APPROVAL_TOKEN)
}

/// Body of the last ```robo fenced block in the message.
pub fn extract_program(message: &Message) -> Result<String, OrchestratorError> {
    let mut last = None;
    let mut current: Option<Vec<&str>> = None;
    for line in message.content.lines() {
        let trimmed = line.trim();
        match current.as_mut() {
            None if trimmed == "```robo" => current = Some(Vec::new()),
            None => {}
            Some(_) if trimmed == "```" => {
                let body = current.take().unwrap_or_default();
                last = Some(body);
            }
            Some(body) => body.push(line),
        }
    }
    let body = last.ok_or(OrchestratorError::NoCodeBlock)?;
    let mut out = body.join("\n");
    out.push('\n');
    Ok(out)
}

fn role_of(sender: &str) -> Option<Role> {
    [Role::Coder, Role::Reviewer, Role::Planner, Role::Manager].into_iter().find(|r| r.as_str() == sender)
}

/// The chat manager's routing rule.
pub fn select_next_speaker(policy: &SpeakerPolicy, transcript: &Transcript) -> Result<NextSpeaker, OrchestratorError> {
    let last = transcript.last();
    let next = if last.sender == USER {
        match policy.config {
            ConfigId::A | ConfigId::B => NextSpeaker::Agent(Role::Coder),
            ConfigId::C => NextSpeaker::Agent(Role::Planner),
        }
    } else {
        match (policy.config, role_of(&last.sender)) {
            (ConfigId::A, Some(Role::Coder)) => NextSpeaker::Terminate,
            (ConfigId::B | ConfigId::C, Some(Role::Coder)) => NextSpeaker::Agent(Role::Reviewer),
            (ConfigId::B | ConfigId::C, Some(Role::Reviewer)) if approved(last) => NextSpeaker::Terminate,
            (ConfigId::B | ConfigId::C, Some(Role::Reviewer)) => NextSpeaker::Agent(Role::Coder),
            (ConfigId::C, Some(Role::Planner)) => NextSpeaker::Agent(Role::Coder),
            (config, _) => {
                return Err(OrchestratorError::InvalidPolicy(format!(
                    "sender `{}` does not speak in config {config}",
                    last.sender
                )))
            }
        }
    };
    let agent_messages = transcript.messages().len() - 1;
    if next != NextSpeaker::Terminate && agent_messages >= policy.max_rounds {
        return Err(OrchestratorError::RoundCapExceeded { max_rounds: policy.max_rounds });
    }
    Ok(next)
}

/// Whether `senders` (after the user message) is a complete conversation
/// for `config`: A = `c`, B = `(c r)+`, C = `p (c r)+`, with only the final
/// reviewer message approving.
pub fn accepts_sequence(config: ConfigId, senders: &[&str], approvals: &[bool]) -> bool {
    if senders.len() != approvals.len() || senders.is_empty() {
        return false;
    }
    let body = match config {
        ConfigId::A => return senders == ["coder"],
        ConfigId::B => senders,
        ConfigId::C => match senders.split_first() {
            Some((&"planner", rest)) => rest,
            _ => return false,
        },
    };
    let offset = senders.len() - body.len();
    if body.is_empty() || body.len() % 2 != 0 {
        return false;
    }
    body.chunks(2).enumerate().all(|(i, pair)| {
        let reviewer_idx = offset + 2 * i + 1;
        let is_last = reviewer_idx == senders.len() - 1;
        pair == ["coder", "reviewer"] && approvals[reviewer_idx] == is_last
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminatedBy {
    /// Reviewer approved the program.
    Approval,
    /// Config A: the coder's single answer is final.
    SoloEmit,
    /// Conversation hit the round cap (only seen on failures).
    RoundCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub config: ConfigId,
    pub program_source: String,
    pub transcript: Transcript,
    /// Agent messages in the conversation.
    pub rounds: usize,
    /// Wall seconds from prompt submission to program extraction.
    pub inference_duration: f64,
    pub input_tokens_total: u64,
    pub output_tokens_total: u64,
    pub terminated_by: TerminatedBy,
    pub token_counting: TokenCounting,
}

/// A generation that produced no program. The partial transcript and its
/// costs are kept so failures can still be accounted for.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationFailure {
    pub error: OrchestratorError,
    pub transcript: Transcript,
    pub inference_duration: f64,
}

impl GenerationFailure {
    pub fn terminated_by(&self) -> Option<TerminatedBy> {
        matches!(self.error, OrchestratorError::RoundCapExceeded { .. }).then_some(TerminatedBy::RoundCap)
    }
}

impl fmt::Display for GenerationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for GenerationFailure {}

/// Runs one configuration's conversation to completion under the default cap.
pub fn run_config<B: ChatBackend + ?Sized>(
    config: ConfigId,
    trial_prompt: &str,
    world_digest: &str,
    backend: &B,
    ctx: &CallContext,
) -> Result<GenerationResult, GenerationFailure> {
    run_with_policy(&SpeakerPolicy::with_default_cap(config), trial_prompt, world_digest, backend, ctx)
}

pub fn run_with_policy<B: ChatBackend + ?Sized>(
    policy: &SpeakerPolicy,
    trial_prompt: &str,
    world_digest: &str,
    backend: &B,
    ctx: &CallContext,
) -> Result<GenerationResult, GenerationFailure> {
    let started = Instant::now();
    let mut transcript = Transcript::new(trial_prompt, world_digest);
    let agents: Vec<AgentSpec> = policy.config.roles().into_iter().map(build_agent).collect();
    let fail = |error: OrchestratorError, transcript: Transcript, started: Instant| GenerationFailure {
        error,
        transcript,
        inference_duration: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = SpeakerPolicy::new(policy.config, policy.max_rounds) {
        return Err(fail(e, transcript, started));
    }

    loop {
        let role = match select_next_speaker(policy, &transcript) {
            Ok(NextSpeaker::Agent(role)) => role,
            Ok(NextSpeaker::Terminate) => break,
            Err(e) => return Err(fail(e, transcript, started)),
        };
        let agent = agents.iter().find(|a| a.role == role).expect("policy only selects configured roles");
        match backend.complete(agent, &transcript, ctx) {
            Ok(message) => transcript.push(message),
            Err(e) => return Err(fail(e.into(), transcript, started)),
        }
    }

    let coder_message = transcript
        .messages()
        .iter()
        .rev()
        .find(|m| m.sender == Role::Coder.as_str())
        .expect("every configuration ends after a coder message");
    let program_source = match extract_program(coder_message) {
        Ok(p) => p,
        Err(e) => return Err(fail(e, transcript, started)),
    };
    let inference_duration = started.elapsed().as_secs_f64();
    Ok(GenerationResult {
        config: policy.config,
        program_source,
        rounds: transcript.messages().len() - 1,
        inference_duration,
        input_tokens_total: transcript.input_tokens(),
        output_tokens_total: transcript.output_tokens(),
        terminated_by: match policy.config {
            ConfigId::A => TerminatedBy::SoloEmit,
            _ => TerminatedBy::Approval,
        },
        token_counting: backend.token_counting(),
        transcript,
    })
}
