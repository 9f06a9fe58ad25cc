//! Agents, messages, token accounting and chat-completion backends.
//!
//! A backend answers one agent turn given the conversation so far. Two are
//! provided: [`ScriptedBackend`] replays a keyed script deterministically and
//! [`HttpBackend`] talks to any chat-completions endpoint.

mod live;
mod mock;
mod prompts;

pub use live::{HttpBackend, HttpBackendConfig, RetryPolicy};
pub use mock::{BackendScript, FailureInjection, ScriptEntry, ScriptedBackend, BROKEN_PROGRAM};
pub use prompts::{build_agent, TEAM_PREAMBLE};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::orchestrator::ConfigId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Coder,
    Reviewer,
    Planner,
    Manager,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Coder => "coder",
            Role::Reviewer => "reviewer",
            Role::Planner => "planner",
            Role::Manager => "manager",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub name: String,
    pub role: Role,
    pub system_prompt: String,
}

/// Sender name used for the human request that opens every transcript.
pub const USER: &str = "user";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: String,
    pub content: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    /// Wall-clock seconds the backend took to answer.
    pub latency: f64,
}

/// Append-only conversation log. The first message is always the user's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    prompt: String,
    messages: Vec<Message>,
}

impl Transcript {
    /// Opens a conversation with the user's request. `context` (for example
    /// a scene digest) is appended to the first message when non-empty.
    pub fn new(prompt: &str, context: &str) -> Self {
        let content = if context.trim().is_empty() { prompt.to_owned() } else { format!("{prompt}\n\n{context}") };
        Transcript {
            prompt: prompt.to_owned(),
            messages: vec![Message { sender: USER.into(), content, input_tokens: 0, output_tokens: 0, latency: 0.0 }],
        }
    }

    pub fn prompt(&self) -> &str {
        &self.prompt
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn last(&self) -> &Message {
        self.messages.last().expect("transcript is never empty")
    }

    pub fn push(&mut self, message: Message) {
        self.messages.push(message);
    }

    /// Messages sent by `sender` so far.
    pub fn count_from(&self, sender: &str) -> usize {
        self.messages.iter().filter(|m| m.sender == sender).count()
    }

    /// Senders after the opening user message, in order.
    pub fn sender_sequence(&self) -> Vec<&str> {
        self.messages[1..].iter().map(|m| m.sender.as_str()).collect()
    }

    pub fn input_tokens(&self) -> u64 {
        self.messages.iter().map(|m| m.input_tokens).sum()
    }

    pub fn output_tokens(&self) -> u64 {
        self.messages.iter().map(|m| m.output_tokens).sum()
    }

    /// Plain-text rendering used both for prompting and token estimates.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&m.sender);
            out.push_str(": ");
            out.push_str(&m.content);
            out.push('\n');
        }
        out
    }
}

/// Approximate token count, `ceil(bytes / 4)`. Only used when a backend does
/// not report usage itself.
pub fn count_tokens(text: &str) -> u64 {
    (text.len() as u64).div_ceil(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenCounting {
    /// `ceil(bytes / 4)` estimates.
    Approximate,
    /// Usage reported by the endpoint.
    Reported,
}

impl fmt::Display for TokenCounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenCounting::Approximate => "approximate",
            TokenCounting::Reported => "reported",
        })
    }
}

/// Which matrix cell a completion belongs to. Scripted backends key on it;
/// live backends ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CallContext {
    pub config: ConfigId,
    pub trial: u8,
    pub repetition: u8,
    pub attempt: u32,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("backend unreachable after {attempts} attempt(s): {last_error}")]
    Unreachable { attempts: u32, last_error: String },
    #[error("backend returned an unusable response: {0}")]
    BadResponse(String),
    #[error("script has no response for ({role}, trial {trial}, round {round}, repetition {repetition})")]
    ScriptMiss { role: Role, trial: u8, round: usize, repetition: u8 },
    #[error("invalid script: {0}")]
    InvalidScript(String),
}

pub trait ChatBackend: Send + Sync {
    /// The agent's next message given the conversation so far.
    fn complete(&self, agent: &AgentSpec, transcript: &Transcript, ctx: &CallContext) -> Result<Message, BackendError>;

    fn token_counting(&self) -> TokenCounting;
}

impl<B: ChatBackend + ?Sized> ChatBackend for &B {
    fn complete(&self, agent: &AgentSpec, transcript: &Transcript, ctx: &CallContext) -> Result<Message, BackendError> {
        (**self).complete(agent, transcript, ctx)
    }

    fn token_counting(&self) -> TokenCounting {
        (**self).token_counting()
    }
}

impl<B: ChatBackend + ?Sized> ChatBackend for Box<B> {
    fn complete(&self, agent: &AgentSpec, transcript: &Transcript, ctx: &CallContext) -> Result<Message, BackendError> {
        (**self).complete(agent, transcript, ctx)
    }

    fn token_counting(&self) -> TokenCounting {
        (**self).token_counting()
    }
}
