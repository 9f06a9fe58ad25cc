//! Deterministic scripted backend.
//!
//! Responses are keyed by `(role, trial, round)` where `round` counts the
//! messages the same agent already sent in the conversation. An entry may be
//! pinned to one repetition; unpinned entries (and entries without a trial)
//! act as fallbacks.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{count_tokens, AgentSpec, BackendError, CallContext, ChatBackend, Message, Role, TokenCounting};
use crate::orchestrator::ConfigId;

/// Program body substituted by a failure injection; it does not parse.
pub const BROKEN_PROGRAM: &str = "walk_to(position(nearest(\"chair\"))";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptEntry {
    pub role: Role,
    /// `None` matches any trial.
    #[serde(default)]
    pub trial: Option<u8>,
    #[serde(default)]
    pub round: usize,
    /// `None` matches any repetition.
    #[serde(default)]
    pub repetition: Option<u8>,
    #[serde(default)]
    pub text: Option<String>,
    /// Prose placed before the fenced program when `program_file` is used.
    #[serde(default)]
    pub prose: Option<String>,
    /// Program file, relative to the script file.
    #[serde(default)]
    pub program_file: Option<String>,
}

/// Forces the coder's output in matching cells to contain a broken program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureInjection {
    #[serde(default)]
    pub config: Option<ConfigId>,
    #[serde(default)]
    pub trial: Option<u8>,
    #[serde(default)]
    pub repetition: Option<u8>,
    pub attempt: u32,
}

impl FailureInjection {
    fn matches(&self, ctx: &CallContext) -> bool {
        self.attempt == ctx.attempt
            && self.config.is_none_or(|c| c == ctx.config)
            && self.trial.is_none_or(|t| t == ctx.trial)
            && self.repetition.is_none_or(|r| r == ctx.repetition)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptFile {
    #[serde(default, rename = "response")]
    responses: Vec<ScriptEntry>,
    #[serde(default, rename = "inject_failure")]
    injections: Vec<FailureInjection>,
}

type Key = (Role, Option<u8>, usize, Option<u8>);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BackendScript {
    responses: BTreeMap<Key, String>,
    injections: Vec<FailureInjection>,
}

/// Wraps a program in the fence convention agents use.
pub fn fenced(program: &str) -> String {
    let body = program.trim_end_matches('\n');
    format!("```robo\n{body}\n```")
}

impl BackendScript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a response for `(role, trial, round)` matching every repetition.
    pub fn with_response(mut self, role: Role, trial: Option<u8>, round: usize, text: impl Into<String>) -> Self {
        self.responses.insert((role, trial, round, None), text.into());
        self
    }

    pub fn with_repetition_response(
        mut self,
        role: Role,
        trial: u8,
        round: usize,
        repetition: u8,
        text: impl Into<String>,
    ) -> Self {
        self.responses.insert((role, Some(trial), round, Some(repetition)), text.into());
        self
    }

    pub fn with_injection(mut self, injection: FailureInjection) -> Self {
        self.injections.push(injection);
        self
    }

    pub fn injections(&self) -> &[FailureInjection] {
        &self.injections
    }

    /// Parses a TOML script; `base_dir` resolves `program_file` entries.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, BackendError> {
        let file: ScriptFile = toml::from_str(text).map_err(|e| BackendError::InvalidScript(e.to_string()))?;
        let mut script = BackendScript { injections: file.injections, ..Default::default() };
        for entry in file.responses {
            let text = match (&entry.text, &entry.program_file) {
                (Some(t), None) => t.clone(),
                (None, Some(file)) => {
                    let path = base_dir.join(file);
                    let program = fs::read_to_string(&path)
                        .map_err(|e| BackendError::InvalidScript(format!("{}: {e}", path.display())))?;
                    match &entry.prose {
                        Some(p) => format!("{}\n\n{}", p.trim_end(), fenced(&program)),
                        None => fenced(&program),
                    }
                }
                _ => {
                    return Err(BackendError::InvalidScript(format!(
                        "entry ({}, {:?}, round {}) needs exactly one of `text` or `program_file`",
                        entry.role, entry.trial, entry.round
                    )))
                }
            };
            let key = (entry.role, entry.trial, entry.round, entry.repetition);
            if script.responses.insert(key, text).is_some() {
                return Err(BackendError::InvalidScript(format!(
                    "duplicate entry ({}, {:?}, round {}, repetition {:?})",
                    entry.role, entry.trial, entry.round, entry.repetition
                )));
            }
        }
        Ok(script)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| BackendError::InvalidScript(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn lookup(&self, role: Role, trial: u8, round: usize, repetition: u8) -> Option<&str> {
        [(Some(trial), Some(repetition)), (Some(trial), None), (None, Some(repetition)), (None, None)]
            .into_iter()
            .find_map(|(t, r)| self.responses.get(&(role, t, round, r)))
            .map(String::as_str)
    }

    /// Checks that every opening turn the matrix can reach has a response.
    pub fn check_coverage(&self, configs: &[ConfigId], trials: &[u8], repetitions: u8) -> Result<(), BackendError> {
        for &config in configs {
            for role in config.roles() {
                for &trial in trials {
                    for rep in 1..=repetitions {
                        if self.lookup(role, trial, 0, rep).is_none() {
                            return Err(BackendError::ScriptMiss { role, trial, round: 0, repetition: rep });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Replays a [`BackendScript`]. Token counts are `ceil(bytes / 4)` estimates
/// and reported latency is zero, so transcripts are byte-identical across runs.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    script: BackendScript,
}

impl ScriptedBackend {
    pub fn new(script: BackendScript) -> Self {
        ScriptedBackend { script }
    }

    pub fn script(&self) -> &BackendScript {
        &self.script
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(
        &self,
        agent: &AgentSpec,
        transcript: &super::Transcript,
        ctx: &CallContext,
    ) -> Result<Message, BackendError> {
        let round = transcript.count_from(&agent.name);
        let text =
            self.script.lookup(agent.role, ctx.trial, round, ctx.repetition).ok_or(BackendError::ScriptMiss {
                role: agent.role,
                trial: ctx.trial,
                round,
                repetition: ctx.repetition,
            })?;
        let mut content = text.to_owned();
        if agent.role == Role::Coder && self.script.injections.iter().any(|i| i.matches(ctx)) {
            content.push_str("\n\n");
            content.push_str(&fenced(BROKEN_PROGRAM));
        }
        let mut prompt = agent.system_prompt.clone();
        prompt.push_str(&transcript.serialize());
        Ok(Message {
            sender: agent.name.clone(),
            input_tokens: count_tokens(&prompt),
            output_tokens: count_tokens(&content),
            content,
            latency: 0.0,
        })
    }

    fn token_counting(&self) -> TokenCounting {
        TokenCounting::Approximate
    }
}
