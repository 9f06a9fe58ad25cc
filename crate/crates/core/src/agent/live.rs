//! Chat-completions HTTP backend.

use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{AgentSpec, BackendError, CallContext, ChatBackend, Message, TokenCounting, Transcript, USER};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    /// Delay before the first retry; doubles after each failure.
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, initial_backoff: Duration::from_secs(1) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpBackendConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_timeout() -> u64 {
    120
}

pub struct HttpBackend {
    config: HttpBackendConfig,
    retry: RetryPolicy,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

enum CallError {
    Retryable(String),
    Fatal(BackendError),
}

impl HttpBackend {
    pub fn new(config: HttpBackendConfig, retry: RetryPolicy) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(config.timeout_secs)).build();
        HttpBackend { config, retry, agent }
    }

    /// Request body: the agent's system prompt, then the conversation. The
    /// agent's own turns are `assistant`; everyone else's are `user`, prefixed
    /// with the speaker's name.
    pub fn request_body(&self, agent: &AgentSpec, transcript: &Transcript) -> serde_json::Value {
        let mut messages = vec![json!({ "role": "system", "content": agent.system_prompt })];
        for m in transcript.messages() {
            if m.sender == agent.name {
                messages.push(json!({ "role": "assistant", "content": m.content }));
            } else if m.sender == USER {
                messages.push(json!({ "role": "user", "content": m.content }));
            } else {
                messages.push(json!({ "role": "user", "content": format!("[{}]: {}", m.sender, m.content) }));
            }
        }
        let mut body = json!({ "model": self.config.model, "messages": messages });
        if let Some(t) = self.config.temperature {
            body["temperature"] = json!(t);
        }
        body
    }

    fn call_once(&self, body: &serde_json::Value) -> Result<ChatResponse, CallError> {
        let mut req = self.agent.post(&self.config.endpoint).set("Content-Type", "application/json");
        if let Some(key) = &self.config.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        match req.send_json(body) {
            Ok(resp) => {
                resp.into_json::<ChatResponse>().map_err(|e| CallError::Fatal(BackendError::BadResponse(e.to_string())))
            }
            Err(ureq::Error::Status(code, resp)) if code == 429 || code >= 500 => {
                Err(CallError::Retryable(format!("HTTP {code}: {}", resp.status_text())))
            }
            Err(ureq::Error::Status(code, resp)) => Err(CallError::Fatal(BackendError::BadResponse(format!(
                "HTTP {code}: {}",
                resp.into_string().unwrap_or_default()
            )))),
            Err(ureq::Error::Transport(t)) => Err(CallError::Retryable(t.to_string())),
        }
    }
}

impl ChatBackend for HttpBackend {
    fn complete(
        &self,
        agent: &AgentSpec,
        transcript: &Transcript,
        _ctx: &CallContext,
    ) -> Result<Message, BackendError> {
        let body = self.request_body(agent, transcript);
        let started = Instant::now();
        let mut backoff = self.retry.initial_backoff;
        let mut last_error = String::from("no attempt made");
        for attempt in 1..=self.retry.attempts.max(1) {
            match self.call_once(&body) {
                Ok(resp) => {
                    let content = resp
                        .choices
                        .into_iter()
                        .next()
                        .and_then(|c| c.message.content)
                        .ok_or_else(|| BackendError::BadResponse("no choices[0].message.content".into()))?;
                    let usage = resp
                        .usage
                        .ok_or_else(|| BackendError::BadResponse("response carries no usage report".into()))?;
                    return Ok(Message {
                        sender: agent.name.clone(),
                        content,
                        input_tokens: usage.prompt_tokens,
                        output_tokens: usage.completion_tokens,
                        latency: started.elapsed().as_secs_f64(),
                    });
                }
                Err(CallError::Fatal(e)) => return Err(e),
                Err(CallError::Retryable(msg)) => {
                    last_error = msg;
                    if attempt < self.retry.attempts {
                        thread::sleep(backoff);
                        backoff *= 2;
                    }
                }
            }
        }
        Err(BackendError::Unreachable { attempts: self.retry.attempts.max(1), last_error })
    }

    fn token_counting(&self) -> TokenCounting {
        TokenCounting::Reported
    }
}
