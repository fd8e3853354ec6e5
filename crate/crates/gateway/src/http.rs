//! Live provider speaking the chat-completions protocol over HTTP.

use async_trait::async_trait;
use serde::Serialize;
use serde_json::{json, Value};
use taskviz_core::dialogue::{Provider, ProviderError, ProviderRequest, ProviderSettings, Speaker};

#[derive(Debug, Clone, PartialEq)]
pub struct HttpConfig {
    pub url: String,
    pub key: Option<String>,
    pub model: String,
    pub temperature: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0} is not set")]
    Missing(&'static str),
    #[error("{name} has an invalid value `{value}`")]
    Invalid { name: &'static str, value: String },
}

impl HttpConfig {
    /// Reads `PROVIDER_URL`, `PROVIDER_KEY`, `PROVIDER_MODEL` and
    /// `PROVIDER_TEMPERATURE` through `lookup`.
    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let url = lookup("PROVIDER_URL").ok_or(ConfigError::Missing("PROVIDER_URL"))?;
        let temperature = match lookup("PROVIDER_TEMPERATURE") {
            None => 0.0,
            Some(v) => match v.trim().parse::<f64>() {
                Ok(t) if t.is_finite() && t >= 0.0 => t,
                _ => {
                    return Err(ConfigError::Invalid {
                        name: "PROVIDER_TEMPERATURE",
                        value: v,
                    })
                }
            },
        };
        Ok(HttpConfig {
            url,
            key: lookup("PROVIDER_KEY").filter(|k| !k.is_empty()),
            model: lookup("PROVIDER_MODEL").unwrap_or_default(),
            temperature,
        })
    }

    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|name| std::env::var(name).ok())
    }

    pub fn settings(&self) -> ProviderSettings {
        ProviderSettings {
            model: self.model.clone(),
            temperature: self.temperature,
            timeout: Some(std::time::Duration::from_secs(30)),
            ..ProviderSettings::default()
        }
    }
}

#[derive(Serialize)]
struct ChatMessage {
    role: &'static str,
    content: String,
}

#[derive(Debug, Clone)]
pub struct HttpProvider {
    client: reqwest::Client,
    config: HttpConfig,
}

impl HttpProvider {
    pub fn new(config: HttpConfig) -> Self {
        HttpProvider {
            client: reqwest::Client::new(),
            config,
        }
    }

    /// The request body for one turn.
    pub fn body(&self, request: &ProviderRequest) -> Value {
        let mut messages = vec![ChatMessage {
            role: "system",
            content: request.system_context.clone(),
        }];
        // The latest utterance is sent last, with the session context.
        let earlier = request.history.len().saturating_sub(1);
        for entry in &request.history[..earlier] {
            messages.push(ChatMessage {
                role: match entry.speaker {
                    Speaker::User => "user",
                    Speaker::Robot => "assistant",
                },
                content: entry.text.clone(),
            });
        }
        let context = json!({
            "utterance": request.utterance,
            "intentHint": request.intent,
            "phase": request.phase,
            "taskSteps": request.task_steps,
            "wakeWord": request.wake_word,
            "lastDrawScript": request.last_draw_script,
        });
        messages.push(ChatMessage {
            role: "user",
            content: context.to_string(),
        });
        json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": messages,
        })
    }
}

#[async_trait]
impl Provider for HttpProvider {
    async fn request(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        let transport = |e: reqwest::Error| ProviderError::Transport(e.to_string());
        let mut call = self.client.post(&self.config.url).json(&self.body(request));
        if let Some(key) = &self.config.key {
            call = call.bearer_auth(key);
        }
        let response = call.send().await.map_err(transport)?;
        let status = response.status();
        if !status.is_success() {
            return Err(ProviderError::Transport(format!("HTTP {status}")));
        }
        let body: Value = response.json().await.map_err(transport)?;
        body.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ProviderError::Transport("response has no message content".into()))
    }
}
