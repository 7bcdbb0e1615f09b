//! LLM backends: a live chat-completion HTTP client and a deterministic
//! replay backend that serves previously cached completions.
//!
//! Dispatch is cache-first in both modes, so a fully seeded cache never
//! touches the network.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::cache::{CacheRecord, ResponseCache};
use crate::prompting::{BackendFingerprint, PromptArtifact};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    HttpChat,
    Replay,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::HttpChat => "http_chat",
            BackendKind::Replay => "replay",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// chat-completion endpoint URL (http_chat only)
    pub endpoint: Option<String>,
    pub model_id: String,
    pub temperature: f64,
    pub max_retries: u32,
    pub timeout: Duration,
    /// name of the environment variable holding the API credential
    pub credential_env: Option<String>,
    /// wire-protocol family label; part of the prompt hash
    pub backend_id: String,
    /// bound on concurrent dispatches
    pub in_flight: usize,
}

impl BackendConfig {
    pub fn replay(model_id: &str, temperature: f64) -> Self {
        BackendConfig {
            kind: BackendKind::Replay,
            endpoint: None,
            model_id: model_id.to_string(),
            temperature,
            max_retries: 0,
            timeout: Duration::from_secs(60),
            credential_env: None,
            backend_id: "openai_chat".to_string(),
            in_flight: 4,
        }
    }

    pub fn fingerprint(&self) -> BackendFingerprint {
        BackendFingerprint {
            backend_id: self.backend_id.clone(),
            model_id: self.model_id.clone(),
            temperature: self.temperature,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(Error::BadBackendConfig(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if self.kind == BackendKind::HttpChat {
            if self.endpoint.is_none() {
                return Err(Error::BadBackendConfig(
                    "http backend requires an endpoint".into(),
                ));
            }
            let var = self.credential_env.as_deref().ok_or_else(|| {
                Error::BadBackendConfig("http backend requires a credential env var name".into())
            })?;
            if std::env::var(var).is_err() {
                return Err(Error::BadBackendConfig(format!(
                    "credential environment variable {var} is not set"
                )));
            }
        }
        Ok(())
    }
}

/// A completion as returned by a backend, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawResponse {
    pub prompt_hash: String,
    pub text: String,
    pub retrieved_at: String,
    pub backend: String,
}

impl From<CacheRecord> for RawResponse {
    fn from(r: CacheRecord) -> Self {
        RawResponse {
            prompt_hash: r.prompt_hash,
            text: r.completion,
            retrieved_at: r.retrieved_at,
            backend: r.model_id,
        }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f64,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

/// Current time in RFC 3339, honoring SOURCE_DATE_EPOCH for reproducible
/// artifacts.
pub fn timestamp_now() -> String {
    let dt = match std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
    {
        Some(t) => t,
        None => chrono::Utc::now(),
    };
    dt.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Resolve a prompt to a completion: cache hit, or (http_chat only) a live
/// chat-completion request persisted into the cache before returning.
/// Transient transport failures retry with exponential backoff up to
/// `max_retries`.
pub fn dispatch(
    artifact: &PromptArtifact,
    config: &BackendConfig,
    cache: &ResponseCache,
) -> Result<RawResponse> {
    if let Some(record) = cache.get(&artifact.content_hash) {
        return Ok(record.into());
    }
    match config.kind {
        BackendKind::Replay => Err(Error::CacheMiss(artifact.content_hash.clone())),
        BackendKind::HttpChat => {
            let text = http_completion(config, &artifact.text)?;
            if text.trim().is_empty() {
                return Err(Error::EmptyCompletion);
            }
            let record = CacheRecord {
                prompt_hash: artifact.content_hash.clone(),
                model_id: config.model_id.clone(),
                temperature: config.temperature,
                completion: text,
                retrieved_at: timestamp_now(),
            };
            cache.put(record.clone())?;
            Ok(record.into())
        }
    }
}

fn http_completion(config: &BackendConfig, prompt: &str) -> Result<String> {
    config.validate()?;
    let endpoint = config.endpoint.as_deref().expect("validated");
    let credential = std::env::var(config.credential_env.as_deref().expect("validated"))
        .expect("validated");
    let client = reqwest::blocking::Client::builder()
        .timeout(config.timeout)
        .build()
        .map_err(|e| Error::Transport {
            attempts: 0,
            message: e.to_string(),
        })?;

    let body = ChatRequest {
        model: &config.model_id,
        temperature: config.temperature,
        messages: vec![ChatMessage {
            role: "user",
            content: prompt,
        }],
    };

    let mut last_error = String::new();
    for attempt in 0..=config.max_retries {
        if attempt > 0 {
            std::thread::sleep(Duration::from_millis(100 << (attempt - 1).min(6)));
        }
        let sent = client
            .post(endpoint)
            .bearer_auth(&credential)
            .json(&body)
            .send();
        match sent {
            Err(e) => {
                last_error = e.to_string();
                continue; // connect/timeout: transient
            }
            Ok(resp) => {
                let status = resp.status();
                if status.is_server_error() {
                    last_error = format!("status {status}");
                    continue; // 5xx: transient
                }
                if !status.is_success() {
                    let message = resp.text().unwrap_or_default();
                    return Err(Error::Protocol {
                        status: status.as_u16(),
                        message,
                    });
                }
                let parsed: ChatResponse = resp.json().map_err(|e| Error::Protocol {
                    status: status.as_u16(),
                    message: format!("malformed completion body: {e}"),
                })?;
                let first = parsed.choices.into_iter().next().ok_or(Error::EmptyCompletion)?;
                return Ok(first.message.content);
            }
        }
    }
    Err(Error::Transport {
        attempts: config.max_retries + 1,
        message: last_error,
    })
}
