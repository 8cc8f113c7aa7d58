//! Live chat backend over an OpenAI-style `/chat/completions` endpoint.
//!
//! Configuration comes from the environment:
//! - `DELI_API_BASE`: endpoint base URL (e.g. `https://api.openai.com/v1`)
//! - `DELI_API_KEY`: bearer token
//! - `DELI_MODEL`: default model identifier (used by the CLI)

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{ChatBackend, ChatRequest, GatewayError};

pub const API_BASE_VAR: &str = "DELI_API_BASE";
pub const API_KEY_VAR: &str = "DELI_API_KEY";
pub const MODEL_VAR: &str = "DELI_MODEL";

pub struct HttpBackend {
    endpoint: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct ChatCompletion {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

impl HttpBackend {
    pub fn from_env() -> Result<HttpBackend, GatewayError> {
        let base = std::env::var(API_BASE_VAR)
            .map_err(|_| GatewayError::Unconfigured(format!("{API_BASE_VAR} is not set")))?;
        let api_key = std::env::var(API_KEY_VAR)
            .map_err(|_| GatewayError::Unconfigured(format!("{API_KEY_VAR} is not set")))?;
        HttpBackend::new(&base, &api_key, Duration::from_secs(120))
    }

    pub fn new(base: &str, api_key: &str, deadline: Duration) -> Result<HttpBackend, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(deadline)
            .build()
            .map_err(|e| GatewayError::Transport {
                message: format!("failed to build HTTP client: {e}"),
                retriable: false,
            })?;
        Ok(HttpBackend {
            endpoint: format!("{}/chat/completions", base.trim_end_matches('/')),
            api_key: api_key.to_string(),
            client,
        })
    }
}

impl ChatBackend for HttpBackend {
    fn complete_once(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let mut body = json!({
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "top_p": request.top_p,
        });
        if !request.stop.is_empty() {
            body["stop"] = json!(request.stop);
        }
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| GatewayError::Transport {
                message: e.to_string(),
                retriable: true,
            })?;
        let status = response.status();
        if !status.is_success() {
            let message = response.text().unwrap_or_default();
            return Err(GatewayError::Http {
                status: status.as_u16(),
                message: message.chars().take(500).collect(),
                retriable: status.is_server_error() || status.as_u16() == 429,
            });
        }
        let completion: ChatCompletion =
            response.json().map_err(|e| GatewayError::Transport {
                message: format!("invalid completion payload: {e}"),
                retriable: false,
            })?;
        completion
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| GatewayError::Transport {
                message: "completion had no choices".into(),
                retriable: false,
            })
    }

    fn name(&self) -> &'static str {
        "http"
    }
}
