//! Uniform access to a chat language model: a live HTTP backend and a
//! deterministic cassette-replay backend for tests, behind one trait.
//!
//! Sampling defaults are pinned to deterministic decoding (temperature 0,
//! nucleus mass 1).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod cassette;
mod live;

pub use cassette::{fingerprint, Cassette, CassetteBackend, CassetteMode};
pub use live::HttpBackend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Message {
        Message {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Message {
        Message {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

/// One chat completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<Message>,
    #[serde(default)]
    pub stop: Vec<String>,
    pub temperature: f64,
    pub top_p: f64,
}

impl ChatRequest {
    /// Deterministic decoding defaults: temperature 0, top_p 1.
    pub fn new(model: impl Into<String>, messages: Vec<Message>) -> ChatRequest {
        ChatRequest {
            model: model.into(),
            messages,
            stop: Vec::new(),
            temperature: 0.0,
            top_p: 1.0,
        }
    }

    pub fn with_stop(mut self, stop: Vec<String>) -> ChatRequest {
        self.stop = stop;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("transport failure: {message}")]
    Transport { message: String, retriable: bool },
    #[error("backend returned HTTP {status}: {message}")]
    Http {
        status: u16,
        message: String,
        retriable: bool,
    },
    #[error("no scripted response for request fingerprint {fingerprint}")]
    UnscriptedRequest { fingerprint: String },
    #[error("malformed cassette: {0}")]
    Schema(String),
    #[error("gateway not configured: {0}")]
    Unconfigured(String),
}

impl GatewayError {
    pub fn retriable(&self) -> bool {
        match self {
            GatewayError::Transport { retriable, .. } | GatewayError::Http { retriable, .. } => {
                *retriable
            }
            _ => false,
        }
    }
}

/// A chat completion backend; implementations must be shareable across
/// threads.
pub trait ChatBackend: Send + Sync {
    fn complete_once(&self, request: &ChatRequest) -> Result<String, GatewayError>;

    fn name(&self) -> &'static str;
}

/// Shared gateway: bounded retry with exponential backoff, a global
/// in-flight concurrency limit, and stop-sequence enforcement.
pub struct Gateway {
    backend: Box<dyn ChatBackend>,
    max_attempts: u32,
    backoff: Duration,
    limiter: Semaphore,
    calls: AtomicUsize,
}

impl Gateway {
    pub fn new(backend: Box<dyn ChatBackend>) -> Gateway {
        Gateway {
            backend,
            max_attempts: 3,
            backoff: Duration::from_millis(100),
            limiter: Semaphore::new(4),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn with_concurrency(mut self, limit: usize) -> Gateway {
        self.limiter = Semaphore::new(limit.max(1));
        self
    }

    /// Number of raw completion calls made so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    /// Complete a request, retrying transport-class failures up to three
    /// attempts. Content-level refusals are returned as text; reacting to
    /// them is the caller's business.
    pub fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let _permit = self.limiter.acquire();
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.backend.complete_once(request) {
                Ok(text) => return Ok(truncate_at_stop(&text, &request.stop)),
                Err(e) if e.retriable() && attempt < self.max_attempts => {
                    std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// Generation pauses at the first stop sequence; the stop itself is not
/// part of the returned text. Live backends already enforce this server
/// side, so re-applying it here is idempotent.
fn truncate_at_stop(text: &str, stops: &[String]) -> String {
    let mut cut = text.len();
    for stop in stops {
        if stop.is_empty() {
            continue;
        }
        if let Some(pos) = text.find(stop.as_str()) {
            cut = cut.min(pos);
        }
    }
    text[..cut].to_string()
}

struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(permits: usize) -> Semaphore {
        Semaphore {
            permits: Mutex::new(permits),
            available: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut permits = self.permits.lock().expect("semaphore poisoned");
        while *permits == 0 {
            permits = self.available.wait(permits).expect("semaphore poisoned");
        }
        *permits -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut permits = self.0.permits.lock().expect("semaphore poisoned");
        *permits += 1;
        self.0.available.notify_one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicU32;

    struct FlakyBackend {
        failures_before_success: AtomicU32,
    }

    impl ChatBackend for FlakyBackend {
        fn complete_once(&self, _request: &ChatRequest) -> Result<String, GatewayError> {
            if self.failures_before_success.fetch_sub(1, Ordering::SeqCst) > 0 {
                Err(GatewayError::Transport {
                    message: "connection reset".into(),
                    retriable: true,
                })
            } else {
                Ok("recovered".into())
            }
        }

        fn name(&self) -> &'static str {
            "flaky"
        }
    }

    #[test]
    fn retries_retriable_failures() {
        let gateway = Gateway {
            backend: Box::new(FlakyBackend {
                failures_before_success: AtomicU32::new(2),
            }),
            max_attempts: 3,
            backoff: Duration::from_millis(0),
            limiter: Semaphore::new(1),
            calls: AtomicUsize::new(0),
        };
        let req = ChatRequest::new("test", vec![Message::user("hi")]);
        assert_eq!(gateway.complete(&req).unwrap(), "recovered");
        assert_eq!(gateway.calls(), 1);
    }

    #[test]
    fn gives_up_after_bounded_attempts() {
        let gateway = Gateway {
            backend: Box::new(FlakyBackend {
                failures_before_success: AtomicU32::new(10),
            }),
            max_attempts: 3,
            backoff: Duration::from_millis(0),
            limiter: Semaphore::new(1),
            calls: AtomicUsize::new(0),
        };
        let req = ChatRequest::new("test", vec![Message::user("hi")]);
        assert!(gateway.complete(&req).is_err());
    }

    #[test]
    fn stop_sequences_truncate() {
        assert_eq!(
            truncate_at_stop("Action: f(x)\nOutput: 3", &["Output:".into()]),
            "Action: f(x)\n"
        );
        assert_eq!(truncate_at_stop("plain", &["Output:".into()]), "plain");
    }

    #[test]
    fn request_defaults_are_deterministic() {
        let req = ChatRequest::new("m", vec![Message::user("q")]);
        assert_eq!(req.temperature, 0.0);
        assert_eq!(req.top_p, 1.0);
    }
}
