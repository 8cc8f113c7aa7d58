//! Recorded request/response exchanges for deterministic, network-free
//! replay. Cassette files are newline-delimited JSON records in append
//! order; lookups go through a whitespace-normalized request fingerprint.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ChatBackend, ChatRequest, GatewayError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CassetteMode {
    /// Serve recorded responses only; never touches the network.
    Replay,
    /// Forward to the inner backend and record each exchange.
    Record,
    /// Forward without recording.
    Passthrough,
}

#[derive(Debug, Serialize, Deserialize)]
struct CassetteRecord {
    fingerprint: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    preview: String,
    response: String,
}

/// Ordered fingerprint -> response map.
#[derive(Debug, Default)]
pub struct Cassette {
    order: Vec<String>,
    entries: HashMap<String, String>,
    previews: HashMap<String, String>,
}

impl Cassette {
    pub fn new() -> Cassette {
        Cassette::default()
    }

    pub fn load(path: &Path) -> Result<Cassette, GatewayError> {
        let file = std::fs::File::open(path).map_err(|e| {
            GatewayError::Schema(format!("cannot open cassette {}: {e}", path.display()))
        })?;
        let mut cassette = Cassette::new();
        for (index, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line
                .map_err(|e| GatewayError::Schema(format!("read error at line {index}: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: CassetteRecord = serde_json::from_str(&line).map_err(|e| {
                GatewayError::Schema(format!("invalid record at line {}: {e}", index + 1))
            })?;
            cassette.insert(record.fingerprint, record.preview, record.response);
        }
        Ok(cassette)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        for fingerprint in &self.order {
            let record = CassetteRecord {
                fingerprint: fingerprint.clone(),
                preview: self.previews.get(fingerprint).cloned().unwrap_or_default(),
                response: self.entries[fingerprint].clone(),
            };
            serde_json::to_writer(&mut file, &record)?;
            file.write_all(b"\n")?;
        }
        file.flush()
    }

    /// Record one exchange. Duplicate fingerprints keep the latest
    /// response (with a logged warning) but their original position.
    pub fn record_exchange(&mut self, request: &ChatRequest, response: &str) {
        let fp = fingerprint(request);
        let preview = request
            .messages
            .last()
            .map(|m| normalize_ws(&m.content).chars().take(120).collect())
            .unwrap_or_default();
        self.insert(fp, preview, response.to_string());
    }

    fn insert(&mut self, fingerprint: String, preview: String, response: String) {
        if self.entries.insert(fingerprint.clone(), response).is_some() {
            log::warn!("duplicate cassette fingerprint {fingerprint}; keeping the latest response");
        } else {
            self.order.push(fingerprint.clone());
        }
        if !preview.is_empty() {
            self.previews.insert(fingerprint, preview);
        }
    }

    pub fn lookup(&self, fingerprint: &str) -> Option<&str> {
        self.entries.get(fingerprint).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Stable request fingerprint: model id, whitespace-normalized message
/// contents, and stop sequences. Sampling parameters are deliberately
/// excluded; they are constants of the method.
pub fn fingerprint(request: &ChatRequest) -> String {
    let mut hasher = Sha256::new();
    hasher.update(request.model.as_bytes());
    hasher.update([0x1f]);
    for message in &request.messages {
        hasher.update(message.role.as_str().as_bytes());
        hasher.update([0x1e]);
        hasher.update(normalize_ws(&message.content).as_bytes());
        hasher.update([0x1d]);
    }
    for stop in &request.stop {
        hasher.update(stop.as_bytes());
        hasher.update([0x1c]);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Backend over a cassette; replay is pure lookup, record/passthrough
/// forward to an inner backend.
pub struct CassetteBackend {
    cassette: Mutex<Cassette>,
    mode: CassetteMode,
    inner: Option<Box<dyn ChatBackend>>,
}

impl CassetteBackend {
    pub fn replay(cassette: Cassette) -> CassetteBackend {
        CassetteBackend {
            cassette: Mutex::new(cassette),
            mode: CassetteMode::Replay,
            inner: None,
        }
    }

    pub fn record(cassette: Cassette, inner: Box<dyn ChatBackend>) -> CassetteBackend {
        CassetteBackend {
            cassette: Mutex::new(cassette),
            mode: CassetteMode::Record,
            inner: Some(inner),
        }
    }

    pub fn passthrough(inner: Box<dyn ChatBackend>) -> CassetteBackend {
        CassetteBackend {
            cassette: Mutex::new(Cassette::new()),
            mode: CassetteMode::Passthrough,
            inner: Some(inner),
        }
    }

    pub fn mode(&self) -> CassetteMode {
        self.mode
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        self.cassette.lock().expect("cassette poisoned").save(path)
    }

    fn forward(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let inner = self.inner.as_ref().ok_or_else(|| {
            GatewayError::Unconfigured("record/passthrough mode needs an inner backend".into())
        })?;
        inner.complete_once(request)
    }
}

impl ChatBackend for CassetteBackend {
    fn complete_once(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        match self.mode {
            CassetteMode::Replay => {
                let fp = fingerprint(request);
                let cassette = self.cassette.lock().expect("cassette poisoned");
                cassette
                    .lookup(&fp)
                    .map(str::to_string)
                    .ok_or(GatewayError::UnscriptedRequest { fingerprint: fp })
            }
            CassetteMode::Record => {
                let response = self.forward(request)?;
                let mut cassette = self.cassette.lock().expect("cassette poisoned");
                cassette.record_exchange(request, &response);
                Ok(response)
            }
            CassetteMode::Passthrough => self.forward(request),
        }
    }

    fn name(&self) -> &'static str {
        match self.mode {
            CassetteMode::Replay => "cassette-replay",
            CassetteMode::Record => "cassette-record",
            CassetteMode::Passthrough => "cassette-passthrough",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Message;
    use super::*;

    fn req(content: &str) -> ChatRequest {
        ChatRequest::new("test-model", vec![Message::user(content)])
    }

    #[test]
    fn replay_hits_and_misses() {
        let mut cassette = Cassette::new();
        cassette.record_exchange(&req("solve it"), "the answer");
        let backend = CassetteBackend::replay(cassette);
        assert_eq!(backend.complete_once(&req("solve it")).unwrap(), "the answer");
        // Whitespace-normalized: same fingerprint.
        assert_eq!(
            backend.complete_once(&req("  solve \n it ")).unwrap(),
            "the answer"
        );
        let miss = backend.complete_once(&req("other")).unwrap_err();
        assert!(matches!(miss, GatewayError::UnscriptedRequest { .. }));
    }

    #[test]
    fn roundtrip_preserves_order_and_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cassette.jsonl");
        let mut cassette = Cassette::new();
        cassette.record_exchange(&req("one"), "1");
        cassette.record_exchange(&req("two"), "2");
        cassette.save(&path).unwrap();
        let loaded = Cassette::load(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded.lookup(&fingerprint(&req("one"))), Some("1"));
        assert_eq!(loaded.lookup(&fingerprint(&req("two"))), Some("2"));
        // Byte-identical second save.
        let path2 = dir.path().join("again.jsonl");
        loaded.save(&path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn empty_cassette_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        Cassette::new().save(&path).unwrap();
        assert!(Cassette::load(&path).unwrap().is_empty());
    }

    #[test]
    fn duplicate_fingerprint_keeps_latest() {
        let mut cassette = Cassette::new();
        cassette.record_exchange(&req("q"), "first");
        cassette.record_exchange(&req("q"), "second");
        assert_eq!(cassette.len(), 1);
        assert_eq!(cassette.lookup(&fingerprint(&req("q"))), Some("second"));
    }

    #[test]
    fn malformed_cassette_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "not json\n").unwrap();
        assert!(matches!(
            Cassette::load(&path),
            Err(GatewayError::Schema(_))
        ));
    }
}
