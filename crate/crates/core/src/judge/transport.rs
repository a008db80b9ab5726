//! How prompts reach a model: the transport trait, rate limiting, retries,
//! and the record/replay log.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::fsio::sha256_hex;
use crate::language::Language;

/// What a request is for. Mocks decide their answer from this; live
/// transports only see the prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    Direct,
    TestCaseGeneration,
    TestCaseEvaluation,
    MisleadingGeneration,
}

/// Structured view of the request, used by mock transports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestContext {
    pub purpose: Purpose,
    pub item_id: String,
    pub language: Option<Language>,
    pub code: Option<String>,
    pub task: Option<String>,
    /// Ground truth, available to mocks only.
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRequest {
    pub judge_id: String,
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub trial_index: u32,
    pub context: RequestContext,
}

impl CompletionRequest {
    /// Identity of the request for replay: everything that is sent, plus the
    /// trial index so repeated trials of one prompt stay distinct.
    pub fn hash(&self) -> String {
        let canonical = serde_json::json!({
            "judge_id": self.judge_id,
            "model": self.model,
            "prompt": self.prompt,
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
            "trial_index": self.trial_index,
        });
        sha256_hex(canonical.to_string().as_bytes())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionResponse {
    pub text: String,
    pub usage: Option<Usage>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("rate limited by endpoint")]
    RateLimited { retry_after: Option<Duration> },
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("network: {0}")]
    Network(String),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("credentials: {0}")]
    Credentials(String),
    #[error("no recorded response for request {0}")]
    ReplayMiss(String),
}

impl TransportError {
    pub fn is_retryable(&self) -> bool {
        match self {
            TransportError::RateLimited { .. } | TransportError::Network(_) => true,
            TransportError::Http { status, .. } => *status >= 500 || *status == 408,
            _ => false,
        }
    }
}

/// Sends one prompt and returns the model's text. Must be callable from
/// several threads at once.
pub trait Transport: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, TransportError>;
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, TransportError> {
        (**self).complete(request)
    }
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, TransportError> {
        (**self).complete(request)
    }
}

/// Spaces request starts at least `1 / rate` seconds apart.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    /// `rate` in requests per second; zero or negative disables limiting.
    pub fn new(rate: f64) -> Self {
        let interval =
            if rate > 0.0 && rate.is_finite() { Duration::from_secs_f64(1.0 / rate) } else { Duration::ZERO };
        RateLimiter { interval, next: Mutex::new(None) }
    }

    /// Block until this caller may start a request. Callers are released
    /// one at a time, each at least one interval after the previous release.
    pub fn acquire(&self) {
        if self.interval.is_zero() {
            return;
        }
        let mut next = self.next.lock().expect("rate limiter poisoned");
        if let Some(at) = *next {
            let now = Instant::now();
            if at > now {
                std::thread::sleep(at - now);
            }
        }
        *next = Some(Instant::now() + self.interval);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub multiplier: f64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 4, initial_backoff_ms: 1000, multiplier: 2.0, max_backoff_ms: 60_000 }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (0-based).
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self.initial_backoff_ms as f64 * self.multiplier.max(1.0).powi(attempt as i32);
        Duration::from_millis(ms.min(self.max_backoff_ms as f64) as u64)
    }
}

/// Call `transport` under the rate limit, retrying transient failures.
pub fn send_with_retry(
    transport: &dyn Transport,
    limiter: &RateLimiter,
    policy: &RetryPolicy,
    request: &CompletionRequest,
) -> Result<CompletionResponse, TransportError> {
    let mut attempt = 0;
    loop {
        limiter.acquire();
        match transport.complete(request) {
            Ok(r) => return Ok(r),
            Err(e) if e.is_retryable() && attempt < policy.max_retries => {
                let mut wait = policy.backoff(attempt);
                if let TransportError::RateLimited { retry_after: Some(after) } = &e {
                    wait = wait.max(*after);
                }
                log::warn!("{}: {e}; retrying in {wait:?}", request.judge_id);
                std::thread::sleep(wait);
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// One line of the replay log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub request_hash: String,
    pub judge_id: String,
    pub trial_index: u32,
    pub prompt: String,
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Milliseconds since the Unix epoch when the response arrived.
    pub timestamp: u64,
    /// Milliseconds the call took.
    pub latency_ms: u64,
}

pub fn now_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Wraps a transport and appends every exchange to a JSONL log.
pub struct RecordingTransport<T> {
    inner: T,
    log: Mutex<File>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, log_path: &Path) -> std::io::Result<Self> {
        if let Some(parent) = log_path.parent() {
            fs::create_dir_all(parent)?;
        }
        let log = OpenOptions::new().create(true).append(true).open(log_path)?;
        Ok(RecordingTransport { inner, log: Mutex::new(log) })
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, TransportError> {
        let start = Instant::now();
        let result = self.inner.complete(request);
        let entry = ReplayEntry {
            request_hash: request.hash(),
            judge_id: request.judge_id.clone(),
            trial_index: request.trial_index,
            prompt: request.prompt.clone(),
            response: result.as_ref().ok().map(|r| r.text.clone()),
            error: result.as_ref().err().map(|e| e.to_string()),
            timestamp: now_millis(),
            latency_ms: start.elapsed().as_millis() as u64,
        };
        let mut line = serde_json::to_string(&entry).expect("replay entry serializes");
        line.push('\n');
        if let Ok(mut f) = self.log.lock() {
            if let Err(e) = f.write_all(line.as_bytes()).and_then(|_| f.flush()) {
                log::error!("replay log write failed: {e}");
            }
        }
        result
    }
}

/// Serves responses from a replay log by request hash. The latest
/// successful entry for a hash wins.
#[derive(Debug, Default)]
pub struct ReplayTransport {
    responses: HashMap<String, String>,
}

impl ReplayTransport {
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut responses = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: ReplayEntry = serde_json::from_str(line).map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{} line {}: {e}", path.display(), i + 1))
            })?;
            if let Some(r) = entry.response {
                responses.insert(entry.request_hash, r);
            }
        }
        Ok(ReplayTransport { responses })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl Transport for ReplayTransport {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, TransportError> {
        let hash = request.hash();
        self.responses
            .get(&hash)
            .map(|text| CompletionResponse { text: text.clone(), usage: None })
            .ok_or(TransportError::ReplayMiss(hash))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};
    use std::sync::Arc;

    fn request(prompt: &str, trial: u32) -> CompletionRequest {
        CompletionRequest {
            judge_id: "j".into(),
            model: "m".into(),
            prompt: prompt.into(),
            temperature: 0.0,
            max_output_tokens: 10,
            trial_index: trial,
            context: RequestContext {
                purpose: Purpose::Direct,
                item_id: "i".into(),
                language: None,
                code: None,
                task: None,
                label: None,
            },
        }
    }

    struct Flaky {
        failures: AtomicU32,
        calls: Mutex<Vec<Instant>>,
    }

    impl Transport for Flaky {
        fn complete(&self, r: &CompletionRequest) -> Result<CompletionResponse, TransportError> {
            self.calls.lock().unwrap().push(Instant::now());
            if self.failures.load(Ordering::SeqCst) > 0 {
                self.failures.fetch_sub(1, Ordering::SeqCst);
                return Err(TransportError::Http { status: 503, body: "busy".into() });
            }
            Ok(CompletionResponse { text: format!("echo {}", r.prompt), usage: None })
        }
    }

    #[test]
    fn hash_depends_on_trial_and_prompt_not_context() {
        let a = request("p", 0);
        let mut b = a.clone();
        b.context.item_id = "other".into();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), request("p", 1).hash());
        assert_ne!(a.hash(), request("q", 0).hash());
    }

    #[test]
    fn retries_transient_errors_with_backoff() {
        let t = Flaky { failures: AtomicU32::new(2), calls: Mutex::new(vec![]) };
        let policy = RetryPolicy { max_retries: 3, initial_backoff_ms: 20, multiplier: 2.0, max_backoff_ms: 1000 };
        let r = send_with_retry(&t, &RateLimiter::new(0.0), &policy, &request("x", 0)).unwrap();
        assert_eq!(r.text, "echo x");
        let calls = t.calls.lock().unwrap();
        assert_eq!(calls.len(), 3);
        assert!(calls[1] - calls[0] >= Duration::from_millis(20));
        assert!(calls[2] - calls[1] >= Duration::from_millis(40));
    }

    #[test]
    fn gives_up_after_max_retries_and_on_fatal_errors() {
        let t = Flaky { failures: AtomicU32::new(10), calls: Mutex::new(vec![]) };
        let policy = RetryPolicy { max_retries: 1, initial_backoff_ms: 1, multiplier: 1.0, max_backoff_ms: 1 };
        assert!(send_with_retry(&t, &RateLimiter::new(0.0), &policy, &request("x", 0)).is_err());
        assert_eq!(t.calls.lock().unwrap().len(), 2);
        assert!(!TransportError::Http { status: 401, body: String::new() }.is_retryable());
    }

    #[test]
    fn limiter_spaces_concurrent_callers() {
        let limiter = Arc::new(RateLimiter::new(20.0));
        let stamps = Arc::new(Mutex::new(Vec::new()));
        let handles: Vec<_> = (0..6)
            .map(|_| {
                let (l, s) = (limiter.clone(), stamps.clone());
                std::thread::spawn(move || {
                    l.acquire();
                    s.lock().unwrap().push(Instant::now());
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        let mut s = stamps.lock().unwrap().clone();
        s.sort();
        for w in s.windows(2) {
            // 50 ms interval; allow scheduler jitter on the recording side
            assert!(w[1] - w[0] >= Duration::from_millis(45), "{:?}", w[1] - w[0]);
        }
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("replay.jsonl");
        let rec =
            RecordingTransport::new(Flaky { failures: AtomicU32::new(0), calls: Mutex::new(vec![]) }, &log).unwrap();
        let a = rec.complete(&request("one", 0)).unwrap();
        rec.complete(&request("two", 2)).unwrap();
        let replay = ReplayTransport::load(&log).unwrap();
        assert_eq!(replay.len(), 2);
        assert_eq!(replay.complete(&request("one", 0)).unwrap().text, a.text);
        assert!(matches!(replay.complete(&request("one", 1)), Err(TransportError::ReplayMiss(_))));
        let first: ReplayEntry =
            serde_json::from_str(fs::read_to_string(&log).unwrap().lines().next().unwrap()).unwrap();
        assert_eq!(first.prompt, "one");
        assert!(first.timestamp > 0);
    }
}
