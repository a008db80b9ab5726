//! LLM judges: configuration, the direct and test-case-based evaluation
//! paradigms, trial averaging, and the misleading-comment generator client.

mod http;
mod mock;
mod prompts;
mod testcases;
mod transport;
mod verdict;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use http::{parse_response, ApiStyle, HttpTransport};
pub use mock::{MockAnswer, MockCondition, MockRule, MockSpec, MockTransport};
pub use prompts::{render, PromptTemplates};
pub use testcases::{parse_test_cases, render_test_cases, TestCase, TestCaseSet};
pub use transport::{
    now_millis, send_with_retry, CompletionRequest, CompletionResponse, Purpose, RateLimiter, RecordingTransport,
    ReplayEntry, ReplayTransport, RequestContext, RetryPolicy, Transport, TransportError, Usage,
};
pub use verdict::{parse_verdict, Verdict};

use crate::corpus::{Label, Problem};
use crate::language::Language;
use crate::transforms::{GeneratorError, MisleadingGenerator, MisleadingRequest};

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error("invalid judge config: {0}")]
    Config(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("replay log {path}: {source}")]
    Replay { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeKind {
    HttpModel,
    Mock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Paradigm {
    Direct,
    TestCaseBased,
}

impl Paradigm {
    pub fn as_str(self) -> &'static str {
        match self {
            Paradigm::Direct => "direct",
            Paradigm::TestCaseBased => "test_case_based",
        }
    }
}

impl std::fmt::Display for Paradigm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Paradigm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Paradigm::Direct),
            "test_case_based" | "testcase" | "test_case" => Ok(Paradigm::TestCaseBased),
            other => Err(format!("unknown paradigm `{other}` (expected direct or test_case_based)")),
        }
    }
}

fn default_temperature() -> f64 {
    0.0
}
fn default_max_output_tokens() -> u32 {
    2048
}
fn default_max_in_flight() -> usize {
    4
}
fn default_request_timeout() -> f64 {
    120.0
}

/// One judge. Secrets never appear here: `api_key_env` names the variable
/// that holds the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgeConfig {
    pub judge_id: String,
    pub kind: JudgeKind,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub api_style: ApiStyle,
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    /// Defaults to 3 for live models and 1 for mocks.
    #[serde(default)]
    pub trials: Option<u32>,
    /// Requests per second; defaults to 1 for live models and unlimited
    /// for mocks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_limit: Option<f64>,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_request_timeout")]
    pub request_timeout_secs: f64,
    #[serde(default)]
    pub mock: Option<MockSpec>,
}

impl JudgeConfig {
    pub fn mock(judge_id: &str, spec: MockSpec) -> Self {
        JudgeConfig {
            judge_id: judge_id.into(),
            kind: JudgeKind::Mock,
            model: None,
            endpoint: None,
            api_style: ApiStyle::default(),
            api_key_env: None,
            temperature: 0.0,
            max_output_tokens: default_max_output_tokens(),
            trials: None,
            rate_limit: None,
            max_in_flight: default_max_in_flight(),
            retry: RetryPolicy::default(),
            request_timeout_secs: default_request_timeout(),
            mock: Some(spec),
        }
    }

    pub fn trials(&self) -> u32 {
        self.trials.unwrap_or(match self.kind {
            JudgeKind::HttpModel => 3,
            JudgeKind::Mock => 1,
        })
    }

    pub fn rate_limit(&self) -> f64 {
        self.rate_limit.unwrap_or(match self.kind {
            JudgeKind::HttpModel => 1.0,
            JudgeKind::Mock => 0.0,
        })
    }

    pub fn model_name(&self) -> String {
        self.model.clone().unwrap_or_else(|| self.judge_id.clone())
    }

    pub fn validate(&self) -> Result<(), JudgeError> {
        let bad = |m: String| Err(JudgeError::Config(format!("{}: {m}", self.judge_id)));
        if self.judge_id.is_empty() || !self.judge_id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return bad("judge_id must be non-empty and use only letters, digits, '-', '_' or '.'".into());
        }
        if self.trials() == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("temperature must be >= 0 (got {})", self.temperature));
        }
        if self.rate_limit().is_nan() || self.rate_limit() < 0.0 {
            return bad("rate_limit must be >= 0".into());
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1".into());
        }
        if self.kind == JudgeKind::HttpModel {
            if self.endpoint.is_none() || self.model.is_none() || self.api_key_env.is_none() {
                return bad("http_model judges need endpoint, model and api_key_env".into());
            }
            if self.rate_limit() == 0.0 {
                return bad("http_model judges need a positive rate_limit".into());
            }
        }
        Ok(())
    }
}

/// One trial's outcome for one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub judge_id: String,
    pub item_id: String,
    pub paradigm: Paradigm,
    pub trial_index: u32,
    pub verdict: Verdict,
    pub raw_output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
}

/// Code under evaluation, with the ground truth used for scoring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalItem {
    pub item_id: String,
    pub problem_id: String,
    pub language: Language,
    pub code: String,
    pub label: Label,
}

/// Judgments of one condition: `trials` per item, ordered by
/// `(item_id, trial_index)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentMatrix {
    pub judge_id: String,
    pub paradigm: Paradigm,
    pub trials: u32,
    pub labels: BTreeMap<String, Label>,
    pub judgments: Vec<Judgment>,
}

impl JudgmentMatrix {
    /// Fraction of an item's trials whose verdict equals its label.
    pub fn item_scores(&self) -> BTreeMap<String, f64> {
        let mut hits: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
        for j in &self.judgments {
            let e = hits.entry(j.item_id.as_str()).or_default();
            e.1 += 1;
            if self.labels.get(&j.item_id).is_some_and(|l| j.verdict.matches(*l)) {
                e.0 += 1;
            }
        }
        hits.into_iter().map(|(k, (h, n))| (k.to_string(), h as f64 / n as f64)).collect()
    }

    /// Mean of per-item scores.
    pub fn accuracy(&self) -> f64 {
        let scores = self.item_scores();
        if scores.is_empty() {
            return 0.0;
        }
        scores.values().sum::<f64>() / scores.len() as f64
    }
}

/// Lets a caller serve already-recorded judgments and persist new ones,
/// which is how evaluation resumes after an interruption.
pub trait JudgmentSink: Sync {
    fn lookup(&self, _item_id: &str, _paradigm: Paradigm, _trial: u32) -> Option<Judgment> {
        None
    }
    fn record(&self, _judgment: &Judgment) {}
}

/// Sink that remembers nothing.
pub struct NoSink;
impl JudgmentSink for NoSink {}

pub struct Judge {
    config: JudgeConfig,
    prompts: PromptTemplates,
    transport: Arc<dyn Transport>,
    limiter: RateLimiter,
}

impl std::fmt::Debug for Judge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Judge").field("config", &self.config).finish()
    }
}

impl Judge {
    /// Build the transport the config describes. When `replay_log` is
    /// given, every exchange is appended to it.
    pub fn from_config(
        config: JudgeConfig,
        prompts: PromptTemplates,
        replay_log: Option<&Path>,
    ) -> Result<Self, JudgeError> {
        config.validate()?;
        let base: Box<dyn Transport> = match config.kind {
            JudgeKind::Mock => Box::new(MockTransport {
                judge_id: config.judge_id.clone(),
                spec: config.mock.clone().unwrap_or_default(),
            }),
            JudgeKind::HttpModel => Box::new(HttpTransport::new(
                config.endpoint.as_deref().unwrap_or_default(),
                config.api_style,
                config.api_key_env.as_deref().unwrap_or_default(),
                Duration::from_secs_f64(config.request_timeout_secs.max(1.0)),
            )?),
        };
        let transport: Arc<dyn Transport> = match replay_log {
            Some(path) => Arc::new(
                RecordingTransport::new(base, path)
                    .map_err(|source| JudgeError::Replay { path: path.display().to_string(), source })?,
            ),
            None => Arc::from(base),
        };
        Ok(Self::with_transport(config, prompts, transport))
    }

    pub fn with_transport(config: JudgeConfig, prompts: PromptTemplates, transport: Arc<dyn Transport>) -> Self {
        let limiter = RateLimiter::new(config.rate_limit());
        Judge { config, prompts, transport, limiter }
    }

    pub fn config(&self) -> &JudgeConfig {
        &self.config
    }

    pub fn id(&self) -> &str {
        &self.config.judge_id
    }

    fn send(
        &self,
        prompt: String,
        trial_index: u32,
        context: RequestContext,
    ) -> Result<CompletionResponse, TransportError> {
        let request = CompletionRequest {
            judge_id: self.config.judge_id.clone(),
            model: self.config.model_name(),
            prompt,
            temperature: self.config.temperature,
            max_output_tokens: self.config.max_output_tokens,
            trial_index,
            context,
        };
        send_with_retry(self.transport.as_ref(), &self.limiter, &self.config.retry, &request)
    }

    fn judgment(
        &self,
        item: &EvalItem,
        paradigm: Paradigm,
        trial: u32,
        result: Result<CompletionResponse, TransportError>,
    ) -> Judgment {
        let (verdict, raw_output, error, usage) = match result {
            Ok(r) => (parse_verdict(&r.text), r.text, None, r.usage),
            Err(e) => (Verdict::Unparseable, String::new(), Some(e.to_string()), None),
        };
        Judgment {
            judge_id: self.config.judge_id.clone(),
            item_id: item.item_id.clone(),
            paradigm,
            trial_index: trial,
            verdict,
            raw_output,
            error,
            usage,
        }
    }

    fn context(&self, purpose: Purpose, task: &Problem, item: &EvalItem) -> RequestContext {
        RequestContext {
            purpose,
            item_id: item.item_id.clone(),
            language: Some(item.language),
            code: Some(item.code.clone()),
            task: Some(task.description.clone()),
            label: Some(item.label),
        }
    }

    /// Chain-of-thought evaluation of code against the task description.
    pub fn direct_evaluate(&self, task: &Problem, item: &EvalItem, trial: u32) -> Judgment {
        let prompt = render(
            &self.prompts.direct,
            &[("task", &task.description), ("code", &item.code), ("language", item.language.display_name())],
        );
        let result = self.send(prompt, trial, self.context(Purpose::Direct, task, item));
        self.judgment(item, Paradigm::Direct, trial, result)
    }

    /// Ask the judge to write test cases for a task. Transport failures and
    /// unparseable output give an empty set with the raw text kept.
    pub fn generate_test_cases(&self, task: &Problem) -> TestCaseSet {
        let prompt = render(&self.prompts.testcase_generation, &[("task", &task.description)]);
        let context = RequestContext {
            purpose: Purpose::TestCaseGeneration,
            item_id: task.problem_id.clone(),
            language: None,
            code: None,
            task: Some(task.description.clone()),
            label: None,
        };
        match self.send(prompt, 0, context) {
            Ok(r) => {
                let cases = parse_test_cases(&r.text);
                let error = cases.is_empty().then(|| "no test cases found in output".to_string());
                TestCaseSet { item_id: task.problem_id.clone(), cases, raw_output: r.text, error }
            }
            Err(e) => TestCaseSet {
                item_id: task.problem_id.clone(),
                cases: vec![],
                raw_output: String::new(),
                error: Some(e.to_string()),
            },
        }
    }

    /// Evaluate code given judge-written test cases. An empty set is not
    /// sent; it yields Unparseable.
    pub fn testcase_evaluate(&self, task: &Problem, item: &EvalItem, cases: &TestCaseSet, trial: u32) -> Judgment {
        if !cases.is_usable() {
            return Judgment {
                judge_id: self.config.judge_id.clone(),
                item_id: item.item_id.clone(),
                paradigm: Paradigm::TestCaseBased,
                trial_index: trial,
                verdict: Verdict::Unparseable,
                raw_output: String::new(),
                error: Some("empty test case set".into()),
                usage: None,
            };
        }
        let rendered = render_test_cases(&cases.cases);
        let prompt = render(
            &self.prompts.testcase_evaluation,
            &[
                ("task", &task.description),
                ("code", &item.code),
                ("language", item.language.display_name()),
                ("test_cases", &rendered),
            ],
        );
        let result = self.send(prompt, trial, self.context(Purpose::TestCaseEvaluation, task, item));
        self.judgment(item, Paradigm::TestCaseBased, trial, result)
    }

    /// Judge every item `trials` times under one paradigm. Items whose
    /// problem is unknown, or whose test cases are missing, still get
    /// (Unparseable) judgments, so the matrix is always complete.
    pub fn run_condition(
        &self,
        items: &[EvalItem],
        problems: &BTreeMap<String, Problem>,
        paradigm: Paradigm,
        cases: &BTreeMap<String, TestCaseSet>,
        sink: &dyn JudgmentSink,
    ) -> JudgmentMatrix {
        let trials = self.config.trials();
        let jobs: Vec<(&EvalItem, u32)> = items.iter().flat_map(|i| (0..trials).map(move |t| (i, t))).collect();
        let run = |&(item, trial): &(&EvalItem, u32)| -> Judgment {
            if let Some(j) = sink.lookup(&item.item_id, paradigm, trial) {
                return j;
            }
            let j = match problems.get(&item.problem_id) {
                None => Judgment {
                    judge_id: self.config.judge_id.clone(),
                    item_id: item.item_id.clone(),
                    paradigm,
                    trial_index: trial,
                    verdict: Verdict::Unparseable,
                    raw_output: String::new(),
                    error: Some(format!("unknown problem {}", item.problem_id)),
                    usage: None,
                },
                Some(task) => match paradigm {
                    Paradigm::Direct => self.direct_evaluate(task, item, trial),
                    Paradigm::TestCaseBased => {
                        let empty = TestCaseSet {
                            item_id: item.problem_id.clone(),
                            cases: vec![],
                            raw_output: String::new(),
                            error: None,
                        };
                        self.testcase_evaluate(task, item, cases.get(&item.problem_id).unwrap_or(&empty), trial)
                    }
                },
            };
            sink.record(&j);
            j
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.config.max_in_flight.max(1)).build();
        let mut judgments: Vec<Judgment> = match pool {
            Ok(pool) => pool.install(|| jobs.par_iter().map(run).collect()),
            Err(_) => jobs.iter().map(run).collect(),
        };
        judgments.sort_by(|a, b| (&a.item_id, a.trial_index).cmp(&(&b.item_id, b.trial_index)));
        JudgmentMatrix {
            judge_id: self.config.judge_id.clone(),
            paradigm,
            trials,
            labels: items.iter().map(|i| (i.item_id.clone(), i.label)).collect(),
            judgments,
        }
    }
}

/// Uses a judge endpoint to write misleading comments.
pub struct JudgeGenerator {
    judge: Arc<Judge>,
}

impl JudgeGenerator {
    pub fn new(judge: Arc<Judge>) -> Self {
        JudgeGenerator { judge }
    }
}

impl MisleadingGenerator for JudgeGenerator {
    fn model_id(&self) -> String {
        self.judge.config.model_name()
    }

    fn generate(&self, request: &MisleadingRequest) -> Result<String, GeneratorError> {
        let prompt = render(
            &self.judge.prompts.misleading_generation,
            &[
                ("code", &request.code),
                ("language", request.language.display_name()),
                ("comment_token", request.language.line_comment_token()),
            ],
        );
        let context = RequestContext {
            purpose: Purpose::MisleadingGeneration,
            item_id: request.sample_id.clone(),
            language: Some(request.language),
            code: Some(request.code.clone()),
            task: None,
            label: None,
        };
        // attempts map onto trial indices so retries are distinct requests
        self.judge
            .send(prompt, request.attempt.saturating_sub(1), context)
            .map(|r| r.text)
            .map_err(|e| GeneratorError::Unavailable(e.to_string()))
    }
}
