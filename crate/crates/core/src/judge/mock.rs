//! Deterministic judges driven by declarative rules, for tests and offline
//! runs.
//!
//! Rules are checked in order; the first whose conditions all hold decides
//! the answer, otherwise `default` does. Mocks see the ground-truth label so
//! that behaviour can be stated relative to it.

use serde::{Deserialize, Serialize};

use super::testcases::{render_test_cases, TestCase};
use super::transport::{CompletionRequest, CompletionResponse, Purpose, Transport, TransportError};
use super::verdict::Verdict;
use crate::corpus::Label;
use crate::transforms::{CannedGenerator, MisleadingGenerator, MisleadingRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockAnswer {
    Correct,
    Incorrect,
    /// The ground-truth label.
    Label,
    /// The opposite of the ground-truth label.
    NotLabel,
    Unparseable,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockCondition {
    pub first_line_contains: Option<String>,
    pub code_contains: Option<String>,
    pub item_contains: Option<String>,
    pub task_contains: Option<String>,
    pub trial: Option<u32>,
    pub purpose: Option<Purpose>,
    pub label: Option<Label>,
}

impl MockCondition {
    fn holds(&self, r: &CompletionRequest) -> bool {
        let c = &r.context;
        let code = c.code.as_deref().unwrap_or("");
        let first_line = code.lines().next().unwrap_or("");
        self.first_line_contains.as_deref().is_none_or(|s| first_line.contains(s))
            && self.code_contains.as_deref().is_none_or(|s| code.contains(s))
            && self.item_contains.as_deref().is_none_or(|s| c.item_id.contains(s))
            && self.task_contains.as_deref().is_none_or(|s| c.task.as_deref().unwrap_or("").contains(s))
            && self.trial.is_none_or(|t| t == r.trial_index)
            && self.purpose.is_none_or(|p| p == c.purpose)
            && self.label.is_none_or(|l| Some(l) == c.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockRule {
    #[serde(default)]
    pub when: MockCondition,
    pub answer: MockAnswer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockSpec {
    pub default: MockAnswer,
    pub rules: Vec<MockRule>,
    /// Cases written per test-case generation request. A generation
    /// request whose rules answer `unparseable` yields prose instead.
    pub test_cases: usize,
}

impl Default for MockSpec {
    fn default() -> Self {
        MockSpec { default: MockAnswer::Label, rules: Vec::new(), test_cases: 2 }
    }
}

impl MockSpec {
    pub fn answer(&self, r: &CompletionRequest) -> MockAnswer {
        self.rules.iter().find(|rule| rule.when.holds(r)).map_or(self.default, |rule| rule.answer)
    }

    pub fn verdict(&self, r: &CompletionRequest) -> Verdict {
        let label = r.context.label;
        match (self.answer(r), label) {
            (MockAnswer::Correct, _) => Verdict::Correct,
            (MockAnswer::Incorrect, _) => Verdict::Incorrect,
            (MockAnswer::Label, Some(l)) => Verdict::from_label(l),
            (MockAnswer::NotLabel, Some(Label::Correct)) => Verdict::Incorrect,
            (MockAnswer::NotLabel, Some(Label::Incorrect)) => Verdict::Correct,
            _ => Verdict::Unparseable,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MockTransport {
    pub judge_id: String,
    pub spec: MockSpec,
}

impl MockTransport {
    fn respond(&self, r: &CompletionRequest) -> Result<String, TransportError> {
        let c = &r.context;
        Ok(match c.purpose {
            Purpose::Direct | Purpose::TestCaseEvaluation => match self.spec.verdict(r) {
                Verdict::Unparseable => format!("Mock judge {} cannot decide on {}.", self.judge_id, c.item_id),
                v => format!("Mock judge {} examined {}.\nFinal verdict: {v}", self.judge_id, c.item_id),
            },
            Purpose::TestCaseGeneration => {
                if self.spec.answer(r) == MockAnswer::Unparseable || self.spec.test_cases == 0 {
                    format!("Mock judge {} has no test cases for {}.", self.judge_id, c.item_id)
                } else {
                    let cases: Vec<TestCase> = (1..=self.spec.test_cases)
                        .map(|i| TestCase { input: format!("{i} {i}"), expected_output: format!("{}", 2 * i) })
                        .collect();
                    render_test_cases(&cases)
                }
            }
            Purpose::MisleadingGeneration => {
                let language = c.language.ok_or_else(|| TransportError::Malformed("no language".into()))?;
                let request = MisleadingRequest {
                    sample_id: c.item_id.clone(),
                    language,
                    code: c.code.clone().unwrap_or_default(),
                    attempt: r.trial_index + 1,
                    seed: 0,
                };
                CannedGenerator::well_formed()
                    .generate(&request)
                    .map_err(|e| TransportError::Malformed(e.to_string()))?
            }
        })
    }
}

impl Transport for MockTransport {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, TransportError> {
        self.respond(request).map(|text| CompletionResponse { text, usage: None })
    }
}
