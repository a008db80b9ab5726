//! Prompt templates with `{slot}` markers, shipped defaults or user files.

use std::fs;
use std::path::Path;

use super::JudgeError;

const DIRECT: &str = include_str!("../../data/prompts/direct.txt");
const TESTCASE_GENERATION: &str = include_str!("../../data/prompts/testcase_generation.txt");
const TESTCASE_EVALUATION: &str = include_str!("../../data/prompts/testcase_evaluation.txt");
const MISLEADING_GENERATION: &str = include_str!("../../data/prompts/misleading_generation.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplates {
    /// Slots: `{task}`, `{code}`, `{language}`.
    pub direct: String,
    /// Slots: `{task}`.
    pub testcase_generation: String,
    /// Slots: `{task}`, `{code}`, `{language}`, `{test_cases}`.
    pub testcase_evaluation: String,
    /// Slots: `{code}`, `{language}`, `{comment_token}`.
    pub misleading_generation: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            direct: DIRECT.into(),
            testcase_generation: TESTCASE_GENERATION.into(),
            testcase_evaluation: TESTCASE_EVALUATION.into(),
            misleading_generation: MISLEADING_GENERATION.into(),
        }
    }
}

impl PromptTemplates {
    /// Load `direct.txt`, `testcase_generation.txt`, `testcase_evaluation.txt`
    /// and `misleading_generation.txt` from `dir`; missing files keep the
    /// defaults.
    pub fn load_dir(dir: &Path) -> Result<Self, JudgeError> {
        let mut t = PromptTemplates::default();
        for (name, slot) in [
            ("direct.txt", &mut t.direct),
            ("testcase_generation.txt", &mut t.testcase_generation),
            ("testcase_evaluation.txt", &mut t.testcase_evaluation),
            ("misleading_generation.txt", &mut t.misleading_generation),
        ] {
            let path = dir.join(name);
            if path.exists() {
                *slot =
                    fs::read_to_string(&path).map_err(|e| JudgeError::Config(format!("{}: {e}", path.display())))?;
            }
        }
        Ok(t)
    }
}

/// Substitute `{name}` markers in one pass, so slot values containing
/// braces are never re-expanded.
pub fn render(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + slots.iter().map(|(_, v)| v.len()).sum::<usize>());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after
            .find('}')
            .and_then(|close| slots.iter().find(|(k, _)| *k == &after[..close]).map(|(_, v)| (close, v)));
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}
