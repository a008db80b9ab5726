//! Judge-authored test cases: parsing them out of generation output and
//! rendering them back into the evaluation prompt.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub input: String,
    pub expected_output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCaseSet {
    /// Problem the cases were written for.
    pub item_id: String,
    pub cases: Vec<TestCase>,
    pub raw_output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TestCaseSet {
    /// An empty set is a generation failure.
    pub fn is_usable(&self) -> bool {
        !self.cases.is_empty()
    }
}

const HEADER: &str = "### test case";

/// Parse `### Test Case N` blocks, each holding an `Input:` and an
/// `Expected Output:` section (inline or fenced). Blocks missing either
/// section are skipped.
pub fn parse_test_cases(raw: &str) -> Vec<TestCase> {
    let mut blocks: Vec<Vec<&str>> = Vec::new();
    for line in raw.lines() {
        if line.trim_start().to_ascii_lowercase().starts_with(HEADER) {
            blocks.push(Vec::new());
        } else if let Some(b) = blocks.last_mut() {
            b.push(line);
        }
    }
    blocks.iter().filter_map(|b| parse_block(b)).collect()
}

fn parse_block(lines: &[&str]) -> Option<TestCase> {
    // [input, expected output]
    let mut sections: [Option<Vec<&str>>; 2] = [None, None];
    let mut current = None;
    for line in lines {
        let lower = line.trim().to_ascii_lowercase();
        let lower = lower.trim_start_matches(['*', '#', ' ']);
        if let Some(rest) = section_rest(line, lower, "expected output") {
            sections[1] = Some(rest.into_iter().collect());
            current = Some(1);
        } else if let Some(rest) = section_rest(line, lower, "input") {
            sections[0] = Some(rest.into_iter().collect());
            current = Some(0);
        } else if let Some(i) = current {
            sections[i].get_or_insert_with(Vec::new).push(line);
        }
    }
    let [input, output] = sections;
    let input = clean(&input?);
    let expected_output = clean(&output?);
    if expected_output.is_empty() {
        return None;
    }
    Some(TestCase { input, expected_output })
}

/// If `line` opens `name:`, the inline remainder (if any).
fn section_rest<'a>(line: &'a str, lower: &str, name: &str) -> Option<Option<&'a str>> {
    let after = lower.strip_prefix(name)?;
    let after = after.trim_start_matches(['*', ' ']);
    if !after.starts_with(':') {
        return None;
    }
    let colon = line.find(':')?;
    let rest = line[colon + 1..].trim_start_matches(['*', ' ']).trim_end();
    Some(if rest.is_empty() { None } else { Some(rest) })
}

/// Drop code fences and surrounding blank lines.
fn clean(lines: &[&str]) -> String {
    let kept: Vec<&str> = lines.iter().copied().filter(|l| !l.trim_start().starts_with("```")).collect();
    let start = kept.iter().position(|l| !l.trim().is_empty()).unwrap_or(kept.len());
    let end = kept.iter().rposition(|l| !l.trim().is_empty()).map_or(start, |e| e + 1);
    let mut text = kept[start..end].join("\n");
    if text.len() >= 2 && text.starts_with('`') && text.ends_with('`') && !text.contains('\n') {
        text = text[1..text.len() - 1].to_string();
    }
    text
}

/// Render cases for the `{test_cases}` prompt slot, in the generation layout.
pub fn render_test_cases(cases: &[TestCase]) -> String {
    let mut out = String::new();
    for (i, c) in cases.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!(
            "### Test Case {}\nInput:\n```\n{}\n```\nExpected Output:\n```\n{}\n```\n",
            i + 1,
            c.input,
            c.expected_output
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_well_formed_cases() {
        let raw = "Here you go.\n\n### Test Case 1\nInput:\n```\n1 2\n```\nExpected Output:\n```\n3\n```\n\n### Test Case 2\nInput: 5 5\nExpected Output: 10\n";
        let cases = parse_test_cases(raw);
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[0], TestCase { input: "1 2".into(), expected_output: "3".into() });
        assert_eq!(cases[1], TestCase { input: "5 5".into(), expected_output: "10".into() });
    }

    #[test]
    fn prose_yields_nothing() {
        assert!(parse_test_cases("I think a good test would be adding one and two.").is_empty());
        assert!(parse_test_cases("### Test Case 1\nInput:\n1 2\n").is_empty());
    }

    #[test]
    fn bold_headers_and_multiline_input() {
        let raw = "### Test Case 1\n**Input:**\n```\n3\n1 2 3\n```\n**Expected Output:**\n```\n6\n```";
        let cases = parse_test_cases(raw);
        assert_eq!(cases, vec![TestCase { input: "3\n1 2 3".into(), expected_output: "6".into() }]);
    }

    #[test]
    fn render_round_trips() {
        let cases = vec![
            TestCase { input: "1 2".into(), expected_output: "3".into() },
            TestCase { input: "4\n1 1 1 1".into(), expected_output: "4".into() },
        ];
        assert_eq!(parse_test_cases(&render_test_cases(&cases)), cases);
    }
}
