//! Problems, paired solutions and the JSONL dataset format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fsio;
use crate::language::Language;
use crate::rng::{self, SeededRng};
use crate::syntax::{self, ParseError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub problem_id: String,
    pub description: String,
    /// `(stdin, expected stdout)` pairs.
    #[serde(default)]
    pub io_tests: Vec<(String, String)>,
}

impl Problem {
    /// Without io_tests, behavioral checks degrade to syntax-only.
    pub fn is_validation_limited(&self) -> bool {
        self.io_tests.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Correct,
    Incorrect,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Correct => "correct",
            Label::Incorrect => "incorrect",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "correct" => Ok(Label::Correct),
            "incorrect" => Ok(Label::Incorrect),
            other => Err(format!("unknown label `{other}` (expected correct|incorrect)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSample {
    pub sample_id: String,
    pub problem_id: String,
    pub language: Language,
    pub label: Label,
    pub source: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub correct: usize,
    pub incorrect: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub rng_algorithm: String,
    /// Seed used to select the pairs; absent for a dataset loaded as-is.
    pub seed: Option<u64>,
    pub problems: usize,
    pub counts: BTreeMap<Language, LabelCounts>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub problems: BTreeMap<String, Problem>,
    pub samples: Vec<CodeSample>,
    pub manifest: Manifest,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("line {line}: unsupported language `{language}`")]
    UnsupportedLanguage { line: usize, language: String },
    #[error("line {line}: sample `{sample_id}` does not parse: {error}")]
    InvalidSource { line: usize, sample_id: String, error: ParseError },
    #[error("insufficient data for {language}: need {needed} paired problems, have {available}")]
    InsufficientData { language: Language, needed: usize, available: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Record shapes as they appear on disk. Language and label stay strings so
/// unsupported values produce a precise error.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawRecord {
    Problem {
        problem_id: String,
        description: String,
        #[serde(default)]
        io_tests: Vec<(String, String)>,
    },
    Sample {
        sample_id: String,
        problem_id: String,
        language: String,
        label: String,
        source: String,
    },
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RecordOut<'a> {
    Problem { problem_id: &'a str, description: &'a str, io_tests: &'a [(String, String)] },
    Sample { sample_id: &'a str, problem_id: &'a str, language: Language, label: Label, source: &'a str },
}

impl Dataset {
    pub fn new(problems: BTreeMap<String, Problem>, samples: Vec<CodeSample>, seed: Option<u64>) -> Self {
        let manifest = build_manifest(&problems, &samples, seed);
        Dataset { problems, samples, manifest }
    }

    pub fn problem(&self, problem_id: &str) -> Option<&Problem> {
        self.problems.get(problem_id)
    }

    pub fn sample(&self, sample_id: &str) -> Option<&CodeSample> {
        self.samples.iter().find(|s| s.sample_id == sample_id)
    }

    pub fn languages(&self) -> BTreeSet<Language> {
        self.samples.iter().map(|s| s.language).collect()
    }

    /// Strip comments from every sample.
    pub fn normalize(&mut self) -> Result<(), CorpusError> {
        for (i, sample) in self.samples.iter_mut().enumerate() {
            sample.source = strip_comments(&sample.source, sample.language).map_err(|error| {
                CorpusError::InvalidSource { line: i + 1, sample_id: sample.sample_id.clone(), error }
            })?;
        }
        Ok(())
    }

    /// Every problem has exactly one correct and one incorrect sample per
    /// language in which it appears.
    pub fn check_pairing(&self) -> Result<(), CorpusError> {
        let mut seen: BTreeMap<(&str, Language), (usize, usize)> = BTreeMap::new();
        for s in &self.samples {
            let entry = seen.entry((s.problem_id.as_str(), s.language)).or_default();
            match s.label {
                Label::Correct => entry.0 += 1,
                Label::Incorrect => entry.1 += 1,
            }
        }
        for ((problem, language), counts) in seen {
            if counts != (1, 1) {
                return Err(CorpusError::Integrity(format!(
                    "problem `{problem}` has {} correct and {} incorrect {language} samples (expected 1 and 1)",
                    counts.0, counts.1
                )));
            }
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for p in self.problems.values() {
            let record =
                RecordOut::Problem { problem_id: &p.problem_id, description: &p.description, io_tests: &p.io_tests };
            out.push_str(&serde_json::to_string(&record).expect("records serialize"));
            out.push('\n');
        }
        for s in &self.samples {
            let record = RecordOut::Sample {
                sample_id: &s.sample_id,
                problem_id: &s.problem_id,
                language: s.language,
                label: s.label,
                source: &s.source,
            };
            out.push_str(&serde_json::to_string(&record).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        fsio::write_atomic(path, self.to_jsonl().as_bytes())
            .map_err(|source| CorpusError::Io { path: path.display().to_string(), source })
    }
}

fn build_manifest(problems: &BTreeMap<String, Problem>, samples: &[CodeSample], seed: Option<u64>) -> Manifest {
    let mut counts: BTreeMap<Language, LabelCounts> = BTreeMap::new();
    for s in samples {
        let c = counts.entry(s.language).or_default();
        match s.label {
            Label::Correct => c.correct += 1,
            Label::Incorrect => c.incorrect += 1,
        }
    }
    Manifest {
        schema_version: SCHEMA_VERSION,
        rng_algorithm: rng::ALGORITHM.to_string(),
        seed,
        problems: problems.len(),
        counts,
    }
}

const MINI_CORPUS_JSONL: &str = include_str!("../data/mini_corpus.jsonl");

/// The bundled mini-corpus (10 problems, five languages, one correct and one
/// incorrect solution each), comments intact.
pub fn mini_corpus() -> Dataset {
    parse_dataset(MINI_CORPUS_JSONL).expect("bundled mini-corpus is valid")
}

pub fn load_dataset(path: &Path) -> Result<Dataset, CorpusError> {
    let text =
        fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    parse_dataset(&text)
}

/// Parse dataset JSONL. Blank lines are ignored; every sample must parse in
/// its language and reference a known problem.
pub fn parse_dataset(text: &str) -> Result<Dataset, CorpusError> {
    let mut problems = BTreeMap::new();
    let mut samples = Vec::new();
    let mut sample_lines = Vec::new();
    let mut sample_ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(line)
            .map_err(|e| CorpusError::MalformedRecord { line: line_no, reason: e.to_string() })?;
        match record {
            RawRecord::Problem { problem_id, description, io_tests } => {
                if description.trim().is_empty() {
                    return Err(CorpusError::MalformedRecord {
                        line: line_no,
                        reason: format!("problem `{problem_id}` has an empty description"),
                    });
                }
                if problems.contains_key(&problem_id) {
                    return Err(CorpusError::Integrity(format!(
                        "duplicate problem_id `{problem_id}` (line {line_no})"
                    )));
                }
                problems.insert(problem_id.clone(), Problem { problem_id, description, io_tests });
            }
            RawRecord::Sample { sample_id, problem_id, language, label, source } => {
                let language = Language::from_str(&language)
                    .map_err(|_| CorpusError::UnsupportedLanguage { line: line_no, language: language.clone() })?;
                let label =
                    Label::from_str(&label).map_err(|reason| CorpusError::MalformedRecord { line: line_no, reason })?;
                if !sample_ids.insert(sample_id.clone()) {
                    return Err(CorpusError::Integrity(format!("duplicate sample_id `{sample_id}` (line {line_no})")));
                }
                if let Err(error) = syntax::parse(&source, language) {
                    return Err(CorpusError::InvalidSource { line: line_no, sample_id, error });
                }
                samples.push(CodeSample { sample_id, problem_id, language, label, source });
                sample_lines.push(line_no);
            }
        }
    }
    for (sample, line) in samples.iter().zip(&sample_lines) {
        if !problems.contains_key(&sample.problem_id) {
            return Err(CorpusError::Integrity(format!(
                "sample `{}` (line {line}) references unknown problem `{}`",
                sample.sample_id, sample.problem_id
            )));
        }
    }
    Ok(Dataset::new(problems, samples, None))
}

/// Remove all comment tokens. Lines that held only comments are deleted,
/// trailing comments take their leading whitespace with them, and an inline
/// block comment becomes a space (or a newline if it spanned lines, which
/// keeps automatic semicolon insertion unchanged).
pub fn strip_comments(source: &str, language: Language) -> Result<String, ParseError> {
    let tree = syntax::parse(source, language)?;
    let ranges = tree.comment_ranges();
    if ranges.is_empty() {
        return Ok(source.to_string());
    }
    let mark = ['\u{0}', '\u{E000}', '\u{E001}', '\u{F8FF}']
        .into_iter()
        .find(|c| !source.contains(*c))
        .expect("source uses every candidate marker character");

    let mut marked = String::with_capacity(source.len());
    let mut pos = 0;
    for r in &ranges {
        marked.push_str(&source[pos..r.start]);
        let line_start = source[..r.start].rfind('\n').map(|p| p + 1).unwrap_or(0);
        let line_end = source[r.end..].find('\n').map(|p| r.end + p).unwrap_or(source.len());
        let code_before = !source[line_start..r.start].trim().is_empty();
        let code_after = !source[r.end..line_end].trim().is_empty();
        let spans_lines = source[r.clone()].contains('\n');
        if code_before && code_after {
            marked.push(if spans_lines { '\n' } else { ' ' });
        } else {
            marked.push(mark);
        }
        pos = r.end;
    }
    marked.push_str(&source[pos..]);

    let mut out = String::with_capacity(marked.len());
    for line in marked.split_inclusive('\n') {
        if !line.contains(mark) {
            out.push_str(line);
            continue;
        }
        let (body, newline) = match line.strip_suffix('\n') {
            Some(b) => (b, "\n"),
            None => (line, ""),
        };
        if body.chars().all(|c| c == mark || c.is_whitespace()) {
            continue;
        }
        let mut cleaned = String::with_capacity(body.len());
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i] == mark {
                // a leading comment also takes the whitespace after it
                if cleaned.trim().is_empty() {
                    while i + 1 < chars.len() && (chars[i + 1] == ' ' || chars[i + 1] == '\t') {
                        i += 1;
                    }
                }
            } else {
                cleaned.push(chars[i]);
            }
            i += 1;
        }
        if body.trim_end_matches(|c: char| c == mark || c.is_whitespace()).len() < body.trim_end().len() {
            let keep = cleaned.trim_end_matches([' ', '\t']).len();
            cleaned.truncate(keep);
        }
        out.push_str(&cleaned);
        out.push_str(newline);
    }
    syntax::parse(&out, language)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub problem: Problem,
    pub correct: CodeSample,
    pub incorrect: CodeSample,
}

/// Correct and incorrect samples of one problem.
type LabelSplit<'a> = (Vec<&'a CodeSample>, Vec<&'a CodeSample>);

/// Choose `n` problems having both labels in `language`, and one random
/// correct and incorrect sample for each. Result is ordered by problem id.
pub fn prepare_pairs(dataset: &Dataset, language: Language, n: usize, seed: u64) -> Result<Vec<Pair>, CorpusError> {
    let mut by_problem: BTreeMap<&str, (Vec<&CodeSample>, Vec<&CodeSample>)> = BTreeMap::new();
    for s in dataset.samples.iter().filter(|s| s.language == language) {
        let entry = by_problem.entry(s.problem_id.as_str()).or_default();
        match s.label {
            Label::Correct => entry.0.push(s),
            Label::Incorrect => entry.1.push(s),
        }
    }
    let eligible: Vec<(&str, &LabelSplit)> =
        by_problem.iter().filter(|(_, (c, i))| !c.is_empty() && !i.is_empty()).map(|(k, v)| (*k, v)).collect();
    if eligible.len() < n {
        return Err(CorpusError::InsufficientData { language, needed: n, available: eligible.len() });
    }
    let mut rng = SeededRng::new(seed, &format!("prepare_pairs/{language}"));
    let mut chosen = rng.sample_indices(eligible.len(), n);
    chosen.sort_unstable();
    let mut pairs = Vec::with_capacity(n);
    for idx in chosen {
        let (problem_id, (correct, incorrect)) = eligible[idx];
        let mut pick = SeededRng::new(rng::derive_seed(seed, problem_id), &format!("pick/{language}"));
        let c = correct[pick.index(correct.len())];
        let i = incorrect[pick.index(incorrect.len())];
        pairs.push(Pair { problem: dataset.problems[problem_id].clone(), correct: c.clone(), incorrect: i.clone() });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_problem_text() -> String {
        let mut text = String::new();
        for p in ["p1", "p2"] {
            text.push_str(&format!(
                "{{\"kind\":\"problem\",\"problem_id\":\"{p}\",\"description\":\"Add.\",\"io_tests\":[[\"1 2\\n\",\"3\\n\"]]}}\n"
            ));
            for label in ["correct", "incorrect"] {
                text.push_str(&format!(
                    "{{\"kind\":\"sample\",\"sample_id\":\"{p}-{label}\",\"problem_id\":\"{p}\",\"language\":\"python\",\"label\":\"{label}\",\"source\":\"print(sum(map(int, input().split())))\\n\"}}\n"
                ));
            }
        }
        text
    }

    #[test]
    fn loads_two_problems_four_samples() {
        let ds = parse_dataset(&two_problem_text()).unwrap();
        assert_eq!(ds.problems.len(), 2);
        assert_eq!(ds.samples.len(), 4);
        assert_eq!(ds.manifest.counts[&Language::Python], LabelCounts { correct: 2, incorrect: 2 });
        ds.check_pairing().unwrap();
    }

    #[test]
    fn dangling_problem_is_integrity_error() {
        let text = "{\"kind\":\"sample\",\"sample_id\":\"s\",\"problem_id\":\"nope\",\"language\":\"python\",\"label\":\"correct\",\"source\":\"x = 1\\n\"}\n";
        assert!(matches!(parse_dataset(text), Err(CorpusError::Integrity(_))));
    }

    #[test]
    fn malformed_line_is_reported() {
        let text = format!("{}{{not json\n", two_problem_text());
        match parse_dataset(&text) {
            Err(CorpusError::MalformedRecord { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsupported_language_is_reported() {
        let text = format!(
            "{}{}",
            "{\"kind\":\"problem\",\"problem_id\":\"p\",\"description\":\"d\"}\n",
            "{\"kind\":\"sample\",\"sample_id\":\"s\",\"problem_id\":\"p\",\"language\":\"rust\",\"label\":\"correct\",\"source\":\"\"}\n"
        );
        assert!(matches!(parse_dataset(&text), Err(CorpusError::UnsupportedLanguage { line: 2, .. })));
    }

    #[test]
    fn save_load_roundtrip() {
        let ds = parse_dataset(&two_problem_text()).unwrap();
        let again = parse_dataset(&ds.to_jsonl()).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn strip_python_trailing_comment() {
        assert_eq!(strip_comments("x = 1  # note\n", Language::Python).unwrap(), "x = 1\n");
        assert_eq!(strip_comments("x = 1  # note", Language::Python).unwrap(), "x = 1");
    }

    #[test]
    fn strip_without_comments_is_identity() {
        let src = "int main() {\n    return 0;\n}\n";
        assert_eq!(strip_comments(src, Language::Cpp).unwrap(), src);
    }

    #[test]
    fn strip_removes_comment_lines_and_keeps_strings() {
        let src = "// header\n#include <cstdio>\n/* block\n   comment */\nint main() {\n    const char *s = \"// not a comment\"; /* tail */\n    int a = 1 /* mid */ + 2;\n    printf(\"%s %d\\n\", s, a); // done\n\n    return 0;\n}\n";
        let want = "#include <cstdio>\nint main() {\n    const char *s = \"// not a comment\";\n    int a = 1   + 2;\n    printf(\"%s %d\\n\", s, a);\n\n    return 0;\n}\n";
        assert_eq!(strip_comments(src, Language::Cpp).unwrap(), want);
    }

    #[test]
    fn strip_python_keeps_hash_in_strings() {
        let src = "s = '# no'  # yes\n# gone\nprint(s)\n";
        assert_eq!(strip_comments(src, Language::Python).unwrap(), "s = '# no'\nprint(s)\n");
    }

    #[test]
    fn inline_multiline_block_becomes_newline() {
        let src = "int a = 1 /* x\n y */ + 2;\n";
        assert_eq!(strip_comments(src, Language::Cpp).unwrap(), "int a = 1 \n + 2;\n");
    }

    #[test]
    fn leading_block_takes_following_space() {
        let src = "    /* c */ x = 1;\n";
        assert_eq!(strip_comments(src, Language::JavaScript).unwrap(), "    x = 1;\n");
    }

    #[test]
    fn prepare_pairs_is_deterministic_and_bounded() {
        let ds = parse_dataset(&two_problem_text()).unwrap();
        assert!(prepare_pairs(&ds, Language::Python, 0, 1).unwrap().is_empty());
        let a = prepare_pairs(&ds, Language::Python, 1, 9).unwrap();
        let b = prepare_pairs(&ds, Language::Python, 1, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(prepare_pairs(&ds, Language::Python, 2, 9).unwrap().len(), 2);
        assert!(matches!(
            prepare_pairs(&ds, Language::Python, 3, 9),
            Err(CorpusError::InsufficientData { available: 2, .. })
        ));
        assert!(matches!(prepare_pairs(&ds, Language::Go, 1, 9), Err(CorpusError::InsufficientData { .. })));
    }
}
