//! Misleading task descriptions: 2–3 inaccurate single-line comments from a
//! text generator, accepted only if the code itself is left untouched.

use super::{BiasKind, BiasVariant, Provenance, TransformError, ValidationState};
use crate::corpus::CodeSample;
use crate::language::Language;
use crate::syntax::{self, largest_blocks};

pub const MIN_COMMENTS: usize = 2;
pub const MAX_COMMENTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisleadingRequest {
    pub sample_id: String,
    pub language: Language,
    pub code: String,
    /// 1-based attempt number.
    pub attempt: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("generator unavailable: {0}")]
    Unavailable(String),
}

/// Produces the full annotated code for a request.
pub trait MisleadingGenerator: Send + Sync {
    fn model_id(&self) -> String;
    fn generate(&self, request: &MisleadingRequest) -> Result<String, GeneratorError>;
}

/// Behaviour of [`CannedGenerator`] on a given attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CannedMode {
    /// Comments above the largest blocks, code unchanged.
    WellFormed,
    /// Comments plus one rewritten code line.
    CorruptLine,
    /// Only one comment.
    TooFew,
    /// Comments plus a deleted code line that still leaves valid syntax.
    DropLine,
}

/// Deterministic offline generator. `modes[attempt - 1]` selects the
/// behaviour (the last mode repeats).
#[derive(Debug, Clone)]
pub struct CannedGenerator {
    pub modes: Vec<CannedMode>,
}

const CANNED_TEXTS: [&str; 3] = [
    "Sorts the input values in descending order before printing them.",
    "Computes the product of every number read from the input.",
    "Returns early without output when the first value is negative.",
];

impl CannedGenerator {
    pub fn well_formed() -> Self {
        CannedGenerator { modes: vec![CannedMode::WellFormed] }
    }
}

impl MisleadingGenerator for CannedGenerator {
    fn model_id(&self) -> String {
        "canned".into()
    }

    fn generate(&self, request: &MisleadingRequest) -> Result<String, GeneratorError> {
        let idx = (request.attempt as usize).saturating_sub(1).min(self.modes.len().saturating_sub(1));
        let mode = self.modes.get(idx).copied().unwrap_or(CannedMode::WellFormed);
        let tree =
            syntax::parse(&request.code, request.language).map_err(|e| GeneratorError::Unavailable(e.to_string()))?;
        let wanted = if mode == CannedMode::TooFew { 1 } else { MAX_COMMENTS };
        let mut anchors: Vec<usize> = largest_blocks(&tree, wanted).into_iter().map(|r| r.start).collect();
        if anchors.len() < wanted.min(MIN_COMMENTS) {
            anchors.push(request.code.len());
        }
        if anchors.len() < MIN_COMMENTS && mode != CannedMode::TooFew {
            anchors.push(anchors.last().copied().unwrap_or(0));
        }
        let token = request.language.line_comment_token();
        let code = &request.code;
        let mut out = String::with_capacity(code.len() + 200);
        let mut pos = 0;
        for (i, anchor) in anchors.iter().enumerate() {
            out.push_str(&code[pos..*anchor]);
            let line_end = code[*anchor..].find('\n').map(|p| anchor + p).unwrap_or(code.len());
            let indent: String = code[*anchor..line_end].chars().take_while(|c| *c == ' ' || *c == '\t').collect();
            if *anchor == code.len() && !code.is_empty() && !code.ends_with('\n') {
                out.push('\n');
            }
            out.push_str(&format!("{indent}{token} {}\n", CANNED_TEXTS[i % CANNED_TEXTS.len()]));
            pos = *anchor;
        }
        out.push_str(&code[pos..]);
        match mode {
            CannedMode::WellFormed | CannedMode::TooFew => Ok(out),
            CannedMode::CorruptLine => {
                let line = out.lines().find(|l| !l.trim_start().starts_with(token) && !l.trim().is_empty());
                Ok(match line {
                    Some(l) => out.replacen(l, &format!("{l} {{"), 1),
                    None => out,
                })
            }
            CannedMode::DropLine => {
                let lines: Vec<&str> = out.split_inclusive('\n').collect();
                let victim = lines.iter().rposition(|l| !l.trim_start().starts_with(token) && !l.trim().is_empty());
                Ok(lines.iter().enumerate().filter(|(i, _)| Some(*i) != victim).map(|(_, l)| *l).collect())
            }
        }
    }
}

/// Check that `output` is `original` plus 2–3 whole-line comments. On
/// success returns the variant rebuilt from the original's own bytes and the
/// 0-based indices of the inserted lines.
pub fn check_misleading_output(
    original: &str,
    output: &str,
    language: Language,
) -> Result<(String, Vec<usize>), String> {
    let output = strip_fences(&output.replace("\r\n", "\n"));
    let token = language.line_comment_token();
    let orig_lines: Vec<&str> = original.split_inclusive('\n').collect();
    let mut comments: Vec<(usize, String)> = Vec::new();
    let mut i = 0;
    for line in output.split('\n') {
        if i < orig_lines.len() && line == orig_lines[i].trim_end_matches('\n') {
            i += 1;
            continue;
        }
        let trimmed = line.trim_start();
        if trimmed.starts_with(token) && !trimmed.ends_with('\\') && !trimmed.contains('\r') {
            comments.push((i, line.to_string()));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        return Err(format!("output line `{line}` is neither original code nor a line comment"));
    }
    if i < orig_lines.len() {
        let missing = orig_lines[i..].iter().any(|l| !l.trim().is_empty());
        if missing || orig_lines.len() - i > 1 {
            return Err(format!("original line {} is missing from the output", i + 1));
        }
    }
    if !(MIN_COMMENTS..=MAX_COMMENTS).contains(&comments.len()) {
        return Err(format!("expected {MIN_COMMENTS}-{MAX_COMMENTS} comment lines, found {}", comments.len()));
    }

    let mut rebuilt = String::with_capacity(original.len() + 256);
    let mut inserted = Vec::with_capacity(comments.len());
    let mut line_no = 0;
    let mut next = comments.iter().peekable();
    for (idx, line) in orig_lines.iter().enumerate() {
        while let Some((at, text)) = next.peek() {
            if *at != idx {
                break;
            }
            rebuilt.push_str(text);
            rebuilt.push('\n');
            inserted.push(line_no);
            line_no += 1;
            next.next();
        }
        rebuilt.push_str(line);
        line_no += 1;
    }
    for (_, text) in next {
        if !rebuilt.is_empty() && !rebuilt.ends_with('\n') {
            return Err("comment after a final line without newline".into());
        }
        rebuilt.push_str(text);
        rebuilt.push('\n');
        inserted.push(line_no);
        line_no += 1;
    }

    // Every inserted line must be exactly one comment token in the new tree.
    let tree = syntax::parse(&rebuilt, language).map_err(|e| e.to_string())?;
    let ranges = tree.comment_ranges();
    let starts: Vec<usize> = std::iter::once(0).chain(rebuilt.match_indices('\n').map(|(p, _)| p + 1)).collect();
    for &l in &inserted {
        let start = starts[l];
        let end = rebuilt[start..].find('\n').map(|p| start + p).unwrap_or(rebuilt.len());
        let text_start = start + (rebuilt[start..end].len() - rebuilt[start..end].trim_start().len());
        if !ranges.iter().any(|r| r.start == text_start && r.end == end) {
            return Err(format!("inserted line {} is not a single comment token", l + 1));
        }
    }
    Ok((rebuilt, inserted))
}

fn strip_fences(text: &str) -> String {
    let lines: Vec<&str> = text.lines().collect();
    let first = lines.iter().position(|l| l.trim_start().starts_with("```"));
    let last = lines.iter().rposition(|l| l.trim_start().starts_with("```"));
    match (first, last) {
        (Some(a), Some(b)) if b > a => {
            let mut s = lines[a + 1..b].join("\n");
            s.push('\n');
            s
        }
        _ => text.to_string(),
    }
}

pub fn inject_misleading_task(
    sample: &CodeSample,
    generator: &dyn MisleadingGenerator,
    max_attempts: u32,
    seed: u64,
) -> Result<BiasVariant, TransformError> {
    syntax::parse(&sample.source, sample.language)?;
    let mut last_output = String::new();
    let mut last_reason = String::new();
    for attempt in 1..=max_attempts {
        let request = MisleadingRequest {
            sample_id: sample.sample_id.clone(),
            language: sample.language,
            code: sample.source.clone(),
            attempt,
            seed,
        };
        let output = generator.generate(&request).map_err(|e| TransformError::GeneratorUnavailable(e.to_string()))?;
        match check_misleading_output(&sample.source, &output, sample.language) {
            Ok((source, lines)) => {
                let provenance = Provenance {
                    seed,
                    inserted_lines: Some(lines),
                    generator_model: Some(generator.model_id()),
                    attempts: Some(attempt),
                    ..Provenance::default()
                };
                return Ok(BiasVariant::new(sample, BiasKind::MisleadingTask, source, provenance));
            }
            Err(reason) => {
                last_output = output;
                last_reason = reason;
            }
        }
    }
    let provenance = Provenance {
        seed,
        generator_model: Some(generator.model_id()),
        attempts: Some(max_attempts),
        ..Provenance::default()
    };
    let mut variant = BiasVariant::new(sample, BiasKind::MisleadingTask, last_output, provenance);
    variant.validation_state = ValidationState::Flagged;
    variant.flag_reason = Some(format!("max attempts exceeded: {last_reason}"));
    Ok(variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;

    const PY: &str = "def read():\n    return list(map(int, input().split()))\n\n\ndef main():\n    xs = read()\n    total = 0\n    for x in xs:\n        total += x\n    print(total)\n\n\nmain()\n";

    fn sample() -> CodeSample {
        CodeSample {
            sample_id: "s".into(),
            problem_id: "p".into(),
            language: Language::Python,
            label: Label::Correct,
            source: PY.into(),
        }
    }

    #[test]
    fn well_formed_generator_inserts_comments() {
        let v = inject_misleading_task(&sample(), &CannedGenerator::well_formed(), 3, 0).unwrap();
        assert_eq!(v.validation_state, super::super::ValidationState::Unvalidated);
        let lines = v.provenance.inserted_lines.clone().unwrap();
        assert!((2..=3).contains(&lines.len()));
        assert_eq!(v.invert().unwrap(), PY);
        assert_eq!(v.provenance.attempts, Some(1));
    }

    #[test]
    fn corrupting_generator_is_flagged_after_three_attempts() {
        let g = CannedGenerator { modes: vec![CannedMode::CorruptLine] };
        let v = inject_misleading_task(&sample(), &g, 3, 0).unwrap();
        assert_eq!(v.validation_state, super::super::ValidationState::Flagged);
        assert_eq!(v.provenance.attempts, Some(3));
    }

    #[test]
    fn retry_succeeds_on_later_attempt() {
        let g = CannedGenerator { modes: vec![CannedMode::TooFew, CannedMode::WellFormed] };
        let v = inject_misleading_task(&sample(), &g, 3, 0).unwrap();
        assert_eq!(v.provenance.attempts, Some(2));
    }

    #[test]
    fn dropped_line_is_rejected() {
        let g = CannedGenerator { modes: vec![CannedMode::DropLine] };
        let out = g.generate(&MisleadingRequest {
            sample_id: "s".into(),
            language: Language::Python,
            code: PY.into(),
            attempt: 1,
            seed: 0,
        });
        assert!(check_misleading_output(PY, &out.unwrap(), Language::Python).is_err());
    }

    #[test]
    fn fenced_output_and_string_lookalikes() {
        let code = "s = '# x'\nprint(s)\n";
        let out = "```python\n# first\ns = '# x'\n# second\nprint(s)\n```\n";
        let (rebuilt, lines) = check_misleading_output(code, out, Language::Python).unwrap();
        assert_eq!(rebuilt, "# first\ns = '# x'\n# second\nprint(s)\n");
        assert_eq!(lines, vec![0, 2]);
    }

    #[test]
    fn comment_inside_multiline_string_is_rejected() {
        let code = "s = '''\nabc\n'''\nprint(s)\n";
        let out = "# one\ns = '''\n# two\nabc\n'''\nprint(s)\n";
        assert!(check_misleading_output(code, out, Language::Python).is_err());
    }
}
