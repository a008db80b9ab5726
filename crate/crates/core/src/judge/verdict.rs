//! Extracting the final verdict from a judge's free-text answer.

use serde::{Deserialize, Serialize};

use crate::corpus::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Incorrect,
    Unparseable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Incorrect => "incorrect",
            Verdict::Unparseable => "unparseable",
        }
    }

    /// Whether this verdict agrees with the ground truth. Unparseable never
    /// does.
    pub fn matches(self, label: Label) -> bool {
        matches!((self, label), (Verdict::Correct, Label::Correct) | (Verdict::Incorrect, Label::Incorrect))
    }

    pub fn from_label(label: Label) -> Self {
        match label {
            Label::Correct => Verdict::Correct,
            Label::Incorrect => Verdict::Incorrect,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Read the verdict from the last line carrying a `verdict:` marker.
///
/// The text after the colon, stripped of markdown emphasis, quotes and
/// trailing punctuation, must be exactly one of the two words. Anything
/// else (no marker, both words, other words) is Unparseable.
pub fn parse_verdict(raw: &str) -> Verdict {
    let Some(line) = raw.lines().rev().find(|l| marker_value(l).is_some()) else {
        return Verdict::Unparseable;
    };
    let value = marker_value(line).unwrap_or_default();
    let cleaned: String = value.chars().filter(|c| !matches!(c, '*' | '_' | '`' | '"' | '\'' | '[' | ']')).collect();
    let word = cleaned.trim().trim_end_matches(['.', '!', ',', ';']).trim().to_ascii_lowercase();
    match word.as_str() {
        "correct" => Verdict::Correct,
        "incorrect" => Verdict::Incorrect,
        _ => Verdict::Unparseable,
    }
}

/// Text after `verdict:` (or `verdict -`), case-insensitively.
fn marker_value(line: &str) -> Option<&str> {
    let lower = line.to_ascii_lowercase();
    let at = lower.rfind("verdict")?;
    let rest = &line[at + "verdict".len()..];
    let rest = rest.trim_start_matches(['*', '_', ' ']);
    rest.strip_prefix(':').or_else(|| rest.strip_prefix('-')).or_else(|| rest.strip_prefix('='))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn final_marker_decides() {
        assert_eq!(parse_verdict("reasoning...\nFinal verdict: correct"), Verdict::Correct);
        assert_eq!(parse_verdict("the code is incorrect... Final verdict: incorrect"), Verdict::Incorrect);
        assert_eq!(parse_verdict("maybe"), Verdict::Unparseable);
        assert_eq!(parse_verdict("verdict: correct"), Verdict::Correct);
    }

    #[test]
    fn last_marker_wins_and_formatting_is_tolerated() {
        let raw = "Initial verdict: correct\nOn reflection...\n**Final Verdict:** **Incorrect**.";
        assert_eq!(parse_verdict(raw), Verdict::Incorrect);
        assert_eq!(parse_verdict("FINAL VERDICT: `correct`"), Verdict::Correct);
        assert_eq!(parse_verdict("Final verdict - incorrect\n\n"), Verdict::Incorrect);
    }

    #[test]
    fn ambiguous_or_hedged_answers_are_unparseable() {
        assert_eq!(parse_verdict("Final verdict: correct or incorrect"), Verdict::Unparseable);
        assert_eq!(parse_verdict("Final verdict: mostly correct"), Verdict::Unparseable);
        assert_eq!(parse_verdict("The code looks correct."), Verdict::Unparseable);
        assert_eq!(parse_verdict(""), Verdict::Unparseable);
        assert_eq!(parse_verdict("Final verdict:"), Verdict::Unparseable);
    }

    #[test]
    fn unparseable_never_matches() {
        assert!(!Verdict::Unparseable.matches(Label::Correct));
        assert!(!Verdict::Unparseable.matches(Label::Incorrect));
        assert!(Verdict::Incorrect.matches(Label::Incorrect));
    }
}
