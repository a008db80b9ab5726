//! Comment-based biases: self-declared correctness and (reverse) authority.

use serde::{Deserialize, Serialize};

use super::{BiasKind, BiasVariant, Provenance, TransformError};
use crate::corpus::CodeSample;
use crate::rng::SeededRng;
use crate::syntax::{self, comment_insertion_point};

pub const SELF_DECLARED_TEXT: &str = "correct code";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    Authority,
    ReverseAuthority,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentTemplate {
    pub id: String,
    pub kind: TemplateKind,
    pub text: String,
    /// `default-original` marks texts shipped with this tool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

/// Insert `// correct code` (or `# correct code`) as the first line.
pub fn inject_self_declared(sample: &CodeSample) -> Result<BiasVariant, TransformError> {
    let (source, line) = insert_comment_line(sample, SELF_DECLARED_TEXT)?;
    let provenance = Provenance { inserted_lines: Some(vec![line]), ..Provenance::default() };
    Ok(BiasVariant::new(sample, BiasKind::SelfDeclared, source, provenance))
}

pub fn inject_authority(
    sample: &CodeSample,
    templates: &[CommentTemplate],
    seed: u64,
) -> Result<BiasVariant, TransformError> {
    inject_template(sample, templates, TemplateKind::Authority, BiasKind::Authority, seed)
}

pub fn inject_reverse_authority(
    sample: &CodeSample,
    templates: &[CommentTemplate],
    seed: u64,
) -> Result<BiasVariant, TransformError> {
    inject_template(sample, templates, TemplateKind::ReverseAuthority, BiasKind::ReverseAuthority, seed)
}

fn inject_template(
    sample: &CodeSample,
    templates: &[CommentTemplate],
    kind: TemplateKind,
    bias: BiasKind,
    seed: u64,
) -> Result<BiasVariant, TransformError> {
    if templates.is_empty() {
        return Err(TransformError::EmptyTemplateSet);
    }
    if let Some(bad) = templates.iter().find(|t| t.kind != kind) {
        return Err(TransformError::WrongTemplateKind { id: bad.id.clone(), expected: kind, found: bad.kind });
    }
    if let Some(bad) = templates.iter().find(|t| t.text.contains(['\n', '\r'])) {
        return Err(TransformError::InvalidParameter(format!("template `{}` spans several lines", bad.id)));
    }
    let mut rng = SeededRng::new(seed, &format!("{}/{bias}", sample.sample_id));
    let index = rng.index(templates.len());
    let template = &templates[index];
    let (source, line) = insert_comment_line(sample, &template.text)?;
    let provenance = Provenance {
        seed,
        template_index: Some(index),
        template_id: Some(template.id.clone()),
        template_origin: template.origin.clone(),
        inserted_lines: Some(vec![line]),
        ..Provenance::default()
    };
    Ok(BiasVariant::new(sample, bias, source, provenance))
}

/// Insert one line comment at the language's comment insertion point.
/// Returns the new source and the 0-based index of the inserted line.
fn insert_comment_line(sample: &CodeSample, text: &str) -> Result<(String, usize), TransformError> {
    let tree = syntax::parse(&sample.source, sample.language)?;
    let offset = comment_insertion_point(&tree);
    let line = sample.source[..offset].matches('\n').count();
    let token = sample.language.line_comment_token();
    let mut out = String::with_capacity(sample.source.len() + text.len() + 4);
    out.push_str(&sample.source[..offset]);
    out.push_str(token);
    out.push(' ');
    out.push_str(text);
    out.push('\n');
    out.push_str(&sample.source[offset..]);
    Ok((out, line))
}

/// Delete the given 0-based line indices (each including its newline).
pub fn remove_lines(source: &str, lines: &[usize]) -> String {
    let mut out = String::with_capacity(source.len());
    for (i, line) in source.split_inclusive('\n').enumerate() {
        if !lines.contains(&i) {
            out.push_str(line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;
    use crate::language::Language;

    fn sample(language: Language, source: &str) -> CodeSample {
        CodeSample {
            sample_id: "s1".into(),
            problem_id: "p1".into(),
            language,
            label: Label::Correct,
            source: source.into(),
        }
    }

    fn templates(kind: TemplateKind, texts: &[&str]) -> Vec<CommentTemplate> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| CommentTemplate { id: format!("t{i}"), kind, text: (*t).into(), origin: None })
            .collect()
    }

    #[test]
    fn self_declared_prefixes_comment() {
        let py = inject_self_declared(&sample(Language::Python, "print(1)\n")).unwrap();
        assert_eq!(py.source, "# correct code\nprint(1)\n");
        let go = inject_self_declared(&sample(Language::Go, "package main\nfunc main() {}\n")).unwrap();
        assert!(go.source.starts_with("// correct code\npackage main"));
        assert_eq!(go.invert().unwrap(), "package main\nfunc main() {}\n");
    }

    #[test]
    fn reverse_authority_example_phrase() {
        let t = templates(TemplateKind::ReverseAuthority, &["I'm new to coding."]);
        let v = inject_reverse_authority(&sample(Language::Python, "x = 1\n"), &t, 5).unwrap();
        assert_eq!(v.source.lines().next(), Some("# I'm new to coding."));
        assert_eq!(v.provenance.template_index, Some(0));
    }

    #[test]
    fn authority_choice_is_seeded() {
        let t = templates(TemplateKind::Authority, &["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]);
        let s = sample(Language::Cpp, "int main(){}\n");
        let a = inject_authority(&s, &t, 11).unwrap();
        let b = inject_authority(&s, &t, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.provenance.template_index.unwrap() < 10);
        assert_eq!(a.invert().unwrap(), s.source);
    }

    #[test]
    fn template_errors() {
        let s = sample(Language::Cpp, "int main(){}\n");
        assert!(matches!(inject_authority(&s, &[], 1), Err(TransformError::EmptyTemplateSet)));
        let wrong = templates(TemplateKind::ReverseAuthority, &["x"]);
        assert!(matches!(inject_authority(&s, &wrong, 1), Err(TransformError::WrongTemplateKind { .. })));
    }

    #[test]
    fn hashbang_stays_first() {
        let v = inject_self_declared(&sample(Language::JavaScript, "#!/usr/bin/env node\nconsole.log(1);\n")).unwrap();
        assert_eq!(v.source, "#!/usr/bin/env node\n// correct code\nconsole.log(1);\n");
        assert_eq!(v.provenance.inserted_lines, Some(vec![1]));
    }
}
