//! Shipped template and dummy-function data, and loaders for user files.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use super::{CommentTemplate, DummyFunction, TemplateKind, TransformError};

const TEMPLATES_JSONL: &str = include_str!("../../data/templates.jsonl");
const DUMMY_POOL_JSONL: &str = include_str!("../../data/dummy_pool.jsonl");

fn parse_jsonl<T: DeserializeOwned>(text: &str, what: &str) -> Result<Vec<T>, TransformError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| TransformError::InvalidParameter(format!("{what} line {}: {e}", i + 1)))
        })
        .collect()
}

/// Split templates by kind: `(authority, reverse_authority)`.
fn split(templates: Vec<CommentTemplate>) -> (Vec<CommentTemplate>, Vec<CommentTemplate>) {
    templates.into_iter().partition(|t| t.kind == TemplateKind::Authority)
}

/// The ten authority and ten reverse-authority texts shipped with the tool.
pub fn default_templates() -> (Vec<CommentTemplate>, Vec<CommentTemplate>) {
    split(parse_jsonl(TEMPLATES_JSONL, "templates").expect("bundled templates are valid"))
}

pub fn default_dummy_pool() -> Vec<DummyFunction> {
    parse_jsonl(DUMMY_POOL_JSONL, "dummy pool").expect("bundled dummy pool is valid")
}

pub fn load_templates(path: &Path) -> Result<(Vec<CommentTemplate>, Vec<CommentTemplate>), TransformError> {
    let text =
        fs::read_to_string(path).map_err(|e| TransformError::InvalidParameter(format!("{}: {e}", path.display())))?;
    Ok(split(parse_jsonl(&text, &path.display().to_string())?))
}

/// Load a dummy pool, checking every function parses standalone and
/// defines exactly one function.
pub fn load_dummy_pool(path: &Path) -> Result<Vec<DummyFunction>, TransformError> {
    let text =
        fs::read_to_string(path).map_err(|e| TransformError::InvalidParameter(format!("{}: {e}", path.display())))?;
    let pool: Vec<DummyFunction> = parse_jsonl(&text, &path.display().to_string())?;
    for d in &pool {
        d.check()?;
    }
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::Language;

    #[test]
    fn ten_templates_of_each_kind() {
        let (a, r) = default_templates();
        assert_eq!(a.len(), 10);
        assert_eq!(r.len(), 10);
        assert!(a.iter().chain(&r).all(|t| !t.text.contains('\n') && t.origin.as_deref() == Some("default-original")));
    }

    #[test]
    fn pool_has_ten_checked_functions_per_language() {
        let pool = default_dummy_pool();
        for lang in Language::ALL {
            let mine: Vec<&DummyFunction> = pool.iter().filter(|d| d.language == lang).collect();
            assert_eq!(mine.len(), 10, "{lang}");
            for d in &mine {
                d.check().unwrap_or_else(|e| panic!("{}: {e}", d.id));
            }
            let mean = mine.iter().map(|d| d.source.len()).sum::<usize>() as f64 / mine.len() as f64;
            for d in &mine {
                let ratio = d.source.len() as f64 / mean;
                assert!((0.8..=1.2).contains(&ratio), "{} length ratio {ratio:.2}", d.id);
            }
        }
    }
}
