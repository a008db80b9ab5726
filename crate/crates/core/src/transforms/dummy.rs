//! Illusory complexity: unused, self-contained helper functions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{BiasKind, BiasVariant, Provenance, TransformError};
use crate::corpus::CodeSample;
use crate::language::{EntryStyle, Language};
use crate::rng::SeededRng;
use crate::syntax::{self, dummy_insertion_point, identifiers_of, SyntaxTree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DummyFunction {
    pub id: String,
    pub language: Language,
    pub name: String,
    /// One function definition (for Java, a method without modifiers).
    pub source: String,
    pub description: String,
}

impl DummyFunction {
    /// Text that parses as a whole file for the dummy's language.
    fn standalone(&self) -> (String, usize) {
        match self.language.profile().entry_style {
            EntryStyle::InsidePrimaryClass => {
                (format!("class DummyHost {{\n{}\n}}\n", self.source), "class DummyHost {\n".len())
            }
            EntryStyle::AfterPackageAndImports => {
                (format!("package main\n\n{}\n", self.source), "package main\n\n".len())
            }
            _ => (format!("{}\n", self.source), 0),
        }
    }

    /// The function parses on its own and defines exactly one function
    /// named `name`.
    pub fn check(&self) -> Result<(), TransformError> {
        let (text, _) = self.standalone();
        let tree = syntax::parse(&text, self.language)?;
        let names = syntax::function_names(&text, self.language)?;
        if names.len() != 1 || !names.contains(&self.name) {
            return Err(TransformError::InvalidParameter(format!(
                "dummy `{}` must define exactly one function named `{}` (found {:?})",
                self.id, self.name, names
            )));
        }
        let items = tree.top_level_items();
        let expected_items = if self.language == Language::Go { 2 } else { 1 };
        if items.len() != expected_items {
            return Err(TransformError::InvalidParameter(format!(
                "dummy `{}` has top-level statements besides its function",
                self.id
            )));
        }
        Ok(())
    }

    /// Rename the names this function declares (itself, its parameters and
    /// locals) wherever they appear in `renames`.
    fn renamed(&self, renames: &BTreeMap<String, String>) -> Result<String, TransformError> {
        if renames.is_empty() {
            return Ok(self.source.clone());
        }
        let (text, prefix) = self.standalone();
        let tree = syntax::parse(&text, self.language)?;
        let mut out = String::with_capacity(self.source.len());
        let mut pos = prefix;
        for node in tree.nodes() {
            if node.kind() != "identifier" || node.start_byte() < prefix || node.end_byte() > prefix + self.source.len()
            {
                continue;
            }
            if let Some(new) = renames.get(tree.text(node)) {
                out.push_str(&text[pos..node.start_byte()]);
                out.push_str(new);
                pos = node.end_byte();
            }
        }
        out.push_str(&text[pos..prefix + self.source.len()]);
        Ok(out)
    }

    /// Names declared by the function: its own name plus renameable locals.
    fn declared_names(&self) -> Result<BTreeSet<String>, TransformError> {
        let (text, _) = self.standalone();
        let tree = syntax::parse(&text, self.language)?;
        let mut names: BTreeSet<String> = identifiers_of(&tree).renameable.into_keys().collect();
        names.insert(self.name.clone());
        Ok(names)
    }

    fn identifier_tokens(&self) -> Result<BTreeSet<String>, TransformError> {
        let (text, _) = self.standalone();
        Ok(syntax::parse(&text, self.language)?.identifier_tokens())
    }
}

/// Insert `count` distinct dummy functions from `pool` at the language's
/// dummy insertion point.
pub fn inject_illusory_complexity(
    sample: &CodeSample,
    pool: &[DummyFunction],
    count: usize,
    seed: u64,
) -> Result<BiasVariant, TransformError> {
    let bias = BiasKind::IllusoryComplexity { count };
    let language = sample.language;
    let candidates: Vec<&DummyFunction> = pool.iter().filter(|d| d.language == language).collect();
    if candidates.len() < count {
        return Err(TransformError::PoolTooSmall { language, needed: count, available: candidates.len() });
    }
    let tree = syntax::parse(&sample.source, language)?;
    if count == 0 {
        let provenance = Provenance {
            seed,
            dummy_function_ids: Some(Vec::new()),
            inserted_spans: Some(Vec::new()),
            ..Provenance::default()
        };
        return Ok(BiasVariant::new(sample, bias, sample.source.clone(), provenance));
    }
    let mut rng = SeededRng::new(seed, &format!("{}/{bias}", sample.sample_id));
    let chosen: Vec<&DummyFunction> =
        rng.sample_indices(candidates.len(), count).into_iter().map(|i| candidates[i]).collect();

    // Every name a dummy declares must be new to the file and to the other
    // dummies; clashing ones get a numeric suffix.
    let mut taken = tree.identifier_tokens();
    taken.extend(syntax::function_names_in(&tree));
    for d in &chosen {
        taken.extend(d.identifier_tokens()?);
    }
    let mut claimed: BTreeSet<String> = BTreeSet::new();
    let mut bodies = Vec::with_capacity(count);
    let mut final_names = Vec::with_capacity(count);
    let source_tokens = tree.identifier_tokens();
    for d in &chosen {
        let mut renames = BTreeMap::new();
        for name in d.declared_names()? {
            if source_tokens.contains(&name) || claimed.contains(&name) {
                let fresh =
                    (2..).map(|k| format!("{name}{k}")).find(|c| !taken.contains(c)).expect("unbounded suffix search");
                taken.insert(fresh.clone());
                renames.insert(name, fresh);
            }
        }
        let body = d.renamed(&renames)?;
        let final_name = renames.get(&d.name).cloned().unwrap_or_else(|| d.name.clone());
        claimed.extend(d.declared_names()?.into_iter().map(|n| renames.get(&n).cloned().unwrap_or(n)));
        final_names.push(final_name);
        bodies.push(body);
    }

    let point = dummy_insertion_point(&tree)?;
    let mut pieces = Vec::with_capacity(count);
    for (i, body) in bodies.iter().enumerate() {
        let mut piece = String::new();
        if point.indent.is_empty() {
            if i == 0 && point.needs_leading_newline {
                piece.push('\n');
            }
            piece.push_str(body.trim_end_matches('\n'));
            piece.push_str("\n\n");
        } else {
            piece.push('\n');
            let text = format!("{}{}", point.declaration_prefix, body.trim_end_matches('\n'));
            for (j, line) in text.lines().enumerate() {
                if j > 0 {
                    piece.push('\n');
                }
                if !line.is_empty() {
                    piece.push_str(&point.indent);
                }
                piece.push_str(line);
            }
            piece.push('\n');
        }
        pieces.push(piece);
    }

    let mut source = String::with_capacity(sample.source.len() + pieces.iter().map(String::len).sum::<usize>());
    source.push_str(&sample.source[..point.offset]);
    let mut spans = Vec::with_capacity(count);
    for piece in &pieces {
        let start = source.len();
        source.push_str(piece);
        spans.push((start, source.len()));
    }
    source.push_str(&sample.source[point.offset..]);

    check_isolation(&tree, &source, language, &spans, &final_names)?;

    let provenance = Provenance {
        seed,
        dummy_function_ids: Some(chosen.iter().map(|d| d.id.clone()).collect()),
        inserted_spans: Some(spans),
        ..Provenance::default()
    };
    Ok(BiasVariant::new(sample, bias, source, provenance))
}

/// Delete byte spans (sorted, non-overlapping) from `source`.
pub fn remove_spans(source: &str, spans: &[(usize, usize)]) -> String {
    let mut out = String::with_capacity(source.len());
    let mut pos = 0;
    for (start, end) in spans {
        out.push_str(&source[pos..*start]);
        pos = *end;
    }
    out.push_str(&source[pos..]);
    out
}

/// The variant parses, every original name keeps exactly its original
/// occurrences and classification, and no inserted function is referenced
/// outside its own definition.
fn check_isolation(
    original: &SyntaxTree,
    variant: &str,
    language: Language,
    spans: &[(usize, usize)],
    dummy_names: &[String],
) -> Result<(), TransformError> {
    let tree = syntax::parse(variant, language)?;
    let before = identifiers_of(original);
    let after = identifiers_of(&tree);
    let inside = |offset: usize| spans.iter().any(|(s, e)| offset >= *s && offset < *e);
    let to_original = |offset: usize| {
        let shift: usize = spans.iter().filter(|(s, _)| *s <= offset).map(|(s, e)| e - s).sum();
        offset - shift
    };

    for (name, ranges) in &before.renameable {
        let Some(now) = after.renameable.get(name) else {
            return Err(TransformError::IsolationViolated(format!("`{name}` is no longer renameable")));
        };
        let mapped: Vec<_> = now.iter().map(|r| to_original(r.start)..to_original(r.end)).collect();
        if now.iter().any(|r| inside(r.start)) || &mapped != ranges {
            return Err(TransformError::IsolationViolated(format!("occurrences of `{name}` changed")));
        }
    }
    for (name, reason) in &before.excluded {
        if after.excluded.get(name) != Some(reason) {
            return Err(TransformError::IsolationViolated(format!("classification of `{name}` changed")));
        }
    }
    for (i, name) in dummy_names.iter().enumerate() {
        let (start, end) = spans[i];
        for node in tree.nodes() {
            if node.child_count() == 0
                && tree.text(node) == name
                && (node.start_byte() < start || node.end_byte() > end)
            {
                return Err(TransformError::IsolationViolated(format!(
                    "dummy `{name}` is referenced outside its definition"
                )));
            }
        }
    }
    Ok(())
}
