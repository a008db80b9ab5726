//! Per-language syntactic services built on tree-sitter grammars.
//!
//! Everything the transforms need from a parser lives here: full-source
//! parsing with error locations, comment token ranges, declared function
//! names, scope-conservative identifier collection and the offsets where new
//! comments or functions may be inserted.

mod identifiers;
mod insertion;

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use tree_sitter::{Node, Parser, Tree};

use crate::language::Language;

pub use identifiers::{collect_in as identifiers_of, collect_renameable_identifiers, ExclusionReason, IdentifierSet};
pub use insertion::{
    comment_insertion_point, dummy_insertion_point, insertion_point, java_primary_class_name, largest_blocks,
    DummyInsertion, InsertionKind,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub language: Language,
    /// 1-based line of the first error or missing node.
    pub line: usize,
    /// 1-based column (in bytes).
    pub column: usize,
    pub byte: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} parse error at line {}, column {}: {}", self.language, self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{language}: no legal insertion point ({reason})")]
    NoInsertionPoint { language: Language, reason: String },
}

fn grammar(language: Language) -> tree_sitter::Language {
    match language {
        Language::Cpp => tree_sitter_cpp::LANGUAGE.into(),
        Language::Python => tree_sitter_python::LANGUAGE.into(),
        Language::Java => tree_sitter_java::LANGUAGE.into(),
        Language::JavaScript => tree_sitter_javascript::LANGUAGE.into(),
        Language::Go => tree_sitter_go::LANGUAGE.into(),
    }
}

thread_local! {
    static PARSERS: RefCell<HashMap<Language, Parser>> = RefCell::new(HashMap::new());
}

/// A parsed file. Owns a copy of the source so node text can be resolved.
pub struct SyntaxTree {
    language: Language,
    source: String,
    tree: Tree,
}

impl fmt::Debug for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyntaxTree").field("language", &self.language).field("bytes", &self.source.len()).finish()
    }
}

/// Parse `source` in `language`. Fails on the first ERROR or MISSING node.
pub fn parse(source: &str, language: Language) -> Result<SyntaxTree, ParseError> {
    let tree = PARSERS.with(|cell| {
        let mut parsers = cell.borrow_mut();
        let parser = parsers.entry(language).or_insert_with(|| {
            let mut p = Parser::new();
            p.set_language(&grammar(language)).expect("grammar ABI is compatible with the linked tree-sitter runtime");
            p
        });
        parser.parse(source, None)
    });
    let tree = tree.ok_or_else(|| ParseError {
        language,
        line: 1,
        column: 1,
        byte: 0,
        message: "parser returned no tree".into(),
    })?;
    let root = tree.root_node();
    if root.has_error() {
        let bad = first_error(root).unwrap_or(root);
        let pos = bad.start_position();
        let message = if bad.is_missing() {
            format!("missing `{}`", bad.kind())
        } else {
            let snippet: String = source[bad.byte_range()].chars().take(40).collect();
            format!("unexpected `{}`", snippet.lines().next().unwrap_or(""))
        };
        return Err(ParseError {
            language,
            line: pos.row + 1,
            column: pos.column + 1,
            byte: bad.start_byte(),
            message,
        });
    }
    Ok(SyntaxTree { language, source: source.to_string(), tree })
}

fn first_error(node: Node<'_>) -> Option<Node<'_>> {
    if node.is_error() || node.is_missing() {
        return Some(node);
    }
    if !node.has_error() {
        return None;
    }
    let mut cursor = node.walk();
    let children: Vec<Node<'_>> = node.children(&mut cursor).collect();
    children.into_iter().find_map(first_error)
}

impl SyntaxTree {
    pub fn language(&self) -> Language {
        self.language
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    pub fn text(&self, node: Node<'_>) -> &str {
        &self.source[node.byte_range()]
    }

    /// Named top-level items, comments excluded.
    pub fn top_level_items(&self) -> Vec<Node<'_>> {
        let root = self.root();
        let mut cursor = root.walk();
        root.named_children(&mut cursor).filter(|n| !is_comment_kind(n.kind())).collect()
    }

    /// Every node in document order.
    pub fn nodes(&self) -> Vec<Node<'_>> {
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(node) = stack.pop() {
            out.push(node);
            let mut cursor = node.walk();
            let children: Vec<Node<'_>> = node.children(&mut cursor).collect();
            stack.extend(children.into_iter().rev());
        }
        out
    }

    /// Byte ranges of all comment tokens, in document order.
    pub fn comment_ranges(&self) -> Vec<Range<usize>> {
        self.nodes().into_iter().filter(|n| is_comment_kind(n.kind())).map(|n| n.byte_range()).collect()
    }

    /// Identifier-shaped leaf tokens (any kind, keywords included).
    pub fn identifier_tokens(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for node in self.nodes() {
            if node.child_count() == 0 || node.kind() == "preproc_arg" {
                let text = self.text(node);
                if node.kind() == "preproc_arg" {
                    out.extend(lex_words(text).into_iter().map(|(_, w)| w.to_string()));
                } else if is_identifier_shaped(text) {
                    out.insert(text.to_string());
                }
            }
        }
        out
    }
}

pub(crate) fn is_comment_kind(kind: &str) -> bool {
    matches!(kind, "comment" | "line_comment" | "block_comment" | "html_comment")
}

pub(crate) fn is_identifier_shaped(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

/// Identifier-shaped words in raw text (used for macro bodies).
pub(crate) fn lex_words(text: &str) -> Vec<(usize, &str)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, &text[start..i]));
        } else if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'.') {
                i += 1;
            }
        } else {
            i += 1;
        }
    }
    out
}

/// The child of `parent` that is `node`, by field name.
pub(crate) fn field_of<'t>(node: Node<'t>) -> Option<&'t str> {
    let parent = node.parent()?;
    let mut cursor = parent.walk();
    let mut found = None;
    for (i, child) in parent.children(&mut cursor).enumerate() {
        if child.id() == node.id() {
            found = parent.field_name_for_child(i as u32);
            break;
        }
    }
    found
}

/// Declared function and method names.
pub fn function_names(source: &str, language: Language) -> Result<BTreeSet<String>, ParseError> {
    let tree = parse(source, language)?;
    Ok(function_names_in(&tree))
}

pub(crate) fn function_names_in(tree: &SyntaxTree) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    for node in tree.nodes() {
        let name_node = match (tree.language, node.kind()) {
            (Language::Python, "function_definition") => node.child_by_field_name("name"),
            (Language::Java, "method_declaration" | "constructor_declaration") => node.child_by_field_name("name"),
            (
                Language::JavaScript,
                "function_declaration"
                | "generator_function_declaration"
                | "function_expression"
                | "generator_function"
                | "method_definition",
            ) => node.child_by_field_name("name"),
            (Language::Go, "function_declaration" | "method_declaration") => node.child_by_field_name("name"),
            (Language::Cpp, "function_declarator") => cpp_function_declarator_name(tree, node),
            _ => None,
        };
        if let Some(n) = name_node {
            let text = tree.text(n);
            if is_identifier_shaped(text) {
                names.insert(text.to_string());
            }
        }
    }
    names
}

/// For a C++ `function_declarator`, the declared name when it really declares
/// a function (definition or namespace/class-scope prototype). Local
/// declarations that parse as function declarators are variable
/// constructions (`vector<int> v(n);`) and yield `None`.
pub(crate) fn cpp_function_declarator_name<'t>(tree: &'t SyntaxTree, decl: Node<'t>) -> Option<Node<'t>> {
    let mut owner = decl.parent()?;
    while matches!(
        owner.kind(),
        "pointer_declarator" | "reference_declarator" | "parenthesized_declarator" | "attributed_declarator"
    ) {
        owner = owner.parent()?;
    }
    let is_function = match owner.kind() {
        "function_definition" | "field_declaration" | "friend_declaration" => true,
        "declaration" | "init_declarator" => !cpp_in_block(owner),
        _ => false,
    };
    if !is_function {
        return None;
    }
    let target = decl.child_by_field_name("declarator")?;
    let name = match target.kind() {
        "identifier" | "field_identifier" => target,
        "qualified_identifier" => {
            let mut n = target;
            while let Some(inner) = n.child_by_field_name("name") {
                n = inner;
            }
            n
        }
        _ => return None,
    };
    let _ = tree;
    Some(name)
}

pub(crate) fn cpp_in_block(node: Node<'_>) -> bool {
    let mut cur = node.parent();
    while let Some(n) = cur {
        match n.kind() {
            "compound_statement" => return true,
            "translation_unit" | "namespace_definition" | "field_declaration_list" => return false,
            _ => {}
        }
        cur = n.parent();
    }
    false
}

/// Byte offset of the start of the line after the one containing `offset`
/// (or the end of the source).
pub(crate) fn next_line_start(source: &str, offset: usize) -> usize {
    match source[offset..].find('\n') {
        Some(i) => offset + i + 1,
        None => source.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source_has_no_items() {
        for lang in Language::ALL {
            let tree = parse("", lang).unwrap();
            assert!(tree.top_level_items().is_empty(), "{lang}");
        }
    }

    #[test]
    fn cpp_main_is_one_function_definition() {
        let tree = parse("int main(){return 0;}", Language::Cpp).unwrap();
        let items = tree.top_level_items();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].kind(), "function_definition");
    }

    #[test]
    fn python_error_reports_its_line() {
        let src = "x = 1\ny = 2\nif x\n    z = 3\n";
        let err = parse(src, Language::Python).unwrap_err();
        assert_eq!(err.language, Language::Python);
        assert_eq!(err.line, 3, "{err}");
    }

    #[test]
    fn missing_brace_is_a_parse_error() {
        assert!(parse("int main() { return 0;", Language::Cpp).is_err());
        assert!(parse("package main\nfunc main() {\n", Language::Go).is_err());
    }

    #[test]
    fn function_names_cover_nested_definitions() {
        let src = "def solve():\n    def helper():\n        return 1\n    return helper()\n";
        let names = function_names(src, Language::Python).unwrap();
        assert_eq!(names, BTreeSet::from(["solve".to_string(), "helper".to_string()]));
    }

    #[test]
    fn function_names_main_only_and_empty() {
        let names = function_names("int main(){return 0;}", Language::Cpp).unwrap();
        assert_eq!(names, BTreeSet::from(["main".to_string()]));
        for lang in Language::ALL {
            assert!(function_names("", lang).unwrap().is_empty());
        }
    }

    #[test]
    fn cpp_vexing_declaration_is_not_a_function() {
        let src = "#include <vector>\nint main(){ int n = 3; std::vector<int> v(n); return v.size(); }";
        let names = function_names(src, Language::Cpp).unwrap();
        assert_eq!(names, BTreeSet::from(["main".to_string()]));
    }

    #[test]
    fn comments_are_found_in_every_language() {
        let cases = [
            (Language::Cpp, "int a; // x\n/* y */\n"),
            (Language::Python, "a = 1  # x\n"),
            (Language::Java, "class A { // x\n /* y */ }\n"),
            (Language::JavaScript, "let a = 1; // x\n/* y */\n"),
            (Language::Go, "package main // x\n/* y */\n"),
        ];
        for (lang, src) in cases {
            let tree = parse(src, lang).unwrap();
            assert!(!tree.comment_ranges().is_empty(), "{lang}");
        }
    }
}
