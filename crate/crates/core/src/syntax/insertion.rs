//! Where new text may be inserted without breaking a file.

use std::ops::Range;

use tree_sitter::Node;

use super::{next_line_start, parse, SyntaxError, SyntaxTree};
use crate::language::{EntryStyle, Language};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionKind {
    /// A line comment placed at the top of the file.
    Comment,
    /// Unused helper functions.
    Dummy,
}

/// Placement of an inserted function block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DummyInsertion {
    pub offset: usize,
    /// Indentation applied to every inserted line.
    pub indent: String,
    /// Text placed before each function (`private static ` for Java methods).
    pub declaration_prefix: String,
    /// The insertion point is not at a line start, so a newline must come
    /// first.
    pub needs_leading_newline: bool,
}

/// Comments go at offset 0: every supported language accepts a line comment
/// before its first token. The one exception is a `#!` line, which must stay
/// first.
pub fn comment_insertion_point(tree: &SyntaxTree) -> usize {
    let source = tree.source();
    if source.starts_with("#!") {
        next_line_start(source, 0)
    } else {
        0
    }
}

pub fn insertion_point(source: &str, language: Language, kind: InsertionKind) -> Result<usize, SyntaxError> {
    let tree = parse(source, language)?;
    match kind {
        InsertionKind::Comment => Ok(comment_insertion_point(&tree)),
        InsertionKind::Dummy => dummy_insertion_point(&tree).map(|d| d.offset),
    }
}

pub fn dummy_insertion_point(tree: &SyntaxTree) -> Result<DummyInsertion, SyntaxError> {
    let source = tree.source();
    let at_line = |offset: usize| DummyInsertion {
        offset,
        indent: String::new(),
        declaration_prefix: String::new(),
        needs_leading_newline: offset > 0 && !source[..offset].ends_with('\n'),
    };
    let items = tree.top_level_items();
    match tree.language().profile().entry_style {
        EntryStyle::FreeTopLevel => {
            let prologue_end = match tree.language() {
                Language::Python => last_matching(tree, &items, |n, t| {
                    n.kind() == "future_import_statement" || (n.kind() == "expression_statement" && is_docstring(n, t))
                }),
                _ => last_matching(tree, &items, |n, t| {
                    n.kind() == "hash_bang_line" || (n.kind() == "expression_statement" && is_directive(n, t))
                }),
            };
            // a hashbang is a token, not an item, in some grammars
            let hashbang = if source.starts_with("#!") { next_line_start(source, 0) } else { 0 };
            Ok(at_line(prologue_end.map(|n| next_line_start(source, n.end_byte())).unwrap_or(0).max(hashbang)))
        }
        EntryStyle::AfterIncludes => {
            let mut end = None;
            for item in &items {
                match item.kind() {
                    "preproc_include" | "using_declaration" => end = Some(*item),
                    _ => break,
                }
            }
            Ok(at_line(end.map(|n| line_end_after(source, n)).unwrap_or(0)))
        }
        EntryStyle::AfterPackageAndImports => {
            let anchor = items
                .iter()
                .rfind(|n| n.kind() == "import_declaration")
                .or_else(|| items.iter().find(|n| n.kind() == "package_clause"))
                .ok_or_else(|| SyntaxError::NoInsertionPoint {
                    language: tree.language(),
                    reason: "no package clause".into(),
                })?;
            Ok(at_line(line_end_after(source, *anchor)))
        }
        EntryStyle::InsidePrimaryClass => {
            let class = primary_class(tree, &items).ok_or_else(|| SyntaxError::NoInsertionPoint {
                language: tree.language(),
                reason: "no top-level class".into(),
            })?;
            let body = class.child_by_field_name("body").ok_or_else(|| SyntaxError::NoInsertionPoint {
                language: tree.language(),
                reason: "class without body".into(),
            })?;
            Ok(DummyInsertion {
                offset: body.start_byte() + 1,
                indent: "    ".into(),
                declaration_prefix: "private static ".into(),
                needs_leading_newline: true,
            })
        }
    }
}

/// Start of the line after `node` ends (nodes like `#include` include their
/// newline already).
fn line_end_after(source: &str, node: Node<'_>) -> usize {
    let end = node.end_byte();
    if end > 0 && source.as_bytes()[end - 1] == b'\n' {
        end
    } else {
        next_line_start(source, end)
    }
}

fn last_matching<'t>(
    tree: &'t SyntaxTree,
    items: &[Node<'t>],
    pred: impl Fn(Node<'t>, &str) -> bool,
) -> Option<Node<'t>> {
    let mut last = None;
    for item in items {
        if pred(*item, tree.text(*item)) {
            last = Some(*item);
        } else {
            break;
        }
    }
    last
}

fn is_docstring(node: Node<'_>, _text: &str) -> bool {
    node.named_child(0).is_some_and(|c| c.kind() == "string") && node.named_child_count() == 1
}

fn is_directive(node: Node<'_>, text: &str) -> bool {
    node.named_child(0).is_some_and(|c| c.kind() == "string")
        && node.named_child_count() == 1
        && text.trim_end_matches(';').trim_matches(|c| c == '"' || c == '\'').starts_with("use ")
}

/// The class a Java file is run through: the public one, else the one with
/// `main`, else the first.
pub(crate) fn primary_class<'t>(tree: &'t SyntaxTree, items: &[Node<'t>]) -> Option<Node<'t>> {
    let classes: Vec<Node<'t>> = items.iter().copied().filter(|n| n.kind() == "class_declaration").collect();
    let is_public = |n: &Node<'t>| {
        let mut cursor = n.walk();
        let public = n
            .children(&mut cursor)
            .find(|c| c.kind() == "modifiers")
            .is_some_and(|m| tree.text(m).split_whitespace().any(|w| w == "public"));
        public
    };
    let has_main = |n: &Node<'t>| {
        n.child_by_field_name("body").is_some_and(|body| {
            let mut cursor = body.walk();
            let found = body.named_children(&mut cursor).any(|m| {
                m.kind() == "method_declaration"
                    && m.child_by_field_name("name").is_some_and(|name| tree.text(name) == "main")
            });
            found
        })
    };
    classes
        .iter()
        .find(|n| is_public(n))
        .or_else(|| classes.iter().find(|n| has_main(n)))
        .or_else(|| classes.first())
        .copied()
}

/// The name of the class a Java file must be saved and run as.
pub fn java_primary_class_name(tree: &SyntaxTree) -> Option<String> {
    let items = tree.top_level_items();
    let class = primary_class(tree, &items)?;
    class.child_by_field_name("name").map(|n| tree.text(n).to_string())
}

/// Line-start offsets of the `n` largest code blocks (functions, classes,
/// methods of a Java primary class), returned in document order. Ties keep
/// the earlier block.
pub fn largest_blocks(tree: &SyntaxTree, n: usize) -> Vec<Range<usize>> {
    let items = tree.top_level_items();
    let candidates: Vec<Node<'_>> = if tree.language() == Language::Java {
        match primary_class(tree, &items).and_then(|c| c.child_by_field_name("body")) {
            Some(body) => {
                let mut cursor = body.walk();
                let members: Vec<Node<'_>> =
                    body.named_children(&mut cursor).filter(|m| !super::is_comment_kind(m.kind())).collect();
                members
            }
            None => items,
        }
    } else {
        items
            .into_iter()
            .filter(|n| {
                !matches!(n.kind(), "preproc_include" | "using_declaration" | "package_clause" | "import_declaration")
            })
            .collect()
    };
    let source = tree.source();
    let mut ranked: Vec<(usize, Range<usize>)> = candidates
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let start = source[..node.start_byte()].rfind('\n').map(|p| p + 1).unwrap_or(0);
            (i, start..node.end_byte())
        })
        .collect();
    ranked.sort_by(|a, b| (b.1.len()).cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    ranked.truncate(n);
    ranked.sort_by_key(|(i, _)| *i);
    let mut out: Vec<Range<usize>> = ranked.into_iter().map(|(_, r)| r).collect();
    // two blocks on one line share an anchor; keep one
    out.dedup_by_key(|r| r.start);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dummy_at(src: &str, lang: Language) -> usize {
        insertion_point(src, lang, InsertionKind::Dummy).unwrap()
    }

    #[test]
    fn comment_point_is_file_start() {
        for lang in Language::ALL {
            assert_eq!(insertion_point("", lang, InsertionKind::Comment).ok(), Some(0));
        }
    }

    #[test]
    fn cpp_dummies_follow_includes() {
        let src = "#include <iostream>\nusing namespace std;\nint main(){return 0;}\n";
        assert_eq!(dummy_at(src, Language::Cpp), src.find("int main").unwrap());
        assert_eq!(dummy_at("int main(){}\n", Language::Cpp), 0);
    }

    #[test]
    fn go_dummies_follow_imports() {
        let src = "package main\n\nimport (\n\t\"fmt\"\n)\n\nfunc main() { fmt.Println(1) }\n";
        let at = dummy_at(src, Language::Go);
        assert_eq!(&src[..at], "package main\n\nimport (\n\t\"fmt\"\n)\n");
        let bare = "package main\nfunc main() {}\n";
        assert_eq!(dummy_at(bare, Language::Go), "package main\n".len());
    }

    #[test]
    fn python_skips_future_imports() {
        let src = "from __future__ import annotations\nx = 1\n";
        assert_eq!(dummy_at(src, Language::Python), src.find("x = 1").unwrap());
        assert_eq!(dummy_at("x = 1\n", Language::Python), 0);
    }

    #[test]
    fn javascript_skips_directive_and_hashbang() {
        let src = "#!/usr/bin/env node\n'use strict';\nconsole.log(1);\n";
        assert_eq!(dummy_at(src, Language::JavaScript), src.find("console").unwrap());
    }

    #[test]
    fn java_goes_inside_public_class() {
        let src = "class Helper {}\npublic class Main {\n  public static void main(String[] a) {}\n}\n";
        let tree = parse(src, Language::Java).unwrap();
        let d = dummy_insertion_point(&tree).unwrap();
        assert_eq!(&src[d.offset - 1..d.offset], "{");
        assert!(src[..d.offset].ends_with("public class Main {"));
        assert_eq!(java_primary_class_name(&tree).as_deref(), Some("Main"));
    }

    #[test]
    fn java_without_class_has_no_point() {
        let tree = parse("interface I {}\n", Language::Java).unwrap();
        assert!(matches!(dummy_insertion_point(&tree), Err(SyntaxError::NoInsertionPoint { .. })));
    }

    #[test]
    fn largest_blocks_pick_biggest_in_order() {
        let src = "def a():\n    return 1\n\ndef b():\n    x = 1\n    y = 2\n    return x + y\n\ndef c():\n    z = 3\n    return z\n";
        let tree = parse(src, Language::Python).unwrap();
        let blocks = largest_blocks(&tree, 2);
        let starts: Vec<&str> = blocks.iter().map(|r| &src[r.start..r.start + 5]).collect();
        assert_eq!(starts, ["def b", "def c"]);
    }
}
