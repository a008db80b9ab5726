//! Conservative, per-file identifier classification.
//!
//! A name is renameable only when it is declared somewhere in the file as a
//! variable (local, file-level, loop variable or parameter) and never shows
//! up in a position whose meaning depends on the name itself: member access,
//! keyword arguments, imports, type names, macros, reflective lookups. All
//! occurrences of a renameable name are rewritten together, so shadowed
//! bindings that share a name share one replacement.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use tree_sitter::Node;

use super::{
    cpp_function_declarator_name, cpp_in_block, field_of, function_names_in, lex_words, parse, ParseError, SyntaxTree,
};
use crate::language::{Language, LanguageProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExclusionReason {
    Reserved,
    /// Reflective or textual use (eval/exec, macros) makes binding unprovable.
    Dynamic,
    FunctionName,
    TypeName,
    Imported,
    Field,
    /// Language builtin, or a name never bound in this file.
    Builtin,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifierSet {
    /// Name → byte ranges of every occurrence, ascending.
    pub renameable: BTreeMap<String, Vec<Range<usize>>>,
    pub excluded: BTreeMap<String, ExclusionReason>,
}

impl IdentifierSet {
    pub fn is_empty(&self) -> bool {
        self.renameable.is_empty() && self.excluded.is_empty()
    }

    pub fn renameable_names(&self) -> impl Iterator<Item = &str> {
        self.renameable.keys().map(String::as_str)
    }

    /// Every occurrence of every renameable name, ascending by offset.
    pub fn all_occurrences(&self) -> Vec<(Range<usize>, &str)> {
        let mut out: Vec<(Range<usize>, &str)> = self
            .renameable
            .iter()
            .flat_map(|(name, ranges)| ranges.iter().map(move |r| (r.clone(), name.as_str())))
            .collect();
        out.sort_by_key(|(r, _)| r.start);
        out
    }
}

pub fn collect_renameable_identifiers(source: &str, language: Language) -> Result<IdentifierSet, ParseError> {
    let tree = parse(source, language)?;
    Ok(collect_in(&tree))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Decl,
    Ref,
    Unsafe(ExclusionReason),
    /// Not an occurrence of a file-level name (macro parameters).
    Skip,
}

#[derive(Default)]
struct Facts {
    declared: BTreeSet<String>,
    occurrences: BTreeMap<String, Vec<Range<usize>>>,
    reasons: BTreeMap<String, BTreeSet<ExclusionReason>>,
    seen: BTreeSet<String>,
    dynamic: bool,
}

impl Facts {
    fn exclude(&mut self, name: &str, reason: ExclusionReason) {
        self.seen.insert(name.to_string());
        self.reasons.entry(name.to_string()).or_default().insert(reason);
    }

    fn occurrence(&mut self, name: &str, range: Range<usize>) {
        self.seen.insert(name.to_string());
        self.occurrences.entry(name.to_string()).or_default().push(range);
    }
}

/// Identifier analysis of an already parsed tree.
pub fn collect_in(tree: &SyntaxTree) -> IdentifierSet {
    let language = tree.language();
    let profile = LanguageProfile::for_language(language);
    let functions = function_names_in(tree);
    let mut facts = Facts::default();

    let nodes = tree.nodes();
    let cpp_types = if language == Language::Cpp { cpp_declared_types(tree, &nodes) } else { BTreeSet::new() };
    let go_packages = if language == Language::Go { go_imported_packages(tree, &nodes) } else { BTreeSet::new() };
    for name in &go_packages {
        facts.exclude(name, ExclusionReason::Imported);
    }

    for node in &nodes {
        let node = *node;
        let kind = node.kind();
        let text = tree.text(node);
        if is_variable_identifier(kind) {
            let role = match language {
                Language::Python => python_role(node),
                Language::Cpp => cpp_role(tree, node),
                Language::Java => java_role(node, text, &functions),
                Language::JavaScript => js_role(tree, node),
                Language::Go => go_role(node),
            };
            match role {
                Role::Decl => {
                    facts.declared.insert(text.to_string());
                    facts.occurrence(text, node.byte_range());
                }
                Role::Ref => facts.occurrence(text, node.byte_range()),
                Role::Unsafe(reason) => facts.exclude(text, reason),
                Role::Skip => {}
            }
            if is_dynamic_call(language, node, text) {
                facts.dynamic = true;
            }
            continue;
        }
        other_kind_facts(tree, node, language, &cpp_types, &mut facts);
    }

    let mut set = IdentifierSet::default();
    for name in facts.seen.clone() {
        let mut reasons: BTreeSet<ExclusionReason> = facts.reasons.get(&name).cloned().unwrap_or_default();
        if profile.is_reserved(&name) {
            reasons.insert(ExclusionReason::Reserved);
        }
        if facts.dynamic {
            reasons.insert(ExclusionReason::Dynamic);
        }
        if functions.contains(&name) {
            reasons.insert(ExclusionReason::FunctionName);
        }
        if profile.is_builtin(&name) || !facts.declared.contains(&name) {
            reasons.insert(ExclusionReason::Builtin);
        }
        match reasons.iter().next() {
            Some(reason) => {
                set.excluded.insert(name, *reason);
            }
            None => {
                let mut ranges = facts.occurrences.remove(&name).unwrap_or_default();
                ranges.sort_by_key(|r| r.start);
                ranges.dedup();
                set.renameable.insert(name, ranges);
            }
        }
    }
    set
}

fn is_variable_identifier(kind: &str) -> bool {
    // every grammar uses a dedicated `identifier` kind for plain names
    kind == "identifier"
}

fn is_dynamic_call(language: Language, node: Node<'_>, text: &str) -> bool {
    let names: &[&str] = match language {
        Language::Python => &["eval", "exec", "locals", "globals", "vars", "__import__"],
        Language::JavaScript => &["eval"],
        _ => return false,
    };
    if !names.contains(&text) {
        return false;
    }
    node.parent().is_some_and(|p| matches!(p.kind(), "call" | "call_expression") && field_of(node) == Some("function"))
}

/// Climb from `node` through pattern/wrapper kinds; returns the first
/// ancestor outside `wrappers` and the field name of the child we came from.
fn climb<'t>(node: Node<'t>, wrappers: &[&str]) -> Option<(Node<'t>, Option<&'t str>)> {
    let mut child = node;
    loop {
        let parent = child.parent()?;
        let field = field_of(child);
        if wrappers.contains(&parent.kind()) {
            child = parent;
            continue;
        }
        return Some((parent, field));
    }
}

fn has_ancestor(node: Node<'_>, kinds: &[&str]) -> bool {
    let mut cur = node.parent();
    while let Some(n) = cur {
        if kinds.contains(&n.kind()) {
            return true;
        }
        cur = n.parent();
    }
    false
}

// ---------------------------------------------------------------- Python

const PY_PATTERNS: &[&str] = &[
    "pattern_list",
    "tuple_pattern",
    "list_pattern",
    "list_splat_pattern",
    "dictionary_splat_pattern",
    "tuple",
    "list",
    "parenthesized_expression",
    "as_pattern_target",
    "expression_list",
];

fn python_role(node: Node<'_>) -> Role {
    let Some(parent) = node.parent() else { return Role::Ref };
    let field = field_of(node);
    if has_ancestor(node, &["import_statement", "import_from_statement", "future_import_statement"]) {
        return Role::Unsafe(ExclusionReason::Imported);
    }
    match (parent.kind(), field) {
        ("attribute", Some("attribute")) => return Role::Unsafe(ExclusionReason::Field),
        ("keyword_argument", Some("name")) => return Role::Unsafe(ExclusionReason::Field),
        ("function_definition", Some("name")) => return Role::Unsafe(ExclusionReason::FunctionName),
        ("class_definition", Some("name")) => return Role::Unsafe(ExclusionReason::TypeName),
        ("decorator", _) => return Role::Ref,
        _ => {}
    }
    let Some((top, top_field)) = climb(node, PY_PATTERNS) else { return Role::Ref };
    let is_decl = matches!(
        (top.kind(), top_field),
        ("assignment", Some("left"))
            | ("augmented_assignment", Some("left"))
            | ("for_statement", Some("left"))
            | ("for_in_clause", Some("left"))
            | ("named_expression", Some("name"))
            | ("as_pattern", Some("alias"))
            | ("default_parameter", Some("name"))
            | ("typed_default_parameter", Some("name"))
            | ("parameters" | "lambda_parameters" | "typed_parameter", _)
    );
    if !is_decl {
        return Role::Ref;
    }
    // Assignments directly in a class body create class attributes.
    let mut cur = top.parent();
    while let Some(n) = cur {
        match n.kind() {
            "function_definition" | "lambda" => break,
            "class_definition" => return Role::Unsafe(ExclusionReason::Field),
            _ => {}
        }
        cur = n.parent();
    }
    Role::Decl
}

// ---------------------------------------------------------------- C++

const CPP_DECLARATOR_WRAPPERS: &[&str] = &[
    "pointer_declarator",
    "reference_declarator",
    "array_declarator",
    "init_declarator",
    "parenthesized_declarator",
    "structured_binding_declarator",
    "attributed_declarator",
];

fn cpp_role(tree: &SyntaxTree, node: Node<'_>) -> Role {
    let Some(parent) = node.parent() else { return Role::Ref };
    let field = field_of(node);
    if has_ancestor(node, &["preproc_params"]) {
        return Role::Skip;
    }
    if matches!(parent.kind(), "preproc_def" | "preproc_function_def") && field == Some("name") {
        return Role::Unsafe(ExclusionReason::Dynamic);
    }
    if matches!(
        parent.kind(),
        "preproc_ifdef" | "preproc_defined" | "preproc_if" | "preproc_elif" | "preproc_elifdef" | "preproc_call"
    ) || has_ancestor(node, &["preproc_if", "preproc_elif"]) && !has_ancestor(node, &["compound_statement"])
    {
        return Role::Unsafe(ExclusionReason::Dynamic);
    }
    if parent.kind() == "qualified_identifier" && field == Some("name") {
        return Role::Unsafe(ExclusionReason::Imported);
    }
    if has_ancestor(node, &["using_declaration", "namespace_alias_definition"]) {
        return Role::Unsafe(ExclusionReason::Imported);
    }
    if parent.kind() == "enumerator" {
        return Role::Unsafe(ExclusionReason::Field);
    }
    if has_ancestor(node, &["template_parameter_list"]) && !has_ancestor(node, &["compound_statement"]) {
        return Role::Unsafe(ExclusionReason::TypeName);
    }
    if parent.kind() == "function_declarator" && field == Some("declarator") {
        return match cpp_function_declarator_name(tree, parent) {
            Some(_) => Role::Unsafe(ExclusionReason::FunctionName),
            None => Role::Decl,
        };
    }
    // Walk declarator wrappers up to the construct that introduces the name.
    let mut child = node;
    loop {
        let Some(p) = child.parent() else { return Role::Ref };
        let f = field_of(child);
        let wrapper = match p.kind() {
            "init_declarator" | "array_declarator" => f == Some("declarator"),
            "pointer_declarator"
            | "reference_declarator"
            | "parenthesized_declarator"
            | "attributed_declarator"
            | "structured_binding_declarator" => true,
            "function_declarator" => {
                // local `T v(args);` declarations
                f == Some("declarator") && cpp_function_declarator_name(tree, p).is_none()
            }
            _ => false,
        };
        if wrapper {
            child = p;
            continue;
        }
        let decl = match p.kind() {
            "declaration" | "condition_clause" | "for_range_loop" => f == Some("declarator"),
            "parameter_declaration" | "optional_parameter_declaration" | "variadic_parameter_declaration" => {
                f == Some("declarator") || CPP_DECLARATOR_WRAPPERS.contains(&child.kind())
            }
            _ => false,
        };
        return if decl { Role::Decl } else { Role::Ref };
    }
}

/// Type names declared in a C++ file (class/struct/union/enum, typedef,
/// alias, template type parameters).
fn cpp_declared_types(tree: &SyntaxTree, nodes: &[Node<'_>]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for node in nodes {
        match node.kind() {
            "class_specifier" | "struct_specifier" | "union_specifier" | "enum_specifier" => {
                if let Some(name) = node.child_by_field_name("name") {
                    out.insert(tree.text(name).to_string());
                }
            }
            "type_definition"
            | "alias_declaration"
            | "type_parameter_declaration"
            | "optional_type_parameter_declaration" => {
                let mut cursor = node.walk();
                for child in node.named_children(&mut cursor) {
                    if child.kind() == "type_identifier" {
                        out.insert(tree.text(child).to_string());
                    }
                }
                if let Some(name) = node.child_by_field_name("name") {
                    out.insert(tree.text(name).to_string());
                }
            }
            _ => {}
        }
    }
    out
}

/// A `type_identifier` that is really a variable: an argument in a local
/// declaration parsed as a function declarator (`vector<int> v(n);`).
fn cpp_vexing_argument(tree: &SyntaxTree, node: Node<'_>) -> bool {
    let Some(param) = node.parent() else { return false };
    if param.kind() != "parameter_declaration" || field_of(node) != Some("type") {
        return false;
    }
    if param.child_by_field_name("declarator").is_some() {
        return false;
    }
    let Some(list) = param.parent() else { return false };
    let Some(declarator) = list.parent() else { return false };
    declarator.kind() == "function_declarator"
        && cpp_in_block(declarator)
        && cpp_function_declarator_name(tree, declarator).is_none()
}

// ---------------------------------------------------------------- Java

fn java_role(node: Node<'_>, text: &str, functions: &BTreeSet<String>) -> Role {
    let Some(parent) = node.parent() else { return Role::Ref };
    let field = field_of(node);
    if has_ancestor(node, &["import_declaration", "package_declaration"]) {
        return Role::Unsafe(ExclusionReason::Imported);
    }
    match (parent.kind(), field) {
        ("field_access", Some("field")) => return Role::Unsafe(ExclusionReason::Field),
        ("method_invocation", Some("name")) => {
            return Role::Unsafe(if functions.contains(text) {
                ExclusionReason::FunctionName
            } else {
                ExclusionReason::Field
            })
        }
        ("method_declaration" | "constructor_declaration" | "compact_constructor_declaration", Some("name")) => {
            return Role::Unsafe(ExclusionReason::FunctionName)
        }
        (
            "class_declaration"
            | "interface_declaration"
            | "enum_declaration"
            | "record_declaration"
            | "annotation_type_declaration",
            Some("name"),
        ) => return Role::Unsafe(ExclusionReason::TypeName),
        ("enum_constant", _) => return Role::Unsafe(ExclusionReason::Field),
        ("method_reference", _) => return Role::Unsafe(ExclusionReason::Field),
        ("marker_annotation" | "annotation", _) => return Role::Unsafe(ExclusionReason::TypeName),
        ("scoped_identifier", _) => return Role::Unsafe(ExclusionReason::Imported),
        ("element_value_pair", Some("key")) => return Role::Unsafe(ExclusionReason::Field),
        _ => {}
    }
    match parent.kind() {
        "variable_declarator" if field == Some("name") => {
            let owner = parent.parent().map(|p| p.kind()).unwrap_or("");
            match owner {
                "local_variable_declaration" | "spread_parameter" | "resource" => Role::Decl,
                "field_declaration" | "constant_declaration" => Role::Unsafe(ExclusionReason::Field),
                _ => Role::Decl,
            }
        }
        "formal_parameter" if field == Some("name") => {
            if has_ancestor(node, &["record_declaration"]) && !has_ancestor(node, &["block"]) {
                Role::Unsafe(ExclusionReason::Field)
            } else {
                Role::Decl
            }
        }
        "catch_formal_parameter" | "enhanced_for_statement" | "resource" | "type_pattern"
            if field == Some("name") || parent.kind() == "type_pattern" =>
        {
            Role::Decl
        }
        "lambda_expression" if field == Some("parameters") => Role::Decl,
        "inferred_parameters" => Role::Decl,
        _ => Role::Ref,
    }
}

// ---------------------------------------------------------------- JavaScript

const JS_PATTERNS: &[&str] = &[
    "array_pattern",
    "object_pattern",
    "pair_pattern",
    "assignment_pattern",
    "object_assignment_pattern",
    "rest_pattern",
];

fn js_role(tree: &SyntaxTree, node: Node<'_>) -> Role {
    let Some(parent) = node.parent() else { return Role::Ref };
    let field = field_of(node);
    if has_ancestor(node, &["import_statement", "export_clause"]) {
        return Role::Unsafe(ExclusionReason::Imported);
    }
    match (parent.kind(), field) {
        (
            "function_declaration" | "generator_function_declaration" | "function_expression" | "generator_function",
            Some("name"),
        ) => return Role::Unsafe(ExclusionReason::FunctionName),
        ("class_declaration" | "class", Some("name")) => return Role::Unsafe(ExclusionReason::TypeName),
        ("pair_pattern", Some("key")) => return Role::Unsafe(ExclusionReason::Field),
        _ => {}
    }
    // Only the right-hand side of `a = b` inside a pattern binds; the
    // default value is an ordinary expression.
    if matches!(parent.kind(), "assignment_pattern" | "object_assignment_pattern") && field == Some("right") {
        return Role::Ref;
    }
    let Some((top, top_field)) = climb(node, JS_PATTERNS) else { return Role::Ref };
    let is_decl = matches!(
        (top.kind(), top_field),
        ("variable_declarator", Some("name"))
            | ("formal_parameters", _)
            | ("arrow_function", Some("parameter"))
            | ("for_in_statement", Some("left"))
            | ("catch_clause", Some("parameter"))
    );
    if !is_decl {
        return Role::Ref;
    }
    if top.kind() == "variable_declarator" {
        if let Some(value) = top.child_by_field_name("value") {
            if js_is_require(tree, value) {
                return Role::Unsafe(ExclusionReason::Imported);
            }
        }
    }
    if has_ancestor(node, &["export_statement"]) && !has_ancestor(node, &["statement_block"]) {
        return Role::Unsafe(ExclusionReason::Imported);
    }
    Role::Decl
}

fn js_is_require(tree: &SyntaxTree, value: Node<'_>) -> bool {
    value.kind() == "call_expression"
        && value.child_by_field_name("function").is_some_and(|f| f.kind() == "identifier" && tree.text(f) == "require")
}

// ---------------------------------------------------------------- Go

fn go_role(node: Node<'_>) -> Role {
    let Some(parent) = node.parent() else { return Role::Ref };
    let field = field_of(node);
    match (parent.kind(), field) {
        ("function_declaration", Some("name")) => return Role::Unsafe(ExclusionReason::FunctionName),
        ("type_parameter_declaration", _) => return Role::Unsafe(ExclusionReason::TypeName),
        ("literal_element", _) => {
            if parent.parent().is_some_and(|k| k.kind() == "keyed_element") && field_of(parent) == Some("key") {
                return Role::Unsafe(ExclusionReason::Field);
            }
        }
        ("keyed_element", Some("key")) => return Role::Unsafe(ExclusionReason::Field),
        _ => {}
    }
    match (parent.kind(), field) {
        ("var_spec" | "const_spec", Some("name"))
        | ("parameter_declaration" | "variadic_parameter_declaration", Some("name")) => Role::Decl,
        ("expression_list", _) => {
            let Some(owner) = parent.parent() else { return Role::Ref };
            let owner_field = field_of(parent);
            match (owner.kind(), owner_field) {
                ("short_var_declaration", Some("left"))
                | ("range_clause", Some("left"))
                | ("type_switch_statement", Some("alias"))
                | ("receive_statement", Some("left")) => Role::Decl,
                _ => Role::Ref,
            }
        }
        _ => Role::Ref,
    }
}

fn go_imported_packages(tree: &SyntaxTree, nodes: &[Node<'_>]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for node in nodes {
        if node.kind() != "import_spec" {
            continue;
        }
        if let Some(name) = node.child_by_field_name("name") {
            out.insert(tree.text(name).to_string());
        }
        if let Some(path) = node.child_by_field_name("path") {
            let raw = tree.text(path).trim_matches(|c| c == '"' || c == '`');
            if let Some(last) = raw.rsplit('/').next() {
                out.insert(last.to_string());
            }
        }
    }
    out
}

// ---------------------------------------------------------------- other token kinds

fn other_kind_facts(
    tree: &SyntaxTree,
    node: Node<'_>,
    language: Language,
    cpp_types: &BTreeSet<String>,
    facts: &mut Facts,
) {
    let kind = node.kind();
    let text = tree.text(node);
    match (language, kind) {
        (Language::Cpp, "field_identifier") => facts.exclude(text, ExclusionReason::Field),
        (Language::Cpp, "namespace_identifier") => facts.exclude(text, ExclusionReason::Imported),
        (Language::Cpp, "type_identifier") => {
            if !cpp_types.contains(text) && cpp_vexing_argument(tree, node) {
                facts.occurrence(text, node.byte_range());
            } else {
                facts.exclude(text, ExclusionReason::TypeName);
            }
        }
        (Language::Cpp, "preproc_arg") => {
            let params = macro_params(tree, node);
            for (_, word) in lex_words(text) {
                if !params.contains(word) {
                    facts.exclude(word, ExclusionReason::Dynamic);
                }
            }
        }
        (Language::Java | Language::Go, "type_identifier") => facts.exclude(text, ExclusionReason::TypeName),
        (Language::Go, "package_identifier") => facts.exclude(text, ExclusionReason::Imported),
        (Language::JavaScript, "shorthand_property_identifier" | "shorthand_property_identifier_pattern") => {
            facts.exclude(text, ExclusionReason::Field)
        }
        (Language::JavaScript, "with_statement") => facts.dynamic = true,
        _ => {}
    }
}

fn macro_params(tree: &SyntaxTree, arg: Node<'_>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    if let Some(def) = arg.parent() {
        if let Some(params) = def.child_by_field_name("parameters") {
            let mut cursor = params.walk();
            for p in params.named_children(&mut cursor) {
                out.insert(tree.text(p).to_string());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(src: &str, lang: Language) -> Vec<String> {
        collect_renameable_identifiers(src, lang).unwrap().renameable.into_keys().collect()
    }

    fn reason(src: &str, lang: Language, name: &str) -> Option<ExclusionReason> {
        collect_renameable_identifiers(src, lang).unwrap().excluded.get(name).copied()
    }

    #[test]
    fn python_locals_and_params() {
        let src = "import sys\nfrom math import gcd\n\ndef solve(n, k=2):\n    total = 0\n    for i in range(n):\n        total += i * k\n    print(total, end='')\n    return sys.maxsize\n\nclass P:\n    size = 3\n    def area(self):\n        return self.size\n\nsolve(int(input()))\n";
        assert_eq!(names(src, Language::Python), ["i", "k", "n", "total"]);
        assert_eq!(reason(src, Language::Python, "solve"), Some(ExclusionReason::FunctionName));
        assert_eq!(reason(src, Language::Python, "sys"), Some(ExclusionReason::Imported));
        assert_eq!(reason(src, Language::Python, "gcd"), Some(ExclusionReason::Imported));
        assert_eq!(reason(src, Language::Python, "end"), Some(ExclusionReason::Field));
        assert_eq!(reason(src, Language::Python, "size"), Some(ExclusionReason::Field));
        assert_eq!(reason(src, Language::Python, "P"), Some(ExclusionReason::TypeName));
        assert_eq!(reason(src, Language::Python, "print"), Some(ExclusionReason::Builtin));
    }

    #[test]
    fn python_eval_disables_renaming() {
        let src = "x = 1\nprint(eval('x + 1'))\n";
        assert!(names(src, Language::Python).is_empty());
        assert_eq!(reason(src, Language::Python, "x"), Some(ExclusionReason::Dynamic));
    }

    #[test]
    fn python_occurrences_cover_every_use() {
        let src = "a = 1\nb = a + a\nprint(b)\n";
        let set = collect_renameable_identifiers(src, Language::Python).unwrap();
        assert_eq!(set.renameable["a"], vec![0..1, 10..11, 14..15]);
    }

    #[test]
    fn cpp_locals_fields_and_macros() {
        let src = "#include <bits/stdc++.h>\nusing namespace std;\n#define SQ(x) ((x) * (x))\n#define LIMIT cap\nstruct Pt { int x; int y; };\nint cap = 5;\nint area(const Pt &p) { return p.x * p.y; }\nint main() {\n    int n; cin >> n;\n    vector<int> v(n);\n    for (auto &e : v) e = SQ(n);\n    long long acc = 0;\n    for (int i = 0; i < n; ++i) acc += v[i];\n    Pt q{1, 2};\n    cout << acc + area(q) + LIMIT << endl;\n    return 0;\n}\n";
        assert_eq!(names(src, Language::Cpp), ["acc", "e", "i", "n", "p", "q", "v"]);
        assert_eq!(reason(src, Language::Cpp, "x"), Some(ExclusionReason::Field));
        assert_eq!(reason(src, Language::Cpp, "cap"), Some(ExclusionReason::Dynamic));
        assert_eq!(reason(src, Language::Cpp, "SQ"), Some(ExclusionReason::Dynamic));
        assert_eq!(reason(src, Language::Cpp, "area"), Some(ExclusionReason::FunctionName));
        assert_eq!(reason(src, Language::Cpp, "Pt"), Some(ExclusionReason::TypeName));
        assert_eq!(reason(src, Language::Cpp, "cout"), Some(ExclusionReason::Builtin));
        let set = collect_renameable_identifiers(src, Language::Cpp).unwrap();
        // the constructor argument of `v(n)` is a use of `n`
        assert_eq!(set.renameable["n"].len(), 5);
    }

    #[test]
    fn java_fields_methods_and_locals() {
        let src = "import java.util.*;\npublic class Main {\n    static int count = 0;\n    static int twice(int k) { return 2 * k; }\n    public static void main(String[] args) {\n        Scanner sc = new Scanner(System.in);\n        int n = sc.nextInt();\n        int[] arr = new int[n];\n        for (int i = 0; i < n; i++) { arr[i] = twice(i); count++; }\n        System.out.println(arr.length + count);\n    }\n}\n";
        assert_eq!(names(src, Language::Java), ["args", "arr", "i", "k", "n", "sc"]);
        assert_eq!(reason(src, Language::Java, "count"), Some(ExclusionReason::Field));
        assert_eq!(reason(src, Language::Java, "twice"), Some(ExclusionReason::FunctionName));
        assert_eq!(reason(src, Language::Java, "nextInt"), Some(ExclusionReason::Field));
        assert_eq!(reason(src, Language::Java, "Main"), Some(ExclusionReason::TypeName));
        assert_eq!(reason(src, Language::Java, "System"), Some(ExclusionReason::Builtin));
    }

    #[test]
    fn javascript_patterns_and_requires() {
        let src = "const fs = require('fs');\nconst lines = fs.readFileSync(0, 'utf8').split('\\n');\nconst [a, b = 2] = lines[0].split(' ').map(Number);\nconst { length } = lines;\nfunction add(x, ...rest) { return x + rest.length; }\nconst sq = (y) => y * y;\nfor (const w of lines) { console.log(add(a, b, w), sq(length)); }\n";
        assert_eq!(names(src, Language::JavaScript), ["a", "b", "lines", "rest", "sq", "w", "x", "y"]);
        assert_eq!(reason(src, Language::JavaScript, "fs"), Some(ExclusionReason::Imported));
        assert_eq!(reason(src, Language::JavaScript, "length"), Some(ExclusionReason::Field));
        assert_eq!(reason(src, Language::JavaScript, "add"), Some(ExclusionReason::FunctionName));
        assert_eq!(reason(src, Language::JavaScript, "console"), Some(ExclusionReason::Builtin));
    }

    #[test]
    fn go_packages_keys_and_locals() {
        let src = "package main\n\nimport (\n\t\"bufio\"\n\t\"fmt\"\n\tstr \"strings\"\n)\n\ntype pair struct{ lo, hi int }\n\nfunc span(p pair) int { return p.hi - p.lo }\n\nfunc main() {\n\tr := bufio.NewReader(nil)\n\t_ = r\n\tvar n int\n\tfmt.Scan(&n)\n\tq := pair{lo: 1, hi: n}\n\tfor i, c := range str.Repeat(\"a\", n) {\n\t\tfmt.Println(i, c, span(q))\n\t}\n}\n";
        assert_eq!(names(src, Language::Go), ["c", "i", "n", "p", "q", "r"]);
        assert_eq!(reason(src, Language::Go, "str"), Some(ExclusionReason::Imported));
        assert_eq!(reason(src, Language::Go, "fmt"), Some(ExclusionReason::Imported));
        assert_eq!(reason(src, Language::Go, "lo"), Some(ExclusionReason::Field));
        assert_eq!(reason(src, Language::Go, "span"), Some(ExclusionReason::FunctionName));
        assert_eq!(reason(src, Language::Go, "pair"), Some(ExclusionReason::TypeName));
        assert_eq!(reason(src, Language::Go, "_"), Some(ExclusionReason::Reserved));
    }

    #[test]
    fn empty_and_function_only_sources() {
        for lang in Language::ALL {
            assert!(collect_renameable_identifiers("", lang).unwrap().is_empty());
        }
        assert!(names("def f():\n    return 1\n", Language::Python).is_empty());
    }
}
