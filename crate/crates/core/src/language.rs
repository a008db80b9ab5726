//! Supported languages and their lexical profiles.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Cpp,
    Python,
    Java,
    #[serde(rename = "javascript")]
    JavaScript,
    Go,
}

impl Language {
    pub const ALL: [Language; 5] =
        [Language::Cpp, Language::Python, Language::Java, Language::JavaScript, Language::Go];

    /// Wire name used in dataset files, configs and reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Language::Cpp => "cpp",
            Language::Python => "python",
            Language::Java => "java",
            Language::JavaScript => "javascript",
            Language::Go => "go",
        }
    }

    /// Human-readable name used in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Language::Cpp => "C++",
            Language::Python => "Python",
            Language::Java => "Java",
            Language::JavaScript => "JavaScript",
            Language::Go => "Go",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Language::Cpp => "cpp",
            Language::Python => "py",
            Language::Java => "java",
            Language::JavaScript => "js",
            Language::Go => "go",
        }
    }

    pub fn line_comment_token(self) -> &'static str {
        match self {
            Language::Python => "#",
            _ => "//",
        }
    }

    pub fn profile(self) -> LanguageProfile {
        LanguageProfile::for_language(self)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported language `{0}` (expected cpp|python|java|javascript|go)")]
pub struct UnsupportedLanguage(pub String);

impl FromStr for Language {
    type Err = UnsupportedLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cpp" => Ok(Language::Cpp),
            "python" => Ok(Language::Python),
            "java" => Ok(Language::Java),
            "javascript" => Ok(Language::JavaScript),
            "go" => Ok(Language::Go),
            other => Err(UnsupportedLanguage(other.to_string())),
        }
    }
}

/// How code inserted "at the top" of a file interacts with mandatory headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntryStyle {
    /// Functions may be declared at file start (after an optional prologue
    /// such as `from __future__` imports or a `"use strict"` directive).
    FreeTopLevel,
    /// Functions go after the leading `#include` / `using` block.
    AfterIncludes,
    /// Functions must follow the `package` clause and imports.
    AfterPackageAndImports,
    /// No file-level functions: methods go inside the primary class body.
    InsidePrimaryClass,
}

#[derive(Debug, Clone)]
pub struct LanguageProfile {
    pub language: Language,
    pub line_comment_token: &'static str,
    pub identifier_charset: &'static str,
    pub reserved_words: BTreeSet<&'static str>,
    /// Predeclared or conventionally global names (library functions, macros,
    /// standard objects). Never renamed, never used as generated names.
    pub builtins: BTreeSet<&'static str>,
    pub entry_style: EntryStyle,
}

impl LanguageProfile {
    pub fn for_language(language: Language) -> Self {
        let (reserved, builtins, entry_style): (&[&str], &[&str], EntryStyle) = match language {
            Language::Cpp => (CPP_RESERVED, CPP_BUILTINS, EntryStyle::AfterIncludes),
            Language::Python => (PYTHON_RESERVED, PYTHON_BUILTINS, EntryStyle::FreeTopLevel),
            Language::Java => (JAVA_RESERVED, JAVA_BUILTINS, EntryStyle::InsidePrimaryClass),
            Language::JavaScript => (JS_RESERVED, JS_BUILTINS, EntryStyle::FreeTopLevel),
            Language::Go => (GO_RESERVED, GO_BUILTINS, EntryStyle::AfterPackageAndImports),
        };
        LanguageProfile {
            language,
            line_comment_token: language.line_comment_token(),
            identifier_charset: match language {
                Language::JavaScript => "[A-Za-z_$][A-Za-z0-9_$]*",
                Language::Java => "[A-Za-z_$][A-Za-z0-9_$]*",
                _ => "[A-Za-z_][A-Za-z0-9_]*",
            },
            reserved_words: reserved.iter().copied().collect(),
            builtins: builtins.iter().copied().collect(),
            entry_style,
        }
    }

    pub fn is_reserved(&self, name: &str) -> bool {
        self.reserved_words.contains(name)
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.builtins.contains(name)
    }
}

const CPP_RESERVED: &[&str] = &[
    "alignas",
    "alignof",
    "and",
    "and_eq",
    "asm",
    "auto",
    "bitand",
    "bitor",
    "bool",
    "break",
    "case",
    "catch",
    "char",
    "char8_t",
    "char16_t",
    "char32_t",
    "class",
    "compl",
    "concept",
    "const",
    "consteval",
    "constexpr",
    "constinit",
    "const_cast",
    "continue",
    "co_await",
    "co_return",
    "co_yield",
    "decltype",
    "default",
    "delete",
    "do",
    "double",
    "dynamic_cast",
    "else",
    "enum",
    "explicit",
    "export",
    "extern",
    "false",
    "float",
    "for",
    "friend",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "mutable",
    "namespace",
    "new",
    "noexcept",
    "not",
    "not_eq",
    "nullptr",
    "operator",
    "or",
    "or_eq",
    "private",
    "protected",
    "public",
    "register",
    "reinterpret_cast",
    "requires",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "static_assert",
    "static_cast",
    "struct",
    "switch",
    "template",
    "this",
    "thread_local",
    "throw",
    "true",
    "try",
    "typedef",
    "typeid",
    "typename",
    "union",
    "unsigned",
    "using",
    "virtual",
    "void",
    "volatile",
    "wchar_t",
    "while",
    "xor",
    "xor_eq",
    "final",
    "override",
];

const CPP_BUILTINS: &[&str] = &[
    // streams and common std names reachable after `using namespace std`
    "main",
    "std",
    "cin",
    "cout",
    "cerr",
    "clog",
    "endl",
    "ios",
    "ios_base",
    "printf",
    "scanf",
    "puts",
    "getchar",
    "putchar",
    "gets",
    "fgets",
    "fprintf",
    "sprintf",
    "snprintf",
    "sscanf",
    "stdin",
    "stdout",
    "stderr",
    "getline",
    "max",
    "min",
    "swap",
    "sort",
    "stable_sort",
    "reverse",
    "abs",
    "labs",
    "llabs",
    "fabs",
    "pow",
    "sqrt",
    "cbrt",
    "exp",
    "log",
    "log2",
    "log10",
    "floor",
    "ceil",
    "round",
    "trunc",
    "hypot",
    "sin",
    "cos",
    "tan",
    "atan2",
    "gcd",
    "lcm",
    "__gcd",
    "accumulate",
    "count",
    "count_if",
    "find",
    "find_if",
    "fill",
    "fill_n",
    "copy",
    "unique",
    "lower_bound",
    "upper_bound",
    "binary_search",
    "next_permutation",
    "prev_permutation",
    "max_element",
    "min_element",
    "make_pair",
    "make_tuple",
    "tie",
    "get",
    "begin",
    "end",
    "size",
    "to_string",
    "stoi",
    "stol",
    "stoll",
    "stod",
    "memset",
    "memcpy",
    "strlen",
    "strcmp",
    "strcpy",
    "exit",
    "abort",
    "assert",
    "malloc",
    "free",
    "calloc",
    "realloc",
    "isdigit",
    "isalpha",
    "isalnum",
    "isspace",
    "isupper",
    "islower",
    "toupper",
    "tolower",
    "iota",
    "partial_sum",
    "move",
    "forward",
    "distance",
    "advance",
    "next",
    "prev",
    "greater",
    "less",
    "plus",
    "minus",
    "hash",
    "ignore",
    "fixed",
    "setprecision",
    "setw",
    "setfill",
    "boolalpha",
    "flush",
    "ws",
    "numeric_limits",
    // common macros from the C/C++ standard headers
    "NULL",
    "EOF",
    "INT_MAX",
    "INT_MIN",
    "LLONG_MAX",
    "LLONG_MIN",
    "LONG_MAX",
    "LONG_MIN",
    "UINT_MAX",
    "ULLONG_MAX",
    "CHAR_BIT",
    "CHAR_MAX",
    "CHAR_MIN",
    "SHRT_MAX",
    "SHRT_MIN",
    "DBL_MAX",
    "DBL_MIN",
    "FLT_MAX",
    "FLT_MIN",
    "RAND_MAX",
    "EXIT_SUCCESS",
    "EXIT_FAILURE",
    "INFINITY",
    "NAN",
    "M_PI",
    "M_E",
    "BUFSIZ",
    "FILE",
    "SIZE_MAX",
    "PTRDIFF_MAX",
    "INT8_MAX",
    "INT16_MAX",
    "INT32_MAX",
    "INT64_MAX",
    "INT8_MIN",
    "INT16_MIN",
    "INT32_MIN",
    "INT64_MIN",
    "UINT8_MAX",
    "UINT16_MAX",
    "UINT32_MAX",
    "UINT64_MAX",
    "errno",
    "SEEK_SET",
    "SEEK_CUR",
    "SEEK_END",
    "CLOCKS_PER_SEC",
    "TRUE",
    "FALSE",
];

const PYTHON_RESERVED: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield", "match", "case", "type", "_",
];

const PYTHON_BUILTINS: &[&str] = &[
    "abs",
    "aiter",
    "all",
    "anext",
    "any",
    "ascii",
    "bin",
    "bool",
    "breakpoint",
    "bytearray",
    "bytes",
    "callable",
    "chr",
    "classmethod",
    "compile",
    "complex",
    "copyright",
    "credits",
    "delattr",
    "dict",
    "dir",
    "divmod",
    "enumerate",
    "eval",
    "exec",
    "exit",
    "filter",
    "float",
    "format",
    "frozenset",
    "getattr",
    "globals",
    "hasattr",
    "hash",
    "help",
    "hex",
    "id",
    "input",
    "int",
    "isinstance",
    "issubclass",
    "iter",
    "len",
    "license",
    "list",
    "locals",
    "map",
    "max",
    "memoryview",
    "min",
    "next",
    "object",
    "oct",
    "open",
    "ord",
    "pow",
    "print",
    "property",
    "quit",
    "range",
    "repr",
    "reversed",
    "round",
    "set",
    "setattr",
    "slice",
    "sorted",
    "staticmethod",
    "str",
    "sum",
    "super",
    "tuple",
    "vars",
    "zip",
    "__import__",
    "__name__",
    "__file__",
    "__doc__",
    "__builtins__",
    "__spec__",
    "__loader__",
    "__package__",
    "__debug__",
    "NotImplemented",
    "Ellipsis",
    "BaseException",
    "Exception",
    "ArithmeticError",
    "AssertionError",
    "AttributeError",
    "EOFError",
    "ImportError",
    "IndexError",
    "KeyError",
    "KeyboardInterrupt",
    "LookupError",
    "MemoryError",
    "NameError",
    "NotImplementedError",
    "OSError",
    "OverflowError",
    "RecursionError",
    "RuntimeError",
    "StopIteration",
    "SyntaxError",
    "SystemExit",
    "TypeError",
    "ValueError",
    "ZeroDivisionError",
    "IOError",
    "self",
    "cls",
];

const JAVA_RESERVED: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
    "var",
    "yield",
    "record",
    "sealed",
    "permits",
    "non",
    "_",
];

const JAVA_BUILTINS: &[&str] = &[
    "System",
    "String",
    "Math",
    "Integer",
    "Long",
    "Double",
    "Float",
    "Short",
    "Byte",
    "Character",
    "Boolean",
    "Object",
    "StringBuilder",
    "StringBuffer",
    "Scanner",
    "Arrays",
    "Collections",
    "List",
    "ArrayList",
    "LinkedList",
    "Map",
    "HashMap",
    "TreeMap",
    "Set",
    "HashSet",
    "TreeSet",
    "Deque",
    "ArrayDeque",
    "Queue",
    "PriorityQueue",
    "Iterator",
    "BufferedReader",
    "InputStreamReader",
    "PrintWriter",
    "StringTokenizer",
    "IOException",
    "Exception",
    "RuntimeException",
    "Thread",
    "Objects",
    "Optional",
    "BigInteger",
    "BigDecimal",
    "Comparator",
    "Comparable",
    "Iterable",
    "Number",
    "Void",
    "Class",
    "Main",
    "Stack",
    "Vector",
    "Random",
    "out",
    "in",
    "err",
    "length",
    "main",
];

const JS_RESERVED: &[&str] = &[
    "break",
    "case",
    "catch",
    "class",
    "const",
    "continue",
    "debugger",
    "default",
    "delete",
    "do",
    "else",
    "export",
    "extends",
    "false",
    "finally",
    "for",
    "function",
    "if",
    "import",
    "in",
    "instanceof",
    "new",
    "null",
    "return",
    "super",
    "switch",
    "this",
    "throw",
    "true",
    "try",
    "typeof",
    "var",
    "void",
    "while",
    "with",
    "yield",
    "let",
    "static",
    "enum",
    "await",
    "implements",
    "package",
    "protected",
    "interface",
    "private",
    "public",
    "of",
    "async",
    "get",
    "set",
];

const JS_BUILTINS: &[&str] = &[
    "undefined",
    "NaN",
    "Infinity",
    "globalThis",
    "console",
    "process",
    "require",
    "module",
    "exports",
    "__dirname",
    "__filename",
    "arguments",
    "eval",
    "Math",
    "Number",
    "String",
    "Boolean",
    "Array",
    "Object",
    "JSON",
    "BigInt",
    "Symbol",
    "Map",
    "Set",
    "WeakMap",
    "WeakSet",
    "Promise",
    "Date",
    "RegExp",
    "Error",
    "TypeError",
    "RangeError",
    "SyntaxError",
    "parseInt",
    "parseFloat",
    "isNaN",
    "isFinite",
    "Buffer",
    "setTimeout",
    "setInterval",
    "clearTimeout",
    "clearInterval",
    "setImmediate",
    "queueMicrotask",
    "Int32Array",
    "Float64Array",
    "Uint8Array",
    "BigInt64Array",
    "Reflect",
    "Proxy",
    "encodeURIComponent",
    "decodeURIComponent",
    "structuredClone",
    "Function",
];

const GO_RESERVED: &[&str] = &[
    "break",
    "case",
    "chan",
    "const",
    "continue",
    "default",
    "defer",
    "else",
    "fallthrough",
    "for",
    "func",
    "go",
    "goto",
    "if",
    "import",
    "interface",
    "map",
    "package",
    "range",
    "return",
    "select",
    "struct",
    "switch",
    "type",
    "var",
    "_",
];

const GO_BUILTINS: &[&str] = &[
    "main",
    "init",
    "append",
    "cap",
    "clear",
    "close",
    "complex",
    "copy",
    "delete",
    "imag",
    "len",
    "make",
    "max",
    "min",
    "new",
    "panic",
    "print",
    "println",
    "real",
    "recover",
    "true",
    "false",
    "iota",
    "nil",
    "bool",
    "byte",
    "complex64",
    "complex128",
    "error",
    "float32",
    "float64",
    "int",
    "int8",
    "int16",
    "int32",
    "int64",
    "rune",
    "string",
    "uint",
    "uint8",
    "uint16",
    "uint32",
    "uint64",
    "uintptr",
    "any",
    "comparable",
    "fmt",
    "os",
    "bufio",
    "strings",
    "strconv",
    "sort",
    "math",
];
