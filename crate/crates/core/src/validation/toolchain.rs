//! Per-language compile and run command lines, read from a config file.
//!
//! Commands are argument vectors with placeholders substituted per job:
//! `{src}` source file, `{bin}` output binary, `{dir}` job directory,
//! `{class}` Java primary class, `{cache}` persistent cache directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ValidationError;
use crate::language::Language;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Toolchain {
    /// Compiler invocation; absent for interpreted languages.
    #[serde(default)]
    pub compile: Option<Vec<String>>,
    /// Parse-only check for interpreted languages.
    #[serde(default)]
    pub syntax_check: Option<Vec<String>>,
    pub run: Vec<String>,
    /// Environment for every command (the ambient environment is not
    /// inherited).
    #[serde(default)]
    pub env: BTreeMap<String, String>,
    /// Address-space limit for executed programs, in MiB. Leave unset for
    /// runtimes that reserve large virtual ranges (JVM, V8, Go).
    #[serde(default)]
    pub memory_limit_mb: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Toolchains {
    #[serde(flatten)]
    pub languages: BTreeMap<Language, Toolchain>,
}

impl Toolchains {
    pub fn load(path: &Path) -> Result<Self, ValidationError> {
        let text = fs::read_to_string(path).map_err(|e| ValidationError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ValidationError> {
        let toolchains: Toolchains = toml::from_str(text).map_err(|e| ValidationError::Config(e.to_string()))?;
        for (lang, tc) in &toolchains.languages {
            if tc.run.is_empty() {
                return Err(ValidationError::Config(format!("{lang}: empty run command")));
            }
            for cmd in [tc.compile.as_ref(), tc.syntax_check.as_ref()].into_iter().flatten() {
                if cmd.is_empty() {
                    return Err(ValidationError::Config(format!("{lang}: empty command")));
                }
            }
        }
        Ok(toolchains)
    }

    pub fn get(&self, language: Language) -> Result<&Toolchain, ValidationError> {
        let tc = self
            .languages
            .get(&language)
            .ok_or(ValidationError::ToolchainMissing { language, detail: "no toolchain configured".into() })?;
        for cmd in [tc.compile.as_ref(), tc.syntax_check.as_ref(), Some(&tc.run)].into_iter().flatten() {
            let program = Path::new(&cmd[0]);
            if cmd[0].contains('{') {
                continue;
            }
            if !program.is_absolute() {
                return Err(ValidationError::ToolchainMissing {
                    language,
                    detail: format!("`{}` is not an absolute path", cmd[0]),
                });
            }
            if !program.exists() {
                return Err(ValidationError::ToolchainMissing {
                    language,
                    detail: format!("`{}` does not exist", cmd[0]),
                });
            }
        }
        Ok(tc)
    }
}

/// Values substituted into command templates.
#[derive(Debug, Clone)]
pub struct Placeholders {
    pub src: PathBuf,
    pub bin: PathBuf,
    pub dir: PathBuf,
    pub class: String,
    pub cache: PathBuf,
}

impl Placeholders {
    pub fn expand(&self, template: &str) -> String {
        template
            .replace("{src}", &self.src.to_string_lossy())
            .replace("{bin}", &self.bin.to_string_lossy())
            .replace("{dir}", &self.dir.to_string_lossy())
            .replace("{class}", &self.class)
            .replace("{cache}", &self.cache.to_string_lossy())
    }

    pub fn expand_all(&self, command: &[String]) -> Vec<String> {
        command.iter().map(|a| self.expand(a)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_per_language() {
        let text = r#"
[python]
syntax_check = ["/usr/bin/python3", "-m", "py_compile", "{src}"]
run = ["/usr/bin/python3", "{src}"]

[cpp]
compile = ["/usr/bin/g++", "-O2", "-o", "{bin}", "{src}"]
run = ["{bin}"]
memory_limit_mb = 512
"#;
        let tc = Toolchains::parse(text).unwrap();
        assert_eq!(tc.languages.len(), 2);
        assert_eq!(tc.languages[&Language::Cpp].memory_limit_mb, Some(512));
        assert!(matches!(tc.get(Language::Go), Err(ValidationError::ToolchainMissing { .. })));
    }

    #[test]
    fn relative_or_missing_programs_are_rejected() {
        let tc = Toolchains::parse("[python]\nrun = [\"python3\", \"{src}\"]\n").unwrap();
        assert!(matches!(tc.get(Language::Python), Err(ValidationError::ToolchainMissing { .. })));
        let tc = Toolchains::parse("[python]\nrun = [\"/nonexistent/python\", \"{src}\"]\n").unwrap();
        assert!(matches!(tc.get(Language::Python), Err(ValidationError::ToolchainMissing { .. })));
    }

    #[test]
    fn placeholders_expand() {
        let p = Placeholders {
            src: "/j/Main.java".into(),
            bin: "/j/a.out".into(),
            dir: "/j".into(),
            class: "Main".into(),
            cache: "/c".into(),
        };
        assert_eq!(p.expand_all(&["-cp".into(), "{dir}".into(), "{class}".into()]), ["-cp", "/j", "Main"]);
    }
}
