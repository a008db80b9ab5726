//! Run configuration: one TOML file, paths relative to the file, with
//! dotted-key overrides from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::judge::{JudgeConfig, Paradigm};
use crate::language::Language;
use crate::transforms::{BiasKind, DEFAULT_MAX_ATTEMPTS};
use crate::validation::ValidationPolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Not echoed into the output directory, so that runs differing only in
    /// where they write produce identical trees.
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub dataset: DatasetConfig,
    #[serde(default = "default_biases")]
    pub biases: Vec<BiasKind>,
    #[serde(default)]
    pub transforms: TransformsConfig,
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
    #[serde(default)]
    pub validation: ValidationConfig,
    #[serde(default)]
    pub judges: Vec<JudgeConfig>,
    #[serde(default = "default_paradigms")]
    pub paradigms: Vec<Paradigm>,
    /// Directory overriding some or all of the shipped prompt templates.
    #[serde(default)]
    pub prompts_dir: Option<PathBuf>,
    #[serde(default)]
    pub report: ReportConfig,
}

fn default_biases() -> Vec<BiasKind> {
    BiasKind::DEFAULTS.to_vec()
}

fn default_paradigms() -> Vec<Paradigm> {
    vec![Paradigm::Direct]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Dataset JSONL; the bundled mini-corpus when absent.
    pub path: Option<PathBuf>,
    /// Languages to keep; all five when empty.
    pub languages: Vec<Language>,
    /// Problems sampled per language. All paired problems when absent.
    pub pairs_per_language: Option<usize>,
    pub strip_comments: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig { path: None, languages: Vec::new(), pairs_per_language: None, strip_comments: true }
    }
}

impl DatasetConfig {
    pub fn languages(&self) -> Vec<Language> {
        if self.languages.is_empty() {
            Language::ALL.to_vec()
        } else {
            self.languages.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformsConfig {
    pub templates: Option<PathBuf>,
    pub dummy_pool: Option<PathBuf>,
    pub max_attempts: u32,
}

impl Default for TransformsConfig {
    fn default() -> Self {
        TransformsConfig { templates: None, dummy_pool: None, max_attempts: DEFAULT_MAX_ATTEMPTS }
    }
}

/// Who writes misleading comments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorConfig {
    /// Offline deterministic comments.
    Canned,
    /// One of the configured judges.
    Judge { judge_id: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationMode {
    /// Build and run on every io_test.
    #[default]
    Behavior,
    /// Parse or compile only.
    Syntax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    pub mode: ValidationMode,
    pub toolchains: Option<PathBuf>,
    pub policy: ValidationPolicy,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { mode: ValidationMode::Behavior, toolchains: None, policy: ValidationPolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Percentage points within which a delta counts as no change.
    pub dead_band: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { dead_band: 0.0 }
    }
}

impl RunConfig {
    /// Read `path`, apply `key=value` overrides, resolve relative paths
    /// against the file's directory and check the result.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, PipelineError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base, overrides)
    }

    pub fn parse(text: &str, base: &Path, overrides: &[String]) -> Result<Self, PipelineError> {
        let mut table: toml::Table = text.parse().map_err(|e| PipelineError::Config(format!("config: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let mut config: RunConfig =
            toml::Value::Table(table).try_into().map_err(|e| PipelineError::Config(format!("config: {e}")))?;
        config.resolve_paths(base);
        config.check()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.out_dir);
        fix(&mut self.dataset.path);
        fix(&mut self.transforms.templates);
        fix(&mut self.transforms.dummy_pool);
        fix(&mut self.validation.toolchains);
        fix(&mut self.validation.policy.cache_dir);
        fix(&mut self.prompts_dir);
    }

    pub fn check(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        let mut seen = std::collections::BTreeSet::new();
        for bias in &self.biases {
            bias.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
            if !seen.insert(bias.to_string()) {
                return bad(format!("bias `{bias}` is listed twice"));
            }
        }
        if self.biases.is_empty() {
            return bad("at least one bias is required".into());
        }
        let mut ids = std::collections::BTreeSet::new();
        for j in &self.judges {
            j.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
            if !ids.insert(j.judge_id.as_str()) {
                return bad(format!("duplicate judge_id `{}`", j.judge_id));
            }
        }
        if let Some(GeneratorConfig::Judge { judge_id }) = &self.generator {
            if !ids.contains(judge_id.as_str()) {
                return bad(format!("generator refers to unknown judge `{judge_id}`"));
            }
        }
        if self.biases.contains(&BiasKind::MisleadingTask) && self.generator.is_none() {
            return bad("misleading_task needs a [generator] section".into());
        }
        if self.paradigms.is_empty() {
            return bad("at least one paradigm is required".into());
        }
        if !(self.report.dead_band.is_finite() && self.report.dead_band >= 0.0) {
            return bad("report.dead_band must be >= 0".into());
        }
        for p in [
            &self.dataset.path,
            &self.transforms.templates,
            &self.transforms.dummy_pool,
            &self.validation.toolchains,
            &self.prompts_dir,
        ]
        .into_iter()
        .flatten()
        {
            if !p.exists() {
                return bad(format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    /// The config as written to the output directory.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

/// `a.b.c=value`, where value is TOML (`3`, `true`, `["x"]`, `"s"`) or a
/// bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), PipelineError> {
    let (key, raw) =
        spec.split_once('=').ok_or_else(|| PipelineError::Config(format!("override `{spec}` is not key=value")))?;
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in path {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| PipelineError::Config(format!("override `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 7
[generator]
kind = "canned"
[[judges]]
judge_id = "m"
kind = "mock"
"#;

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::parse(MINIMAL, Path::new("."), &[]).unwrap();
        assert_eq!(c.biases, BiasKind::DEFAULTS);
        assert_eq!(c.paradigms, [Paradigm::Direct]);
        assert_eq!(c.dataset.languages().len(), 5);
        let c = RunConfig::parse(
            MINIMAL,
            Path::new("."),
            &[
                "seed=9".into(),
                "biases=[\"self_declared\"]".into(),
                "dataset.languages=[\"go\"]".into(),
                "report.dead_band=1.5".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.biases, [BiasKind::SelfDeclared]);
        assert_eq!(c.dataset.languages(), [Language::Go]);
        assert_eq!(c.report.dead_band, 1.5);
    }

    #[test]
    fn misleading_needs_generator_and_seed_is_mandatory() {
        let err = RunConfig::parse("seed = 1\nbiases = [\"misleading_task\"]", Path::new("."), &[]).unwrap_err();
        assert!(err.to_string().contains("generator"));
        assert!(RunConfig::parse("biases = []", Path::new("."), &[]).is_err());
        assert!(RunConfig::parse("seed = 1\nunknown = 3", Path::new("."), &[]).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut c = RunConfig::parse(MINIMAL, Path::new("."), &[]).unwrap();
        c.out_dir = Some("somewhere".into());
        let echoed = c.to_toml();
        assert!(!echoed.contains("somewhere"));
        let back = RunConfig::parse(&echoed, Path::new("."), &[]).unwrap();
        assert_eq!(back, RunConfig { out_dir: None, ..c });
    }
}
