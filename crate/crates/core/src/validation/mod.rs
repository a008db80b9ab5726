//! Behavioral-equivalence checking of variants against their originals.
//!
//! A variant is compiled (or parse-checked for interpreted languages) with
//! the configured toolchain, then both programs are run on every io_test of
//! the problem under identical limits. Any difference in normalized stdout
//! or exit status flags the variant.

mod sandbox;
mod toolchain;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tempfile::TempDir;

pub use sandbox::{run as run_sandboxed, Limits, RunOutcome};
pub use toolchain::{Placeholders, Toolchain, Toolchains};

use crate::corpus::{CodeSample, Dataset, Problem};
use crate::language::Language;
use crate::syntax;
use crate::transforms::{BiasVariant, ValidationState};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);
pub const DEFAULT_COMPILE_TIMEOUT: Duration = Duration::from_secs(120);
/// Diagnostics longer than this are truncated in results.
const MAX_DIAGNOSTIC: usize = 4000;

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error("toolchain missing for {language}: {detail}")]
    ToolchainMissing { language: Language, detail: String },
    #[error("sandbox: {0}")]
    Sandbox(String),
    #[error("invalid toolchain config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    SyntaxOnly,
    Compiled,
    Executed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Limited,
}

/// One io_test on which the two programs disagreed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestDiff {
    pub test_index: usize,
    pub original_stdout: String,
    pub variant_stdout: String,
    pub original_status: String,
    pub variant_status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub variant_id: String,
    pub stage: Stage,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diffs: Vec<TestDiff>,
}

impl ValidationResult {
    fn pass(variant_id: &str, stage: Stage) -> Self {
        ValidationResult {
            variant_id: variant_id.into(),
            stage,
            outcome: Outcome::Pass,
            diagnostics: vec![],
            diffs: vec![],
        }
    }

    fn fail(variant_id: &str, stage: Stage, diagnostic: impl Into<String>) -> Self {
        ValidationResult {
            variant_id: variant_id.into(),
            stage,
            outcome: Outcome::Fail,
            diagnostics: vec![diagnostic.into()],
            diffs: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationPolicy {
    /// Per-test, per-program wall-clock limit.
    #[serde(with = "secs")]
    pub timeout: Duration,
    #[serde(with = "secs")]
    pub compile_timeout: Duration,
    pub workers: usize,
    pub isolate_network: bool,
    /// Persistent compiler cache (`{cache}` in command templates).
    pub cache_dir: Option<PathBuf>,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        ValidationPolicy {
            timeout: DEFAULT_TIMEOUT,
            compile_timeout: DEFAULT_COMPILE_TIMEOUT,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            isolate_network: true,
            cache_dir: None,
        }
    }
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

/// Trailing newlines are not significant; everything else is byte-exact.
pub fn normalize_stdout(bytes: &[u8]) -> &[u8] {
    let mut out = bytes;
    while let Some(rest) = out.strip_suffix(b"\n") {
        out = rest.strip_suffix(b"\r").unwrap_or(rest);
    }
    out
}

/// A program built and ready to run, living in its own directory.
struct Prepared {
    _dir: TempDir,
    run: Vec<String>,
    stage: Stage,
    env: BTreeMap<String, String>,
    memory_limit_mb: Option<u64>,
    dir_path: PathBuf,
}

pub struct Validator {
    toolchains: Toolchains,
    policy: ValidationPolicy,
    cache_dir: PathBuf,
}

impl Validator {
    /// Build a validator, creating the compiler cache and checking that
    /// network isolation works when requested.
    pub fn new(toolchains: Toolchains, policy: ValidationPolicy) -> Result<Self, ValidationError> {
        let cache_dir = policy.cache_dir.clone().unwrap_or_else(|| std::env::temp_dir().join("bias-forge-cache"));
        fs::create_dir_all(&cache_dir)
            .map_err(|e| ValidationError::Sandbox(format!("{}: {e}", cache_dir.display())))?;
        let validator = Validator { toolchains, policy, cache_dir };
        if validator.policy.isolate_network {
            let probe = run_sandboxed(
                &["/bin/true".to_string()],
                &validator.cache_dir,
                &BTreeMap::new(),
                b"",
                validator.limits(None),
            );
            if let Err(e) = probe {
                return Err(ValidationError::Sandbox(format!(
                    "network isolation unavailable ({e}); set isolate_network = false to run without it"
                )));
            }
        }
        Ok(validator)
    }

    pub fn policy(&self) -> &ValidationPolicy {
        &self.policy
    }

    fn limits(&self, memory_limit_mb: Option<u64>) -> Limits {
        Limits { timeout: self.policy.timeout, memory_limit_mb, isolate_network: self.policy.isolate_network }
    }

    /// Write `source` into a fresh directory and compile or parse-check it.
    /// `Err` carries the failing stage and diagnostic.
    fn prepare(&self, source: &str, language: Language) -> Result<Result<Prepared, (Stage, String)>, ValidationError> {
        let tc = self.toolchains.get(language)?;
        let dir = tempfile::Builder::new()
            .prefix("bf-job-")
            .tempdir()
            .map_err(|e| ValidationError::Sandbox(e.to_string()))?;
        let class = match language {
            Language::Java => syntax::parse(source, language)
                .ok()
                .and_then(|t| syntax::java_primary_class_name(&t))
                .unwrap_or_else(|| "Main".into()),
            _ => "Main".into(),
        };
        let file = match language {
            Language::Java => format!("{class}.java"),
            _ => format!("main.{}", language.extension()),
        };
        let src = dir.path().join(file);
        fs::write(&src, source).map_err(|e| ValidationError::Sandbox(e.to_string()))?;
        let ph = Placeholders {
            src,
            bin: dir.path().join("prog"),
            dir: dir.path().to_path_buf(),
            class,
            cache: self.cache_dir.clone(),
        };
        let env: BTreeMap<String, String> = tc.env.iter().map(|(k, v)| (k.clone(), ph.expand(v))).collect();

        let (check, stage) = match (&tc.compile, &tc.syntax_check) {
            (Some(c), _) => (Some(c), Stage::Compiled),
            (None, Some(c)) => (Some(c), Stage::SyntaxOnly),
            (None, None) => (None, Stage::SyntaxOnly),
        };
        match check {
            Some(cmd) => {
                let limits = Limits { timeout: self.policy.compile_timeout, ..self.limits(None) };
                let out = run_sandboxed(&ph.expand_all(cmd), dir.path(), &env, b"", limits)
                    .map_err(|e| ValidationError::Sandbox(format!("{}: {e}", cmd[0])))?;
                if out.timed_out || out.code != Some(0) {
                    let mut diag = String::from_utf8_lossy(&out.stderr).into_owned();
                    diag.push_str(&String::from_utf8_lossy(&out.stdout));
                    if out.timed_out {
                        diag.push_str("\n(compile timed out)");
                    }
                    return Ok(Err((stage, truncate(format!("{}: {}", out.status(), diag.trim_end())))));
                }
            }
            None => {
                if let Err(e) = syntax::parse(source, language) {
                    return Ok(Err((stage, e.to_string())));
                }
            }
        }
        let dir_path = dir.path().to_path_buf();
        Ok(Ok(Prepared {
            run: ph.expand_all(&tc.run),
            _dir: dir,
            stage,
            env,
            memory_limit_mb: tc.memory_limit_mb,
            dir_path,
        }))
    }

    fn execute(&self, prog: &Prepared, stdin: &str) -> Result<RunOutcome, ValidationError> {
        run_sandboxed(&prog.run, &prog.dir_path, &prog.env, stdin.as_bytes(), self.limits(prog.memory_limit_mb))
            .map_err(|e| ValidationError::Sandbox(format!("{}: {e}", prog.run[0])))
    }

    /// Pass iff the variant compiles (or parses, for interpreted languages).
    pub fn check_syntax(&self, variant: &BiasVariant) -> Result<ValidationResult, ValidationError> {
        Ok(match self.prepare(&variant.source, variant.language)? {
            Ok(p) => ValidationResult::pass(&variant.variant_id, p.stage),
            Err((stage, diag)) => ValidationResult::fail(&variant.variant_id, stage, diag),
        })
    }

    /// Run original and variant on every io_test and compare.
    pub fn check_behavior(
        &self,
        original: &CodeSample,
        problem: &Problem,
        variant: &BiasVariant,
    ) -> Result<ValidationResult, ValidationError> {
        if problem.is_validation_limited() {
            return Ok(ValidationResult {
                variant_id: variant.variant_id.clone(),
                stage: Stage::SyntaxOnly,
                outcome: Outcome::Limited,
                diagnostics: vec!["problem has no io_tests".into()],
                diffs: vec![],
            });
        }
        let original_runs = match self.prepare(&original.source, original.language)? {
            Ok(p) => self.run_tests(&p, problem)?,
            Err((stage, diag)) => {
                return Ok(ValidationResult::fail(
                    &variant.variant_id,
                    stage,
                    format!("original does not build: {diag}"),
                ))
            }
        };
        self.compare_variant(&original_runs, problem, variant)
    }

    fn run_tests(&self, prog: &Prepared, problem: &Problem) -> Result<Vec<RunOutcome>, ValidationError> {
        problem.io_tests.iter().map(|(stdin, _)| self.execute(prog, stdin)).collect()
    }

    fn compare_variant(
        &self,
        original_runs: &[RunOutcome],
        problem: &Problem,
        variant: &BiasVariant,
    ) -> Result<ValidationResult, ValidationError> {
        let prog = match self.prepare(&variant.source, variant.language)? {
            Ok(p) => p,
            Err((stage, diag)) => return Ok(ValidationResult::fail(&variant.variant_id, stage, diag)),
        };
        let mut result = ValidationResult::pass(&variant.variant_id, Stage::Executed);
        for (i, ((stdin, _), orig)) in problem.io_tests.iter().zip(original_runs).enumerate() {
            let got = self.execute(&prog, stdin)?;
            let same_out = normalize_stdout(&orig.stdout) == normalize_stdout(&got.stdout);
            let same_status = orig.status() == got.status();
            if !same_out || !same_status || orig.timed_out || got.timed_out {
                result.outcome = Outcome::Fail;
                result.diffs.push(TestDiff {
                    test_index: i,
                    original_stdout: truncate(String::from_utf8_lossy(&orig.stdout).into_owned()),
                    variant_stdout: truncate(String::from_utf8_lossy(&got.stdout).into_owned()),
                    original_status: orig.status(),
                    variant_status: got.status(),
                });
                if orig.timed_out || got.timed_out {
                    result.diagnostics.push(format!("test {i}: timed out after {:?}", self.policy.timeout));
                }
            }
        }
        Ok(result)
    }

    /// Validate every variant, updating its `validation_state`. Variants
    /// sharing an original are processed together so the original is built
    /// and run once. Results come back sorted by variant id.
    pub fn validate_batch(&self, variants: &mut [BiasVariant], dataset: &Dataset) -> Vec<ValidationResult> {
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, v) in variants.iter().enumerate() {
            groups.entry(v.base_sample_id.as_str()).or_default().push(i);
        }
        let groups: Vec<(String, Vec<usize>)> = groups.into_iter().map(|(k, v)| (k.to_string(), v)).collect();

        let work = |(sample_id, idxs): &(String, Vec<usize>)| -> Vec<(usize, ValidationResult)> {
            let original = dataset.sample(sample_id);
            let problem = original.and_then(|s| dataset.problem(&s.problem_id));
            let mut original_runs: Option<Result<Vec<RunOutcome>, String>> = None;
            idxs.iter()
                .map(|&i| {
                    let v = &variants[i];
                    let result = match (original, problem) {
                        (Some(o), Some(p)) => self.validate_one(o, p, v, &mut original_runs),
                        _ => ValidationResult::fail(
                            &v.variant_id,
                            Stage::SyntaxOnly,
                            format!("original sample {sample_id} not in dataset"),
                        ),
                    };
                    (i, result)
                })
                .collect()
        };

        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.policy.workers.max(1)).build();
        let mut results: Vec<(usize, ValidationResult)> = match pool {
            Ok(pool) => pool.install(|| groups.par_iter().flat_map_iter(work).collect()),
            Err(_) => groups.iter().flat_map(work).collect(),
        };

        for (i, r) in &results {
            let v = &mut variants[*i];
            if v.validation_state == ValidationState::Flagged {
                continue;
            }
            if r.passed() {
                v.validation_state = ValidationState::Validated;
            } else {
                v.validation_state = ValidationState::Flagged;
                v.flag_reason = Some(summarize(r));
            }
        }
        results.sort_by(|a, b| a.1.variant_id.cmp(&b.1.variant_id));
        results.into_iter().map(|(_, r)| r).collect()
    }

    fn validate_one(
        &self,
        original: &CodeSample,
        problem: &Problem,
        variant: &BiasVariant,
        original_runs: &mut Option<Result<Vec<RunOutcome>, String>>,
    ) -> ValidationResult {
        let id = &variant.variant_id;
        if variant.validation_state == ValidationState::Flagged {
            let reason = variant.flag_reason.clone().unwrap_or_else(|| "flagged before validation".into());
            return ValidationResult::fail(id, Stage::SyntaxOnly, reason);
        }
        if problem.is_validation_limited() {
            return self
                .check_syntax(variant)
                .unwrap_or_else(|e| ValidationResult::fail(id, Stage::SyntaxOnly, e.to_string()));
        }
        let runs = original_runs.get_or_insert_with(|| match self.prepare(&original.source, original.language) {
            Ok(Ok(p)) => self.run_tests(&p, problem).map_err(|e| e.to_string()),
            Ok(Err((_, diag))) => Err(format!("original does not build: {diag}")),
            Err(e) => Err(e.to_string()),
        });
        match runs {
            Ok(runs) => self
                .compare_variant(runs, problem, variant)
                .unwrap_or_else(|e| ValidationResult::fail(id, Stage::SyntaxOnly, e.to_string())),
            Err(e) => ValidationResult::fail(id, Stage::SyntaxOnly, e.clone()),
        }
    }
}

fn truncate(mut s: String) -> String {
    if s.len() > MAX_DIAGNOSTIC {
        let mut cut = MAX_DIAGNOSTIC;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str("...");
    }
    s
}

fn summarize(r: &ValidationResult) -> String {
    if let Some(d) = r.diagnostics.first() {
        let line = d.lines().next().unwrap_or("");
        return format!("{:?} failed: {line}", r.stage);
    }
    match r.diffs.first() {
        Some(d) => format!("output differs on test {}", d.test_index),
        None => format!("{:?} failed", r.stage),
    }
}

/// Record for manual review of a flagged variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlaggedRecord {
    pub variant_id: String,
    pub language: Language,
    pub bias: String,
    pub flag_reason: Option<String>,
    pub variant_source: String,
    pub original_source: Option<String>,
    pub diagnostics: Vec<String>,
    pub diffs: Vec<TestDiff>,
}

/// Flagged variants with their originals and diagnostics, sorted by id.
pub fn flagged_records(
    variants: &[BiasVariant],
    results: &[ValidationResult],
    dataset: &Dataset,
) -> Vec<FlaggedRecord> {
    let by_id: BTreeMap<&str, &ValidationResult> = results.iter().map(|r| (r.variant_id.as_str(), r)).collect();
    let mut out: Vec<FlaggedRecord> = variants
        .iter()
        .filter(|v| v.validation_state == ValidationState::Flagged)
        .map(|v| {
            let r = by_id.get(v.variant_id.as_str());
            FlaggedRecord {
                variant_id: v.variant_id.clone(),
                language: v.language,
                bias: v.bias.to_string(),
                flag_reason: v.flag_reason.clone(),
                variant_source: v.source.clone(),
                original_source: dataset.sample(&v.base_sample_id).map(|s| s.source.clone()),
                diagnostics: r.map(|r| r.diagnostics.clone()).unwrap_or_default(),
                diffs: r.map(|r| r.diffs.clone()).unwrap_or_default(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.variant_id.cmp(&b.variant_id));
    out
}

/// Load toolchains from `path`, resolving it relative to `base` when
/// relative.
pub fn load_toolchains(path: &Path, base: &Path) -> Result<Toolchains, ValidationError> {
    let p = if path.is_absolute() { path.to_path_buf() } else { base.join(path) };
    Toolchains::load(&p)
}
