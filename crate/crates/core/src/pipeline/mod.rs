//! Staged runs over an output directory.
//!
//! Every stage reads what earlier stages left in the run directory, writes
//! its own files atomically and finishes with a `manifest.json` that lists
//! the SHA-256 of each output. A stage removes its manifest before starting,
//! so a half-finished stage is never mistaken for a finished one, and the
//! next stage refuses to read outputs whose hashes no longer match.

mod config;
mod journal;
mod stages;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::fsio;

pub use config::{
    DatasetConfig, GeneratorConfig, ReportConfig, RunConfig, TransformsConfig, ValidationConfig, ValidationMode,
};
pub use journal::{ConditionSink, Journal, JournalEntry};
pub use stages::{evaluate, ingest, inject, report, run, run_stage, validate, StoredJudgment};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    /// Bad config, missing credentials or an unusable toolchain.
    #[error("{0}")]
    Config(String),
    /// Missing, malformed or stale inputs.
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl PipelineError {
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Config(_) => "config",
            PipelineError::Data(_) => "data",
            PipelineError::Io { .. } => "io",
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Data(_) | PipelineError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.display().to_string(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageName {
    Ingest,
    Inject,
    Validate,
    Evaluate,
    Report,
}

impl StageName {
    pub const ALL: [StageName; 5] =
        [StageName::Ingest, StageName::Inject, StageName::Validate, StageName::Evaluate, StageName::Report];

    pub fn as_str(self) -> &'static str {
        match self {
            StageName::Ingest => "ingest",
            StageName::Inject => "inject",
            StageName::Validate => "validate",
            StageName::Evaluate => "evaluate",
            StageName::Report => "report",
        }
    }

    /// Subdirectory of the run directory holding this stage's outputs.
    pub fn dir(self) -> &'static str {
        match self {
            StageName::Ingest => "dataset",
            StageName::Inject => "variants",
            StageName::Validate => "validation",
            StageName::Evaluate => "judgments",
            StageName::Report => "reports",
        }
    }
}

impl fmt::Display for StageName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a finished stage tells its caller.
#[derive(Debug, Clone, PartialEq)]
pub struct StageOutcome {
    pub stage: StageName,
    /// Some items failed or were flagged; the details are in the stage's files.
    pub partial: bool,
    pub counts: BTreeMap<String, u64>,
}

impl StageOutcome {
    pub fn summary(&self) -> String {
        let counts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let status = if self.partial { "partial" } else { "ok" };
        format!("{}: {status} {}", self.stage, counts.join(" "))
    }
}

/// Contents of a stage's `manifest.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: StageName,
    pub seed: u64,
    /// Upstream stage name to the SHA-256 of its manifest.
    pub inputs: BTreeMap<String, String>,
    /// Output path, relative to the run directory, to its SHA-256.
    pub outputs: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

/// Paths inside one run directory.
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn manifest_path(&self, stage: StageName) -> PathBuf {
        self.root.join(stage.dir()).join("manifest.json")
    }

    pub fn log_path(&self) -> PathBuf {
        self.root.join("logs").join("run.log")
    }

    pub fn replay_path(&self, name: &str) -> PathBuf {
        self.root.join("logs").join("replay").join(format!("{name}.jsonl"))
    }

    /// Append a line to `logs/run.log`. Failures only warn: the log is for
    /// people, not for later stages.
    pub fn log(&self, stage: StageName, message: &str) {
        let path = self.log_path();
        let line = format!("{} {stage} {message}\n", crate::judge::now_millis());
        let res = fs::create_dir_all(path.parent().expect("log has a parent"))
            .and_then(|_| fs::OpenOptions::new().create(true).append(true).open(&path))
            .and_then(|mut f| f.write_all(line.as_bytes()));
        if let Err(e) = res {
            log::warn!("{}: {e}", path.display());
        }
    }
}

/// Collects a stage's outputs and writes them with their manifest.
pub(crate) struct StageWriter<'a> {
    layout: &'a Layout,
    stage: StageName,
    outputs: BTreeMap<String, String>,
}

impl<'a> StageWriter<'a> {
    /// Start a stage: its old manifest is removed first.
    pub fn begin(layout: &'a Layout, stage: StageName) -> Result<Self, PipelineError> {
        let manifest = layout.manifest_path(stage);
        match fs::remove_file(&manifest) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(PipelineError::io(&manifest, e)),
        }
        let dir = layout.root.join(stage.dir());
        fs::create_dir_all(&dir).map_err(|e| PipelineError::io(&dir, e))?;
        Ok(StageWriter { layout, stage, outputs: BTreeMap::new() })
    }

    /// Write `rel` (relative to the stage directory) and record its hash.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let rel = format!("{}/{rel}", self.stage.dir());
        let path = self.layout.path(&rel);
        fsio::write_atomic(&path, bytes).map_err(|e| PipelineError::io(&path, e))?;
        self.outputs.insert(rel, fsio::sha256_hex(bytes));
        Ok(())
    }

    pub fn write_jsonl<T: Serialize>(&mut self, rel: &str, records: &[T]) -> Result<(), PipelineError> {
        let text = fsio::to_jsonl(records).map_err(|e| PipelineError::Data(format!("{rel}: {e}")))?;
        self.write(rel, text.as_bytes())
    }

    pub fn finish(
        self,
        seed: u64,
        inputs: BTreeMap<String, String>,
        counts: BTreeMap<String, u64>,
        details: serde_json::Value,
    ) -> Result<StageManifest, PipelineError> {
        let manifest = StageManifest { stage: self.stage, seed, inputs, outputs: self.outputs, counts, details };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.layout.manifest_path(self.stage);
        fsio::write_atomic(&path, text.as_bytes()).map_err(|e| PipelineError::io(&path, e))?;
        Ok(manifest)
    }
}

/// A finished upstream stage, checked against its manifest.
#[derive(Debug, Clone)]
pub struct Upstream {
    pub manifest: StageManifest,
    /// SHA-256 of the manifest file itself.
    pub hash: String,
}

impl Upstream {
    pub fn load(layout: &Layout, stage: StageName) -> Result<Self, PipelineError> {
        let path = layout.manifest_path(stage);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(PipelineError::Data(format!(
                    "{} has no finished {stage} stage (missing {}); run `bias-forge {stage}` first",
                    layout.root.display(),
                    path.display()
                )))
            }
            Err(e) => return Err(PipelineError::io(&path, e)),
        };
        let manifest: StageManifest = serde_json::from_slice(&bytes)
            .map_err(|e| PipelineError::Data(format!("{}: malformed manifest: {e}", path.display())))?;
        for (rel, want) in &manifest.outputs {
            let p = layout.path(rel);
            let got = fs::read(&p).map_err(|e| PipelineError::io(&p, e))?;
            if fsio::sha256_hex(&got) != *want {
                return Err(PipelineError::Data(format!(
                    "{} changed after the {stage} stage wrote it; rerun `bias-forge {stage}`",
                    p.display()
                )));
            }
        }
        Ok(Upstream { manifest, hash: fsio::sha256_hex(&bytes) })
    }

    /// Outputs under the stage directory whose relative name satisfies `pred`.
    pub fn outputs_matching(&self, pred: impl Fn(&str) -> bool) -> Vec<String> {
        let prefix = format!("{}/", self.manifest.stage.dir());
        self.manifest.outputs.keys().filter(|k| k.strip_prefix(&prefix).is_some_and(&pred)).cloned().collect()
    }
}

/// Parse JSON Lines, naming the file and 1-based line of the first bad record.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    parse_jsonl(&text, &path.display().to_string())
}

pub fn parse_jsonl<T: DeserializeOwned>(text: &str, name: &str) -> Result<Vec<T>, PipelineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PipelineError::Data(format!("{name}:{}: malformed record: {e}", i + 1)))
        })
        .collect()
}
