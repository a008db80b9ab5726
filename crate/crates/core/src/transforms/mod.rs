//! The six bias injections as seeded transformations with provenance.
//!
//! Every transform leaves the program's tokens untouched apart from the
//! bias itself: comment lines are inserted whole, renames rewrite exactly the
//! renameable identifier occurrences, dummy functions are inserted as
//! self-contained blocks. Provenance carries what is needed to undo each one.

mod comments;
mod data;
mod dummy;
mod misleading;
mod rename;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::{CodeSample, Label};
use crate::language::Language;
use crate::syntax::{ParseError, SyntaxError};

pub use comments::{
    inject_authority, inject_reverse_authority, inject_self_declared, remove_lines, CommentTemplate, TemplateKind,
};
pub use data::{default_dummy_pool, default_templates, load_dummy_pool, load_templates};
pub use dummy::{inject_illusory_complexity, remove_spans, DummyFunction};
pub use misleading::{
    check_misleading_output, inject_misleading_task, CannedGenerator, CannedMode, GeneratorError, MisleadingGenerator,
    MisleadingRequest,
};
pub use rename::{generate_names, invert_rename, rename_variables, RenameMap};

/// Rename lengths swept by default.
pub const RENAME_SWEEP_LENGTHS: [usize; 7] = [1, 2, 8, 12, 16, 24, 48];
pub const DEFAULT_RENAME_LENGTH: usize = 24;
pub const DEFAULT_DUMMY_COUNT: usize = 1;
pub const DEFAULT_MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BiasKind {
    Authority,
    ReverseAuthority,
    SelfDeclared,
    MisleadingTask,
    VariableRename { length: usize },
    IllusoryComplexity { count: usize },
}

impl BiasKind {
    /// The standard grid: one of each kind at default parameters.
    pub const DEFAULTS: [BiasKind; 6] = [
        BiasKind::Authority,
        BiasKind::ReverseAuthority,
        BiasKind::SelfDeclared,
        BiasKind::MisleadingTask,
        BiasKind::VariableRename { length: DEFAULT_RENAME_LENGTH },
        BiasKind::IllusoryComplexity { count: DEFAULT_DUMMY_COUNT },
    ];

    /// Biases that only edit comments.
    pub fn is_comment_based(self) -> bool {
        matches!(
            self,
            BiasKind::Authority | BiasKind::ReverseAuthority | BiasKind::SelfDeclared | BiasKind::MisleadingTask
        )
    }

    /// Biases fully determined by input and seed (no generator).
    pub fn is_code_based(self) -> bool {
        self != BiasKind::MisleadingTask
    }

    /// Short column header used in rendered tables.
    pub fn short_name(self) -> String {
        match self {
            BiasKind::Authority => "Authority".into(),
            BiasKind::ReverseAuthority => "RevAuthority".into(),
            BiasKind::SelfDeclared => "SelfDeclared".into(),
            BiasKind::MisleadingTask => "Misleading".into(),
            BiasKind::VariableRename { length } => format!("Rename{length}"),
            BiasKind::IllusoryComplexity { count } => format!("Dummy{count}"),
        }
    }

    pub fn validate(self) -> Result<(), TransformError> {
        match self {
            BiasKind::VariableRename { length: 0 } => {
                Err(TransformError::InvalidParameter("rename length must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for BiasKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BiasKind::Authority => f.write_str("authority"),
            BiasKind::ReverseAuthority => f.write_str("reverse_authority"),
            BiasKind::SelfDeclared => f.write_str("self_declared"),
            BiasKind::MisleadingTask => f.write_str("misleading_task"),
            BiasKind::VariableRename { length } => write!(f, "variable_rename:{length}"),
            BiasKind::IllusoryComplexity { count } => write!(f, "illusory_complexity:{count}"),
        }
    }
}

impl FromStr for BiasKind {
    type Err = TransformError;

    /// Accepts `variable_rename` / `illusory_complexity` with an optional
    /// `:N` parameter (defaults 24 and 1).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => {
                let value = p
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| TransformError::InvalidParameter(format!("bad parameter in `{s}`")))?;
                (n.trim(), Some(value))
            }
            None => (s.trim(), None),
        };
        let kind = match (name, param) {
            ("authority", None) => BiasKind::Authority,
            ("reverse_authority", None) => BiasKind::ReverseAuthority,
            ("self_declared", None) => BiasKind::SelfDeclared,
            ("misleading_task", None) => BiasKind::MisleadingTask,
            ("variable_rename", p) => BiasKind::VariableRename { length: p.unwrap_or(DEFAULT_RENAME_LENGTH) },
            ("illusory_complexity", p) => BiasKind::IllusoryComplexity { count: p.unwrap_or(DEFAULT_DUMMY_COUNT) },
            _ => return Err(TransformError::InvalidParameter(format!("unknown bias `{s}`"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl Serialize for BiasKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BiasKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationState {
    Unvalidated,
    Validated,
    Flagged,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<String>,
    /// Where the template text came from (`default-original` for shipped texts).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_origin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rename_map: Option<RenameMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dummy_function_ids: Option<Vec<String>>,
    /// Byte ranges of inserted function blocks in the variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inserted_spans: Option<Vec<(usize, usize)>>,
    /// 0-based indices of inserted comment lines in the variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inserted_lines: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasVariant {
    pub variant_id: String,
    pub base_sample_id: String,
    pub problem_id: String,
    pub language: Language,
    pub label: Label,
    pub bias: BiasKind,
    pub source: String,
    pub provenance: Provenance,
    pub validation_state: ValidationState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag_reason: Option<String>,
}

impl BiasVariant {
    pub fn variant_id_for(sample_id: &str, bias: BiasKind) -> String {
        format!("{sample_id}~{bias}")
    }

    pub(crate) fn new(sample: &CodeSample, bias: BiasKind, source: String, provenance: Provenance) -> Self {
        BiasVariant {
            variant_id: Self::variant_id_for(&sample.sample_id, bias),
            base_sample_id: sample.sample_id.clone(),
            problem_id: sample.problem_id.clone(),
            language: sample.language,
            label: sample.label,
            bias,
            source,
            provenance,
            validation_state: ValidationState::Unvalidated,
            flag_reason: None,
        }
    }

    /// Reconstruct the original source from the variant and its provenance.
    pub fn invert(&self) -> Result<String, TransformError> {
        let p = &self.provenance;
        if let Some(lines) = &p.inserted_lines {
            return Ok(remove_lines(&self.source, lines));
        }
        if let Some(spans) = &p.inserted_spans {
            return Ok(remove_spans(&self.source, spans));
        }
        if let Some(map) = &p.rename_map {
            return invert_rename(&self.source, self.language, map);
        }
        Err(TransformError::InvalidParameter(format!("variant {} carries no inverse", self.variant_id)))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Syntax(String),
    #[error("template set is empty")]
    EmptyTemplateSet,
    #[error("template `{id}` has kind {found:?}, expected {expected:?}")]
    WrongTemplateKind { id: String, expected: TemplateKind, found: TemplateKind },
    #[error("name space exhausted: need {needed} names of length {length}, only {available} available")]
    NameSpaceExhausted { length: usize, needed: usize, available: usize },
    #[error("dummy pool has {available} {language} functions, need {needed}")]
    PoolTooSmall { language: Language, needed: usize, available: usize },
    #[error("misleading-comment generator unavailable: {0}")]
    GeneratorUnavailable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("reference isolation violated: {0}")]
    IsolationViolated(String),
}

impl From<SyntaxError> for TransformError {
    fn from(e: SyntaxError) -> Self {
        match e {
            SyntaxError::Parse(p) => TransformError::Parse(p),
            other => TransformError::Syntax(other.to_string()),
        }
    }
}

/// Inputs needed by the transforms beyond the sample itself.
#[derive(Clone, Default)]
pub struct TransformConfig {
    pub authority_templates: Vec<CommentTemplate>,
    pub reverse_authority_templates: Vec<CommentTemplate>,
    pub dummy_pool: Vec<DummyFunction>,
    pub generator: Option<Arc<dyn MisleadingGenerator>>,
    pub max_attempts: u32,
}

impl fmt::Debug for TransformConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformConfig")
            .field("authority_templates", &self.authority_templates.len())
            .field("reverse_authority_templates", &self.reverse_authority_templates.len())
            .field("dummy_pool", &self.dummy_pool.len())
            .field("generator", &self.generator.as_ref().map(|g| g.model_id()))
            .field("max_attempts", &self.max_attempts)
            .finish()
    }
}

impl TransformConfig {
    /// Shipped templates and dummy pool, no generator.
    pub fn with_defaults() -> Self {
        let (authority, reverse) = default_templates();
        TransformConfig {
            authority_templates: authority,
            reverse_authority_templates: reverse,
            dummy_pool: default_dummy_pool(),
            generator: None,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

/// Apply one bias to one sample.
pub fn apply(
    sample: &CodeSample,
    bias: BiasKind,
    config: &TransformConfig,
    seed: u64,
) -> Result<BiasVariant, TransformError> {
    bias.validate()?;
    match bias {
        BiasKind::SelfDeclared => inject_self_declared(sample),
        BiasKind::Authority => inject_authority(sample, &config.authority_templates, seed),
        BiasKind::ReverseAuthority => inject_reverse_authority(sample, &config.reverse_authority_templates, seed),
        BiasKind::MisleadingTask => {
            let generator = config
                .generator
                .as_deref()
                .ok_or_else(|| TransformError::GeneratorUnavailable("no generator configured".into()))?;
            inject_misleading_task(sample, generator, config.max_attempts.max(1), seed)
        }
        BiasKind::VariableRename { length } => rename_variables(sample, length, seed),
        BiasKind::IllusoryComplexity { count } => inject_illusory_complexity(sample, &config.dummy_pool, count, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bias_names_round_trip() {
        for bias in BiasKind::DEFAULTS {
            assert_eq!(bias.to_string().parse::<BiasKind>().unwrap(), bias);
        }
        assert_eq!("variable_rename".parse::<BiasKind>().unwrap(), BiasKind::VariableRename { length: 24 });
        assert_eq!("illusory_complexity:3".parse::<BiasKind>().unwrap(), BiasKind::IllusoryComplexity { count: 3 });
        assert!("variable_rename:0".parse::<BiasKind>().is_err());
        assert!("shouting".parse::<BiasKind>().is_err());
    }

    #[test]
    fn bias_serializes_as_string() {
        let json = serde_json::to_string(&BiasKind::VariableRename { length: 8 }).unwrap();
        assert_eq!(json, "\"variable_rename:8\"");
    }
}
