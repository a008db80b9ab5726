//! The five stages, and `run` chaining them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    read_jsonl, GeneratorConfig, Journal, JournalEntry, Layout, PipelineError, RunConfig, StageName, StageOutcome,
    StageWriter, Upstream, ValidationMode,
};
use crate::corpus::{self, Dataset, Label};
use crate::fsio;
use crate::judge::{EvalItem, Judge, JudgeGenerator, Paradigm, PromptTemplates, TestCaseSet, Usage, Verdict};
use crate::language::Language;
use crate::metrics::{self, Condition, JudgmentRecord, SweepFamily};
use crate::rng::derive_seed;
use crate::syntax;
use crate::transforms::{
    self, BiasKind, BiasVariant, CannedGenerator, MisleadingGenerator, TransformConfig, ValidationState,
};
use crate::validation::{self, Outcome, Stage, ValidationResult, Validator};

const DATASET_FILE: &str = "dataset/dataset.jsonl";
const VARIANTS_FILE: &str = "variants/variants.jsonl";
const VALIDATED_FILE: &str = "validation/variants.jsonl";

fn data(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Data(e.to_string())
}

fn config_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Config(e.to_string())
}

/// One judgment as stored, with what scoring needs alongside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredJudgment {
    pub judge_id: String,
    pub language: Language,
    pub condition: Condition,
    pub paradigm: Paradigm,
    /// Base sample id, shared by the original and its variants.
    pub item_id: String,
    /// Id of the code actually shown: the sample id or the variant id.
    pub eval_id: String,
    pub label: Label,
    pub trial_index: u32,
    pub verdict: Verdict,
    pub raw_output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
}

impl StoredJudgment {
    pub fn record(&self) -> JudgmentRecord {
        JudgmentRecord {
            judge_id: self.judge_id.clone(),
            language: self.language,
            condition: self.condition,
            paradigm: self.paradigm,
            item_id: self.item_id.clone(),
            label: self.label,
            trial_index: self.trial_index,
            verdict: self.verdict,
        }
    }

    fn sort_key(&self) -> (Paradigm, Condition, Language, &str, u32) {
        (self.paradigm, self.condition, self.language, &self.item_id, self.trial_index)
    }
}

/// Run one stage.
pub fn run_stage(stage: StageName, config: &RunConfig, layout: &Layout) -> Result<StageOutcome, PipelineError> {
    let path = layout.root().join("config.toml");
    fsio::write_atomic(&path, config.to_toml().as_bytes()).map_err(|e| PipelineError::io(&path, e))?;
    layout.log(stage, "start");
    let result = match stage {
        StageName::Ingest => ingest(config, layout),
        StageName::Inject => inject(config, layout),
        StageName::Validate => validate(config, layout),
        StageName::Evaluate => evaluate(config, layout),
        StageName::Report => report(config, layout),
    };
    match &result {
        Ok(o) => layout.log(stage, &o.summary()),
        Err(e) => layout.log(stage, &format!("error: {e}")),
    }
    result
}

/// All five stages in order, stopping at the first error.
pub fn run(config: &RunConfig, layout: &Layout) -> Result<Vec<StageOutcome>, PipelineError> {
    StageName::ALL.iter().map(|&s| run_stage(s, config, layout)).collect()
}

fn load_dataset(layout: &Layout) -> Result<Dataset, PipelineError> {
    let path = layout.path(DATASET_FILE);
    corpus::load_dataset(&path).map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))
}

fn inputs(ups: &[(&str, &Upstream)]) -> BTreeMap<String, String> {
    ups.iter().map(|(k, u)| (k.to_string(), u.hash.clone())).collect()
}

pub fn ingest(config: &RunConfig, layout: &Layout) -> Result<StageOutcome, PipelineError> {
    let mut w = StageWriter::begin(layout, StageName::Ingest)?;
    let source = match &config.dataset.path {
        Some(p) => corpus::load_dataset(p).map_err(|e| PipelineError::Data(format!("{}: {e}", p.display())))?,
        None => corpus::mini_corpus(),
    };
    let languages = config.dataset.languages();
    let samples = source.samples.into_iter().filter(|s| languages.contains(&s.language)).collect();
    let mut ds = Dataset::new(source.problems, samples, None);
    if config.dataset.strip_comments {
        ds.normalize().map_err(data)?;
    }

    let mut problems = BTreeMap::new();
    let mut samples = Vec::new();
    for &language in &languages {
        let n = match config.dataset.pairs_per_language {
            Some(n) => n,
            None => paired_problems(&ds, language),
        };
        if n == 0 {
            if !config.dataset.languages.is_empty() {
                return Err(PipelineError::Data(format!(
                    "no problem has both a correct and an incorrect {language} sample"
                )));
            }
            continue;
        }
        let pairs = corpus::prepare_pairs(&ds, language, n, derive_seed(config.seed, "pairs")).map_err(data)?;
        for p in pairs {
            samples.push(p.correct);
            samples.push(p.incorrect);
            problems.insert(p.problem.problem_id.clone(), p.problem);
        }
    }
    if samples.is_empty() {
        return Err(PipelineError::Data("the dataset has no paired samples in the selected languages".into()));
    }
    samples.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    let ds = Dataset::new(problems, samples, Some(config.seed));
    ds.check_pairing().map_err(data)?;
    w.write("dataset.jsonl", ds.to_jsonl().as_bytes())?;

    let mut counts = BTreeMap::from([
        ("problems".to_string(), ds.problems.len() as u64),
        ("samples".into(), ds.samples.len() as u64),
    ]);
    for s in &ds.samples {
        *counts.entry(format!("samples.{}", s.language)).or_default() += 1;
    }
    let details = serde_json::to_value(&ds.manifest).expect("manifest serializes");
    w.finish(config.seed, BTreeMap::new(), counts.clone(), details)?;
    Ok(StageOutcome { stage: StageName::Ingest, partial: false, counts })
}

fn paired_problems(ds: &Dataset, language: Language) -> usize {
    let mut labels: BTreeMap<&str, BTreeSet<Label>> = BTreeMap::new();
    for s in ds.samples.iter().filter(|s| s.language == language) {
        labels.entry(&s.problem_id).or_default().insert(s.label);
    }
    labels.values().filter(|l| l.len() == 2).count()
}

fn prompts(config: &RunConfig) -> Result<PromptTemplates, PipelineError> {
    match &config.prompts_dir {
        Some(dir) => PromptTemplates::load_dir(dir).map_err(config_err),
        None => Ok(PromptTemplates::default()),
    }
}

fn transform_config(config: &RunConfig, layout: &Layout) -> Result<TransformConfig, PipelineError> {
    let mut t = TransformConfig::with_defaults();
    if let Some(p) = &config.transforms.templates {
        let (authority, reverse) =
            transforms::load_templates(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
        t.authority_templates = authority;
        t.reverse_authority_templates = reverse;
    }
    if let Some(p) = &config.transforms.dummy_pool {
        t.dummy_pool = transforms::load_dummy_pool(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
    }
    t.max_attempts = config.transforms.max_attempts;
    // Only build a generator when it will be used, so a live generator's
    // credentials are not required otherwise.
    if config.biases.contains(&BiasKind::MisleadingTask) {
        t.generator = match &config.generator {
            None => None,
            Some(GeneratorConfig::Canned) => {
                Some(Arc::new(CannedGenerator::well_formed()) as Arc<dyn MisleadingGenerator>)
            }
            Some(GeneratorConfig::Judge { judge_id }) => {
                let jc = config
                    .judges
                    .iter()
                    .find(|j| &j.judge_id == judge_id)
                    .ok_or_else(|| config_err(format!("generator refers to unknown judge `{judge_id}`")))?;
                let replay = layout.replay_path(&format!("generator-{judge_id}"));
                let judge = Judge::from_config(jc.clone(), prompts(config)?, Some(&replay)).map_err(config_err)?;
                Some(Arc::new(JudgeGenerator::new(Arc::new(judge))) as Arc<dyn MisleadingGenerator>)
            }
        };
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InjectFailure {
    sample_id: String,
    bias: BiasKind,
    error: String,
}

pub fn inject(config: &RunConfig, layout: &Layout) -> Result<StageOutcome, PipelineError> {
    let ingest = Upstream::load(layout, StageName::Ingest)?;
    let ds = load_dataset(layout)?;
    let mut w = StageWriter::begin(layout, StageName::Inject)?;
    let tcfg = transform_config(config, layout)?;

    let grid: Vec<(&corpus::CodeSample, BiasKind)> =
        ds.samples.iter().flat_map(|s| config.biases.iter().map(move |&b| (s, b))).collect();
    let results: Vec<Result<BiasVariant, InjectFailure>> = grid
        .par_iter()
        .map(|&(s, bias)| {
            let seed = derive_seed(config.seed, &format!("{}/{bias}", s.sample_id));
            transforms::apply(s, bias, &tcfg, seed).map_err(|e| InjectFailure {
                sample_id: s.sample_id.clone(),
                bias,
                error: e.to_string(),
            })
        })
        .collect();
    let (mut variants, mut failures) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(v) => variants.push(v),
            Err(f) => failures.push(f),
        }
    }
    variants.sort_by(|a, b| a.variant_id.cmp(&b.variant_id));
    failures.sort_by(|a, b| (&a.sample_id, a.bias.to_string()).cmp(&(&b.sample_id, b.bias.to_string())));
    for f in &failures {
        log::warn!("{} / {}: {}", f.sample_id, f.bias, f.error);
    }
    w.write_jsonl("variants.jsonl", &variants)?;
    w.write_jsonl("errors.jsonl", &failures)?;

    let flagged = variants.iter().filter(|v| v.validation_state == ValidationState::Flagged).count();
    let mut counts = BTreeMap::from([
        ("variants".to_string(), variants.len() as u64),
        ("errors".into(), failures.len() as u64),
        ("flagged".into(), flagged as u64),
    ]);
    for v in &variants {
        *counts.entry(format!("variants.{}", v.bias)).or_default() += 1;
    }
    w.finish(config.seed, inputs(&[("ingest", &ingest)]), counts.clone(), serde_json::Value::Null)?;
    Ok(StageOutcome { stage: StageName::Inject, partial: flagged + failures.len() > 0, counts })
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    variant_id: &'a str,
    language: Language,
    bias: String,
    stage: Option<Stage>,
    outcome: Option<Outcome>,
    state: ValidationState,
    flag_reason: Option<&'a str>,
}

/// Parse/compile only. Without a toolchain file, parsing is done in-process.
fn syntax_result(v: &BiasVariant, validator: Option<&Validator>) -> ValidationResult {
    let fail = |diag: String| ValidationResult {
        variant_id: v.variant_id.clone(),
        stage: Stage::SyntaxOnly,
        outcome: Outcome::Fail,
        diagnostics: vec![diag],
        diffs: vec![],
    };
    match validator {
        Some(val) => val.check_syntax(v).unwrap_or_else(|e| fail(e.to_string())),
        None => match syntax::parse(&v.source, v.language) {
            Ok(_) => ValidationResult {
                variant_id: v.variant_id.clone(),
                stage: Stage::SyntaxOnly,
                outcome: Outcome::Pass,
                diagnostics: vec![],
                diffs: vec![],
            },
            Err(e) => fail(e.to_string()),
        },
    }
}

pub fn validate(config: &RunConfig, layout: &Layout) -> Result<StageOutcome, PipelineError> {
    let ingest = Upstream::load(layout, StageName::Ingest)?;
    let inject = Upstream::load(layout, StageName::Inject)?;
    let ds = load_dataset(layout)?;
    let all: Vec<BiasVariant> = read_jsonl(&layout.path(VARIANTS_FILE))?;
    let mut w = StageWriter::begin(layout, StageName::Validate)?;

    let toolchains = match &config.validation.toolchains {
        Some(p) => Some(validation::load_toolchains(p, Path::new("")).map_err(config_err)?),
        None => None,
    };
    let (mut pending, done): (Vec<BiasVariant>, Vec<BiasVariant>) =
        all.into_iter().partition(|v| v.validation_state == ValidationState::Unvalidated);
    let mut results = match config.validation.mode {
        ValidationMode::Behavior => {
            let tc = toolchains.ok_or_else(|| {
                config_err("behavior validation needs validation.toolchains (or set validation.mode = \"syntax\")")
            })?;
            let validator = Validator::new(tc, config.validation.policy.clone()).map_err(config_err)?;
            validator.validate_batch(&mut pending, &ds)
        }
        ValidationMode::Syntax => {
            let validator = match toolchains {
                Some(tc) => Some(Validator::new(tc, config.validation.policy.clone()).map_err(config_err)?),
                None => None,
            };
            let results: Vec<ValidationResult> =
                pending.par_iter().map(|v| syntax_result(v, validator.as_ref())).collect();
            for (v, r) in pending.iter_mut().zip(&results) {
                if r.outcome == Outcome::Fail {
                    v.validation_state = ValidationState::Flagged;
                    v.flag_reason = Some(format!("syntax check failed: {}", r.diagnostics.join("; ")));
                } else {
                    v.validation_state = ValidationState::Validated;
                }
            }
            results
        }
    };
    results.sort_by(|a, b| a.variant_id.cmp(&b.variant_id));
    let mut variants = pending;
    variants.extend(done);
    variants.sort_by(|a, b| a.variant_id.cmp(&b.variant_id));

    let by_id: BTreeMap<&str, &ValidationResult> = results.iter().map(|r| (r.variant_id.as_str(), r)).collect();
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    for v in &variants {
        let r = by_id.get(v.variant_id.as_str());
        csv.serialize(SummaryRow {
            variant_id: &v.variant_id,
            language: v.language,
            bias: v.bias.to_string(),
            stage: r.map(|r| r.stage),
            outcome: r.map(|r| r.outcome),
            state: v.validation_state,
            flag_reason: v.flag_reason.as_deref(),
        })
        .map_err(data)?;
    }
    let summary = csv.into_inner().map_err(data)?;
    let flagged = validation::flagged_records(&variants, &results, &ds);

    w.write_jsonl("variants.jsonl", &variants)?;
    w.write_jsonl("results.jsonl", &results)?;
    w.write("summary.csv", &summary)?;
    w.write_jsonl("flagged.jsonl", &flagged)?;

    let mut counts = BTreeMap::from([
        ("variants".to_string(), variants.len() as u64),
        ("flagged".into(), flagged.len() as u64),
        ("limited".into(), results.iter().filter(|r| r.outcome == Outcome::Limited).count() as u64),
    ]);
    let mut per_bias: BTreeMap<String, BTreeMap<&str, u64>> = BTreeMap::new();
    for v in &variants {
        let state = match v.validation_state {
            ValidationState::Validated => "validated",
            ValidationState::Flagged => "flagged",
            ValidationState::Unvalidated => "unvalidated",
        };
        *per_bias.entry(v.bias.to_string()).or_default().entry(state).or_default() += 1;
        if v.validation_state == ValidationState::Validated {
            *counts.entry("validated".into()).or_default() += 1;
        }
    }
    counts.entry("validated".into()).or_default();
    let details = serde_json::json!({ "mode": config.validation.mode, "by_bias": per_bias });
    w.finish(config.seed, inputs(&[("ingest", &ingest), ("inject", &inject)]), counts.clone(), details)?;
    Ok(StageOutcome { stage: StageName::Validate, partial: !flagged.is_empty(), counts })
}

/// Items per condition: originals, then one condition per configured bias
/// holding its validated variants.
fn conditions(config: &RunConfig, ds: &Dataset, variants: &[BiasVariant]) -> Vec<(Condition, Vec<EvalItem>)> {
    let mut out = vec![(
        Condition::Original,
        ds.samples
            .iter()
            .map(|s| EvalItem {
                item_id: s.sample_id.clone(),
                problem_id: s.problem_id.clone(),
                language: s.language,
                code: s.source.clone(),
                label: s.label,
            })
            .collect(),
    )];
    for &bias in &config.biases {
        let items: Vec<EvalItem> = variants
            .iter()
            .filter(|v| v.bias == bias && v.validation_state == ValidationState::Validated)
            .map(|v| EvalItem {
                item_id: v.variant_id.clone(),
                problem_id: v.problem_id.clone(),
                language: v.language,
                code: v.source.clone(),
                label: v.label,
            })
            .collect();
        if items.is_empty() {
            log::warn!("no validated {bias} variants to evaluate");
            continue;
        }
        out.push((Condition::Biased(bias), items));
    }
    out
}

/// Identifies what a journal was recorded against, so a journal from a
/// different judge setup or different inputs is never replayed.
fn journal_fingerprint(jc: &crate::judge::JudgeConfig, prompts: &PromptTemplates, upstream: &[&Upstream]) -> String {
    let mut text = serde_json::to_string(jc).expect("judge config serializes");
    for p in [&prompts.direct, &prompts.testcase_generation, &prompts.testcase_evaluation] {
        text.push('\0');
        text.push_str(p);
    }
    for u in upstream {
        text.push('\0');
        text.push_str(&u.hash);
    }
    fsio::sha256_hex(text.as_bytes())[..16].to_string()
}

/// Remove this judge's journals recorded under another fingerprint.
fn drop_stale_journals(current: &Path, judge_id: &str) {
    let Some(dir) = current.parent() else { return };
    let Ok(entries) = std::fs::read_dir(dir) else { return };
    for entry in entries.flatten() {
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        let stale = name
            .strip_prefix(judge_id)
            .and_then(|r| r.strip_prefix('-'))
            .and_then(|r| r.strip_suffix(".jsonl"))
            .is_some_and(|fp| fp.len() == 16 && fp.bytes().all(|b| b.is_ascii_hexdigit()));
        if stale && path != current {
            log::info!("{judge_id}: discarding journal {} from a different setup", path.display());
            let _ = std::fs::remove_file(&path);
        }
    }
}

pub fn evaluate(config: &RunConfig, layout: &Layout) -> Result<StageOutcome, PipelineError> {
    if config.judges.is_empty() {
        return Err(PipelineError::Config("no judges configured".into()));
    }
    let ingest = Upstream::load(layout, StageName::Ingest)?;
    let validated = Upstream::load(layout, StageName::Validate)?;
    let ds = load_dataset(layout)?;
    let variants: Vec<BiasVariant> = read_jsonl(&layout.path(VALIDATED_FILE))?;
    let prompts = prompts(config)?;
    let conditions = conditions(config, &ds, &variants);
    let meta: BTreeMap<&str, (&str, Language, Label)> = ds
        .samples
        .iter()
        .map(|s| (s.sample_id.as_str(), (s.sample_id.as_str(), s.language, s.label)))
        .chain(variants.iter().map(|v| (v.variant_id.as_str(), (v.base_sample_id.as_str(), v.language, v.label))))
        .collect();

    let mut w = StageWriter::begin(layout, StageName::Evaluate)?;
    let mut journals = Vec::new();
    let mut counts = BTreeMap::new();
    let mut errors = 0u64;
    for jc in &config.judges {
        let id = &jc.judge_id;
        let judge =
            Judge::from_config(jc.clone(), prompts.clone(), Some(&layout.replay_path(id))).map_err(config_err)?;
        let fp = journal_fingerprint(jc, &prompts, &[&ingest, &validated]);
        let jpath = layout.path(&format!("judgments/journal/{id}-{fp}.jsonl"));
        drop_stale_journals(&jpath, id);
        let journal = Journal::open(&jpath, []).map_err(|e| PipelineError::io(&jpath, e))?;
        if journal.resumed() > 0 {
            log::info!("{id}: resuming with {} recorded judgments", journal.resumed());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jc.max_in_flight.max(1))
            .build()
            .map_err(|e| PipelineError::Config(format!("{id}: thread pool: {e}")))?;

        let mut cases: BTreeMap<String, TestCaseSet> = BTreeMap::new();
        if config.paradigms.contains(&Paradigm::TestCaseBased) {
            let problems: Vec<&corpus::Problem> = ds.problems.values().collect();
            let sets: Vec<TestCaseSet> = pool.install(|| {
                problems
                    .par_iter()
                    .map(|p| {
                        journal.test_cases(&p.problem_id).cloned().unwrap_or_else(|| {
                            let set = judge.generate_test_cases(p);
                            journal.append(&JournalEntry::TestCases { set: set.clone() });
                            set
                        })
                    })
                    .collect()
            });
            cases = sets.into_iter().map(|s| (s.item_id.clone(), s)).collect();
        }

        let mut stored = Vec::new();
        for &paradigm in &config.paradigms {
            for (condition, items) in &conditions {
                let matrix = judge.run_condition(items, &ds.problems, paradigm, &cases, &journal.sink(*condition));
                for j in matrix.judgments {
                    let (base, language, label) = meta[j.item_id.as_str()];
                    stored.push(StoredJudgment {
                        judge_id: j.judge_id,
                        language,
                        condition: *condition,
                        paradigm,
                        item_id: base.to_string(),
                        eval_id: j.item_id,
                        label,
                        trial_index: j.trial_index,
                        verdict: j.verdict,
                        raw_output: j.raw_output,
                        error: j.error,
                        usage: j.usage,
                    });
                }
            }
        }
        stored.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let judge_errors = stored.iter().filter(|s| s.error.is_some()).count() as u64;
        let unparseable = stored.iter().filter(|s| s.verdict == Verdict::Unparseable).count() as u64;
        if judge_errors > 0 {
            log::warn!("{id}: {judge_errors} judgments failed; see judgments/{id}.jsonl");
        }
        errors += judge_errors;
        counts.insert(format!("{id}.judgments"), stored.len() as u64);
        counts.insert(format!("{id}.errors"), judge_errors);
        counts.insert(format!("{id}.unparseable"), unparseable);
        w.write_jsonl(&format!("{id}.jsonl"), &stored)?;
        if !cases.is_empty() {
            let sets: Vec<&TestCaseSet> = cases.values().collect();
            w.write_jsonl(&format!("testcases/{id}.jsonl"), &sets)?;
        }
        journals.push((jpath, journal));
    }
    w.finish(
        config.seed,
        inputs(&[("ingest", &ingest), ("validate", &validated)]),
        counts.clone(),
        serde_json::Value::Null,
    )?;
    // Journals go only once the manifest is durable.
    for (path, journal) in journals {
        journal.finish().map_err(|e| PipelineError::io(&path, e))?;
    }
    Ok(StageOutcome { stage: StageName::Evaluate, partial: errors > 0, counts })
}

pub fn report(config: &RunConfig, layout: &Layout) -> Result<StageOutcome, PipelineError> {
    let evaluated = Upstream::load(layout, StageName::Evaluate)?;
    let mut records = Vec::new();
    for rel in evaluated.outputs_matching(|r| !r.contains('/') && r.ends_with(".jsonl")) {
        let stored: Vec<StoredJudgment> = read_jsonl(&layout.path(&rel))?;
        records.extend(stored.iter().map(StoredJudgment::record));
    }
    if records.is_empty() {
        return Err(PipelineError::Data(format!(
            "the judgment store in {} is empty; nothing to report",
            layout.path("judgments").display()
        )));
    }
    let rep = metrics::report_from_records(&records, config.report.dead_band).map_err(data)?;
    let mut w = StageWriter::begin(layout, StageName::Report)?;
    w.write("judgments.csv", metrics::records_to_csv(&records).map_err(data)?.as_bytes())?;
    w.write("report.csv", metrics::report_to_csv(&rep).map_err(data)?.as_bytes())?;
    w.write("mad.csv", metrics::mad_to_csv(&rep).map_err(data)?.as_bytes())?;
    w.write("table.txt", metrics::render_table(&rep).as_bytes())?;
    for (family, name) in
        [(SweepFamily::RenameLength, "sweep_rename_length.csv"), (SweepFamily::DummyCount, "sweep_dummy_count.csv")]
    {
        let params: BTreeSet<BiasKind> = rep
            .rows
            .iter()
            .filter_map(|r| r.key.condition.bias())
            .filter(|b| match family {
                SweepFamily::RenameLength => matches!(b, BiasKind::VariableRename { .. }),
                SweepFamily::DummyCount => matches!(b, BiasKind::IllusoryComplexity { .. }),
            })
            .collect();
        if params.len() >= 2 {
            let points = metrics::sweep_summary(&rep, family).map_err(data)?;
            w.write(name, metrics::sweep_to_csv(&points).map_err(data)?.as_bytes())?;
        }
    }
    let counts = BTreeMap::from([
        ("records".to_string(), records.len() as u64),
        ("rows".into(), rep.rows.len() as u64),
        ("mad_entries".into(), rep.mads.len() as u64),
    ]);
    w.finish(config.seed, inputs(&[("evaluate", &evaluated)]), counts.clone(), serde_json::Value::Null)?;
    Ok(StageOutcome { stage: StageName::Report, partial: false, counts })
}
