//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. The live-judge check reports SKIP when
//! no API key is set or its endpoint cannot be resolved.
//!
//! `cargo test --test acceptance -- C5 C7` runs only the named criteria.
//!
//! Tolerances are fixed here and nowhere else.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::net::ToSocketAddrs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use bias_forge::corpus::{mini_corpus, CodeSample, Dataset, Label};
use bias_forge::judge::{
    EvalItem, Judge, JudgeConfig, MockAnswer, MockCondition, MockRule, MockSpec, NoSink, Paradigm, PromptTemplates,
    Purpose, ReplayEntry, Verdict,
};
use bias_forge::language::Language;
use bias_forge::metrics::{
    mad_from_csv, records_from_csv, render_table, report_from_csv, report_from_records, Direction, RobustnessReport,
};
use bias_forge::metrics::{Condition, ReportRow};
use bias_forge::pipeline::{Layout, RunConfig, StageName};
use bias_forge::rng::{derive_seed, SeededRng};
use bias_forge::syntax;
use bias_forge::transforms::{
    apply, generate_names, rename_variables, BiasKind, CannedGenerator, TransformConfig, TransformError,
    ValidationState, RENAME_SWEEP_LENGTHS,
};
use bias_forge::validation::{Toolchains, ValidationPolicy, Validator};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, RngAlgorithm, TestCaseError, TestRng, TestRunner};

/// Numeric agreement for metrics and analytic predictions.
const EPS: f64 = 1e-9;
/// Wall-clock budget for behavioral validation of the mini-corpus.
const VALIDATION_BUDGET: Duration = Duration::from_secs(600);
/// Randomized cases for the inverse and rename properties.
const INVERSE_CASES: u32 = 1000;
const RENAME_CASES: u32 = 300;
/// Slack allowed between request start times under a rate limit.
const RATE_SLACK_MS: u64 = 50;
/// Journal lines to wait for before killing an evaluation.
const KILL_AFTER_LINES: usize = 300;
const SEED: u64 = 20240611;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn repo_config(name: &str) -> PathBuf {
    manifest_dir().join("../../config").join(name)
}

fn corpus() -> &'static Dataset {
    static DS: OnceLock<Dataset> = OnceLock::new();
    DS.get_or_init(|| {
        let mut ds = mini_corpus();
        ds.normalize().unwrap();
        ds
    })
}

fn transform_config() -> &'static TransformConfig {
    static CFG: OnceLock<TransformConfig> = OnceLock::new();
    CFG.get_or_init(|| TransformConfig {
        generator: Some(Arc::new(CannedGenerator::well_formed())),
        ..TransformConfig::with_defaults()
    })
}

fn runner(cases: u32) -> TestRunner {
    let config =
        PropConfig { cases, failure_persistence: None, max_global_rejects: cases * 4, ..PropConfig::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

// ---------------------------------------------------------------- C1

const C1_BIASES: [BiasKind; 5] = [
    BiasKind::SelfDeclared,
    BiasKind::Authority,
    BiasKind::ReverseAuthority,
    BiasKind::VariableRename { length: 24 },
    BiasKind::IllusoryComplexity { count: 1 },
];

fn c1_semantic_preservation() -> Outcome {
    let ds = corpus();
    let with_tests = ds.problems.values().filter(|p| !p.io_tests.is_empty()).count();
    ensure(with_tests >= 10, || format!("only {with_tests} problems have io_tests"))?;
    for lang in Language::ALL {
        for label in [Label::Correct, Label::Incorrect] {
            let problems: BTreeSet<&str> = ds
                .samples
                .iter()
                .filter(|s| s.language == lang && s.label == label)
                .map(|s| s.problem_id.as_str())
                .collect();
            ensure(problems.len() >= 10, || format!("{lang}/{label:?}: {} problems", problems.len()))?;
        }
    }

    let toolchains = Toolchains::load(&repo_config("toolchains.toml")).map_err(|e| e.to_string())?;
    for lang in Language::ALL {
        toolchains.get(lang).map_err(|e| format!("toolchain unavailable: {e}"))?;
    }
    let validator = Validator::new(toolchains, ValidationPolicy::default()).map_err(|e| e.to_string())?;

    let mut variants = Vec::new();
    for s in &ds.samples {
        for bias in C1_BIASES {
            let seed = derive_seed(SEED, &format!("{}/{bias}", s.sample_id));
            variants
                .push(apply(s, bias, transform_config(), seed).map_err(|e| format!("{} {bias}: {e}", s.sample_id))?);
        }
    }
    let start = Instant::now();
    let results = validator.validate_batch(&mut variants, ds);
    let elapsed = start.elapsed();
    ensure(results.len() == variants.len(), || "validation lost variants".into())?;
    let failed: Vec<String> = variants
        .iter()
        .filter(|v| v.validation_state != ValidationState::Validated)
        .map(|v| format!("{} ({})", v.variant_id, v.flag_reason.as_deref().unwrap_or("?")))
        .collect();
    ensure(failed.is_empty(), || format!("{} of {} not validated, e.g. {}", failed.len(), variants.len(), failed[0]))?;
    ensure(elapsed <= VALIDATION_BUDGET, || {
        format!("took {:.0}s, budget {}s", elapsed.as_secs_f64(), VALIDATION_BUDGET.as_secs())
    })?;
    Ok(format!("{0}/{0} variants validated in {1:.0}s", variants.len(), elapsed.as_secs_f64()))
}

// ---------------------------------------------------------------- C2

fn bias_strategy() -> impl Strategy<Value = BiasKind> {
    prop_oneof![
        Just(BiasKind::Authority),
        Just(BiasKind::ReverseAuthority),
        Just(BiasKind::SelfDeclared),
        Just(BiasKind::MisleadingTask),
        proptest::sample::select(RENAME_SWEEP_LENGTHS.to_vec()).prop_map(|length| BiasKind::VariableRename { length }),
        (1usize..=3).prop_map(|count| BiasKind::IllusoryComplexity { count }),
    ]
}

fn sample_strategy() -> impl Strategy<Value = usize> {
    0..corpus().samples.len()
}

fn c2_inverse() -> Outcome {
    let checked = AtomicUsize::new(0);
    let exhausted = AtomicUsize::new(0);
    runner(INVERSE_CASES)
        .run(&(sample_strategy(), bias_strategy(), any::<u64>()), |(i, bias, seed)| {
            let sample = &corpus().samples[i];
            match apply(sample, bias, transform_config(), seed) {
                Ok(v) => {
                    let back =
                        v.invert().map_err(|e| TestCaseError::fail(format!("{} {bias}: {e}", sample.sample_id)))?;
                    prop_assert_eq!(&back, &sample.source, "{} {}", sample.sample_id, bias);
                    checked.fetch_add(1, Ordering::Relaxed);
                    Ok(())
                }
                Err(TransformError::NameSpaceExhausted { length: 1, .. }) => {
                    exhausted.fetch_add(1, Ordering::Relaxed);
                    Err(TestCaseError::reject("one-letter names exhausted"))
                }
                Err(e) => Err(TestCaseError::fail(format!("{} {bias}: {e}", sample.sample_id))),
            }
        })
        .map_err(|e| e.to_string())?;
    let n = checked.into_inner();
    ensure(n == INVERSE_CASES as usize, || format!("only {n} cases checked"))?;
    Ok(format!(
        "{n} cases inverted byte-exactly, 0 failures ({} exhausted rename:1 draws replaced)",
        exhausted.into_inner()
    ))
}

// ---------------------------------------------------------------- C3

fn c3_rename() -> Outcome {
    runner(RENAME_CASES)
        .run(
            &(sample_strategy(), proptest::sample::select(RENAME_SWEEP_LENGTHS.to_vec()), any::<u64>()),
            |(i, length, seed)| {
                let sample = &corpus().samples[i];
                let v = match rename_variables(sample, length, seed) {
                    Ok(v) => v,
                    Err(TransformError::NameSpaceExhausted { length: 1, .. }) => {
                        return Err(TestCaseError::reject("exhausted"))
                    }
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                };
                let map = v.provenance.rename_map.as_ref().ok_or_else(|| TestCaseError::fail("no rename map"))?;
                let tree =
                    syntax::parse(&sample.source, sample.language).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let source_ids = tree.identifier_tokens();
                let profile = sample.language.profile();
                let values: BTreeSet<&String> = map.entries.values().collect();
                prop_assert_eq!(values.len(), map.entries.len(), "not injective");
                for name in values {
                    prop_assert_eq!(name.len(), length);
                    prop_assert!(name.bytes().all(|b| b.is_ascii_alphabetic()), "{}", name);
                    prop_assert!(!source_ids.contains(name.as_str()), "{} collides with the source", name);
                    prop_assert!(!profile.is_reserved(name) && !profile.is_builtin(name), "{} is reserved", name);
                }
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;

    runner(RENAME_CASES)
        .run(
            &(0usize..40, 1usize..4, proptest::collection::btree_set("[a-zA-Z]{1,3}", 0..200), any::<u64>()),
            |(count, length, forbidden, seed)| {
                let mut rng = SeededRng::new(seed, "names");
                let available = 52usize.pow(length as u32) - forbidden.iter().filter(|f| f.len() == length).count();
                match generate_names(count, length, &forbidden, &mut rng) {
                    Ok(names) => {
                        prop_assert!(available >= count);
                        prop_assert_eq!(names.iter().collect::<BTreeSet<_>>().len(), count);
                        prop_assert!(names.iter().all(|n| n.len() == length && !forbidden.contains(n)));
                    }
                    Err(e) => {
                        prop_assert!(available < count, "{}", e);
                        prop_assert!(matches!(e, TransformError::NameSpaceExhausted { .. }), "{}", e);
                    }
                }
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;

    let config = RunConfig::load(&repo_config("rename_sweep.toml"), &[]).map_err(|e| e.to_string())?;
    let lengths: Vec<usize> = config
        .biases
        .iter()
        .filter_map(|b| match b {
            BiasKind::VariableRename { length } => Some(*length),
            _ => None,
        })
        .collect();
    ensure(lengths == [1, 2, 8, 12, 16, 24, 48] && config.biases.len() == 7, || format!("sweep lengths {lengths:?}"))?;

    let source: String = (0..60).map(|i| format!("v{i} = {i}\nprint(v{i})\n")).collect();
    let sample = CodeSample {
        sample_id: "many".into(),
        problem_id: "p".into(),
        language: Language::Python,
        label: Label::Correct,
        source,
    };
    match apply(&sample, BiasKind::VariableRename { length: 1 }, transform_config(), 3) {
        Err(TransformError::NameSpaceExhausted { length: 1, needed: 60, .. }) => {}
        Err(e) => return Err(format!("60 identifiers at length 1: unexpected error {e}")),
        Ok(_) => return Err("60 identifiers at length 1 produced output".into()),
    }
    Ok(format!(
        "{RENAME_CASES}+{RENAME_CASES} property cases, sweep {lengths:?}, length 1 with 60 identifiers exhausted"
    ))
}

// ---------------------------------------------------------------- C4

fn metrics_fixture(name: &str) -> Result<String, String> {
    let path = manifest_dir().join("tests/fixtures/metrics").join(name);
    fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
}

#[derive(serde::Deserialize)]
struct ExpectedRow {
    judge_id: String,
    language: Language,
    condition: Condition,
    paradigm: Paradigm,
    n_correct: usize,
    n_incorrect: usize,
    acc_correct: f64,
    acc_incorrect: f64,
    delta_correct: f64,
    delta_incorrect: f64,
    direction: Option<Direction>,
}

fn c4_metrics() -> Outcome {
    let records = records_from_csv(&metrics_fixture("judgments.csv")?).map_err(|e| e.to_string())?;
    let report = report_from_records(&records, 0.0).map_err(|e| e.to_string())?;
    let expected: Vec<ExpectedRow> = csv::Reader::from_reader(metrics_fixture("expected_rows.csv")?.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let judges: BTreeSet<&str> = expected.iter().map(|r| r.judge_id.as_str()).collect();
    let languages: BTreeSet<Language> = expected.iter().map(|r| r.language).collect();
    let biases: BTreeSet<BiasKind> = expected.iter().filter_map(|r| r.condition.bias()).collect();
    ensure(judges.len() == 2 && languages.len() == 2 && biases.len() == 6, || "fixture is not 2 x 2 x 6".into())?;
    ensure(report.rows.len() == expected.len(), || format!("{} rows, expected {}", report.rows.len(), expected.len()))?;
    for (got, want) in report.rows.iter().zip(&expected) {
        let key = &got.key;
        ensure(
            key.judge_id == want.judge_id
                && key.language == want.language
                && key.condition == want.condition
                && key.paradigm == want.paradigm,
            || format!("row order differs at {key}"),
        )?;
        ensure(got.stats.n_correct == want.n_correct && got.stats.n_incorrect == want.n_incorrect, || {
            format!("{key}: counts")
        })?;
        for (name, g, w) in [
            ("acc_correct", got.stats.acc_correct, want.acc_correct),
            ("acc_incorrect", got.stats.acc_incorrect, want.acc_incorrect),
            ("delta_correct", got.delta_correct, want.delta_correct),
            ("delta_incorrect", got.delta_incorrect, want.delta_incorrect),
        ] {
            ensure(close(g, w), || format!("{key}: {name} {g} vs {w}"))?;
        }
        ensure(got.direction == want.direction, || {
            format!("{key}: direction {:?} vs {:?}", got.direction, want.direction)
        })?;
    }
    let want_mads = mad_from_csv(&metrics_fixture("expected_mad.csv")?).map_err(|e| e.to_string())?;
    ensure(want_mads.len() == report.mads.len(), || {
        format!("{} MAD entries, expected {}", report.mads.len(), want_mads.len())
    })?;
    for w in &want_mads {
        let found = report.mads.iter().find(|g| {
            g.paradigm == w.paradigm
                && g.grouping == w.grouping
                && g.judge_id == w.judge_id
                && g.language == w.language
                && g.bias == w.bias
                && g.side == w.side
        });
        let g = found.ok_or_else(|| format!("missing MAD entry {w:?}"))?;
        ensure(g.n == w.n && close(g.mad, w.mad), || format!("MAD {w:?}: got {}", g.mad))?;
    }
    ensure(render_table(&report) == metrics_fixture("table.txt")?, || {
        "rendered table differs from golden file".into()
    })?;
    Ok(format!("{} rows and {} MAD entries within {EPS:e}; table matches golden file", expected.len(), want_mads.len()))
}

// ------------------------------------------------- shared mock pipeline run

/// The shipped offline config with in-process syntax validation, a rate
/// limit slow enough to interrupt, and a judge whose test-case generation
/// always fails.
fn mock_config_text() -> Result<String, String> {
    let text = fs::read_to_string(repo_config("mock_run.toml")).map_err(|e| e.to_string())?;
    let behavior = "mode = \"behavior\"\ntoolchains = \"toolchains.toml\"";
    ensure(text.contains(behavior), || "mock_run.toml validation section changed".into())?;
    let credulous = "judge_id = \"mock-credulous\"\nkind = \"mock\"";
    ensure(text.contains(credulous), || "mock_run.toml judge section changed".into())?;
    Ok(text
        .replace(behavior, "mode = \"syntax\"")
        .replace(credulous, &format!("{credulous}\nrate_limit = 1000.0\nmax_in_flight = 2"))
        + r#"
# Never manages to write test cases.
[[judges]]
judge_id = "blank-cases"
kind = "mock"

[judges.mock]
default = "label"

[[judges.mock.rules]]
when = { purpose = "test_case_generation" }
answer = "unparseable"
"#)
}

struct MockRun {
    _dir: tempfile::TempDir,
    config: PathBuf,
    root: PathBuf,
    report: RobustnessReport,
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bias-forge"))
}

/// Run the CLI. Exit 3 (finished with failed items) is expected from
/// `blank-cases`, so it counts as success alongside 0.
fn cli(args: &[&str], config: &Path, out: &Path) -> Result<(), String> {
    let o = bin()
        .args(args)
        .arg("-q")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .stdout(Stdio::null())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(matches!(o.status.code(), Some(0 | 3)), || {
        format!("bias-forge {}: {:?} {}", args.join(" "), o.status.code(), String::from_utf8_lossy(&o.stderr))
    })
}

fn mock_run() -> Result<&'static MockRun, String> {
    static RUN: OnceLock<Result<MockRun, String>> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let config = dir.path().join("mock_run.toml");
        fs::write(&config, mock_config_text()?).map_err(|e| e.to_string())?;
        let root = dir.path().join("a");
        cli(&["run"], &config, &root)?;
        let text = fs::read_to_string(root.join("reports/report.csv")).map_err(|e| e.to_string())?;
        let report = report_from_csv(&text, 0.0).map_err(|e| e.to_string())?;
        Ok(MockRun { _dir: dir, config, root, report })
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn find<'r>(
    report: &'r RobustnessReport,
    judge: &str,
    lang: Language,
    cond: Condition,
    paradigm: Paradigm,
) -> Option<&'r ReportRow> {
    report.rows.iter().find(|r| {
        r.key.judge_id == judge && r.key.language == lang && r.key.condition == cond && r.key.paradigm == paradigm
    })
}

// ---------------------------------------------------------------- C5

fn c5_bias_sensitivity() -> Outcome {
    let run = mock_run()?;
    // mock-credulous answers by label, except: trial 1 of correct items and
    // trial 2 of incorrect items are wrong; a first line containing
    // "correct code" forces `correct`; the canned misleading description
    // forces `incorrect`.
    let baseline = 2.0 / 3.0;
    let x = (1.0 - baseline) * 100.0;
    let y = (baseline - 0.0) * 100.0;
    let cases =
        [(BiasKind::SelfDeclared, x, -y, Direction::Positive), (BiasKind::MisleadingTask, -y, x, Direction::Negative)];
    let mut checked = 0;
    for paradigm in [Paradigm::Direct, Paradigm::TestCaseBased] {
        for lang in Language::ALL {
            for (bias, dc, di, dir) in cases {
                let row = find(&run.report, "mock-credulous", lang, Condition::Biased(bias), paradigm)
                    .ok_or_else(|| format!("no {bias} row for {lang}/{paradigm:?}"))?;
                ensure(close(row.delta_correct, dc) && close(row.delta_incorrect, di), || {
                    format!(
                        "{}: deltas ({}, {}), predicted ({dc}, {di})",
                        row.key, row.delta_correct, row.delta_incorrect
                    )
                })?;
                ensure(row.direction == Some(dir), || format!("{}: {:?}, expected {dir:?}", row.key, row.direction))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} conditions: SelfDeclared +{x:.4}/-{y:.4} Positive, Misleading -{y:.4}/+{x:.4} Negative"))
}

// ---------------------------------------------------------------- C6

/// Every file under `root` except the timestamped logs.
fn tree(root: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).map_err(|e| format!("{}: {e}", dir.display()))? {
            let p = e.map_err(|e| e.to_string())?.path();
            let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            if rel == "logs" {
                continue;
            }
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(rel, fs::read(&p).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(out)
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let (ta, tb) = (tree(a)?, tree(b)?);
    let ka: Vec<&String> = ta.keys().collect();
    let kb: Vec<&String> = tb.keys().collect();
    ensure(ka == kb, || format!("file sets differ: {} vs {} files", ka.len(), kb.len()))?;
    for (k, v) in &ta {
        ensure(tb[k] == *v, || format!("{k} differs"))?;
    }
    Ok(ta.len())
}

fn journal_lines(dir: &Path) -> usize {
    fs::read_dir(dir)
        .map(|d| d.flatten().map(|e| fs::read_to_string(e.path()).unwrap_or_default().lines().count()).sum())
        .unwrap_or(0)
}

fn c6_determinism_and_resume() -> Outcome {
    let run = mock_run()?;
    let parent = run.root.parent().unwrap();
    let second = parent.join("b");
    cli(&["run"], &run.config, &second)?;
    let files = same_tree(&run.root, &second)?;

    let resumed = parent.join("c");
    for stage in ["ingest", "inject", "validate"] {
        cli(&[stage], &run.config, &resumed)?;
    }
    let mut child = bin()
        .args(["evaluate", "-q", "--config"])
        .arg(&run.config)
        .arg("--out")
        .arg(&resumed)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let journal = resumed.join("judgments/journal");
    let start = Instant::now();
    while journal_lines(&journal) < KILL_AFTER_LINES {
        if start.elapsed() > Duration::from_secs(120) || child.try_wait().map_err(|e| e.to_string())?.is_some() {
            let _ = child.kill();
            return Err("evaluation finished or stalled before it could be killed".into());
        }
        std::thread::sleep(Duration::from_millis(10));
    }
    child.kill().map_err(|e| e.to_string())?;
    child.wait().map_err(|e| e.to_string())?;
    let recorded = journal_lines(&journal);
    let manifest = Layout::new(&resumed).manifest_path(StageName::Evaluate);
    ensure(!manifest.exists(), || "killed evaluation left a finished manifest".into())?;
    cli(&["evaluate"], &run.config, &resumed)?;
    cli(&["report"], &run.config, &resumed)?;
    same_tree(&run.root, &resumed)?;
    Ok(format!(
        "two runs identical over {files} files; killed after {recorded} journaled judgments, resumed run identical"
    ))
}

// ---------------------------------------------------------------- C7

fn c7_two_paradigms() -> Outcome {
    let run = mock_run()?;
    let report = &run.report;
    let paradigms: BTreeSet<Paradigm> = report.rows.iter().map(|r| r.key.paradigm).collect();
    ensure(paradigms.len() == 2, || format!("paradigms present: {paradigms:?}"))?;
    let mut biased = 0;
    for row in report.rows.iter().filter(|r| r.key.condition != Condition::Original) {
        let k = &row.key;
        let base = find(report, &k.judge_id, k.language, Condition::Original, k.paradigm)
            .ok_or_else(|| format!("{k}: no baseline"))?;
        let dc = (row.stats.acc_correct - base.stats.acc_correct) * 100.0;
        let di = (row.stats.acc_incorrect - base.stats.acc_incorrect) * 100.0;
        ensure(close(row.delta_correct, dc) && close(row.delta_incorrect, di), || {
            format!("{k}: deltas not against its own paradigm")
        })?;
        biased += 1;
    }
    // blank-cases never gets usable test cases: every test-case-based
    // judgment is Unparseable and scores as wrong, while direct is perfect.
    for lang in Language::ALL {
        let direct = find(report, "blank-cases", lang, Condition::Original, Paradigm::Direct)
            .ok_or("no blank-cases direct row")?;
        let tcb = find(report, "blank-cases", lang, Condition::Original, Paradigm::TestCaseBased)
            .ok_or("no blank-cases test-case row")?;
        ensure(close(direct.stats.acc_correct, 1.0) && close(direct.stats.acc_incorrect, 1.0), || {
            format!("{lang}: direct baseline not perfect")
        })?;
        ensure(close(tcb.stats.acc_correct, 0.0) && close(tcb.stats.acc_incorrect, 0.0), || {
            format!("{lang}: empty test cases not scored wrong")
        })?;
    }
    let biased_tcb = report.rows.iter().filter(|r| {
        r.key.judge_id == "blank-cases"
            && r.key.paradigm == Paradigm::TestCaseBased
            && r.key.condition != Condition::Original
    });
    for row in biased_tcb {
        ensure(close(row.delta_correct, 0.0) && close(row.delta_incorrect, 0.0), || {
            format!("{}: measured against the wrong baseline", row.key)
        })?;
    }

    // Unit-level fixture: an empty set is recorded and every trial is wrong.
    let spec = MockSpec {
        rules: vec![MockRule {
            when: MockCondition { purpose: Some(Purpose::TestCaseGeneration), ..MockCondition::default() },
            answer: MockAnswer::Unparseable,
        }],
        ..MockSpec::default()
    };
    let mut config = JudgeConfig::mock("fixture", spec);
    config.trials = Some(3);
    let judge = Judge::from_config(config, PromptTemplates::default(), None).map_err(|e| e.to_string())?;
    let ds = corpus();
    let sample = ds.samples.iter().find(|s| s.label == Label::Correct).unwrap();
    let problem = ds.problem(&sample.problem_id).unwrap();
    let cases = judge.generate_test_cases(problem);
    ensure(cases.cases.is_empty() && cases.error.is_some() && !cases.raw_output.is_empty(), || {
        format!("set not recorded as failed: {cases:?}")
    })?;
    let item = EvalItem {
        item_id: sample.sample_id.clone(),
        problem_id: sample.problem_id.clone(),
        language: sample.language,
        code: sample.source.clone(),
        label: sample.label,
    };
    let sets = BTreeMap::from([(problem.problem_id.clone(), cases)]);
    let matrix = judge.run_condition(&[item], &ds.problems, Paradigm::TestCaseBased, &sets, &NoSink);
    ensure(matrix.judgments.len() == 3, || "matrix incomplete".into())?;
    ensure(
        matrix
            .judgments
            .iter()
            .all(|j| j.verdict == Verdict::Unparseable && j.error.as_deref() == Some("empty test case set")),
        || "judgments on an empty set are not Unparseable".into(),
    )?;
    ensure(close(matrix.accuracy(), 0.0), || format!("accuracy {} on an empty set", matrix.accuracy()))?;
    Ok(format!("both paradigms present, {biased} biased rows against same-paradigm baselines; empty test-case sets score as wrong"))
}

// ---------------------------------------------------------------- C8

enum Live {
    Skip(String),
    Done(Outcome),
}

fn c8_live_smoke() -> Live {
    let text = match fs::read_to_string(repo_config("live_judges.toml")) {
        Ok(t) => t,
        Err(e) => return Live::Done(Err(e.to_string())),
    };
    let value: toml::Value = match toml::from_str(&text) {
        Ok(v) => v,
        Err(e) => return Live::Done(Err(e.to_string())),
    };
    let judges: Vec<JudgeConfig> = match value.get("judges").cloned().map(|j| j.try_into()) {
        Some(Ok(j)) => j,
        Some(Err(e)) => return Live::Done(Err(e.to_string())),
        None => return Live::Done(Err("live_judges.toml has no judges".into())),
    };
    let keyed = judges
        .into_iter()
        .find(|j| j.api_key_env.as_deref().is_some_and(|k| std::env::var(k).is_ok_and(|v| !v.is_empty())));
    let Some(mut config) = keyed else {
        return Live::Skip("no API key in the environment (OPENAI_API_KEY or ANTHROPIC_API_KEY)".into());
    };
    let host =
        config.endpoint.as_deref().and_then(|e| e.split("://").nth(1)).and_then(|r| r.split('/').next()).unwrap_or("");
    if let Err(e) = (host, 443).to_socket_addrs() {
        return Live::Skip(format!("{} key present but {host} is unreachable: {e}", config.judge_id));
    }
    Live::Done(live_smoke(&mut config))
}

fn live_smoke(config: &mut JudgeConfig) -> Outcome {
    config.trials = Some(1);
    let rate = config.rate_limit();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let log = dir.path().join("replay.jsonl");
    let judge =
        Judge::from_config(config.clone(), PromptTemplates::default(), Some(&log)).map_err(|e| e.to_string())?;
    let ds = corpus();
    let items: Vec<EvalItem> = ds
        .samples
        .iter()
        .filter(|s| s.language == Language::Python)
        .take(3)
        .map(|s| EvalItem {
            item_id: s.sample_id.clone(),
            problem_id: s.problem_id.clone(),
            language: s.language,
            code: s.source.clone(),
            label: s.label,
        })
        .collect();
    // Concurrent calls so the limiter, not the caller, spaces them out.
    let judgments: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .iter()
            .map(|item| {
                let judge = &judge;
                scope.spawn(move || judge.direct_evaluate(ds.problem(&item.problem_id).unwrap(), item, 0))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let entries: Vec<ReplayEntry> = fs::read_to_string(&log)
        .map_err(|e| e.to_string())?
        .lines()
        .map(serde_json::from_str)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(entries.len() >= 3, || format!("{} replay entries", entries.len()))?;
    let answered = entries.iter().filter(|e| e.response.as_deref().is_some_and(|r| !r.is_empty())).count();
    ensure(answered >= 3, || format!("only {answered} raw outputs persisted"))?;
    ensure(judgments.iter().all(|j| !j.raw_output.is_empty() || j.error.is_some()), || {
        "judgment lost its raw output".into()
    })?;
    let mut starts: Vec<u64> = entries.iter().map(|e| e.timestamp.saturating_sub(e.latency_ms)).collect();
    starts.sort_unstable();
    let min_gap = (1000.0 / rate) as u64;
    for w in starts.windows(2) {
        ensure(w[1] - w[0] + RATE_SLACK_MS >= min_gap, || {
            format!("requests {}ms apart under a {rate}/s limit", w[1] - w[0])
        })?;
    }
    let parsed = judgments.iter().filter(|j| j.verdict != Verdict::Unparseable).count();
    ensure(parsed >= 2, || format!("only {parsed} of 3 verdicts parsed"))?;
    let verdicts: Vec<&str> = judgments.iter().map(|j| j.verdict.as_str()).collect();
    Ok(format!("judge {} answered 3 items ({verdicts:?}), {parsed}/3 parsed, rate {rate}/s respected", config.judge_id))
}

// ----------------------------------------------------------------- main

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    })
}

fn main() -> ExitCode {
    // `cargo test -- --list` asks for a listing; there is nothing to list.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 7] = [
        ("C1 semantic preservation", c1_semantic_preservation),
        ("C2 inverse properties", c2_inverse),
        ("C3 rename correctness", c3_rename),
        ("C4 metric fixture", c4_metrics),
        ("C5 bias sensitivity", c5_bias_sensitivity),
        ("C6 determinism and resume", c6_determinism_and_resume),
        ("C7 two-paradigm parity", c7_two_paradigms),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |name: &str| filters.is_empty() || filters.iter().any(|f| name.starts_with(f.as_str()));
    let mut failed = 0;
    for (name, f) in criteria.into_iter().filter(|(n, _)| wanted(n)) {
        let start = Instant::now();
        let outcome = guarded(f);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{secs:.1}s]");
            }
        }
    }
    let live = if wanted("C8") { catch_unwind(c8_live_smoke) } else { Ok(Live::Skip("not selected".into())) };
    match live {
        Ok(Live::Skip(why)) => println!("SKIP C8 live smoke: {why}"),
        Ok(Live::Done(Ok(detail))) => println!("PASS C8 live smoke: {detail}"),
        Ok(Live::Done(Err(why))) => {
            failed += 1;
            println!("FAIL C8 live smoke: {why}");
        }
        Err(_) => {
            failed += 1;
            println!("FAIL C8 live smoke: panicked");
        }
    }
    println!("{} criteria failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
