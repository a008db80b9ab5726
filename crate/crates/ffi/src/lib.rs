//! C ABI over bias-forge.
//!
//! Every function returns a [`BfStatus`]; results come back through out
//! pointers. Objects are opaque handles released with their `_free`
//! function, and strings returned as `char *` are released with
//! [`bf_string_free`]. After a non-OK status, [`bf_last_error`] describes the
//! failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use bias_forge::corpus::{self, CodeSample, Dataset, Label};
use bias_forge::language::Language;
use bias_forge::metrics::{self, RobustnessReport};
use bias_forge::pipeline::{self, Layout, PipelineError, RunConfig, StageName};
use bias_forge::transforms::{self, BiasKind, BiasVariant, CannedGenerator, TransformConfig, TransformError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    /// Source code does not parse.
    ParseError = 4,
    /// A transform could not be applied (e.g. rename name space exhausted).
    TransformFailed = 5,
    ConfigError = 6,
    DataError = 7,
    IoError = 8,
    /// The library panicked; the call had no effect that can be relied on.
    Internal = 9,
    /// A pipeline stage finished but flagged or failed some items.
    Partial = 10,
}

/// A loaded dataset.
pub struct BfDataset(Dataset);

/// One biased variant with its provenance.
pub struct BfVariant(BiasVariant);

/// Robustness report computed from judgment records.
pub struct BfReport(RobustnessReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(BfStatus, String);

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        let status = match e {
            TransformError::Parse(_) => BfStatus::ParseError,
            TransformError::InvalidParameter(_) => BfStatus::InvalidArgument,
            _ => BfStatus::TransformFailed,
        };
        Failure(status, e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let status = match e {
            PipelineError::Config(_) => BfStatus::ConfigError,
            PipelineError::Data(_) => BfStatus::DataError,
            PipelineError::Io { .. } => BfStatus::IoError,
        };
        Failure(status, e.to_string())
    }
}

impl From<metrics::MetricsError> for Failure {
    fn from(e: metrics::MetricsError) -> Self {
        Failure(BfStatus::DataError, e.to_string())
    }
}

impl From<corpus::CorpusError> for Failure {
    fn from(e: corpus::CorpusError) -> Self {
        let status = match e {
            corpus::CorpusError::Io { .. } => BfStatus::IoError,
            _ => BfStatus::DataError,
        };
        Failure(status, e.to_string())
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<BfStatus, Failure>) -> BfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            if status == BfStatus::Ok {
                set_error("");
            }
            status
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error (panic)");
            BfStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(BfStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(BfStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(BfStatus::NullArgument, format!("{name} is null")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(BfStatus::NullArgument, format!("{name} is null")))
}

fn c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(BfStatus::InvalidArgument, msg.into())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn bf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn bf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn bf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a dataset from a JSON Lines file.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_dataset_load(path: *const c_char, out: *mut *mut BfDataset) -> BfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_arg(out, "out")?;
        let ds = corpus::load_dataset(Path::new(path))?;
        *out = Box::into_raw(Box::new(BfDataset(ds)));
        Ok(BfStatus::Ok)
    })
}

/// The bundled mini-corpus, comments stripped.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_dataset_mini_corpus(out: *mut *mut BfDataset) -> BfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mut ds = corpus::mini_corpus();
        ds.normalize()?;
        *out = Box::into_raw(Box::new(BfDataset(ds)));
        Ok(BfStatus::Ok)
    })
}

/// Number of samples in the dataset.
///
/// # Safety
/// `ds` must be a live dataset handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_dataset_sample_count(ds: *const BfDataset, out: *mut usize) -> BfStatus {
    guard(|| {
        let ds = handle(ds, "dataset")?;
        *out_arg(out, "out")? = ds.0.samples.len();
        Ok(BfStatus::Ok)
    })
}

/// Id of sample `index`, as a string to free with `bf_string_free`.
///
/// # Safety
/// `ds` must be a live dataset handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_dataset_sample_id(ds: *const BfDataset, index: usize, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let ds = handle(ds, "dataset")?;
        let out = out_arg(out, "out")?;
        let s = ds.0.samples.get(index).ok_or_else(|| invalid(format!("sample index {index} out of range")))?;
        *out = c_string(&s.sample_id);
        Ok(BfStatus::Ok)
    })
}

/// # Safety
/// `ds` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bf_dataset_free(ds: *mut BfDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

fn transform_config() -> TransformConfig {
    TransformConfig { generator: Some(Arc::new(CannedGenerator::well_formed())), ..TransformConfig::with_defaults() }
}

/// Apply `bias` (e.g. `"self_declared"`, `"variable_rename:24"`) to sample
/// `sample_id` of `ds`. Misleading comments come from the offline canned
/// generator.
///
/// # Safety
/// Handles and strings must be valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_transform_sample(
    ds: *const BfDataset,
    sample_id: *const c_char,
    bias: *const c_char,
    seed: u64,
    out: *mut *mut BfVariant,
) -> BfStatus {
    guard(|| {
        let ds = handle(ds, "dataset")?;
        let id = str_arg(sample_id, "sample_id")?;
        let bias: BiasKind = str_arg(bias, "bias")?.parse().map_err(|e: TransformError| invalid(e.to_string()))?;
        let out = out_arg(out, "out")?;
        let sample = ds.0.sample(id).ok_or_else(|| invalid(format!("unknown sample `{id}`")))?;
        let v = transforms::apply(sample, bias, &transform_config(), seed)?;
        *out = Box::into_raw(Box::new(BfVariant(v)));
        Ok(BfStatus::Ok)
    })
}

/// Apply `bias` to free-standing `source` in `language` (`"cpp"`,
/// `"python"`, `"java"`, `"javascript"`, `"go"`).
///
/// # Safety
/// Strings must be valid C strings; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_transform_source(
    language: *const c_char,
    source: *const c_char,
    bias: *const c_char,
    seed: u64,
    out: *mut *mut BfVariant,
) -> BfStatus {
    guard(|| {
        let language: Language = str_arg(language, "language")?
            .parse()
            .map_err(|e: bias_forge::language::UnsupportedLanguage| invalid(e.to_string()))?;
        let source = str_arg(source, "source")?;
        let bias: BiasKind = str_arg(bias, "bias")?.parse().map_err(|e: TransformError| invalid(e.to_string()))?;
        let out = out_arg(out, "out")?;
        let sample = CodeSample {
            sample_id: "input".into(),
            problem_id: "input".into(),
            language,
            label: Label::Correct,
            source: source.into(),
        };
        let v = transforms::apply(&sample, bias, &transform_config(), seed)?;
        *out = Box::into_raw(Box::new(BfVariant(v)));
        Ok(BfStatus::Ok)
    })
}

/// Transformed source, as a string to free with `bf_string_free`.
///
/// # Safety
/// `v` must be a live variant handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_variant_source(v: *const BfVariant, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let v = handle(v, "variant")?;
        *out_arg(out, "out")? = c_string(&v.0.source);
        Ok(BfStatus::Ok)
    })
}

/// The variant with its provenance as one JSON object.
///
/// # Safety
/// `v` must be a live variant handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_variant_json(v: *const BfVariant, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let v = handle(v, "variant")?;
        let json = serde_json::to_string(&v.0).map_err(|e| Failure(BfStatus::Internal, e.to_string()))?;
        *out_arg(out, "out")? = c_string(&json);
        Ok(BfStatus::Ok)
    })
}

/// Reconstruct the original source from the variant's provenance.
///
/// # Safety
/// `v` must be a live variant handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_variant_invert(v: *const BfVariant, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let v = handle(v, "variant")?;
        let original = v.0.invert()?;
        *out_arg(out, "out")? = c_string(&original);
        Ok(BfStatus::Ok)
    })
}

/// True when the variant was flagged (misleading-comment generation failed).
///
/// # Safety
/// `v` must be a live variant handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_variant_is_flagged(v: *const BfVariant, out: *mut bool) -> BfStatus {
    guard(|| {
        let v = handle(v, "variant")?;
        *out_arg(out, "out")? = v.0.validation_state == transforms::ValidationState::Flagged;
        Ok(BfStatus::Ok)
    })
}

/// # Safety
/// `v` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bf_variant_free(v: *mut BfVariant) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Build a report from judgment records in CSV form (columns `judge_id,
/// language, condition, paradigm, item_id, label, trial_index, verdict`).
///
/// # Safety
/// `csv` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_report_from_csv(csv: *const c_char, dead_band: f64, out: *mut *mut BfReport) -> BfStatus {
    guard(|| {
        let text = str_arg(csv, "csv")?;
        let out = out_arg(out, "out")?;
        if !(dead_band.is_finite() && dead_band >= 0.0) {
            return Err(invalid("dead_band must be a finite value >= 0"));
        }
        let records = metrics::records_from_csv(text)?;
        let report = metrics::report_from_records(&records, dead_band)?;
        *out = Box::into_raw(Box::new(BfReport(report)));
        Ok(BfStatus::Ok)
    })
}

/// Rendered text table.
///
/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_report_table(r: *const BfReport, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let r = handle(r, "report")?;
        *out_arg(out, "out")? = c_string(&metrics::render_table(&r.0));
        Ok(BfStatus::Ok)
    })
}

/// Per-condition rows as CSV.
///
/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_report_csv(r: *const BfReport, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let r = handle(r, "report")?;
        *out_arg(out, "out")? = c_string(&metrics::report_to_csv(&r.0)?);
        Ok(BfStatus::Ok)
    })
}

/// Grouped MAD values as CSV.
///
/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_report_mad_csv(r: *const BfReport, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let r = handle(r, "report")?;
        *out_arg(out, "out")? = c_string(&metrics::mad_to_csv(&r.0)?);
        Ok(BfStatus::Ok)
    })
}

/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bf_report_free(r: *mut BfReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Run one pipeline stage (`"ingest"`, `"inject"`, `"validate"`,
/// `"evaluate"`, `"report"`) or `"run"` for all of them. `out_dir` may be
/// null to use the config's `out_dir`. Returns `BF_STATUS_PARTIAL` when the
/// stage finished with flagged or failed items.
///
/// # Safety
/// `config_path` and `stage` must be valid C strings; `out_dir` may be null.
#[no_mangle]
pub unsafe extern "C" fn bf_pipeline_run(
    config_path: *const c_char,
    stage: *const c_char,
    out_dir: *const c_char,
) -> BfStatus {
    guard(|| {
        let config_path = str_arg(config_path, "config_path")?;
        let stage = str_arg(stage, "stage")?;
        let mut config = RunConfig::load(Path::new(config_path), &[])?;
        if !out_dir.is_null() {
            config.out_dir = Some(str_arg(out_dir, "out_dir")?.into());
        }
        let root =
            config.out_dir.clone().ok_or_else(|| Failure(BfStatus::ConfigError, "no output directory".into()))?;
        let stages: Vec<StageName> = match stage {
            "run" => StageName::ALL.to_vec(),
            s => vec![*StageName::ALL
                .iter()
                .find(|n| n.as_str() == s)
                .ok_or_else(|| invalid(format!("unknown stage `{s}`")))?],
        };
        let layout = Layout::new(root);
        let mut partial = false;
        for s in stages {
            partial |= pipeline::run_stage(s, &config, &layout)?.partial;
        }
        Ok(if partial { BfStatus::Partial } else { BfStatus::Ok })
    })
}
