use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use bias_forge_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { bf_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bf_last_error()) }.to_str().unwrap().to_owned()
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn transform_and_invert_round_trip() {
    let src = "n = int(input())\ntotal = 0\nfor i in range(n):\n    total += i\nprint(total)\n";
    for bias in ["authority", "self_declared", "misleading_task", "variable_rename:12", "illusory_complexity:2"] {
        let mut v = ptr::null_mut();
        let status = unsafe { bf_transform_source(c("python").as_ptr(), c(src).as_ptr(), c(bias).as_ptr(), 5, &mut v) };
        assert_eq!(status, BfStatus::Ok, "{bias}: {}", last_error());

        let mut out = ptr::null_mut();
        assert_eq!(unsafe { bf_variant_source(v, &mut out) }, BfStatus::Ok);
        assert_ne!(take(out), src, "{bias}");
        assert_eq!(unsafe { bf_variant_invert(v, &mut out) }, BfStatus::Ok);
        assert_eq!(take(out), src, "{bias}");
        assert_eq!(unsafe { bf_variant_json(v, &mut out) }, BfStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(json.is_object());
        let mut flagged = true;
        assert_eq!(unsafe { bf_variant_is_flagged(v, &mut flagged) }, BfStatus::Ok);
        assert!(!flagged);
        unsafe { bf_variant_free(v) };
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut v = ptr::null_mut();
    let status =
        unsafe { bf_transform_source(c("cobol").as_ptr(), c("x").as_ptr(), c("authority").as_ptr(), 1, &mut v) };
    assert_eq!(status, BfStatus::InvalidArgument);
    assert!(last_error().contains("cobol"), "{}", last_error());

    let status =
        unsafe { bf_transform_source(c("python").as_ptr(), c("x = 1\n").as_ptr(), c("loud").as_ptr(), 1, &mut v) };
    assert_eq!(status, BfStatus::InvalidArgument);

    let status = unsafe { bf_transform_source(c("python").as_ptr(), ptr::null(), c("authority").as_ptr(), 1, &mut v) };
    assert_eq!(status, BfStatus::NullArgument);
    assert!(v.is_null());

    let bad = [0xffu8, 0];
    let status =
        unsafe { bf_transform_source(bad.as_ptr().cast(), c("x").as_ptr(), c("authority").as_ptr(), 1, &mut v) };
    assert_eq!(status, BfStatus::InvalidUtf8);

    let mut d = ptr::null_mut();
    let status = unsafe { bf_dataset_load(c("/nonexistent/data.jsonl").as_ptr(), &mut d) };
    assert_eq!(status, BfStatus::IoError);

    let mut r = ptr::null_mut();
    let status = unsafe { bf_report_from_csv(c("not,a,report\n").as_ptr(), 0.5, &mut r) };
    assert_eq!(status, BfStatus::DataError);
    let status = unsafe { bf_report_from_csv(c("").as_ptr(), f64::NAN, &mut r) };
    assert_eq!(status, BfStatus::InvalidArgument);

    // Success clears the message.
    let mut n = 0usize;
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { bf_dataset_mini_corpus(&mut ds) }, BfStatus::Ok);
    assert_eq!(unsafe { bf_dataset_sample_count(ds, &mut n) }, BfStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { bf_dataset_free(ds) };
}

#[test]
fn dataset_samples_can_be_transformed_by_id() {
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { bf_dataset_mini_corpus(&mut ds) }, BfStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { bf_dataset_sample_count(ds, &mut n) }, BfStatus::Ok);
    assert!(n > 0);

    let mut id = ptr::null_mut();
    assert_eq!(unsafe { bf_dataset_sample_id(ds, 0, &mut id) }, BfStatus::Ok);
    let id = take(id);
    let mut v = ptr::null_mut();
    let status = unsafe { bf_transform_sample(ds, c(&id).as_ptr(), c("reverse_authority").as_ptr(), 9, &mut v) };
    assert_eq!(status, BfStatus::Ok, "{}", last_error());
    unsafe { bf_variant_free(v) };

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bf_dataset_sample_id(ds, n, &mut out) }, BfStatus::InvalidArgument);
    unsafe { bf_dataset_free(ds) };
}

#[test]
fn report_from_csv_renders_table() {
    let mut csv = String::from("judge_id,language,condition,paradigm,item_id,label,trial_index,verdict\n");
    for (cond, verdicts) in [("original", ["correct", "incorrect"]), ("self_declared", ["correct", "correct"])] {
        for (item, (label, verdict)) in ["correct", "incorrect"].iter().zip(verdicts).enumerate() {
            csv += &format!("j,python,{cond},direct,p{item},{label},0,{verdict}\n");
        }
    }
    let mut r = ptr::null_mut();
    let status = unsafe { bf_report_from_csv(c(&csv).as_ptr(), 0.5, &mut r) };
    assert_eq!(status, BfStatus::Ok, "{}", last_error());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bf_report_table(r, &mut out) }, BfStatus::Ok);
    assert!(take(out).contains("SelfDeclared"));
    assert_eq!(unsafe { bf_report_csv(r, &mut out) }, BfStatus::Ok);
    assert!(take(out).lines().count() > 1);
    assert_eq!(unsafe { bf_report_mad_csv(r, &mut out) }, BfStatus::Ok);
    take(out);
    unsafe { bf_report_free(r) };
}

#[test]
fn pipeline_rejects_unknown_stage_and_missing_config() {
    let status = unsafe { bf_pipeline_run(c("/nonexistent.toml").as_ptr(), c("ingest").as_ptr(), ptr::null()) };
    assert!(matches!(status, BfStatus::ConfigError | BfStatus::IoError), "{status:?}");
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/mock_run.toml");
    let status = unsafe { bf_pipeline_run(c(cfg.to_str().unwrap()).as_ptr(), c("bake").as_ptr(), ptr::null()) };
    assert_eq!(status, BfStatus::InvalidArgument);
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(bf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bias_forge.h")
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn header_compiles_as_c_and_cpp() {
    for (tool, lang) in [("cc", "c"), ("c++", "c++")] {
        if !have(tool) {
            eprintln!("skipping: {tool} not found");
            continue;
        }
        let out =
            Command::new(tool).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang]).arg(header()).output().unwrap();
        assert!(out.status.success(), "{tool}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

/// Links a small C program against the static library and runs it.
#[test]
fn c_program_links_and_runs() {
    if !have("cc") {
        eprintln!("skipping: cc not found");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libbias_forge_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let main_c = dir.path().join("main.c");
    std::fs::write(
        &main_c,
        r#"#include <stdio.h>
#include <string.h>
#include "bias_forge.h"

int main(void) {
    const char *src = "x = int(input())\nprint(x * 2)\n";
    BfVariant *v = NULL;
    if (bf_transform_source("python", src, "variable_rename:8", 1, &v) != BF_STATUS_OK) {
        fprintf(stderr, "%s\n", bf_last_error());
        return 1;
    }
    char *back = NULL;
    if (bf_variant_invert(v, &back) != BF_STATUS_OK) return 2;
    int same = strcmp(back, src) == 0;
    bf_string_free(back);
    bf_variant_free(v);
    if (bf_transform_source("python", src, NULL, 1, &v) != BF_STATUS_NULL_ARGUMENT) return 3;
    printf("%s\n", same ? "ok" : "mismatch");
    return same ? 0 : 4;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let out = Command::new("cc")
        .arg(&main_c)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "link: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "run: {:?} {}", run.status, String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
