use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use chroma_ffi::*;

const TINY: &str = r#"{
  "clients": ["c1", "c2", "c3"],
  "facilities": ["f1", "f2"],
  "dist": [[0,2,6,1,5],[2,0,6,1,5],[6,6,0,5,1],[1,1,5,0,4],[5,5,1,4,0]],
  "gamma": 1,
  "weights": [[1],[1],[1]],
  "requirements": [2],
  "constraint": {"type": "knapsack", "costs": [1, 1], "budget": 1}
}"#;

fn load(json: &str) -> (ChromaStatus, *mut ChromaInstance) {
    let text = CString::new(json).unwrap();
    let mut inst = ptr::null_mut();
    let status = unsafe { chroma_instance_from_json(text.as_ptr(), &mut inst) };
    (status, inst)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(chroma_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn take(s: *mut std::ffi::c_char) -> serde_json::Value {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { chroma_string_free(s) };
    serde_json::from_str(&text).unwrap()
}

#[test]
fn handle_lifecycle_and_accessors() {
    let (status, inst) = load(TINY);
    assert_eq!(status, ChromaStatus::Ok);
    unsafe {
        assert_eq!(chroma_instance_n_clients(inst), 3);
        assert_eq!(chroma_instance_n_facilities(inst), 2);
        assert_eq!(chroma_instance_gamma(inst), 1);
        assert_eq!(chroma_instance_n_clients(ptr::null()), 0);
        chroma_instance_free(inst);
        chroma_instance_free(ptr::null_mut());
    }
}

#[test]
fn solvers_return_reports() {
    let (_, inst) = load(TINY);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { chroma_solve_reduction(inst, 3, 10, &mut out) },
        ChromaStatus::Ok
    );
    let v = take(out);
    assert_eq!(v["feasible"], true);
    assert!(v["radius"].as_u64().unwrap() <= 11);

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { chroma_solve_knapsack7(inst, 0, &mut out) },
        ChromaStatus::Ok
    );
    let v = take(out);
    assert!(v["radius"].as_u64().unwrap() <= 7);

    let mut radius = 0;
    assert_eq!(
        unsafe { chroma_brute_force(inst, &mut radius) },
        ChromaStatus::Ok
    );
    assert_eq!(radius, 1);
    unsafe { chroma_instance_free(inst) };
}

#[test]
fn check_solution_against_radius() {
    let (_, inst) = load(TINY);
    let centers = [0usize];
    let mut ok = false;
    unsafe {
        assert_eq!(
            chroma_check_solution(inst, centers.as_ptr(), 1, 1, &mut ok),
            ChromaStatus::Ok
        );
        assert!(ok);
        assert_eq!(
            chroma_check_solution(inst, centers.as_ptr(), 1, 0, &mut ok),
            ChromaStatus::Ok
        );
        assert!(!ok);
        assert_eq!(
            chroma_check_solution(inst, ptr::null(), 0, 100, &mut ok),
            ChromaStatus::Ok
        );
        assert!(!ok);
        let bad = [7usize];
        assert_eq!(
            chroma_check_solution(inst, bad.as_ptr(), 1, 1, &mut ok),
            ChromaStatus::Invalid
        );
        assert!(last_error().contains('7'));
        chroma_instance_free(inst);
    }
}

#[test]
fn error_codes() {
    assert_eq!(load("{").0, ChromaStatus::Parse);
    assert!(!last_error().is_empty());
    let (status, inst) = load(&TINY.replace("[[1],[1],[1]]", "[[1],[-1],[1]]"));
    assert_eq!(status, ChromaStatus::Invalid);
    assert!(inst.is_null());

    let bytes = [0xffu8, 0];
    let mut inst = ptr::null_mut();
    let status = unsafe { chroma_instance_from_json(bytes.as_ptr().cast(), &mut inst) };
    assert_eq!(status, ChromaStatus::InvalidUtf8);

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { chroma_solve_reduction(ptr::null(), 0, 1, &mut out) },
        ChromaStatus::NullPointer
    );
    assert!(last_error().contains("instance"));
    assert_eq!(
        unsafe { chroma_instance_from_json(ptr::null(), &mut inst) },
        ChromaStatus::NullPointer
    );

    let (_, inst) = load(TINY);
    assert_eq!(
        unsafe { chroma_solve_knapsack7(inst, 1, ptr::null_mut()) },
        ChromaStatus::NullPointer
    );
    unsafe { chroma_instance_free(inst) };
}

#[test]
fn infeasible_instance_reports_status() {
    // Budget 0 admits only the empty set, which covers nothing.
    let (_, inst) = load(&TINY.replace("\"budget\": 1", "\"budget\": 0"));
    let mut radius = 0;
    assert_eq!(
        unsafe { chroma_brute_force(inst, &mut radius) },
        ChromaStatus::Infeasible
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { chroma_solve_reduction(inst, 0, 5, &mut out) },
        ChromaStatus::Infeasible
    );
    assert_eq!(take(out)["feasible"], false);
    assert!(last_error().is_empty());
    unsafe { chroma_instance_free(inst) };
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(chroma_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/chroma.h")).unwrap();
    for name in [
        "chroma_instance_from_json",
        "chroma_instance_free",
        "chroma_instance_n_clients",
        "chroma_instance_n_facilities",
        "chroma_instance_gamma",
        "chroma_solve_reduction",
        "chroma_solve_knapsack7",
        "chroma_brute_force",
        "chroma_check_solution",
        "chroma_string_free",
        "chroma_last_error",
        "chroma_version",
        "CHROMA_STATUS_INFEASIBLE",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "chroma.h"

int main(int argc, char **argv) {
    (void)argc;
    ChromaInstance *inst = NULL;
    if (chroma_instance_from_json(argv[1], &inst) != CHROMA_STATUS_OK) return 2;
    uint64_t radius = 0;
    if (chroma_brute_force(inst, &radius) != CHROMA_STATUS_OK) return 3;
    char *report = NULL;
    if (chroma_solve_reduction(inst, 1, 10, &report) != CHROMA_STATUS_OK) return 4;
    int feasible = strstr(report, "\"feasible\": true") != NULL;
    chroma_string_free(report);
    chroma_instance_free(inst);
    printf("%llu %d\n", (unsigned long long)radius, feasible);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    // deps/<test> -> profile dir holding libchroma_ffi.a
    let profile_dir: PathBuf = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .into();
    let lib = profile_dir.join("libchroma_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let out = Command::new(&exe).arg(TINY).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 1");
}
