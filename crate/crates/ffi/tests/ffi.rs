use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use tardybatch_ffi::*;

fn last_error() -> String {
    let p = tb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn greedy_example_json() -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/greedy_example.json");
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn instance() -> *mut TbInstance {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { tb_instance_from_json(greedy_example_json().as_ptr(), &mut inst) }, TbStatus::Ok);
    inst
}

#[test]
fn evaluate_the_classic_trace() {
    let inst = instance();
    assert_eq!(unsafe { tb_instance_job_count(inst) }, 9);
    let batches = CString::new("[[5,4,1],[3,2],[7,8],[9],[6]]").unwrap();
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { tb_evaluate(inst, batches.as_ptr(), &mut sol) }, TbStatus::Ok);
    unsafe {
        assert_eq!(tb_solution_tardy_count(sol), 6);
        assert_eq!(tb_solution_makespan(sol), 166);
        assert_eq!(tb_solution_batch_count(sol), 5);
        let mut json = ptr::null_mut();
        assert_eq!(tb_solution_to_json(sol, &mut json), TbStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(text.contains("\"tardy_jobs\":[2,3,6,7,8,9]"), "{text}");
        tb_string_free(json);
        tb_solution_free(sol);
        tb_instance_free(inst);
    }
}

#[test]
fn solve_is_never_below_the_oracle() {
    let inst = instance();
    let mut opts = tb_solve_options_default();
    opts.max_iters = 50;
    opts.pr_iters = 50;
    opts.rcl_size = 3;
    let mut sol = ptr::null_mut();
    let mut optimum = usize::MAX;
    let mut witness = ptr::null_mut();
    unsafe {
        assert_eq!(tb_solve(inst, &opts, &mut sol), TbStatus::Ok);
        assert_eq!(tb_oracle_optimum(inst, 9, &mut optimum, &mut witness), TbStatus::Ok);
        assert_eq!(optimum, 5);
        assert_eq!(tb_solution_tardy_count(witness), 5);
        assert!(tb_solution_tardy_count(sol) >= optimum);
        assert!(tb_solution_tardy_count(sol) <= 5);
        tb_solution_free(sol);
        tb_solution_free(witness);
        tb_instance_free(inst);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(tb_instance_from_json(ptr::null(), &mut inst), TbStatus::NullPointer);
        let bad = CString::new(r#"{"capacity": 10, "jobs": [{"id": 1, "p": 1, "s": 11, "d": 1}]}"#).unwrap();
        assert_eq!(tb_instance_from_json(bad.as_ptr(), &mut inst), TbStatus::ValidationError);
        assert!(last_error().contains("capacity"));
        let junk = CString::new("{").unwrap();
        assert_eq!(tb_instance_from_json(junk.as_ptr(), &mut inst), TbStatus::ParseError);
        let missing = CString::new("/nonexistent/instance.json").unwrap();
        assert_eq!(tb_instance_load(missing.as_ptr(), &mut inst), TbStatus::IoError);
        assert_eq!(tb_instance_generate(0, 0.5, 1, &mut inst), TbStatus::InvalidArgument);
        assert!(inst.is_null());

        assert_eq!(tb_instance_generate(12, 0.5, 1, &mut inst), TbStatus::Ok);
        assert!(tb_last_error_message().is_null());
        let mut t = 0;
        assert_eq!(tb_oracle_optimum(inst, 9, &mut t, ptr::null_mut()), TbStatus::TooLarge);
        let mut opts = tb_solve_options_default();
        opts.rcl_fraction = 0.0;
        let mut sol = ptr::null_mut();
        assert_eq!(tb_solve(inst, &opts, &mut sol), TbStatus::InvalidArgument);
        let dup = CString::new("[[1,1]]").unwrap();
        assert_eq!(tb_evaluate(inst, dup.as_ptr(), &mut sol), TbStatus::ValidationError);
        assert!(sol.is_null());
        tb_instance_free(inst);
        tb_instance_free(ptr::null_mut());
        tb_solution_free(ptr::null_mut());
        tb_string_free(ptr::null_mut());
    }
}

#[test]
fn instance_json_round_trip() {
    let inst = instance();
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(tb_instance_to_json(inst, &mut json), TbStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(tb_instance_from_json(json, &mut back), TbStatus::Ok);
        assert_eq!(tb_instance_job_count(back), 9);
        tb_string_free(json);
        tb_instance_free(back);
        tb_instance_free(inst);
    }
    let v = unsafe { CStr::from_ptr(tb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "tardybatch.h"

int main(void) {
    TbInstance *inst = NULL;
    if (tb_instance_generate(8, 0.5, 3, &inst) != TB_STATUS_OK) return 10;
    TbSolveOptions opts = tb_solve_options_default();
    opts.max_iters = 20;
    opts.pr_iters = 20;
    TbSolution *sol = NULL;
    if (tb_solve(inst, &opts, &sol) != TB_STATUS_OK) return 11;
    size_t optimum = 0;
    if (tb_oracle_optimum(inst, 9, &optimum, NULL) != TB_STATUS_OK) return 12;
    size_t tardy = tb_solution_tardy_count(sol);
    if (tardy < optimum) return 13;
    char *json = NULL;
    if (tb_solution_to_json(sol, &json) != TB_STATUS_OK) return 14;
    printf("%zu %zu %s\n", tardy, optimum, json);
    tb_string_free(json);
    tb_solution_free(sol);
    tb_instance_free(inst);
    return 0;
}
"#;

// Compiles and links a C program against the generated header and the static
// library. Skipped when no C compiler is installed.
#[test]
fn header_compiles_and_links_from_c() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libtardybatch_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("\"batches\""), "{stdout}");
}
