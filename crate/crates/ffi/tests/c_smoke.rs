//! Compiles a real C program against include/orthobound.h and the built
//! shared library, runs it, and checks the output.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "orthobound.h"

int main(void) {
    if (strlen(ob_version()) == 0) return 10;

    uint64_t lower = 0, ratio = 0, chi = 0;
    if (ob_lower_bound_size(16, &lower) != OB_OK || lower != 2304) return 11;
    if (ob_ratio_bound_floor(16, &ratio) != OB_OK || ratio != 4096) return 12;
    if (ob_chromatic_lower_bound(16, 2304, &chi) != OB_OK || chi != 29) return 13;

    ObSolverOptions opts;
    if (ob_solver_options_default(&opts) != OB_OK) return 14;

    ObReport *report = NULL;
    if (ob_bound_compute(8, "schrijver", NULL, 0, &opts, &report) != OB_OK)
        return 15;
    double value = ob_report_value(report);
    if (value < 31.9 || value > 32.1) return 16;

    uint64_t refinement = 0;
    if (ob_report_refinement(report, &refinement) != OB_OK || refinement != 32)
        return 17;

    char *json = ob_report_json(report);
    if (json == NULL || strstr(json, "\"method\":\"schrijver\"") == NULL)
        return 18;
    ob_string_free(json);
    ob_report_free(report);

    if (ob_lower_bound_size(10, &lower) != OB_INVALID_ARGUMENT) return 19;

    printf("c smoke ok: lower=%llu ratio=%llu chi=%llu value=%.3f\n",
           (unsigned long long)lower, (unsigned long long)ratio,
           (unsigned long long)chi, value);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let cc = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| {
            Command::new(cc)
                .arg("--version")
                .output()
                .map(|o| o.status.success())
                .unwrap_or(false)
        });
    let Some(cc) = cc else {
        eprintln!("no C compiler found; skipping the C smoke test");
        return;
    };

    // target/<profile>/deps/<test-bin> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe
        .parent()
        .and_then(|p| p.parent())
        .expect("profile directory")
        .to_path_buf();
    let profile = profile_dir.file_name().unwrap().to_str().unwrap().to_owned();

    // The test harness links the rlib; make sure the cdylib artifact exists.
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("Cargo.toml");
    let mut build = Command::new(env!("CARGO"));
    build.args([
        "build",
        "-p",
        "orthobound-ffi",
        "--manifest-path",
        manifest.to_str().unwrap(),
    ]);
    if profile == "release" {
        build.arg("--release");
    }
    let status = build.status().expect("nested cargo build");
    assert!(status.success(), "building the cdylib failed");
    let lib = profile_dir.join("liborthobound_ffi.so");
    assert!(lib.exists(), "cdylib not found at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("smoke");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new(cc)
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .arg(format!("-I{}", include.display()))
        .arg(format!("-L{}", profile_dir.display()))
        .arg("-lorthobound_ffi")
        .arg(format!("-Wl,-rpath,{}", profile_dir.display()))
        .arg("-Wall")
        .arg("-Werror")
        .output()
        .expect("invoke C compiler");
    assert!(
        out.status.success(),
        "C compilation failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let run = Command::new(&bin).output().expect("run C smoke binary");
    assert!(
        run.status.success(),
        "C smoke binary exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("c smoke ok"), "{stdout}");
}
