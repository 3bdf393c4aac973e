use std::path::{Path, PathBuf};
use std::process::Command;

const HEADER_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include");

const PROGRAM: &str = r#"
#include <stdio.h>
#include "nullgauge.h"

int main(void) {
    ng_grid grid = {128, 0.1, 0.02};
    ng_constants consts = {1.0, 1.0, 0.0};
    ng_kgm *h = NULL;
    ng_unitary *u = NULL;
    ng_diagnostics d0, d1;
    double background = 0.0;
    if (ng_kgm_packet(grid, consts, NULL, &background, &h) != NG_OK) return 10;
    if (ng_kgm_to_unitary(h, 1e-8, NULL, &u) != NG_OK) return 11;
    if (ng_unitary_diagnostics(u, &d0) != NG_OK) return 12;
    if (ng_unitary_step(u, 5) != NG_OK) return 13;
    if (ng_unitary_diagnostics(u, &d1) != NG_OK) return 14;
    if (ng_kgm_step(NULL, 1) != NG_NULL_POINTER) return 15;
    if (ng_last_error_message()[0] == '\0') return 16;
    printf("%.17g %.17g %.17g\n", background, d0.charge, d1.charge);
    ng_unitary_free(u);
    ng_kgm_free(h);
    return 0;
}
"#;

fn cc() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().map(|_| cc)
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_is_valid_c() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found; header check skipped");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, "#include \"nullgauge.h\"\n").unwrap();
    let out = Command::new(&cc)
        .args([
            "-std=c99",
            "-Wall",
            "-Wextra",
            "-Werror",
            "-fsyntax-only",
            "-I",
            HEADER_DIR,
        ])
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn c_program_links_against_static_library() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found; link check skipped");
        return;
    };
    let lib = target_dir().join("libnullgauge_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I", HEADER_DIR])
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let values: Vec<f64> = String::from_utf8(run.stdout)
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values[0], -0.5);
    assert!((values[2] - values[1]).abs() < 1e-8 * values[1].abs());
}
