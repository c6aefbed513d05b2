//! Compiles a C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "h2d.h"

int main(void) {
    H2dComplex r;
    H2dComplex z1 = {2.0, 0.0}, z2 = {3.0, 0.0};
    if (h2d_h2d(1, 1, z1, z2, &r) != H2D_STATUS_OK || r.re != 5.0) return 1;
    if (h2d_hermite(3, z1, NULL) != H2D_STATUS_NULL_POINTER) return 2;
    char msg[64];
    if (h2d_last_error_message(msg, sizeof msg) == 0) return 3;

    H2dComplex h[1] = {{0.3, 0.0}};
    H2dMatrix *m = NULL;
    if (h2d_matrix_new(1, h, &m) != H2D_STATUS_OK) return 4;
    double x[1] = {0.5}, lhs = 0.0;
    H2dSeries *s = NULL;
    if (h2d_kernel_real(m, x, &lhs) != H2D_STATUS_OK) return 5;
    if (h2d_series_real(m, x, h2d_policy_real_default(), &s) != H2D_STATUS_OK) return 6;
    H2dComplex v;
    h2d_series_value(s, &v);
    h2d_series_free(s);
    h2d_matrix_free(m);
    double d = v.re - lhs;
    if (d > 1e-9 || d < -1e-9) return 7;
    printf("ok %.15f\n", lhs);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/c_program-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_is_valid_c_and_cpp() {
    if !have_cc() {
        eprintln!("no C compiler; skipped");
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    for (lang, std) in [("c", "-std=c11"), ("c++", "-std=c++17")] {
        let out = Command::new("cc")
            .args(["-x", lang, std, "-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(&include)
            .arg(include.join("h2d.h"))
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{lang}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libh2d_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!(
            "no C compiler or static library at {}; skipped",
            lib.display()
        );
        return;
    }
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("h2d_ffi_check.c");
    let bin = tmp.join("h2d_ffi_check");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
