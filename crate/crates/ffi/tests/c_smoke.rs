// Compiles examples/smoke.c against the generated header and the cdylib.
// Skipped when no C compiler is on PATH.

use std::path::{Path, PathBuf};
use std::process::Command;

fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let libdir = artifact_dir();
    if !libdir.join("liblensfocus_ffi.so").exists()
        && !libdir.join("liblensfocus_ffi.dylib").exists()
    {
        eprintln!("cdylib not found in {}, skipping", libdir.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&libdir)
        .arg(format!("-Wl,-rpath,{}", libdir.display()))
        .arg("-llensfocus_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");

    let out = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "{stdout}\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        stdout.contains("table 1: mean f = -26.94 cm, sem = 0.0600 cm"),
        "{stdout}"
    );
    assert!(
        stdout.contains("table 2: mean f = 17.17 cm, sem = 0.0448 cm"),
        "{stdout}"
    );
    assert!(stdout.contains("equal widths: status 5"), "{stdout}");
}
