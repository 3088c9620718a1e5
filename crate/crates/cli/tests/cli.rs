use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn sdtab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdtab")).args(args).output().expect("run sdtab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn puzzle_trace_uses_compiled_rules() {
    let p = fixture("puzzle132.p");
    let o = sdtab(&[p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("(* PROOF-FOUND *)"));
    assert!(s.contains("Extension/szen/crime_axiom"), "{s}");
}

#[test]
fn drest_has_two_closures() {
    let p = fixture("b_drest.p");
    let o = sdtab(&[p.to_str().unwrap(), "--tag", "b", "--trace", "skeleton"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("closed leaves: 2"), "{}", stdout(&o));
}

#[test]
fn lone_conjecture_has_no_proof() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.p");
    std::fs::write(&f, "fof(c, conjecture, p).\n").unwrap();
    let o = sdtab(&[f.to_str().unwrap(), "--trace", "status"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "NO-PROOF");
}

#[test]
fn syntax_error_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.p");
    std::fs::write(&f, "fof(c, conjecture, p &).\n").unwrap();
    let o = sdtab(&[f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.p:1:"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_file_exits_with_two() {
    let o = sdtab(&["/nonexistent/x.p"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn include_dir_is_searched() {
    let dir = tempfile::tempdir().unwrap();
    let lib = dir.path().join("lib");
    std::fs::create_dir(&lib).unwrap();
    std::fs::write(lib.join("ax.p"), "fof(a, axiom, ![X]: (p(X) => q(X))).\n").unwrap();
    let f = dir.path().join("main.p");
    std::fs::write(&f, "include('ax.p').\nfof(h, axiom, p(c)).\nfof(g, conjecture, q(c)).\n").unwrap();
    let o = sdtab(&[f.to_str().unwrap(), "--trace", "status"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sdtab(&[f.to_str().unwrap(), "-I", lib.to_str().unwrap(), "--trace", "status"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn list_rules_prints_dump() {
    let p = fixture("inclusion.p");
    let o = sdtab(&[p.to_str().unwrap(), "--list-rules", "--trace", "status"]);
    let s = stdout(&o);
    assert!(s.contains("trigger"), "{s}");
    assert!(s.trim_end().ends_with("PROOF-FOUND"));
}

#[test]
fn zero_timeout_is_rejected() {
    let p = fixture("inclusion.p");
    let o = sdtab(&[p.to_str().unwrap(), "--timeout", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
