#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn cli(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stereosmell"))
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .output()
        .expect("binary runs")
}

#[track_caller]
pub fn ok(ws: &Path, args: &[&str]) {
    let out = cli(ws, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

/// scan through mine over the mini corpus with a fixed seed.
pub fn pipeline(ws: &Path, extra: &[&str]) {
    pipeline_with(ws, "manifest.toml", extra);
}

pub fn pipeline_with(ws: &Path, manifest: &str, extra: &[&str]) {
    let manifest = fixture(&format!("minicorpus/{manifest}"));
    let labels = fixture("minicorpus/labels.csv");
    let with = |args: &[&str]| {
        let mut all = vec!["--seed", "42"];
        all.extend_from_slice(extra);
        all.extend_from_slice(args);
        ok(ws, &all);
    };
    with(&["--manifest", manifest.to_str().unwrap(), "scan"]);
    with(&["detect"]);
    with(&["train", "--labeled", labels.to_str().unwrap(), "--trees", "25"]);
    with(&["classify"]);
    with(&["integrate"]);
    with(&["analyze"]);
    with(&["mine"]);
}

/// Every file under `dir`, keyed by its relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    walkdir::WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e.path().strip_prefix(dir).unwrap().to_string_lossy().replace('\\', "/");
            (rel, std::fs::read(e.path()).unwrap())
        })
        .collect()
}

pub fn read(ws: &Path, rel: &str) -> String {
    std::fs::read_to_string(ws.join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}
