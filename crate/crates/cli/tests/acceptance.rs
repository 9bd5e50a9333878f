//! Determinism gate: repeated runs of the bundled scenarios must write
//! byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

fn run(cmd: &str, scenario: &str, out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_sofar"))
        .args([
            cmd,
            "--scenario",
            scenario,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "0",
        ])
        .status()
        .expect("binary runs");
    assert!(status.success(), "{cmd} on {scenario} failed");
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn assert_identical_runs(cmd: &str, scenario: &str) {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(cmd, scenario, a.path());
    run(cmd, scenario, b.path());
    let fa = dir_bytes(a.path());
    let fb = dir_bytes(b.path());
    assert_eq!(
        fa.keys().collect::<Vec<_>>(),
        fb.keys().collect::<Vec<_>>(),
        "{cmd} on {scenario}: different file sets"
    );
    assert!(!fa.is_empty(), "{cmd} on {scenario} wrote nothing");
    for (name, bytes) in &fa {
        assert_eq!(
            bytes, &fb[name],
            "{cmd} on {scenario}: {name} differs between runs"
        );
    }
}

#[test]
fn criterion_10_reruns_are_byte_identical() {
    for scenario in ["deepsea_munk", "shallowsea_bilinear"] {
        // `report` exercises every pipeline in one file; `field` and
        // `dynamics` cover the CSV writers.
        assert_identical_runs("report", scenario);
        assert_identical_runs("dynamics", scenario);
    }
    assert_identical_runs("field", "shallowsea_bilinear");
    println!("criterion 10 (byte-identical reruns of bundled scenarios): PASS");
}
