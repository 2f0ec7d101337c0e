use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn negcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&negcone(&["--help"])), 0);
    assert_eq!(code(&negcone(&["--version"])), 0);
    assert_eq!(code(&negcone(&["verify-eff", "--space", "m07"])), 4);
    assert_eq!(code(&negcone(&["verify-eff"])), 4);
    assert_eq!(code(&negcone(&["frobnicate"])), 4);
    assert_eq!(
        code(&negcone(&[
            "verify-eff",
            "--space",
            "m05",
            "--criteria",
            "12"
        ])),
        4
    );
}

#[test]
fn m05_verify_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("m05.json");
    let out = negcone(&[
        "verify-eff",
        "--space",
        "m05",
        "--route",
        "both",
        "--cert",
        path_str(&cert),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&cert);
    assert_eq!(doc["space"], "m05");
    assert_eq!(
        doc["classification"]["representatives"]
            .as_array()
            .unwrap()
            .len(),
        2
    );
    assert_eq!(code(&negcone(&["cert", "check", path_str(&cert)])), 0);

    // A certificate for one space does not check against the other.
    let dump = dir.path().join("m06.json");
    assert_eq!(
        code(&negcone(&[
            "catalog",
            "dump",
            "--space",
            "m06",
            "--out",
            path_str(&dump)
        ])),
        0
    );
    assert_ne!(
        code(&negcone(&[
            "cert",
            "check",
            path_str(&cert),
            "--catalog",
            path_str(&dump)
        ])),
        0
    );
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(
            code(&negcone(&[
                "verify-eff",
                "--space",
                "m05",
                "--cert",
                path_str(p)
            ])),
            0
        );
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn catalog_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("cat.json");
    assert_eq!(
        code(&negcone(&[
            "catalog",
            "dump",
            "--space",
            "m05",
            "--out",
            path_str(&dump)
        ])),
        0
    );
    let out = negcone(&["verify-eff", "--catalog", path_str(&dump)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let again = dir.path().join("again.json");
    assert_eq!(
        code(&negcone(&[
            "catalog",
            "dump",
            "--catalog",
            path_str(&dump),
            "--out",
            path_str(&again)
        ])),
        0
    );
    assert_eq!(read_json(&dump), read_json(&again));

    // A catalog for the other space is a usage error.
    assert_eq!(
        code(&negcone(&[
            "verify-eff",
            "--space",
            "m06",
            "--catalog",
            path_str(&dump)
        ])),
        4
    );
}

#[test]
fn perturbed_catalog_fails_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("cat.json");
    assert_eq!(
        code(&negcone(&[
            "catalog",
            "dump",
            "--space",
            "m05",
            "--out",
            path_str(&dump)
        ])),
        0
    );
    let mut doc = read_json(&dump);
    let x = doc["curves"][0]["class"][0].as_i64().unwrap();
    doc["curves"][0]["class"][0] = Value::from(x + 1);
    std::fs::write(&dump, serde_json::to_string(&doc).unwrap()).unwrap();

    let report = dir.path().join("violation.json");
    let out = negcone(&[
        "verify-eff",
        "--catalog",
        path_str(&dump),
        "--cert",
        path_str(&report),
    ]);
    assert_eq!(code(&out), 3);
    assert!(report.exists());
}

#[test]
fn missing_files_are_usage_errors() {
    assert_eq!(
        code(&negcone(&["cert", "check", "/nonexistent/cert.json"])),
        4
    );
    assert_eq!(
        code(&negcone(&[
            "verify-eff",
            "--catalog",
            "/nonexistent/cat.json"
        ])),
        4
    );
}

#[test]
fn m05_enumeration_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("nefmin.json");
    let out = negcone(&[
        "enumerate-nefmin",
        "--space",
        "m05",
        "--no-orbit-pruning",
        "--out",
        path_str(&out_path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&out_path);
    let subsets = doc["subsets"].as_array().unwrap();
    assert_eq!(subsets.len(), 15);
    assert!(subsets
        .iter()
        .all(|s| s["ids"].as_array().unwrap().len() == 2));
}

#[test]
fn m05_enumeration_with_empty_covers_is_uncovered() {
    let dir = tempfile::tempdir().unwrap();
    let covers = dir.path().join("covers.txt");
    std::fs::write(&covers, "# nothing\n").unwrap();
    let out = negcone(&[
        "enumerate-nefmin",
        "--space",
        "m05",
        "--covers",
        path_str(&covers),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn m05_oracle_commands() {
    // The rays of the nef-side cone never match the divisor generators (see README).
    assert_eq!(
        code(&negcone(&["oracle", "--space", "m05", "--what", "rays"])),
        1
    );
    assert_eq!(
        code(&negcone(&["oracle", "--space", "m05", "--what", "facets"])),
        0
    );
    let out = negcone(&[
        "oracle",
        "--space",
        "m06",
        "--what",
        "crosscheck",
        "--trials",
        "200",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn m06_ray_budget_exits_two() {
    let out = negcone(&[
        "oracle",
        "--space",
        "m06",
        "--what",
        "rays",
        "--max-rays",
        "500",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn face_and_orbits() {
    assert_eq!(
        code(&negcone(&["face", "--space", "m06", "--curve", "l-e1"])),
        0
    );
    assert_ne!(
        code(&negcone(&["face", "--space", "m06", "--curve", "0"])),
        0
    );
    let out = negcone(&["orbits", "--space", "m06"]);
    assert_eq!(code(&out), 0);
    assert!(!out.stdout.is_empty());
}
