use std::process::Command;

use rpsp::generate::{generate, generate_laminar, InstanceConfig};

fn rpsp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rpsp"))
}

#[test]
fn exit_codes_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let lam = dir.path().join("lam.json");
    generate_laminar(10, 3).write(&lam).unwrap();

    let out = rpsp().args(["solve", lam.to_str().unwrap(), "--seed", "1"]).env("RPSP_SEED", "77").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let record: rpsp::cli::RunRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record.algorithm, "laminar");
    assert_eq!(record.seed, Some(77));

    let big = dir.path().join("big.json");
    generate(&InstanceConfig::new(30, 20, 20, 0.3, 2)).unwrap().write(&big).unwrap();
    let out = rpsp().args(["solve", big.to_str().unwrap()]).env_remove("RPSP_SEED").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("export-lp"));

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{").unwrap();
    let out = rpsp().args(["solve", junk.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let claim = dir.path().join("claim.json");
    std::fs::write(&claim, r#"{"members": [1], "value": 12345}"#).unwrap();
    let out = rpsp().args(["check", lam.to_str().unwrap(), claim.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
