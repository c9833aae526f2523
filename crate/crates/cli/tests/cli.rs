use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn c2span(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c2span")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn constants_for_lee_yang() {
    let out = c2span(&["constants"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["B"].as_u64(), v["N"].as_u64(), v["Q"].as_u64(), v["L"].as_u64()), (Some(2), Some(3), Some(4), Some(2)));
    assert_eq!(v["lowest_weight"], "-1/5");

    let out = c2span(&["--model", "2,5", "--h", "0", "--wmax", "8", "constants"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["L"], 0);
}

#[test]
fn normalize_prints_expansion_and_trace() {
    let out = c2span(&["--wmax", "10", "normalize", "w[-1] w[-1] w[-1] w[-1] |0>"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"output\": \"147/25 * w[-7] |0> + 42/25 * w[-5] w[-1] |0> - 18/25 * w[-4] w[-2] |0>\""));
    assert!(text.lines().any(|l| l.starts_with("repeat (t=8, K=1)")));
}

#[test]
fn exit_codes() {
    // no subcommand
    assert_eq!(c2span(&[]).status.code(), Some(2));
    assert_eq!(c2span(&["--model", "2,4", "constants"]).status.code(), Some(2));
    assert_eq!(c2span(&["normalize", "w[-1 |h>"]).status.code(), Some(2));
    // not a module of the Lee-Yang algebra: the spanning set falls short
    let out = c2span(&["--h", "1/3", "--wmax", "6", "module-span"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank 3 at weight 4"));
}

#[test]
fn empty_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"commands": []}"#).unwrap();
    assert_eq!(c2span(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, r#"{"commands": [{"cmd": "nope"}]}"#).unwrap();
    assert_eq!(c2span(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

fn run_into(dir: &Path, cfg: &Path) {
    let out = c2span(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{
            "model": {"family": "virasoro-minimal", "p": 2, "q": 5},
            "h": "-1/5",
            "w_max": 8,
            "seed": 5,
            "commands": [
                {"cmd": "cofinite"},
                {"cmd": "voa-span"},
                {"cmd": "module-span"},
                {"cmd": "normalize", "expr": "w[-2] w[-2] |h>"},
                {"cmd": "zhu", "n": 0},
                {"cmd": "identities"}
            ]
        }"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_into(&a, &cfg);
    run_into(&b, &cfg);
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for name in &names {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name:?}");
    }
    let table = fs::read_to_string(a.join("02-voa-span.csv")).unwrap();
    assert!(table.starts_with("weight,dim,cn_codim\n0,1,1\n1,0,0\n2,1,1\n"));
    let ids: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("06-identities.json")).unwrap()).unwrap();
    assert_eq!(ids["checks"], 200);
    assert_eq!(ids["failures"].as_array().unwrap().len(), 0);
}
