use std::path::PathBuf;
use std::process::{Command, Output};

fn ksineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksineq"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ksineq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const BASIS: &str =
    "ksset 1\nname basis\ndim 3\nvec a 1 0 0\nvec b 0 1 0\nvec c 0 0 1\nctx a b c\n";

#[test]
fn critical_r_from_parameters() {
    let o = ksineq(&["critical-r", "--N", "9", "--M", "18", "--d", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.0142"));
    let o = ksineq(&[
        "critical-r",
        "--N",
        "9",
        "--M",
        "18",
        "--d",
        "4",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["r_floor4"], 0.0142);
}

#[test]
fn critical_r_needs_complete_parameters() {
    assert_eq!(ksineq(&["critical-r", "--N", "9"]).status.code(), Some(1));
    assert_eq!(ksineq(&["critical-r"]).status.code(), Some(1));
    assert_eq!(
        ksineq(&["critical-r", "catalog:cabello18", "--N", "9"])
            .status
            .code(),
        Some(1)
    );
    let o = ksineq(&["critical-r", "catalog:cabello18"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.0142"));
}

#[test]
fn color_exit_codes() {
    let o = ksineq(&["color", "catalog:cabello18"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("no non-contextual assignment exists"));
    let path = temp_file("basis.ks", BASIS);
    let o = ksineq(&["color", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("colorable"));
}

#[test]
fn validate_reports_offending_line() {
    let bad = BASIS.replace("vec c 0 0 1", "vec c 0 1 1");
    let path = temp_file("bad.ks", &bad);
    let o = ksineq(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains(":7: context not orthogonal"), "{out}");
    let o = ksineq(&["validate", path.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["diagnostics"][0]["line"], 7);
}

#[test]
fn validate_catalog_sets() {
    for name in ["cabello18", "kernaghan20", "kernaghan-peres36", "peres57"] {
        let o = ksineq(&["validate", &format!("catalog:{name}")]);
        assert_eq!(o.status.code(), Some(0), "{name}");
    }
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(ksineq(&[]).status.code(), Some(1));
    assert_eq!(ksineq(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        ksineq(&["stats", "catalog:cabello18", "--bogus"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ksineq(&["stats", "catalog:nope"]).status.code(), Some(1));
    assert_eq!(
        ksineq(&["stats", "/nonexistent/file.ks"]).status.code(),
        Some(1)
    );
    assert_eq!(
        ksineq(&[
            "bounds",
            "catalog:cabello18",
            "--delta",
            "2",
            "--epsilon",
            "0"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        ksineq(&["simulate", "catalog:cabello18", "--r", "-0.1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ksineq(&["table", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(ksineq(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let path = temp_file("garbled.ks", &BASIS.replace("vec b 0 1 0", "vec b 0 1"));
    let o = ksineq(&["stats", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains(":5: wrong component count"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn stats_reports_parameters() {
    let o = ksineq(&["stats", "catalog:kernaghan-peres36", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        (
            v["d"].as_u64(),
            v["n"].as_u64(),
            v["N"].as_u64(),
            v["M"].as_u64()
        ),
        (Some(8), Some(36), Some(11), Some(72))
    );
    assert_eq!(v["all_pairs_M"], 76);
    let text = stdout(&ksineq(&["stats", "catalog:cabello18"]));
    assert!(
        text.contains("M 18\n") && text.contains("  2: 18"),
        "{text}"
    );
}

#[test]
fn defect_and_bounds() {
    let o = ksineq(&["defect", "catalog:kernaghan20", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["d_min"], 1);
    assert_eq!(v["witness"].as_array().unwrap().len(), 11);
    let o = ksineq(&[
        "bounds",
        "catalog:cabello18",
        "--delta",
        "0.0555555555555555",
        "--epsilon",
        "0",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["margin"]["contradiction"], true);
    assert!((v["delta_bound"]["delta_min"].as_f64().unwrap() - 1.0 / 18.0).abs() < 1e-15);
}

#[test]
fn json_is_byte_deterministic() {
    for args in [
        vec![
            "simulate",
            "catalog:cabello18",
            "--r",
            "0.05",
            "--trials",
            "20000",
            "--seed",
            "9",
            "--format",
            "json",
        ],
        vec!["table", "--format", "json"],
        vec!["defect", "catalog:cabello18", "--format", "json"],
    ] {
        let a = ksineq(&args);
        let b = ksineq(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn simulate_json_schema() {
    let o = ksineq(&[
        "simulate",
        "catalog:cabello18",
        "--r",
        "0.1",
        "--trials",
        "5000",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in [
        "seed",
        "trials",
        "r",
        "delta_hat",
        "epsilon_hat",
        "mean_defect",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["delta_hat"].as_array().unwrap().len(), 18);
    assert_eq!(v["epsilon_hat"].as_array().unwrap().len(), 9);
    assert_eq!(v["inequality"]["holds"], true);
}

#[test]
fn table_lists_six_rows() {
    let o = ksineq(&["table", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for key in ["name", "d", "n", "N", "M", "r_critical", "r_floor4"] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
    let text = stdout(&ksineq(&["table"]));
    assert_eq!(text.lines().count(), 7);
}
