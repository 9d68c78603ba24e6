use std::process::{Command, Output};

fn diagcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagcount"))
        .args(args)
        .env_remove("DIAGCOUNT_BACKEND")
        .env_remove("DIAGCOUNT_FORMAT")
        .env_remove("DIAGCOUNT_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = diagcount(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn count_examples() {
    assert_eq!(stdout(&["count", "--eq", "x1^2 = x2^2 + x3^2", "--n", "25"]), "16\n");
    assert_eq!(stdout(&["count", "--eq", "x1 = x2^2 + x3^2", "--n", "1"]), "0\n");
    assert_eq!(stdout(&["count", "--eq", "x1 = x2^2+x3^3+x4^6", "--n", "3"]), "1\n");
}

#[test]
fn count_agrees_across_backends() {
    for backend in ["enumerate", "table", "mitm"] {
        let out = stdout(&["count", "--eq", "x1^2 = x2^2 + x3^2 + x4^2", "--n", "60", "--backend", backend]);
        let reference = stdout(&["count", "--eq", "x1^2 = x2^2 + x3^2 + x4^2", "--n", "60", "--backend", "enumerate"]);
        assert_eq!(out, reference, "{backend}");
    }
}

#[test]
fn count_list_and_nondecreasing() {
    let listed = stdout(&["count", "--eq", "x1^2 = x2^2 + x3^2", "--n", "10", "--list"]);
    assert_eq!(listed.lines().count(), 4);
    assert!(listed.lines().any(|l| l == "5,3,4"));
    assert_eq!(stdout(&["count", "--eq", "x1^2 = x2^2 + x3^2", "--n", "25", "--nondecreasing"]), "8\n");
}

#[test]
fn hua_and_parametric_examples() {
    assert_eq!(stdout(&["hua", "--k", "2", "--t", "1", "--p", "1000"]), "1000\n");
    assert_eq!(stdout(&["hua", "--k", "2", "--t", "2", "--grid", "2:4:2"]), "P,moment\n2,6\n4,28\n");
    assert_eq!(stdout(&["parametric", "--family", "cubic-unit", "--n", "10"]), "2\n");
    assert_eq!(stdout(&["parametric", "--family", "pythagorean", "--n", "25"]), "6\n");
    assert_eq!(stdout(&["parametric", "--family", "pythagorean-scaled", "--n", "25"]), "8\n");
}

#[test]
fn predict_reports_exact_exponent() {
    let csv = stdout(&["predict", "--eq", "x1 = x2^2+x3^3+x4^5"]);
    let row = csv.lines().nth(1).unwrap();
    assert!(row.contains(",mixed-powers,31/30,1.033333,true,"), "{row}");

    let json = stdout(&["predict", "--eq", "x1 = x2^2+x3^3+x4^6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["predicted"]["exact"], "1");
    assert_eq!(v["predicted"]["eps"], false);
    assert!((v["predicted"]["const"].as_f64().unwrap() - 0.734181).abs() < 1e-9);

    let none = stdout(&["predict", "--eq", "x1 = x2^2 + x3^3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&none).unwrap();
    assert!(v["predicted"].is_null());
}

#[test]
fn sweep_csv_and_fit() {
    let csv = stdout(&["sweep", "--eq", "x1^2 = x2^2 + x3^2", "--grid", "5:20:2"]);
    assert_eq!(csv, "N,count\n5,2\n10,4\n20,12\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    std::fs::write(&path, "N,count\n2,8\n4,64\n8,512\n16,4096\n").unwrap();
    let fit = stdout(&["fit", "--input", path.to_str().unwrap()]);
    assert!(fit.lines().nth(1).unwrap().starts_with("3.000000,0.000000,1.000000,"), "{fit}");

    let direct = stdout(&["fit", "--eq", "x1 = x2^2 + x3^2 + x4^2 + x5^2", "--grid", "64:4096:2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&direct).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 2.0).abs() < 0.1);
}

#[test]
fn check_emits_verdict() {
    let json = stdout(&["check", "--eq", "x1^2 = x2^2 + x3^2 + x4^2", "--grid", "16:512:2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["verdict"], "Violated");
    assert_eq!(v["predicted"]["row"], "homogeneous-three-terms");
    let table = stdout(&["check", "--eq", "x1^2 = x2^2 + x3^2 + x4^2", "--grid", "16:512:2"]);
    assert!(table.contains("challenged bound [homogeneous-three-terms]"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("count.txt");
    let out = stdout(&["count", "--eq", "x1^2 = x2^2 + x3^2", "--n", "25", "--out", path.to_str().unwrap()]);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "16\n");
}

#[test]
fn env_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_diagcount"))
        .args(["sweep", "--eq", "x1^2 = x2^2 + x3^2", "--grid", "5,10"])
        .env("DIAGCOUNT_FORMAT", "json")
        .env("DIAGCOUNT_BACKEND", "mitm")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["backend"], "mitm");
    assert_eq!(v["points"][1]["count"], 4);
}

#[test]
fn exit_codes() {
    assert_eq!(diagcount(&["--help"]).status.code(), Some(0));
    assert_eq!(diagcount(&["--version"]).status.code(), Some(0));
    assert_eq!(diagcount(&[]).status.code(), Some(1));
    assert_eq!(diagcount(&["count", "--eq", "x1 = x2^2"]).status.code(), Some(1));
    assert_eq!(diagcount(&["count", "--eq", "x1 = ", "--n", "3"]).status.code(), Some(1));
    assert_eq!(diagcount(&["count", "--eq", "x1 = x2^2", "--n", "0"]).status.code(), Some(1));
    assert_eq!(diagcount(&["count", "--eq", "x1 = x2^2", "--n", "5", "--backend", "abacus"]).status.code(), Some(1));
    assert_eq!(diagcount(&["sweep", "--eq", "x1 = x2^2", "--grid", "8:4:2"]).status.code(), Some(1));
    assert_eq!(diagcount(&["hua", "--k", "2", "--t", "1"]).status.code(), Some(1));

    let over = diagcount(&["count", "--eq", "x1 = x2^2 + x3^2", "--n", "100000", "--memory-budget", "10"]);
    assert_eq!(over.status.code(), Some(2), "{}", String::from_utf8_lossy(&over.stderr));
    assert!(String::from_utf8_lossy(&over.stderr).contains("budget"));
    let missing = diagcount(&["report", "--manifest", "/nonexistent/suite.toml"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn violated_rows_do_not_fail_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("suite.toml");
    let mut text = String::from(
        "[[entry]]\neq = \"x1^2 = x2^2 + x3^2 + x4^2\"\nsource = \"homogeneous-three-terms\"\nbackend = \"table\"\n\
         small = \"16:256:2\"\nmedium = \"16:256:2\"\nlarge = \"16:256:2\"\n",
    );
    for id in [
        "explicit-many-terms",
        "explicit-two-terms",
        "explicit-three-terms",
        "explicit-four-terms",
        "homogeneous-many-terms",
        "homogeneous-two-terms",
        "homogeneous-four-terms",
        "mixed-powers",
        "mixed-unit-sum",
    ] {
        text.push_str(&format!("[[excluded]]\nrow = \"{id}\"\nreason = \"test\"\n"));
    }
    std::fs::write(&manifest, text).unwrap();
    let json = stdout(&["report", "--manifest", manifest.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["summary"]["violated"], 1);
    assert!(v["rows"][0].get("ms").is_none());

    let timed = stdout(&["report", "--manifest", manifest.to_str().unwrap(), "--format", "json", "--timings"]);
    let v: serde_json::Value = serde_json::from_str(&timed).unwrap();
    assert!(v["rows"][0]["ms"].is_u64());
}
