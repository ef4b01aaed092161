mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fmetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmetric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

struct Fixture {
    _dir: TempDir,
    inst: String,
    dir: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "three.json", common::THREE_POINT_JSON);
    Fixture {
        dir: dir.path().to_owned(),
        inst: inst.to_str().unwrap().to_owned(),
        _dir: dir,
    }
}

#[test]
fn verify_passes_and_fails() {
    let fx = fixture();
    let out = fmetric(&["verify", &fx.inst]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_out(&out)["status"], "pass");

    let bad = write(
        &fx.dir,
        "bad.json",
        &common::THREE_POINT_JSON.replace("1.0986122886681098", "0"),
    );
    let out = fmetric(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_out(&out);
    assert_eq!(report["status"], "fail");
    let d3 = &report["sections"][1];
    assert_eq!(
        d3["witnesses"][0]["detail"]["pair"],
        serde_json::json!(["a", "c"])
    );
}

#[test]
fn malformed_input_exits_2() {
    let fx = fixture();
    let asym = write(
        &fx.dir,
        "asym.json",
        r#"{"points":["a","b"],"D":[[0,1],[2,0]],"f":{"name":"ln"},"alpha":0}"#,
    );
    assert_eq!(
        fmetric(&["verify", asym.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        fmetric(&["verify", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(fmetric(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fmetric(&["cantor", &fx.inst]).status.code(), Some(2));
}

#[test]
fn metrize_json_csv_and_witness() {
    let fx = fixture();
    let out = fmetric(&["metrize", &fx.inst]);
    assert_eq!(out.status.code(), Some(0));
    let m = json_out(&out);
    assert_eq!(m["d"][0][2], 2.0);
    assert!(m.get("witnesses").is_none());

    let out = fmetric(&["metrize", &fx.inst, "--witness"]);
    let m = json_out(&out);
    assert_eq!(
        m["witnesses"][1]["chain"],
        serde_json::json!(["a", "b", "c"])
    );

    let out = fmetric(&["metrize", &fx.inst, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "id,a,b,c");
    assert_eq!(lines[1], "a,0,1,2");

    let out = fmetric(&["metrize", &fx.inst, "--format", "csv", "--witness"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cover_emits_json_and_table() {
    let fx = fixture();
    let out = fmetric(&["cover", &fx.inst, "--eps", "1.5", "--metric", "D"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["cover"]["centers"], serde_json::json!(["a", "c"]));
    assert_eq!(
        v["cover"]["balls"][0]["members"],
        serde_json::json!(["a", "b"])
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("cover"));

    let out = fmetric(&[
        "cover", &fx.inst, "--eps", "2.2", "--metric", "d", "--set", "a,c",
    ]);
    let v = json_out(&out);
    assert_eq!(v["cover"]["centers"], serde_json::json!(["a"]));
    assert_eq!(
        v["cover"]["balls"][0]["members"],
        serde_json::json!(["a", "b", "c"])
    );

    let out = fmetric(&["cover", &fx.inst, "--eps", "1", "--set", "a,zz"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tb_check_reports_delta() {
    let fx = fixture();
    let out = fmetric(&["tb-check", &fx.inst, "--eps", "2.2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    let delta = v["sections"][1]["facts"]["delta"].as_f64().unwrap();
    assert!((delta - 2.2 / 3.0).abs() < 1e-12);
}

#[test]
fn cantor_from_file_and_generated() {
    let fx = fixture();
    let fam = write(
        &fx.dir,
        "fam.json",
        r#"{"family": [["a","b","c"],["a","b"],["a"]]}"#,
    );
    let traces = fx.dir.join("traces.csv");
    let out = fmetric(&[
        "cantor",
        &fx.inst,
        "--family",
        fam.to_str().unwrap(),
        "--trace-out",
        traces.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_out(&out)["facts"]["intersection"],
        serde_json::json!(["a"])
    );
    let csv = std::fs::read_to_string(&traces).unwrap();
    assert_eq!(csv.lines().nth(1), Some("0,3,2.5,2"));
    assert_eq!(csv.lines().nth(3), Some("2,1,0,0"));

    let out = fmetric(&[
        "cantor",
        &fx.inst,
        "--generate",
        "--steps",
        "3",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_out(&out)["facts"]["intersection"],
        serde_json::json!(["b"])
    );
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("level,size,diam_D,diam_d"));

    let bad = write(&fx.dir, "bad.json", r#"{"family": [["a"],["a","b"]]}"#);
    let out = fmetric(&["cantor", &fx.inst, "--family", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fip_reports_failing_subfamily() {
    let fx = fixture();
    let fam = write(
        &fx.dir,
        "tri.json",
        r#"{"family": [["a","b"],["b","c"],["a","c"]]}"#,
    );
    let out = fmetric(&["fip", &fx.inst, "--family", fam.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_out(&out);
    assert_eq!(v["facts"]["failing_stage"], 3);
    assert_eq!(v["facts"]["pairwise_nonempty"], true);

    let nested = write(
        &fx.dir,
        "nested.json",
        r#"{"family": [["a","b","c"],["a","b"],["a"]]}"#,
    );
    let out = fmetric(&["fip", &fx.inst, "--family", nested.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn report_json_and_table() {
    let fx = fixture();
    let out = fmetric(&["report", &fx.inst]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["sections"].as_array().unwrap().len(), 6);
    let out = fmetric(&["report", &fx.inst, "--table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("equivalence"));
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let fx = fixture();
    let a = fx.dir.join("a.json");
    let b = fx.dir.join("b.json");
    for p in [&a, &b] {
        let out = fmetric(&[
            "gen",
            "--n",
            "6",
            "--f",
            "neg_inv_sqrt",
            "--calibrate",
            "--seed",
            "9",
            "-o",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        fmetric(&["verify", a.to_str().unwrap()]).status.code(),
        Some(0)
    );

    let out = fmetric(&[
        "gen", "--n", "6", "--f", "ln", "--alpha", "0", "--seed", "1",
    ]);
    let inst: Value = json_out(&out);
    assert_eq!(inst["alpha"], 0.0);
    let c = write(&fx.dir, "c.json", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(
        fmetric(&["verify", c.to_str().unwrap()]).status.code(),
        Some(1)
    );

    assert_eq!(
        fmetric(&["gen", "--n", "3", "--f", "ln", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fmetric(&["gen", "--n", "3", "--f", "exp", "--calibrate"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fmetric(&[
            "gen",
            "--n",
            "3",
            "--f",
            "ln",
            "--calibrate",
            "--dist",
            "uniform:0,1"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn bench_smoke() {
    let out = fmetric(&["bench", "--sizes", "8", "--repeats", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("8,3,"));
    assert_eq!(fmetric(&["bench", "--repeats", "3"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let fx = fixture();
    // -1/t overflows at a subnormal distance
    let p = write(
        &fx.dir,
        "tiny.json",
        r#"{"points":["a","b"],"D":[[0,1e-320],[1e-320,0]],"f":{"name":"neg_reciprocal"},"alpha":0}"#,
    );
    let out = fmetric(&["verify", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not finite"));
}
