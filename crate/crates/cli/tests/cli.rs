use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_rho-maximal");

const DINI: &str = r#"{"schema_version":1,"domain":{"d":1,"L":8,"N":64},
 "a":{"family":"power","exponent":2},"b":{"family":"power","exponent":2},"eta":{"family":"power","p":1}}"#;

const EXPERIMENT: &str = r#"{"schema_version":1,"domain":{"d":1,"L":4,"N":32},"battery":{"random":3},
 "weights":[{"family":"power","delta":0.5}]}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn dini_check_reports_constant() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", DINI);
    let out = run(dir.path(), &["dini-check", "-c", "c.json", "-o", "out"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("out/dini_check.json"));
    let c = report["constant"].as_f64().unwrap();
    assert!((c - 0.794).abs() < 0.01, "{c}");
    assert_eq!(report["verdict"], "PASS");
    assert!(dir.path().join("out/dini_check.meta.json").exists());
}

#[test]
fn failing_verdict_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", DINI);
    let out = run(
        dir.path(),
        &[
            "dini-check",
            "-c",
            "c.json",
            "-o",
            "out",
            "--set",
            r#"eta={"family":"power","p":2}"#,
            "--set",
            r#"a={"family":"power","exponent":1}"#,
            "--set",
            r#"b={"family":"power","exponent":1}"#,
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&dir.path().join("out/dini_check.json"))["verdict"], "FAIL");
}

#[test]
fn malformed_config_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", "{\"schema_version\":1,\n\"domain\":{\"d\":1,\"L\":8,\"N\":64},\n\"bogus\":3}\n");
    let out = run(dir.path(), &["weak-type", "-c", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    write(dir.path(), "broken.json", "{\"schema_version\":1,\n\"domain\":");
    assert_eq!(run(dir.path(), &["covering", "-c", "broken.json"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["covering", "-c", "missing.json"]).status.code(), Some(2));
    write(dir.path(), "v2.json", r#"{"schema_version":2,"domain":{"d":1,"L":8,"N":64}}"#);
    assert_eq!(run(dir.path(), &["covering", "-c", "v2.json"]).status.code(), Some(2));
}

#[test]
fn bad_override_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", EXPERIMENT);
    for set in ["theta", "theta=-1", "nonsense=1"] {
        let out = run(dir.path(), &["weak-type", "-c", "c.json", "--set", set]);
        assert_eq!(out.status.code(), Some(2), "{set}");
    }
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["selftest", "-o", "st"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&dir.path().join("st/selftest.json"))["pass"], true);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", EXPERIMENT);
    for out in ["a", "b"] {
        let o = run(dir.path(), &["weak-type", "-c", "c.json", "-o", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["weak_type.json", "weak_type.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("a/weak_type.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("experiment,case_id,lhs,rhs,ratio,N,verdict"));
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", EXPERIMENT);
    let out = Command::new(BIN)
        .current_dir(dir.path())
        .env("RHO_MAXIMAL_THREADS", "2")
        .args(["covering", "-c", "c.json", "-o", "out"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("out/covering.meta.json"))["threads"], 2);
    assert_eq!(json(&dir.path().join("out/covering.json"))["covers_all"], true);
    let out = run(dir.path(), &["--threads", "0", "covering", "-c", "c.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn primitives_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", EXPERIMENT);
    for (cmd, file) in [
        ("maximal-eval", "maximal_eval.csv"),
        ("weights-estimate", "weights_estimate.json"),
        ("validate-rho", "validate_rho.json"),
        ("strong-type", "strong_type.csv"),
    ] {
        let out = run(dir.path(), &[cmd, "-c", "c.json", "-o", "out"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join("out").join(file).exists(), "{cmd}");
    }
    // 32 points per function, three functions, one header line.
    let csv = std::fs::read_to_string(dir.path().join("out/maximal_eval.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 32);
}

#[test]
fn fefferman_stein_needs_growth_pair() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", EXPERIMENT);
    assert_eq!(run(dir.path(), &["modular-fs", "-c", "c.json"]).status.code(), Some(2));
    // A failing growth condition refuses the run: FAIL report, exit 3.
    let cfg = r#"{"schema_version":1,"domain":{"d":1,"L":4,"N":32},"battery":{"random":2},"sigma":1,
      "eta":{"family":"power","p":2},"a":{"family":"power","exponent":1},"b":{"family":"power","exponent":1}}"#;
    write(dir.path(), "fs.json", cfg);
    let out = run(dir.path(), &["modular-fs", "-c", "fs.json", "-o", "out"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&dir.path().join("out/modular_fs.json"))["verdict"], "FAIL");
    let out = run(dir.path(), &["norm-fs", "--unweighted", "-c", "fs.json", "-o", "out", "--set", "override_dini=true"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/unweighted_norm.csv").exists());
}
