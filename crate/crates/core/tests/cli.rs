use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_rqlsha");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("RQLSHA_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn out_dir_env_var_is_honoured() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("nested");
    let o = run(&out, &["reproduce", "T5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("t5.csv").exists());
}

#[test]
fn unknown_report_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["reproduce", "T9"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown report"));
}

#[test]
fn generate_then_analyze() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["generate", "--adder=csa4", "--storage=delayline", "--spares=1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("design CSA4+DL+1spare"));
    let dir = d.path().join("csa4_dl_1spare");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let stages: usize = manifest["shapes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["stages"].as_array().unwrap().len())
        .sum();
    assert_eq!(stages, 129);
    let net = dir.join("stage_shape_0.net");
    let a = run(d.path(), &["analyze", net.to_str().unwrap()]);
    assert!(a.status.success());
    assert!(stdout(&a).contains("critical path"));

    let bad = run(d.path(), &["generate", "--adder=rca", "--redundant-mux"]);
    assert!(!bad.status.success());
}

#[test]
fn simulate_finds_the_genesis_nonce() {
    let d = tempfile::tempdir().unwrap();
    let job = d.path().join("job.json");
    std::fs::write(
        &job,
        r#"{"header": "0100000000000000000000000000000000000000000000000000000000000000000000003ba3edfd7a7b12b27ac72c3e67768f617fc81bc3888a51323a9fb8aa4b1e5e4a29ab5f49ffff001d00000000",
            "nonce_start": 2083236700, "nonce_end": 2083236900, "target": "100000000000000000000000000000000000000000000000000000000"}"#,
    )
    .unwrap();
    let o = run(d.path(), &["simulate", "--job", job.to_str().unwrap(), "--trace", "--adder", "csa4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("found nonce 2083236893"), "{s}");
    assert!(s.contains("alpha 0."));
    assert!(d.path().join("activity.csv").exists());
}

#[test]
fn btwc_and_reliability_commands() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["btwc", "--ic-grid", "38u,30u,22u,14u,10u,6u"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("chosen Ic 10.00 uA  efficiency gain 3.8000x"));
    let o = run(d.path(), &["reliability", "--variant", "baseline", "--pgrid", "1e-8,1e-7"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next().unwrap(), "p_gate,p_fail,half_width,variant,method,trials");
    assert_eq!(s.lines().count(), 3);
}
