use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qstab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compile_then_simulate_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = qstab(
        &[
            "compile", "--code", "surface:3", "--hw", "linear:8x5", "--compiler", "moveless",
            "--ancilla-budget", "1", "--rounds", "2", "-o", "s.txt", "--report", "r.json",
            "--emit-events", "ev.txt", "--dump-mapping", "map.txt",
        ],
        d,
    );
    stdout(&out);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert!(report["shuttles"].as_u64().is_some());
    let total = report["total_us"].as_f64().unwrap();
    assert!(total > 0.0);
    assert!(fs::read_to_string(d.join("ev.txt")).unwrap().lines().count() > 10);
    assert!(fs::read_to_string(d.join("map.txt")).unwrap().contains("after round 1"));

    let sim: serde_json::Value =
        serde_json::from_str(&stdout(&qstab(&["simulate", "s.txt", "--hw", "linear:8x5"], d))).unwrap();
    assert_eq!(sim["total_us"].as_f64().unwrap(), total);
    assert!(stdout(&qstab(&["verify", "s.txt", "--code", "surface:3", "--hw", "linear:8x5"], d)).starts_with("ok"));

    let noise: serde_json::Value = serde_json::from_str(&stdout(&qstab(&["noise", "-p", "1e-3,1e-4", "--report", "r.json"], d))).unwrap();
    assert_eq!(noise.as_array().unwrap().len(), 2);
    assert_eq!(noise[0]["t1"].as_f64().unwrap(), 10.0);
    assert_eq!(noise[1]["t1"].as_f64().unwrap(), 100.0);
}

#[test]
fn verify_rejects_a_tampered_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&qstab(&["compile", "--code", "repetition:3", "--compiler", "mao", "--rounds", "1", "-o", "s.txt"], d));
    let text = fs::read_to_string(d.join("s.txt")).unwrap();
    let tampered: String = text.lines().filter(|l| !l.starts_with("measure")).map(|l| format!("{l}\n")).collect();
    fs::write(d.join("bad.txt"), tampered).unwrap();
    let out = qstab(&["verify", "bad.txt", "--code", "repetition:3"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("round 0"));
}

#[test]
fn invalid_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let zero = qstab(&["compile", "--code", "surface:3", "--compiler", "mao", "--rounds", "0"], d);
    assert!(!zero.status.success());
    assert!(String::from_utf8_lossy(&zero.stderr).contains("round count"));
    let unknown = qstab(&["compile", "--code", "surface:3", "--compiler", "fastest"], d);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(!qstab(&["compile", "--code", "surface:4", "--compiler", "mao"], d).status.success());
    assert!(!qstab(&["compile", "--code", "surface:3", "--compiler", "mao", "--ancilla-budget", "99"], d).status.success());
}

#[test]
fn code_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&qstab(&["gen-code", "color:3", "-o", "c.txt"], d));
    let dump = stdout(&qstab(&["dump-code", "--code", "c.txt"], d));
    assert!(dump.starts_with("c: n=7 m=6"));
    stdout(&qstab(&["compile", "--code", "c.txt", "--compiler", "baseline", "--ancilla-budget", "sweep"], d));
}

#[test]
fn sweep_marks_argmin() {
    let dir = tempfile::tempdir().unwrap();
    let csv = stdout(&qstab(&["sweep", "--code", "surface:3", "--compiler", "baseline"], dir.path()));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r.split(',').nth(9) == Some("1")).count(), 1);
    let one = stdout(&qstab(&["sweep", "--code", "repetition:2", "--compiler", "moveless"], dir.path()));
    assert_eq!(one.lines().count(), 2);
}

#[test]
fn suite_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("m.json"),
        r#"{"codes":["repetition:3","surface:3"],"hardware":["linear","grid"],"budgets":[1,"m"]}"#,
    )
    .unwrap();
    stdout(&qstab(&["suite", "m.json", "-o", "a.csv"], d));
    stdout(&qstab(&["suite", "m.json", "-o", "b.csv"], d));
    let a = fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("code,compiler,budget,rounds,total_us,per_round_us,shuttles,swaps,speedup_vs_baseline_star"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3 * 2);
    fs::write(d.join("empty.json"), r#"{"codes":[]}"#).unwrap();
    assert_eq!(stdout(&qstab(&["suite", "empty.json"], d)).lines().count(), 1);
}
