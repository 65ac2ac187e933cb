use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const SUM: &str = r#"{"arity":2,"kind":"multiaffine","terms":[{"exp":[1,0],"re":1,"im":0},{"exp":[0,1],"re":1,"im":0}]}"#;
// x1 x2 + 1 vanishes at (i, i)
const UNSTABLE: &str = r#"{"arity":2,"kind":"multiaffine","terms":[{"exp":[1,1],"re":1,"im":0},{"exp":[0,0],"re":1,"im":0}]}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stablekit"));
    c.env_remove("STABLEKIT_SEED");
    c
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(c: &mut Command) -> (i32, Output) {
    let out = c.output().unwrap();
    (out.status.code().unwrap(), out)
}

fn check(input: &Path) -> Command {
    let mut c = bin();
    c.arg("check").arg("--input").arg(input);
    c
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "sum.json", SUM);
    let bad = write(&dir, "bad.json", UNSTABLE);
    assert_eq!(run(&mut check(&sum)).0, 0);
    assert_eq!(run(check(&sum).arg("--require-certified")).0, 2);
    assert_eq!(run(&mut check(&bad)).0, 1);
    assert_eq!(run(&mut check(&dir.path().join("missing.json"))).0, 3);
    let garbage = write(&dir, "garbage.json", "{\"arity\": 2");
    assert_eq!(run(&mut check(&garbage)).0, 3);
    assert_eq!(run(bin().arg("no-such-command")).0, 3);
    let (code, _) = run(bin().args(["--require-certified", "delta-check", "--input"]).arg(&sum));
    assert_eq!(code, 2);
    assert_eq!(run(bin().arg("delta-check").arg("--input").arg(&bad)).0, 1);
}

#[test]
fn json_report_shape() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", UNSTABLE);
    let (code, out) = run(check(&bad).arg("--json"));
    assert_eq!(code, 1);
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["command"], "check");
    assert_eq!(r["seed"], 0x5EED);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
    assert_eq!(r["verdicts"][0]["outcome"], "fail");
    let witness = &r["result"]["verdict"]["witness"];
    assert_eq!(witness["type"], "point");
    assert!(witness["residual"].as_f64().unwrap() <= 1e-8);
    assert!(r["timings"]["total_ms"].as_f64().is_some());
}

#[test]
fn identical_runs_agree_outside_timings() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "sum.json", SUM);
    let strip = |out: &Output| {
        let mut r = report(out);
        r.as_object_mut().unwrap().remove("timings");
        r
    };
    let a = run(check(&sum).args(["--json", "--seed", "42"])).1;
    let b = run(check(&sum).args(["--json", "--seed", "42"])).1;
    assert_eq!(strip(&a), strip(&b));
    let plain_a = run(check(&sum).args(["--seed", "42"])).1;
    let plain_b = run(check(&sum).args(["--seed", "42"])).1;
    assert_eq!(plain_a.stdout, plain_b.stdout);
}

#[test]
fn seed_flag_beats_environment() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "sum.json", SUM);
    let seed_of = |c: &mut Command| report(&run(c.arg("--json")).1)["seed"].as_u64().unwrap();
    assert_eq!(seed_of(&mut check(&sum)), 0x5EED);
    assert_eq!(seed_of(check(&sum).env("STABLEKIT_SEED", "7")), 7);
    assert_eq!(seed_of(check(&sum).env("STABLEKIT_SEED", "7").args(["--seed", "0x10"])), 16);
    assert_eq!(run(check(&sum).env("STABLEKIT_SEED", "seven")).0, 3);
}

#[test]
fn sep_run_reports_per_time() {
    let (code, out) = run(bin().args(["sep-run", "--sites", "3", "--edges", "1-2:1,2-3:0.5", "--init", "1,0,1", "--times", "0.5,2", "--json"]));
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["outcome"] == "pass"));
}
