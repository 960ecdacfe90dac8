use std::fs;
use std::path::Path;
use std::process::Command;

fn chainsdn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainsdn"))
}

fn run_case(args: &[&str], out: &Path) -> std::process::Output {
    chainsdn()
        .arg("run")
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

#[test]
fn case_a_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_case(&["--scenario", "case_a"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verifications_failed 0"));
    for f in ["metrics.csv", "events.csv", "chain.log", "summary.txt"] {
        assert!(dir.path().join(f).is_file());
    }
}

#[test]
fn tampered_scenario_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let shown = chainsdn().args(["show", "--scenario", "case_a"]).output().unwrap();
    let text = String::from_utf8(shown.stdout).unwrap().replace(
        "event t=1 kind=arp_exchange",
        "event t=1 kind=tamper command=ArpReply flip_byte=5\nevent t=1 kind=arp_exchange",
    );
    let file = dir.path().join("tampered.scn");
    fs::write(&file, text).unwrap();
    let out = run_case(&["--scenario", file.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    let events = fs::read_to_string(dir.path().join("out/events.csv")).unwrap();
    assert_eq!(events.matches("ImmediateIntegrityFailure").count(), 1);
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_case(
        &[
            "--scenario",
            "case_b",
            "--ticks",
            "10",
            "--verify-mode",
            "deferred",
            "--verify-delay",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    // two best-effort flows over ten ticks plus the header
    assert_eq!(metrics.lines().count(), 21);
}

#[test]
fn bad_inputs_fail() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run_case(&["--scenario", "/nonexistent.scn"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    let bad_mode = run_case(&["--scenario", "case_a", "--verify-mode", "sometimes"], dir.path());
    assert!(!bad_mode.status.success());
    let empty = dir.path().join("empty.scn");
    fs::write(&empty, "").unwrap();
    let out = run_case(&["--scenario", empty.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing topology"));
}
