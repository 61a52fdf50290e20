use std::path::Path;
use std::process::{Command, Output};

fn chd(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chd"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn validate_reference_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = chd(&["validate"], dir.path());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("[ok  ] A > 2chi^2/(D R1)"), "{text}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("chi.json"), r#"{"params": {"chemotaxis": 10.0}}"#).unwrap();
    let o = chd(&["validate", "--config", "chi.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("A > 2chi^2/(D R1)"));

    std::fs::write(dir.path().join("k.json"), r#"{"params": {"permeability": -1.0}}"#).unwrap();
    assert_eq!(code(&chd(&["run", "--config", "k.json", "--out", "o"], dir.path())), 2);

    std::fs::write(dir.path().join("u.json"), r#"{"modes": 8, "typo": 1}"#).unwrap();
    assert_eq!(code(&chd(&["validate", "--config", "u.json", "--strict"], dir.path())), 2);
    let lenient = chd(&["validate", "--config", "u.json"], dir.path());
    assert_eq!(code(&lenient), 0);
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("typo"));

    assert_eq!(code(&chd(&["run"], dir.path())), 2);
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&chd(&["validate", "--config", "missing.json"], dir.path())), 4);
    assert_eq!(code(&chd(&["resume", "--out", "nowhere"], dir.path())), 4);
}

#[test]
fn step_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // Explicit RK4 far beyond its stability bound blows up.
    std::fs::write(
        dir.path().join("rk.json"),
        r#"{"modes": 8, "t_end": 0.5, "stepper": {"dt": 1e-3, "scheme": "rk4-explicit", "rk4_safety": 1e6}}"#,
    )
    .unwrap();
    let o = chd(&["run", "--config", "rk.json", "--out", "o"], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("o/checkpoint.json").exists());
}

#[test]
fn zero_final_time_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t0.json"), r#"{"modes": 8, "t_end": 0.0}"#).unwrap();
    let o = chd(&["run", "--config", "t0.json", "--out", "o"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("o/diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn run_then_resume_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"modes": 6, "t_end": 0.01, "initial_phi": {"kind": "random_seeded", "mean": 0.0, "amplitude": 0.3, "cutoff": 4}}"#,
    )
    .unwrap();
    let args = |out: &'static str, seed: &'static str| ["run", "--config", "c.json", "--out", out, "--seed", seed, "--cadence", "3"];
    assert_eq!(code(&chd(&args("a", "1"), dir.path())), 0);
    assert_eq!(code(&chd(&args("b", "1"), dir.path())), 0);
    assert_eq!(code(&chd(&args("c", "2"), dir.path())), 0);
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a/diagnostics.csv"), read("b/diagnostics.csv"));
    assert_ne!(read("a/diagnostics.csv"), read("c/diagnostics.csv"));
    let rows = String::from_utf8(read("a/diagnostics.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 5);
    // A finished run resumes to itself.
    assert_eq!(code(&chd(&["resume", "--out", "a"], dir.path())), 0);
    assert_eq!(read("a/diagnostics.csv"), read("b/diagnostics.csv"));
}

#[test]
fn sweeps_and_mms() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.json"), r#"{"modes": 6, "t_end": 0.02}"#).unwrap();
    let o = chd(&["sweep-k", "--config", "s.json", "--out", "k", "--values", "1,0.25,0.0625"], dir.path());
    assert_eq!(code(&o), 0);
    let table = String::from_utf8_lossy(&o.stdout).to_string();
    assert!(table.starts_with("K,b,"));
    assert_eq!(table, std::fs::read_to_string(dir.path().join("k/sweep.csv")).unwrap());
    assert!(dir.path().join("k/limit/final.bin").exists());

    let o = chd(&["sweep-chi", "--config", "s.json", "--values", "0.5,0.25,0.125"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 4);

    assert_eq!(code(&chd(&["sweep-k", "--config", "s.json", "--values", "0.25,1"], dir.path())), 2);

    let o = chd(&["mms", "--modes", "3,4", "--dts", "1e-2,5e-3,2.5e-3"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("time slope"));
}
