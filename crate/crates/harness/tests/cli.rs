use std::process::Command;

fn covmc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_covmc"))
}

#[test]
fn list_shows_every_preset() {
    let out = covmc().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["smoke", "table1", "table8"] {
        assert!(text.lines().any(|l| l.starts_with(id)));
    }
}

#[test]
fn run_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let status = covmc()
        .args(["run", "--experiment", "smoke", "--n", "500", "--seed", "9", "--format", "csv", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("config,"));
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        let out = covmc()
            .args(["run", "--experiment", "table8", "--n", "3000", "--format", "csv"])
            .env("COVMC_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("8"));
}

#[test]
fn spec_files_are_accepted_by_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.toml");
    let spec = include_str!("../presets/smoke.toml").replace("steps = [10]", "steps = [3, 4]");
    std::fs::write(&path, spec).unwrap();
    let out = covmc().args(["run", "--format", "csv", "--experiment"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn spec_errors_exit_with_2() {
    let code = |args: &[&str]| covmc().args(args).output().unwrap().status.code();
    assert_eq!(code(&["run", "--experiment", "no-such-table"]), Some(2));
    assert_eq!(code(&["run", "--experiment", "smoke", "--n", "10"]), Some(2));
    assert_eq!(code(&["run", "--experiment", "smoke", "--format", "xml"]), Some(2));
    let out = covmc().args(["run", "--experiment", "smoke"]).env("COVMC_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    // A level so far in the tail that the exact gradient underflows to zero.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tail.toml");
    let spec = include_str!("../presets/smoke.toml").replace("strike = 100.0", "strike = 1e300");
    std::fs::write(&path, spec).unwrap();
    let out = covmc().args(["run", "--experiment"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
