use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ddcd(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddcd")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/configs")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_accepts_bundled_configs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["arc_linear.toml", "arc_implicit.toml", "axial_data.toml"] {
        let o = ddcd(&["validate", &config(name)], dir.path());
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert!(stdout(&o).starts_with("valid:"));
    }
}

#[test]
fn invalid_config_exits_with_2_and_lists_every_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("arc_linear.toml"))
        .unwrap()
        .replace("dt = 0.005", "dt = 0.0")
        .replace("elements = 20", "elements = 0");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    for cmd in ["validate", "run"] {
        let o = ddcd(&[cmd, path.to_str().unwrap()], dir.path());
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        let err = stderr(&o);
        assert!(err.contains("time.dt") && err.contains("geometry.elements"), "{err}");
    }
    let o = ddcd(&["validate", "does-not-exist.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn preset_runs_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex2");
    let o = ddcd(
        &["preset", "ex2", "--dt", "0.01", "--t-end", "0.05", "--out-dir", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["trajectory.csv", "elements.csv", "diagnostics.csv", "summary.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let o = ddcd(&["preset", "ex1", "--dt", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("arc_linear.toml"))
        .unwrap()
        .replace("t_end = 4.0", "t_end = 0.02")
        .replace("[output]", "[solver]\nmax_iterations = 1\n\n[output]");
    let path = dir.path().join("stiff.toml");
    std::fs::write(&path, text).unwrap();
    let o = ddcd(&["run", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let out: PathBuf = dir.path().join("out/arc_linear");
    assert!(out.join("failure.json").is_file());
    assert!(out.join("diagnostics.csv").is_file());
}

#[test]
fn self_check_passes_and_mutation_is_localized() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = ddcd(&["self-check", "--samples", "4", "--json", json.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    let o = ddcd(&["self-check", "--samples", "4", "--perturb-strain-jacobian", "1e-3"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let failed: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("FAIL"))
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect();
    assert_eq!(failed, ["strain_jacobian", "strain_jacobian_linearity"]);
}

#[test]
fn dcnlp_compares_against_reference_law() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddcd(&["dcnlp", &config("axial_data.toml")], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = dir.path().join("out/axial_data/dcnlp_report.csv");
    let rows = std::fs::read_to_string(report).unwrap().lines().count();
    assert_eq!(rows, 41);

    let o = ddcd(&["dcnlp", &config("arc_linear.toml")], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
