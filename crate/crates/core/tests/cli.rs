use std::path::Path;
use std::process::{Command, Output};

fn nonmarkov(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonmarkov"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn nonmarkov")
}

fn write_config(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

const DEPHASING: &str = r#""dephasing": {"alpha1": 1, "alpha2": 1, "omega_c": 0.01, "r": 3,
    "t1s": 0, "t1f": 2.5, "t2s": 2.5, "t2f": 5, "env_kind": "classical"}"#;

#[test]
fn phase_factor_run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        "pf.json",
        &format!(r#"{{"mode": "phase_factors", {DEPHASING}, "grid": {{"t_start": 0, "t_end": 5, "dt": 0.01}}, "output_path": "pf.csv"}}"#),
    );
    let out = nonmarkov(dir.path(), &["run", "pf.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("pf.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 502);
    assert_eq!(lines[1], "0.0,1.0,1.0,1.0,1.0,1.0,1.0,classical");
    assert!(lines[501].starts_with("5.0,"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "bad.json", r#"{"mode": "cmi", "output_path": "x.csv"}"#);
    assert_eq!(nonmarkov(dir.path(), &["run", "bad.json"]).status.code(), Some(1));
    assert_eq!(nonmarkov(dir.path(), &["run", "missing.json"]).status.code(), Some(1));
    write_config(dir.path(), "junk.json", "{not json");
    assert_eq!(nonmarkov(dir.path(), &["run", "junk.json"]).status.code(), Some(1));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn insufficient_truncation_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        "cmi.json",
        &format!(
            r#"{{"mode": "cmi", {DEPHASING}, "discrete": {{"n_modes": 1, "n_max": 4}},
                "grid": {{"t_start": 0, "t_end": 5, "dt": 0.5}}, "output_path": "cmi.csv"}}"#
        ),
    );
    let out = nonmarkov(dir.path(), &["run", "cmi.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("cmi.csv").exists());
}

#[test]
fn cmi_and_measures_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let dephasing = r#""dephasing": {"alpha1": 20, "alpha2": 20, "omega_c": 0.01, "r": 0.5,
        "t1s": 0, "t1f": 2.5, "t2s": 2.5, "t2f": 5, "env_kind": "entangled"}"#;
    for mode in ["cmi", "measures"] {
        write_config(
            dir.path(),
            &format!("{mode}.json"),
            &format!(
                r#"{{"mode": "{mode}", {dephasing}, "discrete": {{"n_modes": 1, "n_max": 8}},
                    "grid": {{"t_start": 0, "t_end": 5, "dt": 0.1}}, "output_path": "{mode}.csv"}}"#
            ),
        );
        let out = nonmarkov(dir.path(), &["run", &format!("{mode}.json")]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let cmi = std::fs::read_to_string(dir.path().join("cmi.csv")).unwrap();
    assert!(cmi.starts_with("t,I_A_E1_S,I_A_E2_S,I_A_E1E2_S,env_kind\n0.0,"));
    assert_eq!(cmi.lines().count(), 52);
    let measures = std::fs::read_to_string(dir.path().join("measures.csv")).unwrap();
    let names: Vec<_> = measures.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["BLP/entangled", "tBLP/entangled", "LFS/entangled", "N1/entangled"]);
}

#[test]
fn check_prints_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = nonmarkov(dir.path(), &["check", "--seed", "5", "--samples", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["identity"]["seed"], 5);
    assert!(report["special_functions"]["checks"].as_array().unwrap().len() >= 3);
}
