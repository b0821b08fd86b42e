use serde_json::Value;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::NamedTempFile;

fn scene_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], scene: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gencourant"))
        .arg(args[0])
        .arg(scene)
        .args(&args[1..])
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const FLAT: &str = r#"{"schema_version": 1,
    "chart": {"dim": 2, "coords": ["x", "y"], "seed": 4, "points": 6},
    "background": {"g": {"x,x": "1", "y,y": "1"}, "phi": "0"}}"#;

const RANDOM2: &str = r#"{"schema_version": 1,
    "chart": {"dim": 2, "coords": ["x", "y"], "seed": 9, "points": 6},
    "background": {
        "g": {"x,x": "1 + 0.13*x - 0.08*x*y + 0.05*y^2", "x,y": "0.04 - 0.07*x^2 + 0.02*y", "y,y": "0.96 + 0.11*y - 0.06*x*y"},
        "B": {"x,y": "1.4 + 0.12*x*y - 0.09*x^2 + 0.15*y"},
        "phi": "0.3*x - 0.21*x*y + 0.17*y^2"}}"#;

const ODD: &str = r#"{"schema_version": 1,
    "chart": {"dim": 3, "coords": ["x", "y", "z"], "seed": 2, "points": 4},
    "background": {"g": {"x,x": "1", "y,y": "1", "z,z": "1"}, "B": {"x,y": "1"}}}"#;

#[test]
fn central_on_flat_scene_passes_with_zero_residuals() {
    let f = scene_file(FLAT);
    let out = run(&["central"], f.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["schema_version"], 1);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["residual"], 0.0, "{c}");
    }
}

#[test]
fn all_on_random_scene_passes_and_is_off_shell() {
    let f = scene_file(RANDOM2);
    let out = run(&["all"], f.path());
    let r = report(&out);
    let failed: Vec<_> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] != true).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(r["verdicts"]["beta"], "off-shell");
    assert_eq!(r["verdicts"]["symplectic"], "off-shell");
    assert_eq!(r["verdicts"]["equivalence"], "equivalent: both off-shell");
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn equivalence_on_odd_dimension_is_a_command_error() {
    let f = scene_file(ODD);
    for cmd in ["equivalence", "symplectic"] {
        let out = run(&[cmd], f.path());
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("singular") && err.contains("odd dimension"), "{err}");
    }
    let out = run(&["all"], f.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["verdicts"]["symplectic"].as_str().unwrap().starts_with("not applicable"));
}

#[test]
fn input_errors_exit_with_two() {
    let f = scene_file(&FLAT.replace("\"x,x\": \"1\"", "\"x,x\": \"x^\""));
    let out = run(&["central"], f.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset 2"));

    let f = scene_file(&FLAT.replace("\"y,y\": \"1\"", "\"y,y\": \"-1\""));
    let out = run(&["central"], f.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not positive definite"));

    let f = scene_file("{ not json");
    assert_eq!(run(&["beta"], f.path()).status.code(), Some(2));
}

#[test]
fn failing_check_exits_with_one_and_names_the_point() {
    let f = scene_file(RANDOM2);
    // Rounding leaves residuals of order 1e-15, which a zero tolerance rejects.
    let out = run(&["central", "--tol-sym", "0"], f.path());
    let r = report(&out);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(r["pass"], false);
    for c in r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false) {
        assert_eq!(c["point"].as_array().unwrap().len(), 2);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL central."));
}

#[test]
fn reports_are_deterministic_up_to_timing() {
    let f = scene_file(RANDOM2);
    let strip = |o: &Output| {
        let mut v = report(o);
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = run(&["curvature", "--seed", "21"], f.path());
    let b = run(&["curvature", "--seed", "21"], f.path());
    assert_eq!(strip(&a), strip(&b));
    let c = run(&["curvature", "--seed", "22"], f.path());
    assert_ne!(strip(&a), strip(&c));
    assert_eq!(report(&a)["scene"]["seed"], 21);
}

#[test]
fn out_flag_writes_the_report() {
    let f = scene_file(FLAT);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["axioms", "--out", path.to_str().unwrap(), "--points", "3"], f.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "axioms");
    assert_eq!(r["scene"]["points"], 3);
}

#[test]
fn policy_flag_controls_invalid_parameters() {
    // A 3-tensor skew in its last pair with a nonzero cyclic sum needs n >= 3.
    let text = ODD.replace(
        r#""B": {"x,y": "1"}}"#,
        r#""B": {"x,y": "1"}}, "connection": {"W": {"x,y,z": "1 + y"}}"#,
    );
    let f = scene_file(&text);
    let out = run(&["torsion", "--policy", "project"], f.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report(&out)["checks"].as_array().unwrap().iter().any(|c| c["name"] == "params.torsion"));
    let out = run(&["torsion", "--policy", "reject"], f.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cyclic"));
}
