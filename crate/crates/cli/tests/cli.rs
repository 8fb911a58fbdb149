use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cascade-stab");

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The shipped internal config with a shorter horizon.
fn short_internal(dir: &Path) -> PathBuf {
    let text = fs::read_to_string(example("internal_reference.json"))
        .unwrap()
        .replace("\"t_final\": 0.5", "\"t_final\": 0.1")
        .replace("\"window\": [0.05, 0.4]", "\"window\": [0.02, 0.08]");
    let path = dir.join("short.json");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn repro_reports_both_criteria() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["repro"], tmp.path());
    let text = stdout(&o);
    assert!(text.contains("criterion 1: PASS"), "{text}");
    assert!(
        text.contains("criterion 2: FAIL (lifting inequality)"),
        "{text}"
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synthesize_exports_certified_internal_controller() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = example("internal_reference.json");
    let o = run(
        &[
            "synthesize",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: CERTIFIED"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("o/controller.json")).unwrap())
            .unwrap();
    assert_eq!(json["actuation"], "internal");
    assert_eq!(json["controller"]["n_modes"], 3);
    assert_eq!(json["certificate"]["passed"], true);
}

#[test]
fn boundary_example_is_not_certified() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = example("boundary_reference.json");
    let o = run(
        &[
            "synthesize",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("[FAIL] lifting inequality"), "{text}");
    assert!(text.contains("[PASS] closed-loop abscissa"), "{text}");
}

#[test]
fn uncontrollable_plant_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(example("internal_reference.json"))
        .unwrap()
        .replace("[1.0, 10.0, 2.0]", "[0.0, 10.0, 2.0]");
    let path = tmp.path().join("bad.json");
    fs::write(&path, text).unwrap();
    let o = run(
        &["synthesize", "--config", path.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("controllability"), "{}", stderr(&o));
}

#[test]
fn rk4_step_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_internal(tmp.path());
    let o = run(
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--integrator",
            "rk4",
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("RK4 stability bound"), "{}", stderr(&o));
}

#[test]
fn simulate_is_deterministic_and_follows_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_internal(tmp.path());
    for dir in ["a", "b"] {
        let o = run(
            &["simulate", "--config", cfg.to_str().unwrap(), "--out", dir],
            tmp.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for file in [
        "norms.csv",
        "controls.csv",
        "field_1.csv",
        "field_3.csv",
        "norms.svg",
        "field_2.svg",
    ] {
        let a = fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = fs::read(tmp.path().join("b").join(file)).unwrap();
        assert!(a == b, "{file} differs between runs");
    }
    let norms = fs::read_to_string(tmp.path().join("a/norms.csv")).unwrap();
    let mut lines = norms.lines();
    assert_eq!(lines.next(), Some("t,z1,z2,z3,z"));
    assert_eq!(lines.count(), 101);
    let controls = fs::read_to_string(tmp.path().join("a/controls.csv")).unwrap();
    assert!(controls.starts_with("t,u1,u2,u3,sum_u\n"));
    let field = fs::read_to_string(tmp.path().join("a/field_1.csv")).unwrap();
    let header: Vec<&str> = field.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 101);
    assert_eq!(header[1], "x=0.0");
}

#[test]
fn n_sim_flag_applies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = example("internal_reference.json");
    let o = run(
        &[
            "synthesize",
            "--config",
            cfg.to_str().unwrap(),
            "--n-sim",
            "20",
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert!(stdout(&o).contains("N_sim = 20"));
    let o = run(
        &[
            "synthesize",
            "--config",
            cfg.to_str().unwrap(),
            "--n-sim",
            "2",
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_records_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = example("boundary_reference.json");
    let args = [
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        "o",
    ];
    let first = run(&args, tmp.path());
    let report = fs::read_to_string(tmp.path().join("o/verify.txt")).unwrap();
    assert!(report.starts_with("seed = 7\n"));
    assert!(report.contains("[PASS] psi projections vs quadrature"));
    assert_eq!(first.status.code(), Some(1));
    let second = run(&args, tmp.path());
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    let o = run(
        &["synthesize", "--config", empty.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
    let o = run(&["simulate"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--config"));
}
