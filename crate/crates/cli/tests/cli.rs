use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_circle-nbody");

fn run(args: &[&str], out_dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .env("CIRCLE_NBODY_OUT", out_dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

const SUTHERLAND_PAIR: &str = r#"
n_particles = 2
t_end = 10.0
n_samples = 101

[model]
kind = "sutherland"
g = 1.0

[initial]
theta = [0.0, 2.0]
theta_dot = [0.5, -0.3]
"#;

#[test]
fn simulate_sutherland_pair() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "pair.toml", SUTHERLAND_PAIR);
    let o = run(&["simulate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let summary = json(&dir.path().join("pair.summary.json"));
    assert!(summary["momentum_drift"].as_f64().unwrap() < 1e-8);
    assert!(summary["energy_drift"].as_f64().unwrap() < 1e-8);
    assert!(summary["steps"]["accepted"].as_u64().unwrap() > 0);

    let (header, rows) = read_csv(&dir.path().join("pair.trajectory.csv"));
    assert_eq!(header, ["t", "theta_1", "theta_2", "theta_dot_1", "theta_dot_2"]);
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0], [0.0, 0.0, 2.0, 0.5, -0.3]);
    assert_eq!(rows[100][0], 10.0);

    let (header, rows) = read_csv(&dir.path().join("pair.invariants.csv"));
    assert_eq!(header, ["t", "momentum", "energy", "drift"]);
    assert!(rows.iter().all(|r| r[3] < 1e-8));
}

#[test]
fn outputs_are_deterministic_and_full_precision() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "pair.toml", SUTHERLAND_PAIR);
    let path = dir.path().join("pair.trajectory.csv");
    assert_eq!(code(&run(&["simulate", cfg.to_str().unwrap()], dir.path())), 0);
    let first = std::fs::read(&path).unwrap();
    assert_eq!(code(&run(&["simulate", cfg.to_str().unwrap()], dir.path())), 0);
    assert_eq!(first, std::fs::read(&path).unwrap());

    let text = String::from_utf8(first).unwrap();
    let value = text.lines().nth(5).unwrap().split(',').nth(1).unwrap();
    let mantissa = value.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
    // No temporary files are left behind.
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().all(|n| n.starts_with("pair.")), "{names:?}");
}

#[test]
fn zero_mass_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.toml",
        r#"
        n_particles = 2
        t_end = 1.0
        n_samples = 11
        [model]
        kind = "many_body"
        mu = [0.0, 1.0]
        eta = [0.0, 0.0]
        [initial]
        theta = [0.0, 1.0]
        theta_dot = [0.0, 0.0]
        "#,
    );
    let o = run(&["simulate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("model.mu[0]"), "{}", stderr(&o));
}

#[test]
fn malformed_config_reports_location() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.toml", "n_particles = 2\nt_end = \n");
    let o = run(&["simulate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run(&["simulate", "/nonexistent/config.toml"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn collision_initial_data_exits_with_singularity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "hit.toml", &SUTHERLAND_PAIR.replace("[0.0, 2.0]", "[1.0, 1.0]"));
    let o = run(&["simulate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("collide"));
}

#[test]
fn tangent_singularity_exits_with_singularity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "tan.toml",
        r#"
        n_particles = 2
        t_end = 1.0
        n_samples = 11
        [model]
        kind = "goldfish_tan"
        [initial]
        theta = [1.5707963267938965, 0.3]  # pi/2 - 1e-12
        theta_dot = [0.0, 0.1]
        "#,
    );
    for command in ["simulate", "compare"] {
        let o = run(&[command, cfg.to_str().unwrap()], dir.path());
        assert_eq!(code(&o), 2, "{command}: {}", stderr(&o));
        assert!(stderr(&o).contains("tan singularity"), "{}", stderr(&o));
    }
}

#[test]
fn circle_form_writes_positions() {
    let dir = TempDir::new().unwrap();
    let text = SUTHERLAND_PAIR.replace("n_samples = 101", "n_samples = 101\nform = \"circle\"");
    let cfg = write_config(&dir, "vec.toml", &text);
    let o = run(&["simulate", cfg.to_str().unwrap(), "--svg"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("vec.trajectory.csv"));
    assert_eq!(header[5..], ["x_1", "y_1", "x_2", "y_2"]);
    for r in &rows {
        for k in 0..2 {
            assert!(((r[5 + 2 * k].powi(2) + r[6 + 2 * k].powi(2)).sqrt() - 1.0).abs() < 1e-9);
            assert!((r[1 + k].cos() - r[5 + 2 * k]).abs() < 1e-9);
        }
    }
    let summary = json(&dir.path().join("vec.summary.json"));
    assert!(summary["max_constraint_residual"].as_f64().unwrap() < 1e-9);
    let svg = std::fs::read_to_string(dir.path().join("vec.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn relative_output_dir_resolves_against_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "pair.toml", &format!("output_dir = \"results\"\n{SUTHERLAND_PAIR}"));
    let o = Command::new(BIN)
        .args(["simulate", cfg.to_str().unwrap()])
        .env_remove("CIRCLE_NBODY_OUT")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("results/pair.summary.json").exists());
}

#[test]
fn random_initial_data_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let text = r#"
        n_particles = 3
        t_end = 2.0
        n_samples = 21
        [model]
        kind = "two_body"
        mu = [1.0, 1.2, 0.9]
        eta = [0.1, 0.0, -0.2]
        [initial.random]
        seed = 11
        velocity_spread = 0.2
        min_separation = 0.3
        "#;
    let cfg = write_config(&dir, "rand.toml", text);
    assert_eq!(code(&run(&["simulate", cfg.to_str().unwrap()], dir.path())), 0);
    let a = json(&dir.path().join("rand.summary.json"));
    assert_eq!(code(&run(&["simulate", cfg.to_str().unwrap()], dir.path())), 0);
    let b = json(&dir.path().join("rand.summary.json"));
    assert_eq!(a["initial"], b["initial"]);
    assert!(a["max_invariant_drift"].as_f64().unwrap() < 1e-6);

    let (header, _) = read_csv(&dir.path().join("rand.invariants.csv"));
    assert_eq!(header.len(), 1 + 2 * 3 + 1);
}

#[test]
fn compare_many_body_three_ways() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "mb.toml",
        r#"
        n_particles = 2
        t_end = 1.0
        n_samples = 51
        [model]
        kind = "many_body"
        mu = [1.0, 1.4]
        eta = [0.3, -0.2]
        [initial]
        theta = [0.2, 1.9]
        theta_dot = [0.5, -0.4]
        "#,
    );
    let o = run(&["compare", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = json(&dir.path().join("mb.compare.json"));
    assert_eq!(summary["methods"], serde_json::json!(["angle", "vector", "algebraic"]));
    assert_eq!(summary["max_deviation"].as_array().unwrap().len(), 3);
    assert!(summary["worst_deviation"].as_f64().unwrap() < 1e-6);
    let (header, rows) = read_csv(&dir.path().join("mb.compare.csv"));
    assert!(header.contains(&"algebraic_theta_2".to_string()));
    assert_eq!(rows.len(), 51);
}

#[test]
fn compare_two_body_has_no_algebraic_column() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "tb.toml",
        r#"
        n_particles = 3
        t_end = 1.0
        n_samples = 51
        [model]
        kind = "two_body"
        mu = [1.0, 1.4, 0.7]
        eta = [0.3, -0.2, 0.1]
        [initial]
        theta = [0.2, 2.2, -2.0]
        theta_dot = [0.2, -0.1, 0.05]
        "#,
    );
    let o = run(&["compare", cfg.to_str().unwrap(), "--svg"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = json(&dir.path().join("tb.compare.json"));
    assert_eq!(summary["methods"], serde_json::json!(["angle", "vector"]));
    assert!(summary["worst_deviation"].as_f64().unwrap() < 1e-7);
    let (header, _) = read_csv(&dir.path().join("tb.compare.csv"));
    assert!(!header.iter().any(|h| h.starts_with("algebraic")));
    assert!(dir.path().join("tb.svg").exists());
}

#[test]
fn verify_suites() {
    let dir = TempDir::new().unwrap();
    for suite in ["interp", "isochrony", "algebraic"] {
        let o = run(&["verify", suite], dir.path());
        assert_eq!(code(&o), 0, "{suite}: {}", stdout(&o));
        let out = stdout(&o);
        assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 2, "{out}");
        assert!(!out.contains("FAIL"));
    }
    let o = run(&["verify", "isochrony"], dir.path());
    assert!(stdout(&o).contains("recurrence at period pi"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = run(&["verify", "nonsense"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("interp"));
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&run(&[], dir.path())), 1);
    assert_eq!(code(&run(&["--help"], dir.path())), 0);
}
