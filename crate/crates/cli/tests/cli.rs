//! End-to-end tests of the `paulimix` binary: exit codes, file formats,
//! schema validity, determinism, and config handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paulimix"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name)
}

fn assert_valid_against(schema_file: &str, instance_path: &Path) {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path(schema_file)).unwrap()).unwrap();
    let instance: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(instance_path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let errors: Vec<String> = match compiled.validate(&instance) {
        Ok(()) => Vec::new(),
        Err(errs) => errs
            .map(|e| format!("{e} at {}", e.instance_path))
            .collect(),
    };
    assert!(
        errors.is_empty(),
        "{schema_file} validation failed:\n{}",
        errors.join("\n")
    );
}

#[test]
fn classify_equal_three_mix_is_markovian() {
    let third = "0.3333333333333333,0.3333333333333333,0.3333333333333334";
    let out = run(&["classify", "--weights", third, "--c", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("Markovian"));
}

#[test]
fn classify_two_mix_is_non_markovian_on_axis_1() {
    let out = run(&["classify", "--weights", "0,0.75,0.25", "--c", "2"]);
    assert_eq!(out.status.code(), Some(10));
    let text = stdout(&out);
    assert!(text.starts_with("NonMarkovian"));
    assert!(text.contains("axis = 1"));
}

#[test]
fn classify_unequal_three_mix_has_interior_witness() {
    let out = run(&["classify", "--weights", "0.2,0.4,0.4", "--c", "3"]);
    assert_eq!(out.status.code(), Some(10));
    let text = stdout(&out);
    assert!(text.contains("axis = 1"));
    // witness time is strictly inside the window: gamma1(0) > 0 for these weights
    let t: f64 = text
        .split("t = ")
        .nth(1)
        .and_then(|s| s.split(',').next())
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(t > 0.0 && t < 1.5);
}

#[test]
fn classify_rejects_bad_weights_with_field_name() {
    let out = run(&["classify", "--weights", "0.5,0.3,0.1", "--c", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("weights"), "stderr: {err}");
    assert!(err.contains("0.9"), "stderr: {err}");
}

#[test]
fn rates_fig2_csv_has_nonpositive_gamma1() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("rates.csv");
    let out = run(&["rates", "--preset", "fig2", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(!text.contains('\r'), "CSV must use LF line endings");
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,p,pdot,gamma1,gamma2,gamma3");
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols.len(), 6);
        assert!(cols[3] <= 0.0, "gamma1 must be <= 0, got {}", cols[3]);
        rows += 1;
    }
    assert_eq!(rows, 151);

    let verdict: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("rates.verdict.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(verdict["classification"]["verdict"], "NonMarkovian");
}

#[test]
fn rates_fig4_is_markovian() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.json");
    let out = run(&[
        "rates", "--preset", "fig4", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["classification"]["verdict"], "Markovian");
}

#[test]
fn rates_minimal_grid_has_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    let out = run(&[
        "rates", "--preset", "fig5", "--n", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3); // header + 2 data rows
}

#[test]
fn rates_json_validates_against_schema() {
    let dir = tempfile::tempdir().unwrap();
    // both classification shapes: with and without a witness
    for preset in ["fig6", "fig4"] {
        let path = dir.path().join(format!("{preset}.json"));
        let out = run(&[
            "rates", "--preset", preset, "--format", "json", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert_valid_against("rates.schema.json", &path);
    }
}

#[test]
fn pipeline_fig6_reports_non_markovian_axis_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.json");
    let out = run(&[
        "pipeline", "--preset", "fig6", "--sigma", "0.02", "--seed", "7",
        "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["classification_fitted"]["verdict"], "NonMarkovian");
    assert_eq!(doc["classification_fitted"]["witness"]["axis"], 1);
    assert_valid_against("pipeline.schema.json", &path);
}

#[test]
fn pipeline_markovian_preset_validates_against_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.json");
    let out = run(&[
        "pipeline", "--preset", "fig4", "--seed", "11", "--format", "json",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["classification_fitted"]["verdict"], "Markovian");
    assert_valid_against("pipeline.schema.json", &path);
}

#[test]
fn pipeline_noiseless_recovers_rate_constant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.json");
    let out = run(&[
        "pipeline", "--preset", "fig3", "--sigma", "0", "--format", "json",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let c_hat = doc["fit"]["c_hat"].as_f64().unwrap();
    assert!((c_hat - 2.0).abs() < 2e-6 * 2.0, "c_hat = {c_hat}");
}

#[test]
fn pipeline_csv_mode_writes_all_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let out = run(&[
        "pipeline", "--preset", "fig5", "--seed", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["run.csv", "run.rates_fit.csv", "run.rates_theory.csv", "run.summary.json"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,p_hat,residual,fidelity");
    assert_eq!(text.lines().count(), 16); // header + 15 sample points
}

#[test]
fn pipeline_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&[
            "pipeline", "--preset", "fig2", "--sigma", "0.02", "--seed", "42",
            "--format", "json", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{
            "mixture": {"preset": "fig2"},
            "grid": {"t_start": 0.0, "t_end": 1.5, "n": 11},
            "output": {"format": "json"}
        }"#,
    )
    .unwrap();

    // config alone: fig2, 11 points
    let p1 = dir.path().join("from_config.json");
    let out = run(&[
        "rates", "--config", cfg.to_str().unwrap(), "--out",
        p1.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p1).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 11);
    assert_eq!(doc["mixture"]["c"].as_f64().unwrap(), 2.0);

    // flag overrides the preset
    let p2 = dir.path().join("overridden.json");
    let out = run(&[
        "rates", "--config", cfg.to_str().unwrap(), "--preset", "fig5",
        "--out", p2.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p2).unwrap()).unwrap();
    assert_eq!(doc["mixture"]["c"].as_f64().unwrap(), 3.0);
    assert_eq!(doc["classification"]["verdict"], "Markovian");
}

#[test]
fn conflicting_mode_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"mixture": {"preset": "fig2"}, "mode": "theory"}"#,
    )
    .unwrap();
    let out = run(&[
        "pipeline", "--config", cfg.to_str().unwrap(), "--out", "x.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mode"));
}

#[test]
fn missing_mixture_is_a_config_error() {
    let out = run(&["rates", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mixture"));
}

#[test]
fn out_dir_env_var_redirects_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["rates", "--preset", "fig3", "--out", "sub/rates.csv"])
        .env("PAULIMIX_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(dir.path().join("sub/rates.csv").exists());
    assert!(dir.path().join("sub/rates.verdict.json").exists());
}

#[test]
fn tomo_demo_prints_fidelities_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.json");
    let out = run(&[
        "tomo-demo", "--preset", "fig3", "--sigma", "0.02", "--seed", "3",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("three-qubit reconstruction fidelity"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let fid = doc["fidelity_full"].as_f64().unwrap();
    assert!(fid > 0.9 && fid <= 1.0);
    assert_eq!(doc["system_theory"].as_array().unwrap().len(), 2);
}
