//! End-to-end subprocess tests of the `snrfuse` binary: exit codes, output
//! formats, determinism, and the power-unit consistency of `estimate`.

use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn snrfuse() -> Command {
    Command::new(env!("CARGO_BIN_EXE_snrfuse"))
}

fn run(args: &[&str]) -> Output {
    snrfuse().args(args).output().unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_passes_on_the_default_config() {
    let out = run(&["validate"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 5, "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn validate_fails_at_an_unachievable_tolerance() {
    let out = run(&["validate", "--tol", "1e-16"]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_value = write_file(dir.path(), "bad.json", r#"{"joint_prior": {"alpha1": 1.0, "beta1": 9.1, "phi1": 0.0, "phi2": 0.3}}"#);
    let out = run(&["validate", "--config", &bad_value]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("alpha1"), "stderr: {}", stderr_of(&out));

    let unknown_field = write_file(dir.path(), "unknown.json", r#"{"trails": 100}"#);
    let out = run(&["validate", "--config", &unknown_field]);
    assert_eq!(out.status.code(), Some(2));

    let malformed = write_file(dir.path(), "malformed.json", "{not json");
    let out = run(&["validate", "--config", &malformed]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_exit_3() {
    let out = run(&["validate", "--config", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr_of(&out));

    let out = run(&["estimate", "/definitely/not/here.txt"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_is_deterministic_and_respects_method_selection() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "config.json",
        r#"{"trials": 300, "vector_len": 16, "seed": 9}"#,
    );
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let status = snrfuse()
            .args(["simulate", "--config", &config, "--method", "joint,separate", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same seed must give identical CSV bytes");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,trials,detection_error,detection_error_se,signal_mse,signal_mse_se,\
         noise_mse,noise_mse_se,bayes_risk,bayes_risk_se"
    );
    let methods: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["joint", "separate"], "exactly the requested methods, in order");

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("b.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["config"]["trials"], 300);
    assert_eq!(manifest["rows"], 2);
}

#[test]
fn simulate_rejects_bad_sweeps_and_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let base: Vec<String> = vec![
        "simulate".into(),
        "--out".into(),
        out.to_str().unwrap().into(),
    ];

    let bad_sweep = snrfuse()
        .args(&base)
        .args(["--sweep", "bogus_param=1,2"])
        .output()
        .unwrap();
    assert_eq!(bad_sweep.status.code(), Some(2));
    assert!(stderr_of(&bad_sweep).contains("bogus_param"));

    let bad_method = snrfuse()
        .args(&base)
        .args(["--method", "magic"])
        .output()
        .unwrap();
    assert_eq!(bad_method.status.code(), Some(2));
    assert!(stderr_of(&bad_method).contains("magic"));

    let bad_value = snrfuse()
        .args(&base)
        .args(["--sweep", "beta0=fast"])
        .output()
        .unwrap();
    assert_eq!(bad_value.status.code(), Some(2));
}

#[test]
fn estimate_emits_a_complete_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "obs.txt", "1.5 -2.0\n0.5\n-1.0 3.0 0.25\n");
    let out = run(&["estimate", &data]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let record: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout must be one JSON record");
    assert_eq!(record["method"], "joint");
    assert_eq!(record["n"], 6);
    let t = record["t"].as_f64().unwrap();
    let expected_t = 1.5f64 * 1.5 + 4.0 + 0.25 + 1.0 + 9.0 + 0.0625;
    assert!((t - expected_t).abs() < 1e-12, "t = {t}");
    for key in ["decision", "s_hat", "v_hat", "log_lambda1", "log_lambda0"] {
        assert!(!record[key].is_null(), "missing {key}");
    }
    assert!(record["s_hat"].as_f64().unwrap().is_finite());
}

#[test]
fn estimate_reads_stdin_and_honors_method() {
    let mut child = snrfuse()
        .args(["estimate", "--method", "separate"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"4.0 4.0 4.0 4.0\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["method"], "separate");
    // t = 64 on n = 4 is far above any plausible pure-noise level under the
    // reference priors
    assert_eq!(record["decision"], "gamma1");
}

#[test]
fn estimate_rejects_bad_data_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();

    let with_nan = write_file(dir.path(), "nan.txt", "0.5\nNaN\n1.0\n");
    let out = run(&["estimate", &with_nan]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("line 2"), "stderr: {}", stderr_of(&out));

    let with_word = write_file(dir.path(), "word.txt", "0.5 0.25\n1.0 zebra\n");
    let out = run(&["estimate", &with_word]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("line 2"));
    assert!(stderr_of(&out).contains("zebra"));

    let empty = write_file(dir.path(), "empty.txt", "  \n\n");
    let out = run(&["estimate", &empty]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["estimate", &with_nan, "--method", "wizard"]);
    assert_eq!(out.status.code(), Some(2));
}

/// Scaling the samples by `k` scales the observed energy by `k²`; restating
/// both prior scales in the new unit (`beta -> k² beta`) must scale the
/// reported power estimates by exactly `k²`.
#[test]
fn estimate_is_consistent_under_a_change_of_power_units() {
    let dir = tempfile::tempdir().unwrap();
    let samples = [1.25f64, -0.5, 2.0, 0.75, -1.5, 0.25, 1.0, -2.25];
    let k = 4.0f64;

    let base_data = write_file(
        dir.path(),
        "base.txt",
        &samples.map(|x| x.to_string()).join(" "),
    );
    let scaled_data = write_file(
        dir.path(),
        "scaled.txt",
        &samples.map(|x| (k * x).to_string()).join(" "),
    );
    let scaled_config = write_file(
        dir.path(),
        "scaled.json",
        &format!(
            r#"{{"noise_prior": {{"alpha0": 3.0, "beta0": {}}},
               "joint_prior": {{"alpha1": 3.0, "beta1": {}, "phi1": 0.0,
                                "phi2": 0.39269908169872414}}}}"#,
            k * k,
            k * k * 9.1
        ),
    );

    let base = run(&["estimate", &base_data, "--method", "separate"]);
    assert!(base.status.success(), "stderr: {}", stderr_of(&base));
    let scaled = run(&["estimate", &scaled_data, "--method", "separate", "--config", &scaled_config]);
    assert!(scaled.status.success(), "stderr: {}", stderr_of(&scaled));

    let base: serde_json::Value = serde_json::from_slice(&base.stdout).unwrap();
    let scaled: serde_json::Value = serde_json::from_slice(&scaled.stdout).unwrap();
    assert_eq!(base["decision"], scaled["decision"]);
    for key in ["s_hat", "v_hat"] {
        let b = base[key].as_f64().unwrap();
        let s = scaled[key].as_f64().unwrap();
        assert!(
            (s - k * k * b).abs() <= 1e-10 * (k * k * b).abs(),
            "{key}: {s} vs {}",
            k * k * b
        );
    }
    let l_base = base["log_lambda1"].as_f64().unwrap();
    let l_scaled = scaled["log_lambda1"].as_f64().unwrap();
    assert!((l_base - l_scaled).abs() <= 1e-10 * l_base.abs().max(1.0));
}

#[test]
fn estimate_writes_to_a_file_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "obs.txt", "0.5 1.5 -0.5\n");
    let out_path = dir.path().join("record.json");
    let out = snrfuse()
        .args(["estimate", &data, "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&out_path).unwrap().trim()).unwrap();
    assert_eq!(record["n"], 3);
}
