use std::path::Path;
use std::process::{Command, Output};

fn vanhove(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vanhove"));
    cmd.args(args);
    if let Some(path) = config {
        cmd.arg("--config").arg(path);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TWO_SOURCES: &str = "[model]\ng = 1.0\ne0 = 1.0\n\n\
[[sources]]\npos = [0.0, 0.0, 0.0]\nalpha = -0.1\nbeta = 1.0\ngamma = -1.1\ndelta = 1.0\n\n\
[[sources]]\npos = [1.0, 0.0, 0.0]\ntheta = 0.4\nalpha = 1.0\nbeta = 0.5\ngamma = 0.0\ndelta = 1.0\n";

#[test]
fn missing_e0_is_a_config_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[model]\ng = 1.0\n");
    let out = vanhove(&["multisource"], Some(&cfg));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.e0"));
}

#[test]
fn coincident_sources_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = TWO_SOURCES.replace("[1.0, 0.0, 0.0]", "[0.0, 0.0, 0.0]");
    let cfg = write(dir.path(), "c.toml", &text);
    let out = vanhove(&["multisource"], Some(&cfg));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coincide"));
}

#[test]
fn unknown_keys_and_bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[model]\ng = 1.0\ne0 = 1.0\ncoupling = 3\n");
    let out = vanhove(&["identities"], Some(&cfg));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.coupling"));

    assert_eq!(vanhove(&["spectrum", "--format", "xml"], None).status.code(), Some(2));
    assert_eq!(vanhove(&["identities", "--format", "csv"], None).status.code(), Some(2));
}

#[test]
fn identities_pass_and_are_reproducible() {
    let first = vanhove(&["identities", "--seed", "42", "--trials", "50", "--quiet"], None);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 12);
    let second = vanhove(&["identities", "--seed", "42", "--trials", "50", "--quiet"], None);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn multisource_report_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", TWO_SOURCES);
    let out_path = dir.path().join("out.json");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vanhove"));
    let status = cmd
        .args(["multisource", "--quiet", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["s_matrix"].as_array().unwrap().len(), 2);
    assert!(v["im_part"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["eigenvalues"].is_array());

    let again = vanhove(&["multisource", "--quiet"], Some(&cfg));
    assert_eq!(again.stdout, std::fs::read(&out_path).unwrap());
}

#[test]
fn json_config_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"model": {"g": 1.0, "e0": 2.0}, "sources": [{"pos": [0, 0, 0], "alpha": -0.05, "beta": 1, "gamma": -1.05, "delta": 1}]}"#,
    );
    let out = vanhove(&["multisource", "--quiet"], Some(&cfg));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let lambda = v["eigenvalues"][0]["lambda"].as_f64().unwrap();
    let expect = 16.0 * std::f64::consts::PI.powi(2) * 0.05_f64.powi(2);
    assert!((lambda - expect).abs() < 1e-10 * expect);
}

#[test]
fn small_flow_csv_has_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[model]\ng = 1.0\ne0 = 1.0\n[grid]\nlambda_max = 10.0\nnodes = 6\n[fock]\nmax_particles = 3\n[flow]\nlambda_list = [2.0, 10.0]\n",
    );
    let out = vanhove(&["renorm-flow", "--quiet"], Some(&cfg));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,e_shift_closed,e_shift_quad,e0_computed,e1_computed,renormalized_ground,gap,ground_overlap,dim,iters,tail_budget"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').count() == 11));
}
