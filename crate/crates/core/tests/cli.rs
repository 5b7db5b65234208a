use std::process::{Command, Output};

fn mzmtele(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzmtele")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn zero_noise_config(dir: &std::path::Path) -> std::path::PathBuf {
    let mut v: serde_json::Value = serde_json::from_str(majorana_teleport::config::DEFAULT_CONFIG).unwrap();
    v["sigma_g"] = serde_json::json!(vec![0.0; 8]);
    v["sigma_cz"] = serde_json::json!(vec![0.0; 7]);
    v["c_d"] = 0.0.into();
    let path = dir.join("zero.json");
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

#[test]
fn braids_lists_six_rows() {
    let o = mzmtele(&["braids"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with('(')).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().any(|r| r.starts_with("(1,r)(2,l)") && r.contains("(1 + i*X2X3)/sqrt2") && r.contains("sqrt(X1X2)")));
    assert!(rows.iter().any(|r| r.starts_with("(1,l)(1,r)") && r.contains("sqrtZ1")));
}

#[test]
fn spectrum_lines() {
    let o = mzmtele(&["spectrum", "--kind", "kitaev", "--n", "2", "--t", "1"]);
    assert_eq!(stdout(&o).lines().last().unwrap(), "0 (\u{d7}2), 1 (\u{d7}2)");
    let o = mzmtele(&["spectrum", "--kind", "trivial", "--n", "2"]);
    assert_eq!(stdout(&o).lines().last().unwrap(), "0, 1 (\u{d7}2), 2");
    let o = mzmtele(&["spectrum", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_with_a_count() {
    let o = mzmtele(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap().to_string();
    let n: usize = last.split_whitespace().next().unwrap().parse().unwrap();
    assert!(n >= 12, "{last}");
}

#[test]
fn zero_noise_teleport_reports_unit_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = zero_noise_config(dir.path());
    let out = dir.path().join("out");
    let o = mzmtele(&["teleport", "--config", cfg.to_str().unwrap(), "--draws", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("fidelity.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!((cells[1], cells[3]), ("1.000000", "1.000000"), "{line}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let text = std::fs::read_to_string(&cfg).unwrap();
    assert_eq!(summary["config_sha256"], majorana_teleport::config::sha256_hex(text.as_bytes()));
    assert_eq!(summary["seed"], 2024);
    let density: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("density.json")).unwrap()).unwrap();
    assert_eq!(density["states"].as_array().unwrap().len(), 6);
}

#[test]
fn single_input_and_policy_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = zero_noise_config(dir.path());
    let o = mzmtele(&[
        "teleport", "--config", cfg.to_str().unwrap(), "--draws", "2", "--input", "+i", "--postselect", "ns",
        "--out", dir.path().join("o").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "input,f_ns,f_ns_stderr,draws,seed");
    assert!(lines[1].starts_with("+i,1.000000"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"sigma_g\": []}").unwrap();
    let o = mzmtele(&["teleport", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = mzmtele(&["teleport", "--config", "/does/not/exist.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mzmtele(&["teleport", "--draws", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = mzmtele(&["teleport", "--input", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tomo_of_prepared_input() {
    let o = mzmtele(&["tomo", "--stage", "input", "--input", "+i"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("bloch (+0.0000, +1.0000, +0.0000)"), "{out}");
    assert!(out.contains("fidelity 1.000000"));
    let o = mzmtele(&["tomo", "--stage", "input", "--input", "0", "--shots", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
