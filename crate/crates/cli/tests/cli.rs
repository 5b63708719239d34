use std::process::{Command, Output};

fn gravkerr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gravkerr"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = gravkerr(&["sweep", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("N,chi,y_tilde,bound_fisher,bound_quadrature,bound_sql,bound_squeezed_lossy,validity_metric,valid_flag\n"));
    // 5 default χ values × 65 photon numbers
    assert_eq!(text.lines().count(), 1 + 5 * 65);
}

#[test]
fn bound_json_has_all_methods() {
    let o = gravkerr(&["bound"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in [
        "bound_fisher",
        "bound_quadrature",
        "bound_sql",
        "bound_squeezed_lossy",
    ] {
        assert!(v[key].as_f64().unwrap() > 0.0, "{key}");
    }
    assert!(v["bound_quadrature"].as_f64() >= v["bound_fisher"].as_f64());
}

#[test]
fn qfi_agrees_with_fock_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"probe": {"photon_number": 4, "chi_per_s": 0.1, "omega_rad_per_s": 10}}"#,
    );
    let o = gravkerr(&["qfi", "--config", &cfg, "--tau", "1.0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["relative_difference"].as_f64().unwrap() < 1e-6);
}

#[test]
fn mc_is_reproducible_from_seed() {
    let run = || gravkerr(&["mc", "--trials", "500", "--seed", "11", "--format", "csv"]).stdout;
    let first = run();
    assert_eq!(first, run());
    assert!(String::from_utf8(first).unwrap().contains("seed,11"));
}

#[test]
fn feasibility_reports_power() {
    let o = gravkerr(&["feasibility"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let peak = v["peak_power_w"].as_f64().unwrap();
    assert!((peak / 4e13 - 1.0).abs() < 0.2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(&dir, r#"{"probe": {"omega": 1}}"#);
    assert_eq!(
        gravkerr(&["bound", "--config", &bad]).status.code(),
        Some(2)
    );
    assert_eq!(
        gravkerr(&["bound", "--config", "/no/such/config.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(gravkerr(&["mc", "--trials", "5"]).status.code(), Some(2));
    assert_eq!(
        gravkerr(&["sweep", "--out", "/no/such/dir/out.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(gravkerr(&["nonsense"]).status.code(), Some(2));
}
