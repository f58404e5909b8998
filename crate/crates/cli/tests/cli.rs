use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const COEFFS: &str = r#"
[coefficients]
alpha1 = 0.0
alpha2 = -1.0
alpha3 = 2.0
alpha4 = 2.0
alpha5 = 0.0
alpha6 = 1.0
gamma = 0.5
reynolds = 10.0
k1 = 0.25
k2 = 0.3
k3 = 0.2
"#;

fn elsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, format!("[grid]\nn = 16\n{COEFFS}{body}")).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn verdict_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .to_string()
}

#[test]
fn check_coefficients_prints_the_derived_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let o = elsim(&["check-coefficients", "--config", &cfg]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("gamma1 = 3\n"), "{text}");
    assert!(text.contains("gamma2 = 1\n"), "{text}");
    assert!(
        text.contains("beta = (0.3333333333333333, 2, 0.6666666666666667)"),
        "{text}"
    );
    assert!(text.contains("admissible (2-D)"), "{text}");
}

#[test]
fn zero_length_run_writes_one_row_and_initial_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[solver]\ndt = 0.01\nt_end = 0.0\n[initial]\npreset = \"twist\"\namplitude = 0.3\n",
    );
    let out = dir.path().join("out");
    let o = elsim(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ledger = fs::read_to_string(out.join("ledger.csv")).unwrap();
    assert_eq!(ledger.lines().count(), 2);
    let snaps: Vec<_> = fs::read_dir(out.join("snapshots")).unwrap().collect();
    assert_eq!(snaps.len(), 1);
    assert!(out.join("config.toml").is_file());
    assert!(verdict_value(&fs::read_to_string(out.join("verdict.txt")).unwrap(), "status") == "ok");
}

#[test]
fn certify_reproduces_the_run_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[solver]\ndt = 0.005\nt_end = 0.05\n[initial]\npreset = \"twist\"\namplitude = 0.5\n\
         [initial.flow]\namplitude = 0.5\n[output]\nsnapshot_stride = 5\n[monitors]\npoints = [[1.0, 2.0]]\n",
    );
    let out = dir.path().join("out");
    let o = elsim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let verdict = fs::read_to_string(out.join("verdict.txt")).unwrap();
    // initial, steps 5 and 10
    assert_eq!(fs::read_dir(out.join("snapshots")).unwrap().count(), 3);
    assert!(out.join("local_0.csv").is_file());
    verdict_value(&verdict, "sup_ratio[0]").parse::<f64>().unwrap();

    let c = elsim(&["certify-ledger", out.join("ledger.csv").to_str().unwrap()]);
    assert!(c.status.success(), "{}", stdout(&c));
    assert_eq!(
        verdict_value(&stdout(&c), "energy_law_residual"),
        verdict_value(&verdict, "energy_law_residual")
    );
}

#[test]
fn certify_flags_a_tampered_residual_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[solver]\ndt = 0.01\nt_end = 0.03\n[initial]\npreset = \"twist\"\namplitude = 0.5\n",
    );
    let out = dir.path().join("out");
    assert!(
        elsim(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"])
            .status
            .success()
    );
    let path = out.join("ledger.csv");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cols: Vec<String> = lines[2].split(',').map(String::from).collect();
    cols[7] = "1.0e0".into();
    lines[2] = cols.join(",");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let c = elsim(&["certify-ledger", path.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(4));
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "foo = 1\n");
    let o = elsim(&["check-coefficients", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("foo"));

    let path = dir.path().join("parodi.toml");
    fs::write(&path, COEFFS.replace("alpha6 = 1.0", "alpha6 = 2.0")).unwrap();
    let o = elsim(&["check-coefficients", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Parodi"));

    let cfg = write_config(
        dir.path(),
        "[solver]\ndt = 0.01\nt_end = 0.1\n[initial]\npreset = \"vortex\"\n",
    );
    assert_eq!(elsim(&["run", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_three_with_partial_ledger() {
    let dir = tempfile::tempdir().unwrap();
    // a large step on a steep twist violates the unit constraint at once
    let cfg = write_config(
        dir.path(),
        "[solver]\ndt = 5.0\nt_end = 50.0\n[initial]\npreset = \"twist\"\namplitude = 1.5\n",
    );
    let out = dir.path().join("out");
    let o = elsim(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let verdict = fs::read_to_string(out.join("verdict.txt")).unwrap();
    assert!(verdict_value(&verdict, "status").starts_with("failed"));
    assert!(fs::read_to_string(out.join("ledger.csv")).unwrap().lines().count() >= 2);
}

#[test]
fn snapshot_preset_restarts_from_a_written_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[solver]\ndt = 0.01\nt_end = 0.02\n[initial]\npreset = \"bump\"\namplitude = 0.8\nwidth = 1.0\n",
    );
    let out = dir.path().join("first");
    assert!(
        elsim(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"])
            .status
            .success()
    );
    let snap = out.join("snapshots").join("step_0000002.bin");
    assert!(snap.is_file());
    let cfg2 = write_config(
        dir.path(),
        &format!(
            "[solver]\ndt = 0.01\nt_end = 0.03\n[initial]\npreset = \"snapshot\"\npath = {:?}\n",
            snap.to_str().unwrap()
        ),
    );
    let out2 = dir.path().join("second");
    let o = elsim(&["run", "--config", &cfg2, "--out", out2.to_str().unwrap(), "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ledger = fs::read_to_string(out2.join("ledger.csv")).unwrap();
    let t0: f64 = ledger
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((t0 - 0.02).abs() < 1e-15);
}

#[test]
fn verify_identities_is_deterministic() {
    let a = elsim(&["verify-identities", "--seed", "5"]);
    let b = elsim(&["verify-identities", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).matches("PASS").count(), 6);
}
