use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilattice")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn coeffs_csv_schema_and_exit_code() {
    let o = run(&["coeffs", "--family", "charlier", "--a", "3", "--beta", "1/3", "--lattice", "bi", "--t", "10", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,a_sq_painleve,b_painleve,a_sq_oracle,b_oracle,abs_diff_a_sq,abs_diff_b"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows[0][2].starts_with("1.839746621268012629008685816386802696"));
    for r in &rows {
        assert_eq!(r.len(), 7);
        assert_eq!(r[1], r[3]);
        assert_eq!(r[2], r[4]);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["coeffs", "--family", "meixner", "--a", "3", "--beta", "2/3", "--gamma", "9/10", "--lattice", "bi", "--t", "2", "--n", "6", "--format", "json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["config"]["gamma"], "9/10");
    assert_eq!(v["config"]["t"], "2");
    assert_eq!(v["columns"]["b_oracle"].as_array().unwrap().len(), 7);
    assert_eq!(v["certified_through"], 6);
}

#[test]
fn decimals_are_read_exactly() {
    let a = run(&["coeffs", "--family", "charlier", "--a", "3", "--beta", "0.5", "--n", "3"]);
    let b = run(&["coeffs", "--family", "charlier", "--a", "3", "--beta", "1/2", "--n", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = run(&["b0-scan", "--family", "charlier", "--a", "3", "--beta", "3/2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let ts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ts, ["0", "1/10", "1", "10", "100", "inf"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("decreasing"));
}

#[test]
fn verify_reports_every_check() {
    let o = run(&["verify", "--family", "meixner", "--a", "3", "--beta", "2/3", "--gamma", "9/10", "--lattice", "shifted", "--n", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("check,passed,residual,tolerance,note\n"));
    for name in ["ladder R_n + T_n = 1", "ladder r_n + t_n = 0", "shift covariance"] {
        assert!(text.lines().any(|l| l.starts_with(name) && l.contains(",true,")), "{name}");
    }
}

#[test]
fn perturbed_b0_fails_with_divergence_index() {
    let o = run(&["verify", "--family", "charlier", "--a", "3", "--beta", "1/3", "--n", "20", "--perturb-b0", "0.001"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains(",false,"));
    assert!(text.contains("first |Δ| ≥ 1 at n = 7"), "{text}");
}

#[test]
fn special_tables() {
    let o = run(&["special", "--family", "charlier", "--a", "4", "--beta", "1/2", "--n", "20", "--print-digits", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert_eq!(last, "20,20.0000000000,12.0000000000,20.0000000000,12.0000000000,20.0000000000,12.0000000000");

    let o = run(&["special", "--family", "charlier", "--a", "3", "--beta", "1", "--lattice", "bi", "--t", "5", "--n", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("n,c,dp2_residual,b_residual\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bi-lattice vs plain oracle"));
}

#[test]
fn exit_codes() {
    let usage = run(&["coeffs", "--family", "charlier", "--a", "3"]);
    assert_eq!(usage.status.code(), Some(2));
    let invalid = run(&["coeffs", "--family", "charlier", "--a", "-2", "--beta", "1/3"]);
    assert_eq!(invalid.status.code(), Some(2));
    let parse = run(&["coeffs", "--family", "charlier", "--a", "3", "--beta", "one"]);
    assert_eq!(parse.status.code(), Some(2));
    let no_t = run(&["coeffs", "--family", "charlier", "--a", "3", "--beta", "1/3", "--lattice", "bi"]);
    assert_eq!(no_t.status.code(), Some(2));
    let degenerate = run(&["coeffs", "--family", "meixner", "--a", "3", "--beta", "2/3", "--gamma", "2/3"]);
    assert_eq!(degenerate.status.code(), Some(3));
    let special = run(&["special", "--family", "charlier", "--a", "3", "--beta", "1/3"]);
    assert_eq!(special.status.code(), Some(2));
}
